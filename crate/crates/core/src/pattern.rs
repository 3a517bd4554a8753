//! Bipolar spike patterns and named slots over them.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// A fixed-length vector of `+1`/`-1` units.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipolarPattern {
    units: Vec<i8>,
}

impl BipolarPattern {
    pub fn new(units: Vec<i8>) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::InvalidLength);
        }
        if let Some(bad) = units.iter().find(|&&u| u != 1 && u != -1) {
            return Err(Error::PatternText(alloc::format!(
                "unit value {bad} is not +1 or -1"
            )));
        }
        Ok(Self { units })
    }

    /// Builds a pattern from booleans, `true` meaning `+1`.
    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Result<Self> {
        Self::new(bits.into_iter().map(|b| if b { 1 } else { -1 }).collect())
    }

    pub fn all_plus(n: usize) -> Result<Self> {
        Self::new(alloc::vec![1; n])
    }

    /// Draws each unit independently and uniformly from `{+1, -1}`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLength);
        }
        Ok(Self {
            units: (0..n)
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn units(&self) -> &[i8] {
        &self.units
    }

    pub fn get(&self, i: usize) -> i8 {
        self.units[i]
    }

    pub fn negate(&self) -> Self {
        Self {
            units: self.units.iter().map(|u| -u).collect(),
        }
    }

    /// Returns a copy with the units at `indices` sign-flipped.
    pub fn flipped(&self, indices: &[usize]) -> Result<Self> {
        let mut units = self.units.clone();
        for &i in indices {
            check_index(i, units.len())?;
            units[i] = -units[i];
        }
        Ok(Self { units })
    }

    /// Dot product `Σ aᵢ·bᵢ`, in `[-N, N]`.
    pub fn overlap(&self, other: &Self) -> Result<i64> {
        self.check_len(other.len())?;
        Ok(self
            .units
            .iter()
            .zip(&other.units)
            .map(|(&a, &b)| i64::from(a * b))
            .sum())
    }

    /// Number of positions where the patterns differ.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        self.check_len(other.len())?;
        Ok(self
            .units
            .iter()
            .zip(&other.units)
            .filter(|(a, b)| a != b)
            .count())
    }

    pub(crate) fn check_len(&self, found: usize) -> Result<()> {
        if found != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index >= len {
        return Err(Error::IndexOutOfRange { index, len });
    }
    Ok(())
}

impl fmt::Display for BipolarPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &u in &self.units {
            f.write_str(if u > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for BipolarPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let units = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::PatternText(alloc::format!(
                    "character {other:?} is not '+' or '-'"
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(units)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for BipolarPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for BipolarPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Named, pairwise-disjoint index ranges over a pattern of fixed length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SlotMap {
    len: usize,
    slots: BTreeMap<String, Range<usize>>,
}

impl SlotMap {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            slots: BTreeMap::new(),
        }
    }

    pub fn new<'a>(
        len: usize,
        slots: impl IntoIterator<Item = (&'a str, Range<usize>)>,
    ) -> Result<Self> {
        let mut map = Self::empty(len);
        for (name, range) in slots {
            map.insert(name, range)?;
        }
        Ok(map)
    }

    pub fn insert(&mut self, name: &str, range: Range<usize>) -> Result<()> {
        if range.start >= range.end || range.end > self.len {
            return Err(Error::SlotMap(alloc::format!(
                "slot {name:?} range {}..{} is empty or exceeds length {}",
                range.start,
                range.end,
                self.len
            )));
        }
        if self.slots.contains_key(name) {
            return Err(Error::SlotMap(alloc::format!("duplicate slot {name:?}")));
        }
        if let Some((other, _)) = self
            .slots
            .iter()
            .find(|(_, r)| r.start < range.end && range.start < r.end)
        {
            return Err(Error::SlotMap(alloc::format!(
                "slot {name:?} overlaps slot {other:?}"
            )));
        }
        self.slots.insert(name.to_string(), range);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<Range<usize>> {
        self.slots.get(name).cloned()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Range<usize>)> {
        self.slots.iter().map(|(k, r)| (k.as_str(), r.clone()))
    }

    /// Union of the indices of the named slots.
    pub fn indices_of(&self, names: &[String]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for name in names {
            let range = self
                .get(name)
                .ok_or_else(|| Error::SlotMap(alloc::format!("unknown slot {name:?}")))?;
            out.extend(range);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// For every slot, whether `output` equals `reference` on all of its indices.
pub fn slot_match(
    output: &BipolarPattern,
    reference: &BipolarPattern,
    slots: &SlotMap,
) -> Result<BTreeMap<String, bool>> {
    output.check_len(reference.len())?;
    if slots.len() != output.len() {
        return Err(Error::Dimension {
            expected: output.len(),
            found: slots.len(),
        });
    }
    Ok(slots
        .iter()
        .map(|(name, range)| {
            let matched = range.clone().all(|i| output.units[i] == reference.units[i]);
            (name.to_string(), matched)
        })
        .collect())
}
