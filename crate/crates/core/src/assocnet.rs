//! Auto-associative two-layer networks with Hebbian weights.
//!
//! Weights are `W = (1/n)·Σₖ pₖ·pₖᵀ` with the diagonal kept. They are held
//! as the integer sums `Σₖ pₖᵢ·pₖⱼ`; the positive `1/n` factor never changes
//! the sign of an activation, so retrieval is computed exactly in integers.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fraction_count;
use crate::pattern::BipolarPattern;

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentNetwork {
    n: usize,
    /// Row-major Hebbian sums; the real weight is `sums[i*n+j] / n`.
    sums: Vec<i32>,
    stored: Vec<BipolarPattern>,
    damage_fraction: f64,
    masked: Vec<bool>,
}

impl ComponentNetwork {
    /// Trains an undamaged, unmasked network on `patterns`.
    pub fn train(patterns: &[BipolarPattern]) -> Result<Self> {
        let first = patterns
            .first()
            .ok_or(Error::Training("no patterns to train on"))?;
        let n = first.len();
        if patterns.iter().any(|p| p.len() != n) {
            return Err(Error::Training("training patterns have mixed lengths"));
        }
        let mut sums = vec![0i32; n * n];
        for p in patterns {
            let u = p.units();
            for i in 0..n {
                let row = &mut sums[i * n..(i + 1) * n];
                for (w, &uj) in row.iter_mut().zip(u) {
                    *w += i32::from(u[i] * uj);
                }
            }
        }
        Ok(Self {
            n,
            sums,
            stored: patterns.to_vec(),
            damage_fraction: 0.0,
            masked: vec![false; n],
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn stored(&self) -> &[BipolarPattern] {
        &self.stored
    }

    pub fn damage_fraction(&self) -> f64 {
        self.damage_fraction
    }

    /// The real-valued weight `Wᵢⱼ`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        f64::from(self.sums[i * self.n + j]) / self.n as f64
    }

    /// The integer Hebbian sum behind `Wᵢⱼ` (i.e. `n·Wᵢⱼ`).
    pub fn weight_sum(&self, i: usize, j: usize) -> i32 {
        self.sums[i * self.n + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.weight_sum(i, j) == self.weight_sum(j, i)))
    }

    pub fn is_masked(&self, i: usize) -> bool {
        self.masked[i]
    }

    pub fn masked_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.masked[i]).collect()
    }

    /// Integer input sums `Σⱼ n·Wᵢⱼ·probeⱼ` over unmasked inputs `j`.
    pub fn activations(&self, probe: &BipolarPattern) -> Result<Vec<i64>> {
        self.check_probe(probe)?;
        let u = probe.units();
        Ok((0..self.n)
            .map(|i| {
                let row = &self.sums[i * self.n..(i + 1) * self.n];
                row.iter()
                    .zip(u)
                    .zip(&self.masked)
                    .filter(|(_, &m)| !m)
                    .map(|((&w, &x), _)| i64::from(w) * i64::from(x))
                    .sum()
            })
            .collect())
    }

    /// Output sign of unit `i` for input sum `activation`; `sgn(0) = +1` and
    /// masked outputs are forced to `+1`.
    pub(crate) fn output_unit(&self, i: usize, activation: i64) -> bool {
        self.masked[i] || activation >= 0
    }

    /// One synchronous pass from the input layer to the exit layer.
    pub fn retrieve_once(&self, probe: &BipolarPattern) -> Result<BipolarPattern> {
        let acts = self.activations(probe)?;
        BipolarPattern::from_bools(
            acts.iter()
                .enumerate()
                .map(|(i, &a)| self.output_unit(i, a)),
        )
    }

    /// Zeroes `⌊d·n(n+1)/2⌋` uniformly chosen unordered weight pairs.
    pub fn damage<R: Rng + ?Sized>(&self, d: f64, rng: &mut R) -> Result<Self> {
        self.damage_protected(d, &[], rng)
    }

    /// As [`damage`](Self::damage), but pairs `{i, j}` lying entirely
    /// inside `protected` keep their weights; the count is `⌊d·eligible⌋`.
    pub fn damage_protected<R: Rng + ?Sized>(
        &self,
        d: f64,
        protected: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        check_fraction("d", d)?;
        let keep = self.protected_flags(protected)?;
        let n = self.n;
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !(keep[i] && keep[j]))
            .collect();
        let k = fraction_count(d, pairs.len());
        let mut out = self.clone();
        for idx in index::sample(rng, pairs.len(), k) {
            let (i, j) = pairs[idx];
            out.sums[i * self.n + j] = 0;
            out.sums[j * self.n + i] = 0;
        }
        out.damage_fraction = d;
        Ok(out)
    }

    /// Marks `⌊fraction·n⌋` uniformly chosen units as deactivated.
    pub fn apply_mask<R: Rng + ?Sized>(&self, fraction: f64, rng: &mut R) -> Result<Self> {
        self.apply_mask_protected(fraction, &[], rng)
    }

    /// As [`apply_mask`](Self::apply_mask), choosing only among units
    /// outside `protected`; the count is `⌊fraction·eligible⌋`.
    pub fn apply_mask_protected<R: Rng + ?Sized>(
        &self,
        fraction: f64,
        protected: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        check_fraction("mask fraction", fraction)?;
        let free = self.unprotected(protected)?;
        let k = fraction_count(fraction, free.len());
        let mut out = self.clone();
        out.masked = vec![false; self.n];
        for idx in index::sample(rng, free.len(), k) {
            out.masked[free[idx]] = true;
        }
        Ok(out)
    }

    /// Weight matrix as rows of decimal numbers, row-major.
    pub fn weights_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{}", self.weight(i, j));
            }
            s.push('\n');
        }
        s
    }

    fn protected_flags(&self, protected: &[usize]) -> Result<Vec<bool>> {
        let mut flags = vec![false; self.n];
        for &i in protected {
            crate::pattern::check_index(i, self.n)?;
            flags[i] = true;
        }
        Ok(flags)
    }

    fn unprotected(&self, protected: &[usize]) -> Result<Vec<usize>> {
        let flags = self.protected_flags(protected)?;
        Ok((0..self.n).filter(|&i| !flags[i]).collect())
    }

    fn check_probe(&self, probe: &BipolarPattern) -> Result<()> {
        if probe.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: probe.len(),
            });
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn with_zeroed_rows_cols(&self, indices: &[usize]) -> Self {
        let mut out = self.clone();
        for &m in indices {
            for k in 0..self.n {
                out.sums[m * self.n + k] = 0;
                out.sums[k * self.n + m] = 0;
            }
        }
        out
    }
}

pub(crate) fn check_fraction(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Parameter { name, value });
    }
    Ok(())
}
