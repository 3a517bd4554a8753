//! Retrieval attempts, the metamemory comparator, TOT classification and
//! chronometry.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::assocnet::{check_fraction, ComponentNetwork};
use crate::error::{Error, Result};
use crate::fraction_count;
use crate::lexicon::{select_node, Component, Lexicon, PerComponent, PrimingState};
use crate::pattern::{check_index, slot_match, BipolarPattern};

/// Spike and inter-probe durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chronometry {
    spike_ms: f64,
    interval_ms: f64,
}

impl Chronometry {
    pub fn new(spike_ms: f64, interval_ms: f64) -> Result<Self> {
        if !spike_ms.is_finite() || spike_ms <= 0.0 {
            return Err(Error::Parameter {
                name: "spike_ms",
                value: spike_ms,
            });
        }
        if !interval_ms.is_finite() || interval_ms < 0.0 {
            return Err(Error::Parameter {
                name: "interval_ms",
                value: interval_ms,
            });
        }
        Ok(Self {
            spike_ms,
            interval_ms,
        })
    }

    /// `attempts·τ_s + max(0, attempts − 1)·τ_i`.
    pub fn elapsed_ms(&self, attempts: u32) -> f64 {
        let gaps = attempts.saturating_sub(1);
        f64::from(attempts) * self.spike_ms + f64::from(gaps) * self.interval_ms
    }
}

/// Free-standing form of [`Chronometry::elapsed_ms`].
pub fn chronometry(attempts: u32, spike_ms: f64, interval_ms: f64) -> Result<f64> {
    Ok(Chronometry::new(spike_ms, interval_ms)?.elapsed_ms(attempts))
}

pub const DEFAULT_MAX_ATTEMPTS: u32 = 64;
pub const DEFAULT_SPIKE_MS: f64 = 1.0;
pub const DEFAULT_INTERVAL_MS: f64 = 10.0;
pub const DEFAULT_STRENGTH_THRESHOLD: f64 = 0.7;

/// Parameters of stages 2 and 3.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct RecallParams {
    /// Cue intensity per component.
    #[cfg_attr(feature = "serde", serde(default))]
    pub q: PerComponent<f64>,
    #[cfg_attr(feature = "serde", serde(default = "default_max_attempts"))]
    pub max_attempts: PerComponent<u32>,
    /// Cue bonus granted to a component when the one before it resolved.
    #[cfg_attr(feature = "serde", serde(default))]
    pub link_gain: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_spike_ms"))]
    pub spike_ms: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_interval_ms"))]
    pub interval_ms: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_strength_threshold"))]
    pub strength_threshold: f64,
    /// Draw cue indices once per episode instead of once per attempt.
    #[cfg_attr(feature = "serde", serde(default))]
    pub fixed_cue_per_episode: bool,
}

fn default_max_attempts() -> PerComponent<u32> {
    PerComponent::uniform(DEFAULT_MAX_ATTEMPTS)
}

#[cfg(feature = "serde")]
fn default_spike_ms() -> f64 {
    DEFAULT_SPIKE_MS
}

#[cfg(feature = "serde")]
fn default_interval_ms() -> f64 {
    DEFAULT_INTERVAL_MS
}

#[cfg(feature = "serde")]
fn default_strength_threshold() -> f64 {
    DEFAULT_STRENGTH_THRESHOLD
}

impl Default for RecallParams {
    fn default() -> Self {
        Self {
            q: PerComponent::uniform(0.0),
            max_attempts: default_max_attempts(),
            link_gain: 0.0,
            spike_ms: DEFAULT_SPIKE_MS,
            interval_ms: DEFAULT_INTERVAL_MS,
            strength_threshold: DEFAULT_STRENGTH_THRESHOLD,
            fixed_cue_per_episode: false,
        }
    }
}

impl RecallParams {
    pub fn chronometry(&self) -> Result<Chronometry> {
        Chronometry::new(self.spike_ms, self.interval_ms)
    }

    pub fn validate(&self) -> Result<()> {
        for c in Component::ALL {
            check_fraction("q", *self.q.get(c))?;
            if *self.max_attempts.get(c) == 0 {
                return Err(Error::Parameter {
                    name: "max_attempts",
                    value: 0.0,
                });
            }
        }
        check_fraction("link_gain", self.link_gain)?;
        self.chronometry()?;
        if !(self.strength_threshold > 0.0 && self.strength_threshold < 1.0) {
            return Err(Error::Parameter {
                name: "strength_threshold",
                value: self.strength_threshold,
            });
        }
        Ok(())
    }
}

/// How one component is driven: cue fraction, attempt budget, timing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttemptPlan {
    pub cue_fraction: f64,
    pub max_attempts: u32,
    pub fixed_cue: bool,
    pub timing: Chronometry,
}

/// Probe equal to `reference` on `cue_indices`, uniformly random elsewhere.
pub fn generate_probe<R: Rng + ?Sized>(
    reference: &BipolarPattern,
    cue_indices: &[usize],
    rng: &mut R,
) -> Result<BipolarPattern> {
    let n = reference.len();
    let mut cued = alloc::vec![false; n];
    for &i in cue_indices {
        check_index(i, n)?;
        cued[i] = true;
    }
    let random = BipolarPattern::random(n, rng)?;
    BipolarPattern::new(
        (0..n)
            .map(|i| {
                if cued[i] {
                    reference.get(i)
                } else {
                    random.get(i)
                }
            })
            .collect(),
    )
}

/// Uniformly drawn cue index set of size `⌊q·N⌋`.
pub fn draw_cue_indices<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Result<Vec<usize>> {
    check_fraction("q", q)?;
    Ok(index::sample(rng, n, fraction_count(q, n)).into_vec())
}

/// Exact unit-wise equality.
pub fn compare(output: &BipolarPattern, reference: &BipolarPattern) -> Result<bool> {
    output.check_len(reference.len())?;
    Ok(output == reference)
}

/// Result of the attempt loop on one component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentOutcome {
    pub resolved: bool,
    pub attempts: u32,
    /// Max over attempts of `overlap(output, reference) / N`.
    pub best_overlap_frac: f64,
    /// First output that achieved `best_overlap_frac`.
    pub best_output: BipolarPattern,
    pub elapsed_ms: f64,
}

/// Repeats probe → retrieve → compare until the output equals `reference`
/// or the attempt budget runs out. Cue values are taken from `truth`.
pub fn recall_component<R: Rng + ?Sized>(
    net: &ComponentNetwork,
    truth: &BipolarPattern,
    reference: &BipolarPattern,
    plan: &AttemptPlan,
    rng: &mut R,
) -> Result<ComponentOutcome> {
    let n = net.len();
    truth.check_len(n)?;
    reference.check_len(n)?;
    if plan.max_attempts == 0 {
        return Err(Error::Parameter {
            name: "max_attempts",
            value: 0.0,
        });
    }
    let fixed = if plan.fixed_cue {
        Some(draw_cue_indices(n, plan.cue_fraction, rng)?)
    } else {
        check_fraction("q", plan.cue_fraction)?;
        None
    };
    let mut best: Option<(i64, BipolarPattern)> = None;
    let mut attempts = 0;
    let mut resolved = false;
    while attempts < plan.max_attempts {
        attempts += 1;
        let cue = match &fixed {
            Some(c) => c.clone(),
            None => draw_cue_indices(n, plan.cue_fraction, rng)?,
        };
        let probe = generate_probe(truth, &cue, rng)?;
        let output = net.retrieve_once(&probe)?;
        let ov = output.overlap(reference)?;
        resolved = compare(&output, reference)?;
        if best.as_ref().is_none_or(|(b, _)| ov > *b) {
            best = Some((ov, output));
        }
        if resolved {
            break;
        }
    }
    let (best_ov, best_output) = best.expect("at least one attempt");
    Ok(ComponentOutcome {
        resolved,
        attempts,
        best_overlap_frac: best_ov as f64 / n as f64,
        best_output,
        elapsed_ms: plan.timing.elapsed_ms(attempts),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Classification {
    Resolved,
    #[cfg_attr(feature = "serde", serde(rename = "TOT"))]
    Tot,
    NoAccess,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Resolved => "Resolved",
            Classification::Tot => "TOT",
            Classification::NoAccess => "NoAccess",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Resolved" => Ok(Classification::Resolved),
            "TOT" => Ok(Classification::Tot),
            "NoAccess" => Ok(Classification::NoAccess),
            other => Err(Error::Configuration(alloc::format!(
                "unknown classification {other:?}"
            ))),
        }
    }
}

/// Classification plus graded TOT strength. `components` holds only the
/// components the cascade reached.
pub fn classify_outcome(
    selected: bool,
    components: &PerComponent<Option<ComponentOutcome>>,
) -> (Classification, f64) {
    if !selected {
        return (Classification::NoAccess, 0.0);
    }
    let all = Component::ALL
        .iter()
        .all(|&c| components.get(c).as_ref().is_some_and(|o| o.resolved));
    if all {
        return (Classification::Resolved, 1.0);
    }
    let strength = components
        .phonological
        .as_ref()
        .map_or(0.0, |o| o.best_overlap_frac.max(0.0));
    (Classification::Tot, strength)
}

/// Whether a TOT of this strength counts as strong.
pub fn is_strong(tot_strength: f64, threshold: f64) -> bool {
    tot_strength >= threshold
}

/// One full three-stage recall episode.
#[derive(Debug, Clone, PartialEq)]
pub struct RecallOutcome {
    pub word_id: Option<String>,
    pub selected: bool,
    pub completeness: f64,
    pub components: PerComponent<Option<ComponentOutcome>>,
    pub classification: Classification,
    pub tot_strength: f64,
    /// Slot name → recollected, from the best phonological output. Empty
    /// when no node was selected.
    pub partial_info: BTreeMap<String, bool>,
    pub total_time_ms: f64,
}

impl RecallOutcome {
    pub fn attempts(&self, c: Component) -> u32 {
        self.components.get(c).as_ref().map_or(0, |o| o.attempts)
    }
}

/// Stage 1 selection, then the semantic → lexical → phonological cascade
/// on episode-local masked copies of the selected node's networks.
///
/// The cascade stops at the first component that fails to resolve, so an
/// unresolved episode always leaves the phonological form unretrieved.
pub fn recall_word<R: Rng + ?Sized>(
    lex: &Lexicon,
    priming: &mut PrimingState,
    semantic_input: &BipolarPattern,
    params: &RecallParams,
    rng: &mut R,
) -> Result<RecallOutcome> {
    params.validate()?;
    let timing = params.chronometry()?;
    let Some(selection) = select_node(lex, priming, semantic_input)? else {
        return Ok(RecallOutcome {
            word_id: None,
            selected: false,
            completeness: 0.0,
            components: PerComponent::default(),
            classification: Classification::NoAccess,
            tot_strength: 0.0,
            partial_info: BTreeMap::new(),
            total_time_ms: 0.0,
        });
    };
    let node = lex.node(selection.index);
    let mask_fraction = (1.0 - selection.completeness).clamp(0.0, 1.0);
    let mut components: PerComponent<Option<ComponentOutcome>> = PerComponent::default();
    let mut previous_resolved = false;
    for c in Component::ALL {
        let net = node
            .network(c)
            .apply_mask_protected(mask_fraction, node.protected(c), rng)?;
        let gain = if previous_resolved {
            params.link_gain
        } else {
            0.0
        };
        let plan = AttemptPlan {
            cue_fraction: (params.q.get(c) + gain).min(1.0),
            max_attempts: *params.max_attempts.get(c),
            fixed_cue: params.fixed_cue_per_episode,
            timing,
        };
        let outcome = recall_component(&net, node.truth(c), node.metamemory_ref(c), &plan, rng)?;
        previous_resolved = outcome.resolved;
        *components.get_mut(c) = Some(outcome);
        if !previous_resolved {
            break;
        }
    }
    let (classification, tot_strength) = classify_outcome(true, &components);
    let phon_ref = node.metamemory_ref(Component::Phonological);
    let partial_info = match &components.phonological {
        Some(o) => slot_match(&o.best_output, phon_ref, node.slot_map())?,
        None => node
            .slot_map()
            .iter()
            .map(|(k, _)| (String::from(k), false))
            .collect(),
    };
    let total_time_ms = Component::ALL
        .iter()
        .filter_map(|&c| components.get(c).as_ref())
        .map(|o| o.elapsed_ms)
        .sum();
    Ok(RecallOutcome {
        word_id: Some(String::from(node.id())),
        selected: true,
        completeness: selection.completeness,
        components,
        classification,
        tot_strength,
        partial_info,
        total_time_ms,
    })
}
