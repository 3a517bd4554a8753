//! Per-sweep-point aggregation with 95% normal-approximation intervals.

use serde::Serialize;
use tot_core::recall::{is_strong, Classification};
use tot_core::scenario::{SweepPoint, TrialRecord};

/// Recorded in run metadata.
pub const INTERVAL_METHOD: &str = "normal approximation (Wald), 95%, z = 1.96";

const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    /// Proportion `k/n` with a Wald interval clipped to `[0, 1]`.
    pub fn proportion(k: usize, n: usize) -> Self {
        if n == 0 {
            return Self {
                value: 0.0,
                lo: 0.0,
                hi: 0.0,
            };
        }
        let p = k as f64 / n as f64;
        let half = Z95 * (p * (1.0 - p) / n as f64).sqrt();
        Self {
            value: p,
            lo: (p - half).max(0.0),
            hi: (p + half).min(1.0),
        }
    }

    pub fn mean(xs: &[f64]) -> Self {
        if xs.is_empty() {
            return Self {
                value: 0.0,
                lo: 0.0,
                hi: 0.0,
            };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let half = Z95 * (var / n).sqrt();
        Self {
            value: mean,
            lo: mean - half,
            hi: mean + half,
        }
    }
}

/// Aggregates for one sweep point. Rates are over records (episodes).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub point: usize,
    pub sweep_q: Option<f64>,
    pub sweep_d: Option<f64>,
    pub sweep_flip: Option<f64>,
    pub records: usize,
    pub trials: usize,
    pub resolution: Estimate,
    pub tot: Estimate,
    pub no_access: Estimate,
    /// Share of TOT records with strength at or above the strong threshold.
    pub strong_tot: Estimate,
    /// Over records that report the slot.
    pub first_letter: Estimate,
    /// Over records that reached the phonological component.
    pub mean_att_phon: f64,
    pub median_att_phon: f64,
    pub mean_att_total: f64,
    /// Resolved records per phonological attempt.
    pub phon_attempt_success: f64,
    pub time_ms: Estimate,
    /// Share of trials resolved in any episode.
    pub trial_resolution: Estimate,
    /// Trials resolved after episode 1.
    pub eventual_resolutions: usize,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SummaryError {
    #[error("no records to summarize")]
    Empty,
    #[error("record for trial {0} lies outside the sweep layout")]
    OutOfLayout(u64),
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Groups records by sweep point (`trial / n_trials`) and aggregates.
pub fn summarize(
    records: &[TrialRecord],
    points: &[SweepPoint],
    n_trials: u64,
    strength_threshold: f64,
) -> Result<Vec<SummaryRow>, SummaryError> {
    if records.is_empty() {
        return Err(SummaryError::Empty);
    }
    let mut groups: Vec<Vec<&TrialRecord>> = vec![Vec::new(); points.len()];
    for r in records {
        let p = (r.trial / n_trials.max(1)) as usize;
        groups
            .get_mut(p)
            .ok_or(SummaryError::OutOfLayout(r.trial))?
            .push(r);
    }
    Ok(points
        .iter()
        .zip(groups)
        .filter(|(_, g)| !g.is_empty())
        .map(|(point, g)| summarize_point(point, &g, strength_threshold))
        .collect())
}

fn summarize_point(point: &SweepPoint, g: &[&TrialRecord], threshold: f64) -> SummaryRow {
    let n = g.len();
    let count = |c: Classification| g.iter().filter(|r| r.classification == c).count();
    let resolved = count(Classification::Resolved);
    let tots: Vec<_> = g
        .iter()
        .filter(|r| r.classification == Classification::Tot)
        .collect();
    let strong = tots
        .iter()
        .filter(|r| is_strong(r.tot_strength, threshold))
        .count();
    let slots: Vec<bool> = g.iter().filter_map(|r| r.slot_first_letter).collect();
    let phon: Vec<f64> = g
        .iter()
        .filter(|r| r.att_phon > 0)
        .map(|r| f64::from(r.att_phon))
        .collect();
    let phon_total: f64 = phon.iter().sum();
    let times: Vec<f64> = g.iter().map(|r| r.total_time_ms).collect();

    let mut trial_ids: Vec<u64> = g.iter().map(|r| r.trial).collect();
    trial_ids.dedup();
    let resolved_trials: Vec<&&TrialRecord> = g
        .iter()
        .filter(|r| r.classification == Classification::Resolved)
        .collect();

    SummaryRow {
        point: point.index,
        sweep_q: point.q,
        sweep_d: point.d,
        sweep_flip: point.flip_rate,
        records: n,
        trials: trial_ids.len(),
        resolution: Estimate::proportion(resolved, n),
        tot: Estimate::proportion(tots.len(), n),
        no_access: Estimate::proportion(count(Classification::NoAccess), n),
        strong_tot: Estimate::proportion(strong, tots.len()),
        first_letter: Estimate::proportion(slots.iter().filter(|&&s| s).count(), slots.len()),
        mean_att_phon: if phon.is_empty() {
            0.0
        } else {
            phon_total / phon.len() as f64
        },
        median_att_phon: median(phon),
        mean_att_total: g
            .iter()
            .map(|r| f64::from(r.att_sem + r.att_lex + r.att_phon))
            .sum::<f64>()
            / n as f64,
        phon_attempt_success: if phon_total > 0.0 {
            resolved as f64 / phon_total
        } else {
            0.0
        },
        time_ms: Estimate::mean(&times),
        trial_resolution: Estimate::proportion(resolved_trials.len(), trial_ids.len()),
        eventual_resolutions: resolved_trials.iter().filter(|r| r.episode > 1).count(),
    }
}
