//! Exact per-attempt success probability by exhaustive enumeration.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::assocnet::ComponentNetwork;
use crate::error::{Error, Result};
use crate::pattern::{check_index, BipolarPattern};

/// Exact probability as a reduced fraction.
pub type Probability = Ratio<u64>;

/// Largest number of free (uncued) indices the oracle will enumerate.
pub const MAX_FREE_INDICES: usize = 24;

/// Probability that one retrieval attempt outputs exactly `reference`
/// when the probe equals `cue_source` on `cue_indices` and is uniformly
/// random on every other index.
///
/// All `2^free` assignments are visited in Gray-code order so that each
/// step updates the input sums by a single weight column.
pub fn exact_success_prob(
    net: &ComponentNetwork,
    reference: &BipolarPattern,
    cue_source: &BipolarPattern,
    cue_indices: &[usize],
) -> Result<Probability> {
    let n = net.len();
    reference.check_len(n)?;
    cue_source.check_len(n)?;
    let mut cued = vec![false; n];
    for &i in cue_indices {
        check_index(i, n)?;
        cued[i] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !cued[i]).collect();
    if free.len() > MAX_FREE_INDICES {
        return Err(Error::Capacity {
            free: free.len(),
            max: MAX_FREE_INDICES,
        });
    }

    let mut units: Vec<i8> = cue_source.units().to_vec();
    for &j in &free {
        units[j] = -1;
    }
    let start = BipolarPattern::new(units.clone())?;
    let mut acts = net.activations(&start)?;
    let target: Vec<bool> = reference.units().iter().map(|&u| u > 0).collect();
    let hits = |acts: &[i64]| (0..n).all(|i| net.output_unit(i, acts[i]) == target[i]);

    let total: u64 = 1 << free.len();
    let mut count = u64::from(hits(&acts));
    for step in 1..total {
        let j = free[step.trailing_zeros() as usize];
        units[j] = -units[j];
        if !net.is_masked(j) {
            let delta = 2 * i64::from(units[j]);
            for (i, a) in acts.iter_mut().enumerate() {
                *a += delta * i64::from(net.weight_sum(i, j));
            }
        }
        count += u64::from(hits(&acts));
    }
    Ok(Ratio::new(count, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::stream;

    #[test]
    fn capacity_and_index_errors() {
        let x = BipolarPattern::random(30, &mut stream(1)).unwrap();
        let net = ComponentNetwork::train(core::slice::from_ref(&x)).unwrap();
        assert_eq!(
            exact_success_prob(&net, &x, &x, &[0, 1, 2, 3, 4]),
            Err(Error::Capacity { free: 25, max: 24 })
        );
        assert!(exact_success_prob(&net, &x, &x, &[30]).is_err());
    }

    #[test]
    fn full_cue_is_certain() {
        let x = BipolarPattern::random(9, &mut stream(4)).unwrap();
        let net = ComponentNetwork::train(core::slice::from_ref(&x)).unwrap();
        let all: Vec<usize> = (0..9).collect();
        assert_eq!(
            exact_success_prob(&net, &x, &x, &all).unwrap(),
            Ratio::new(1, 1)
        );
    }
}
