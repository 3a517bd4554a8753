//! Parallel trial fan-out.

use rayon::prelude::*;
use tot_core::scenario::{RunContext, TrialRecord};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] tot_core::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Runs every (sweep point, trial) pair on `workers` threads. Each trial
/// draws from its own child stream and results are gathered in trial
/// order, so the output is identical for any worker count.
pub fn run_parallel(ctx: &RunContext, workers: usize) -> Result<Vec<TrialRecord>, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()?;
    let n_trials = ctx.config().n_trials;
    let jobs: Vec<(usize, u64)> = (0..ctx.points().len())
        .flat_map(|p| (0..n_trials).map(move |t| (p, t)))
        .collect();
    let per_trial = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, t)| ctx.run_trial(&ctx.points()[p], t))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(per_trial.into_iter().flatten().collect())
}
