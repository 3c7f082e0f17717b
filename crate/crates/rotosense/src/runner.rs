//! Parallel Monte Carlo trials.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use rotosense_core::estimation::{Pipeline, QcrbPlan, QcrbReport, TrialRecord};
use rotosense_core::{RotationParams, SpinState};

pub const THREADS_ENV: &str = "ROTOSENSE_THREADS";

/// Thread cap from `ROTOSENSE_THREADS`; `None` leaves rayon's default.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => {
            let t: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_ENV}=`{v}` is not a thread count"))?;
            if t == 0 {
                bail!("{THREADS_ENV} must be at least 1");
            }
            Ok(Some(t))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{THREADS_ENV}: {e}"),
    }
}

/// Records of trials `0..trials`, in trial order whatever the thread count.
pub fn run_trials(plan: &QcrbPlan, trials: u64, seed: u64, threads: Option<usize>) -> Result<Vec<TrialRecord>> {
    let work = || -> Vec<TrialRecord> {
        (0..trials)
            .into_par_iter()
            .map(|t| plan.run_trial(seed, t))
            .collect()
    };
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .context("cannot start worker threads")?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[derive(Clone, Debug)]
pub struct QcrbRun {
    pub report: QcrbReport,
    pub records: Vec<TrialRecord>,
}

/// Parallel counterpart of `qcrb_experiment`, with identical results.
pub fn qcrb_parallel(
    phi0: &SpinState,
    params: &RotationParams,
    n: u64,
    trials: u64,
    seed: u64,
    pipeline: Pipeline,
    threads: Option<usize>,
) -> Result<QcrbRun> {
    if trials < 2 {
        bail!("at least two trials are needed");
    }
    let plan = QcrbPlan::new(phi0, params, n, pipeline)?;
    let records = run_trials(&plan, trials, seed, threads)?;
    let report = plan.summarize(&records, seed)?;
    Ok(QcrbRun { report, records })
}
