use rayon::prelude::*;
use serde::Serialize;

use super::ExpError;
use crate::frob::{Exclusion, Exclusions};
use crate::groups::ClassLabel;
use crate::rng::{stream_seed, SplitMix64};
use crate::stats::Counts;

/// Trials per shard, for enumeration and sampling alike.
pub const SHARD_SIZE: u64 = 4096;

/// Loop count up to which [`Mode::Budget`] enumerates instead of sampling.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Hard cap on an exhaustive run.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 36;

/// How the trial box is traversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every tuple exactly once.
    Exhaustive,
    /// This many uniform draws with replacement.
    Sample(u64),
    /// Exhaustive when the box holds at most this many tuples, otherwise that many draws.
    Budget(u64),
}

impl Default for Mode {
    fn default() -> Self {
        Mode::Budget(DEFAULT_BUDGET)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Plan {
    Exhaustive(u64),
    Sample(u64),
}

impl Plan {
    pub(crate) fn is_exhaustive(self) -> bool {
        matches!(self, Plan::Exhaustive(_))
    }

    pub(crate) fn trials(self) -> u64 {
        match self {
            Plan::Exhaustive(n) | Plan::Sample(n) => n,
        }
    }
}

impl Mode {
    pub(crate) fn plan(self, population: u128) -> Result<Plan, ExpError> {
        let exhaustive = || {
            if population > EXHAUSTIVE_LIMIT {
                Err(ExpError::BudgetExceeded { population, limit: EXHAUSTIVE_LIMIT })
            } else {
                Ok(Plan::Exhaustive(population as u64))
            }
        };
        match self {
            Mode::Exhaustive => exhaustive(),
            Mode::Sample(n) => Ok(Plan::Sample(n)),
            Mode::Budget(n) if population <= n as u128 => exhaustive(),
            Mode::Budget(n) => Ok(Plan::Sample(n)),
        }
    }
}

/// Execution resources. They never influence results.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExecOptions {
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
}

impl ExecOptions {
    pub fn with_workers(workers: usize) -> Self {
        ExecOptions { workers }
    }

    pub(crate) fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> Result<R, ExpError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| ExpError::Pool(e.to_string()))?;
        Ok(pool.install(op))
    }
}

pub(crate) type Outcome = Result<ClassLabel, Exclusion>;

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Tally {
    pub counts: Counts<ClassLabel>,
    pub exclusions: Exclusions,
    pub trials: u64,
}

impl Tally {
    fn record(&mut self, outcome: Outcome) {
        self.trials += 1;
        match outcome {
            Ok(label) => self.counts.add(label, 1),
            Err(e) => self.exclusions.record(e),
        }
    }

    fn merge(&mut self, other: Tally) {
        self.counts.merge(&other.counts);
        self.exclusions.merge(&other.exclusions);
        self.trials += other.trials;
    }
}

/// Product of the radices, saturating.
pub(crate) fn population(radices: &[u64]) -> u128 {
    radices.iter().fold(1u128, |acc, &r| acc.saturating_mul(r as u128))
}

/// Mixed-radix digits of `index`, first coordinate fastest.
fn decode(mut index: u64, radices: &[u64], digits: &mut [u64]) {
    for (d, &r) in digits.iter_mut().zip(radices) {
        *d = index % r;
        index /= r;
    }
}

/// Runs `classify` over the trials of `plan` and merges the shard tallies in order.
pub(crate) fn run_trials<F>(
    radices: &[u64],
    plan: Plan,
    seed: u64,
    exec: &ExecOptions,
    classify: F,
) -> Result<Tally, ExpError>
where
    F: Fn(&[u64]) -> Result<Outcome, ExpError> + Sync,
{
    let total = plan.trials();
    let shards = total.div_ceil(SHARD_SIZE);
    let run_shard = |s: u64| -> Result<Tally, ExpError> {
        let start = s * SHARD_SIZE;
        let len = SHARD_SIZE.min(total - start);
        let mut digits = vec![0u64; radices.len()];
        let mut tally = Tally::default();
        match plan {
            Plan::Exhaustive(_) => {
                for i in start..start + len {
                    decode(i, radices, &mut digits);
                    tally.record(classify(&digits)?);
                }
            }
            Plan::Sample(_) => {
                let mut rng = SplitMix64::new(stream_seed(seed, s));
                for _ in 0..len {
                    for (d, &r) in digits.iter_mut().zip(radices) {
                        *d = rng.below(r);
                    }
                    tally.record(classify(&digits)?);
                }
            }
        }
        Ok(tally)
    };
    let parts: Vec<Result<Tally, ExpError>> = exec.install(|| (0..shards).into_par_iter().map(run_shard).collect())?;
    let mut merged = Tally::default();
    for part in parts {
        merged.merge(part?);
    }
    Ok(merged)
}
