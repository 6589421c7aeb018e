//! Experiment drivers.
//!
//! Every driver enumerates or samples a box of coefficient tuples, classifies each
//! tuple into a Frobenius class or an exclusion, and compares the resulting law
//! with [`predict`](crate::groups::predict).
//!
//! Work is cut into fixed-size shards. Shard `s` of a sampling run draws from the
//! stream [`stream_seed(seed, s)`](crate::rng::stream_seed); shards are merged by
//! adding counts. The shard plan depends only on the configuration, so reports do
//! not depend on the number of worker threads.

mod bateman_horn;
mod engine;
mod intersect;
mod report;
mod scan;
mod sections;

use serde::Serialize;
use thiserror::Error;

use crate::ff::{is_prime, make_field, prime_factors, FfError, Field};
use crate::groups::GroupError;
use crate::mpoly::MpolyError;
use crate::poly::PolyError;
use crate::stats::StatsError;

pub use bateman_horn::{run_bateman_horn, BHConfig, Hypotheses};
pub use engine::{ExecOptions, Mode, DEFAULT_BUDGET, EXHAUSTIVE_LIMIT, SHARD_SIZE};
pub use intersect::{run_plane_intersections, IntersectConfig, MAX_INTERSECTION_DEGREE};
pub use report::{canonical_json, ClassRow, ExperimentReport};
pub use scan::{run_q_scan, ScanConfig, ScanExperiment, ScanReport};
pub use sections::{
    run_curve_sections, run_galois_detect, GaloisConfig, GaloisEntry, GaloisReport, SectionsConfig, Verdict,
    Witness, MAX_SECTION_DEGREE,
};

/// Seed for the modulus search when a scan or section run needs `F_{p^k}`, `k > 1`.
pub const FIELD_SEED: u64 = 0xf1e1d;

/// Exclusion fractions above `RARITY_CONSTANT / q` are flagged in the report.
pub const RARITY_CONSTANT: f64 = 10.0;

/// What a cheap irreducibility screen found wrong with an input polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyDefect {
    Zero,
    /// `dF/dx = 0`, i.e. `F` lies in `F_q[t, x^p]`.
    NoSeparableX,
    MonomialFactor,
    AssociateOf(usize),
    NotUnivariate,
}

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("{0}")]
    OutOfRange(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("polynomial #{index} rejected: {defect:?}")]
    InvalidPolynomial { index: usize, defect: PolyDefect },
    #[error("could not detect the splitting degree of polynomial #{index}: {source}")]
    NuUndetected { index: usize, source: MpolyError },
    #[error("generic degree {generic_degree} of polynomial #{index} is not divisible by nu = {nu}; supply nu explicitly if it was detected")]
    NuIncompatible { index: usize, nu: u32, generic_degree: u32 },
    #[error("hypotheses violated: {0}")]
    HypothesisViolation(String),
    #[error("{population} trials exceed the exhaustive limit {limit}")]
    BudgetExceeded { population: u128, limit: u128 },
    #[error("the parametrization has the common factor {0}")]
    CommonFactor(String),
    #[error("{0}")]
    InsufficientData(#[from] StatsError),
    #[error("{what}: expected {expected} entries, got {got}")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("inputs live over different fields")]
    FieldMismatch,
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Mpoly(#[from] MpolyError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

impl ExpError {
    /// Whether the failure is a violated hypothesis rather than bad input or a bug.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, ExpError::HypothesisViolation(_))
    }

    pub fn is_invariant_failure(&self) -> bool {
        matches!(self, ExpError::Invariant(_))
    }
}

/// `F_q`, built with [`FIELD_SEED`] when `q` is a proper prime power.
pub fn field_for_order(q: u64) -> Result<Field, ExpError> {
    if q < 2 {
        return Err(ExpError::NotPrimePower(q));
    }
    if is_prime(q) {
        return Ok(Field::prime(q)?);
    }
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return Err(ExpError::NotPrimePower(q));
    }
    let p = factors[0];
    let mut k = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    Ok(make_field(p, k, FIELD_SEED)?)
}
