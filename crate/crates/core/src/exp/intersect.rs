use std::time::Instant;

use serde_json::json;

use super::engine::{population, run_trials, ExecOptions, Mode};
use super::report::{build_report, ExperimentReport, ReportInput};
use super::ExpError;
use crate::ff::{is_prime, Field};
use crate::frob::{type_from_univariate, Exclusion};
use crate::groups::{ClassLabel, GroupShape};
use crate::mpoly::{resultant, BiPoly, Var};
use crate::stats::POOL_THRESHOLD;

/// Largest supported number of intersection points `d1 * d2`.
pub const MAX_INTERSECTION_DEGREE: u32 = 12;

/// Two random affine plane curves of total degrees `d1` and `d2` over `F_q`.
#[derive(Clone, Debug)]
pub struct IntersectConfig {
    pub d1: u32,
    pub d2: u32,
    pub q: u64,
    pub mode: Mode,
    pub seed: u64,
    pub pool_threshold: f64,
}

impl IntersectConfig {
    pub fn new(d1: u32, d2: u32, q: u64) -> Self {
        IntersectConfig { d1, d2, q, mode: Mode::default(), seed: 0, pool_threshold: POOL_THRESHOLD }
    }
}

/// Exponents `(a, b)` with `a + b <= d`.
fn monomials(d: u32) -> Vec<(u32, u32)> {
    (0..=d).flat_map(|total| (0..=total).map(move |b| (total - b, b))).collect()
}

/// Classifies the intersection by `R = Res_x(F_1, F_2)`: it is accepted iff
/// `deg R = d1 d2` and `R` is squarefree, and the class is the type of `R`.
pub(crate) fn classify_pair(f1: &BiPoly, f2: &BiPoly, d: u32) -> Result<Result<ClassLabel, Exclusion>, ExpError> {
    if f1.is_zero() || f2.is_zero() || (f1.deg_x() == Some(0) && f2.deg_x() == Some(0)) {
        return Ok(Err(Exclusion::DegreeDrop));
    }
    let r = resultant(f1, f2, Var::X)?;
    if r.is_zero() {
        return Ok(Err(Exclusion::NotTransversal));
    }
    Ok(type_from_univariate(&r, d).map(ClassLabel::single))
}

/// Frobenius classes of the intersection points of two random plane curves.
pub fn run_plane_intersections(cfg: &IntersectConfig, exec: &ExecOptions) -> Result<ExperimentReport, ExpError> {
    let started = Instant::now();
    if !is_prime(cfg.q) {
        return Err(ExpError::OutOfRange(format!("q = {} must be prime", cfg.q)));
    }
    let d = cfg.d1.saturating_mul(cfg.d2);
    if cfg.d1 == 0 || cfg.d2 == 0 || d > MAX_INTERSECTION_DEGREE {
        return Err(ExpError::OutOfRange(format!(
            "need d1, d2 >= 1 and d1 * d2 <= {MAX_INTERSECTION_DEGREE}, got ({}, {})",
            cfg.d1, cfg.d2
        )));
    }
    let field = Field::prime(cfg.q)?;
    let (m1, m2) = (monomials(cfg.d1), monomials(cfg.d2));
    let radices = vec![cfg.q; m1.len() + m2.len()];
    let plan = cfg.mode.plan(population(&radices))?;
    let tally = run_trials(&radices, plan, cfg.seed, exec, |digits| {
        let (c1, c2) = digits.split_at(m1.len());
        let f1 = BiPoly::new(&field, m1.iter().copied().zip(c1.iter().copied()));
        let f2 = BiPoly::new(&field, m2.iter().copied().zip(c2.iter().copied()));
        classify_pair(&f1, &f2, d)
    })?;
    build_report(ReportInput {
        experiment: "plane_intersections",
        params: json!({ "d1": cfg.d1, "d2": cfg.d2, "mode": cfg.mode, "pool_threshold": cfg.pool_threshold }),
        q: cfg.q,
        plan,
        shape: GroupShape::symmetric(vec![d])?,
        tally,
        seed: cfg.seed,
        pool_threshold: cfg.pool_threshold,
        warnings: Vec::new(),
        started,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Partition;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(1), [(0, 0), (1, 0), (0, 1)]);
        assert_eq!(monomials(2).len(), 6);
        assert_eq!(monomials(3).len(), 10);
    }

    #[test]
    fn two_lines_meet_rationally() {
        let cfg = IntersectConfig { mode: Mode::Exhaustive, ..IntersectConfig::new(1, 1, 7) };
        let r = run_plane_intersections(&cfg, &ExecOptions::default()).unwrap();
        assert_eq!(r.trials, 7u64.pow(6));
        assert!(r.accepted > 0);
        assert_eq!(r.tv, Some(0.0));
        assert_eq!(r.trials, r.accepted + r.exclusions.total());
    }

    // rational common zeros found by search are the fixed points of the type
    #[test]
    fn line_conic_matches_rational_point_count() {
        let q = 5u64;
        let field = Field::prime(q).unwrap();
        let (m1, m2) = (monomials(1), monomials(2));
        let mut rng = crate::rng::SplitMix64::new(17);
        let mut accepted = 0;
        while accepted < 300 {
            let f1 = BiPoly::new(&field, m1.iter().map(|&m| (m, rng.below(q))));
            let f2 = BiPoly::new(&field, m2.iter().map(|&m| (m, rng.below(q))));
            let Ok(label) = classify_pair(&f1, &f2, 2).unwrap() else {
                continue;
            };
            accepted += 1;
            let common = (0..q)
                .flat_map(|t| (0..q).map(move |x| (t, x)))
                .filter(|&(t, x)| f1.eval(t, x) == 0 && f2.eval(t, x) == 0)
                .count();
            let rational = label.components()[0].parts().iter().filter(|&&p| p == 1).count();
            assert_eq!(common, rational, "{f1} / {f2}");
        }
    }

    #[test]
    fn line_conic_predicted_law() {
        let cfg = IntersectConfig { mode: Mode::Sample(2000), seed: 1, ..IntersectConfig::new(1, 2, 7) };
        let r = run_plane_intersections(&cfg, &ExecOptions::default()).unwrap();
        let split = ClassLabel::single(Partition::new(vec![1, 1]));
        let inert = ClassLabel::single(Partition::new(vec![2]));
        let row = |l: &ClassLabel| r.classes.iter().find(|c| &c.label == l).unwrap().predicted;
        assert_eq!(row(&split), 0.5);
        assert_eq!(row(&inert), 0.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        let run = |c: IntersectConfig| run_plane_intersections(&c, &ExecOptions::default());
        assert!(matches!(run(IntersectConfig::new(2, 2, 9)), Err(ExpError::OutOfRange(_))));
        assert!(matches!(run(IntersectConfig::new(4, 4, 7)), Err(ExpError::OutOfRange(_))));
        assert!(matches!(run(IntersectConfig::new(0, 2, 7)), Err(ExpError::OutOfRange(_))));
    }
}
