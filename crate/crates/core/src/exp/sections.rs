use std::fmt;
use std::time::Instant;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use super::engine::{population, run_trials, ExecOptions, Mode};
use super::report::{build_report, elapsed_ms, ExperimentReport, ReportInput};
use super::{field_for_order, ExpError, PolyDefect};
use crate::ff::Field;
use crate::frob::type_from_univariate;
use crate::groups::{ClassLabel, GroupShape};
use crate::mpoly::{wronskian3, IntBiPoly};
use crate::poly::Poly;
use crate::stats::POOL_THRESHOLD;

/// Largest supported degree of a parametrization.
pub const MAX_SECTION_DEGREE: u32 = 12;

/// Specializations `f_0 + A_1 f_1 + ... + A_n f_n` of a pencil of polynomials in `t`.
#[derive(Clone, Debug)]
pub struct SectionsConfig {
    /// `f_0, ..., f_n` with integer coefficients, reduced into `F_q` on use.
    pub param: Vec<IntBiPoly>,
    pub q: u64,
    pub mode: Mode,
    pub seed: u64,
    pub pool_threshold: f64,
}

impl SectionsConfig {
    pub fn new(param: Vec<IntBiPoly>, q: u64) -> Self {
        SectionsConfig { param, q, mode: Mode::default(), seed: 0, pool_threshold: POOL_THRESHOLD }
    }
}

struct Pencil {
    polys: Vec<Poly>,
    degree: u32,
}

fn bind_pencil(param: &[IntBiPoly], field: &Field) -> Result<Pencil, ExpError> {
    if param.len() < 3 {
        return Err(ExpError::OutOfRange(format!(
            "a parametrization needs f_0, ..., f_n with n >= 2, got {} polynomials",
            param.len()
        )));
    }
    let polys = param
        .iter()
        .enumerate()
        .map(|(index, p)| {
            p.bind_univariate(field).ok_or(ExpError::InvalidPolynomial { index, defect: PolyDefect::NotUnivariate })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let degree = polys.iter().filter_map(Poly::degree).max().unwrap_or(0) as u32;
    if degree == 0 || degree > MAX_SECTION_DEGREE {
        return Err(ExpError::OutOfRange(format!(
            "the parametrization degree must be in 1..={MAX_SECTION_DEGREE}, got {degree}"
        )));
    }
    let mut g = Poly::zero(field);
    for p in &polys {
        g = g.gcd(p)?;
    }
    if g.degree() != Some(0) {
        return Err(ExpError::CommonFactor(g.display_with('t').to_string()));
    }
    Ok(Pencil { polys, degree })
}

fn param_strings(param: &[IntBiPoly]) -> Vec<String> {
    param.iter().map(|p| p.to_string()).collect()
}

fn sections_in(cfg: &SectionsConfig, field: &Field, pencil: &Pencil, exec: &ExecOptions) -> Result<ExperimentReport, ExpError> {
    let started = Instant::now();
    let q = field.order();
    let radices = vec![q; pencil.polys.len() - 1];
    let plan = cfg.mode.plan(population(&radices))?;
    let d = pencil.degree;
    let tally = run_trials(&radices, plan, cfg.seed, exec, |digits| {
        let mut g = pencil.polys[0].clone();
        for (f, &a) in pencil.polys[1..].iter().zip(digits) {
            if a != 0 {
                g = g.add(&f.scale(a))?;
            }
        }
        Ok(type_from_univariate(&g, d).map(ClassLabel::single))
    })?;
    build_report(ReportInput {
        experiment: "curve_sections",
        params: json!({
            "param": param_strings(&cfg.param),
            "degree": d,
            "mode": cfg.mode,
            "pool_threshold": cfg.pool_threshold,
        }),
        q,
        plan,
        shape: GroupShape::symmetric(vec![d])?,
        tally,
        seed: cfg.seed,
        pool_threshold: cfg.pool_threshold,
        warnings: Vec::new(),
        started,
    })
}

/// Frobenius classes of the hyperplane sections of the curve parametrized by the pencil.
pub fn run_curve_sections(cfg: &SectionsConfig, exec: &ExecOptions) -> Result<ExperimentReport, ExpError> {
    let field = field_for_order(cfg.q)?;
    let pencil = bind_pencil(&cfg.param, &field)?;
    sections_in(cfg, &field, &pencil, exec)
}

/// Statistical test of whether specializations of the pencil have full symmetric monodromy.
#[derive(Clone, Debug)]
pub struct GaloisConfig {
    pub param: Vec<IntBiPoly>,
    pub qs: Vec<u64>,
    pub mode: Mode,
    pub seed: u64,
    pub alpha: f64,
    pub pool_threshold: f64,
}

impl GaloisConfig {
    pub fn new(param: Vec<IntBiPoly>, qs: Vec<u64>, alpha: f64) -> Self {
        GaloisConfig { param, qs, mode: Mode::default(), seed: 0, alpha, pool_threshold: POOL_THRESHOLD }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithSymmetric(u32),
    RejectsSymmetric(u32),
}

impl Verdict {
    pub fn is_consistent(self) -> bool {
        matches!(self, Verdict::ConsistentWithSymmetric(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ConsistentWithSymmetric(d) => write!(f, "consistent with S_{d}"),
            Verdict::RejectsSymmetric(d) => write!(f, "rejects S_{d}"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A class frequency that departs from the prediction at a rejecting `q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub q: u64,
    pub label: ClassLabel,
    pub count: u64,
    pub observed: f64,
    pub predicted: f64,
    /// `(observed - expected) / sqrt(expected)` in counts; infinite for an impossible class.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaloisEntry {
    pub q: u64,
    /// Some `(i, j, k)` with `W(f_i, f_j, f_k) != 0` over `F_q`.
    pub nonvanishing_wronskian: Option<[usize; 3]>,
    pub p_value: Option<f64>,
    pub rejects: bool,
    pub report: ExperimentReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaloisReport {
    pub experiment: String,
    pub params: Value,
    pub degree: u32,
    pub alpha: f64,
    pub verdict: Verdict,
    pub per_q: Vec<GaloisEntry>,
    pub witnesses: Vec<Witness>,
    pub limitations: Vec<String>,
    pub seed: u64,
    pub runtime_ms: u64,
    pub warnings: Vec<String>,
}

fn nonvanishing_triple(polys: &[Poly]) -> Result<Option<[usize; 3]>, ExpError> {
    let n = polys.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !wronskian3(&polys[i], &polys[j], &polys[k])?.is_zero() {
                    return Ok(Some([i, j, k]));
                }
            }
        }
    }
    Ok(None)
}

fn witnesses(report: &ExperimentReport) -> Vec<Witness> {
    let n = report.accepted as f64;
    let mut out: Vec<Witness> = report
        .classes
        .iter()
        .map(|c| {
            let expected = n * c.predicted;
            let residual = if expected > 0.0 {
                (c.count as f64 - expected) / expected.sqrt()
            } else if c.count > 0 {
                f64::INFINITY
            } else {
                0.0
            };
            Witness {
                q: report.q,
                label: c.label.clone(),
                count: c.count,
                observed: if n > 0.0 { c.count as f64 / n } else { 0.0 },
                predicted: c.predicted,
                residual,
            }
        })
        .collect();
    out.sort_by(|a, b| b.residual.abs().total_cmp(&a.residual.abs()).then_with(|| a.label.cmp(&b.label)));
    out
}

/// Runs the sections experiment for every `q` and tests each law against `S_d`.
pub fn run_galois_detect(cfg: &GaloisConfig, exec: &ExecOptions) -> Result<GaloisReport, ExpError> {
    let started = Instant::now();
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(ExpError::OutOfRange(format!("alpha = {} must lie in (0, 1)", cfg.alpha)));
    }
    if cfg.qs.is_empty() {
        return Err(ExpError::OutOfRange("at least one q is required".into()));
    }
    let mut warnings = Vec::new();
    let mut per_q = Vec::with_capacity(cfg.qs.len());
    let mut degree = 0;
    for &q in &cfg.qs {
        let field = field_for_order(q)?;
        let pencil = bind_pencil(&cfg.param, &field)?;
        degree = pencil.degree;
        let triple = nonvanishing_triple(&pencil.polys)?;
        if triple.is_none() {
            warnings.push(format!("every Wronskian W(f_i, f_j, f_k) vanishes over F_{q}"));
        }
        let sections = SectionsConfig {
            param: cfg.param.clone(),
            q,
            mode: cfg.mode,
            seed: cfg.seed,
            pool_threshold: cfg.pool_threshold,
        };
        let report = sections_in(&sections, &field, &pencil, exec)?;
        let p_value = report.chi2.map(|c| c.p);
        if p_value.is_none() {
            warnings.push(format!("no chi-square test at q = {q}: fewer than two cells after pooling"));
        }
        let rejects = p_value.is_some_and(|p| p < cfg.alpha);
        per_q.push(GaloisEntry { q, nonvanishing_wronskian: triple, p_value, rejects, report });
    }
    let verdict = if per_q.iter().any(|e| e.rejects) {
        Verdict::RejectsSymmetric(degree)
    } else {
        Verdict::ConsistentWithSymmetric(degree)
    };
    let witnesses = per_q.iter().filter(|e| e.rejects).flat_map(|e| witnesses(&e.report)).collect();
    Ok(GaloisReport {
        experiment: "galois_detect".into(),
        params: json!({
            "param": param_strings(&cfg.param),
            "q": cfg.qs,
            "mode": cfg.mode,
            "pool_threshold": cfg.pool_threshold,
        }),
        degree,
        alpha: cfg.alpha,
        verdict,
        per_q,
        witnesses,
        limitations: vec![
            "whether the ratios f_i/f_j generate the function field k(t) is not checked".into(),
            "the verdict is a per-q chi-square test against the S_d class law, not a proof".into(),
        ],
        seed: cfg.seed,
        runtime_ms: elapsed_ms(started),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Partition;

    fn t_pow(a: u32) -> IntBiPoly {
        IntBiPoly::new([((a, 0), 1)])
    }

    fn param(exps: &[u32]) -> Vec<IntBiPoly> {
        exps.iter().map(|&a| t_pow(a)).collect()
    }

    #[test]
    fn degenerate_linear_pencil() {
        let cfg = SectionsConfig { mode: Mode::Exhaustive, ..SectionsConfig::new(param(&[1, 0, 1]), 7) };
        let r = run_curve_sections(&cfg, &ExecOptions::default()).unwrap();
        assert_eq!(r.trials, 49);
        // A_2 = -1 cancels t
        assert_eq!(r.exclusions.degree_drop, 7);
        assert_eq!(r.tv, Some(0.0));
    }

    #[test]
    fn biquadratic_pencil_has_no_three_cycles() {
        let cfg = SectionsConfig { mode: Mode::Exhaustive, ..SectionsConfig::new(param(&[4, 2, 0]), 31) };
        let r = run_curve_sections(&cfg, &ExecOptions::default()).unwrap();
        assert_eq!(r.count(&ClassLabel::single(Partition::new(vec![3, 1]))), 0);
        assert!(r.tv.unwrap() > 0.2);
    }

    #[test]
    fn pencil_validation() {
        let run = |p: Vec<IntBiPoly>| run_curve_sections(&SectionsConfig::new(p, 7), &ExecOptions::default());
        assert!(matches!(run(param(&[2, 1, 3])), Err(ExpError::CommonFactor(_))));
        assert!(matches!(run(param(&[2, 1])), Err(ExpError::OutOfRange(_))));
        assert!(matches!(run(param(&[13, 1, 0])), Err(ExpError::OutOfRange(_))));
        let with_x = vec![t_pow(2), IntBiPoly::new([((0, 1), 1)]), t_pow(0)];
        assert!(matches!(
            run(with_x),
            Err(ExpError::InvalidPolynomial { index: 1, defect: PolyDefect::NotUnivariate })
        ));
    }

    #[test]
    fn quadratic_pencil_is_consistent_with_s2() {
        let cfg = GaloisConfig { mode: Mode::Exhaustive, ..GaloisConfig::new(param(&[0, 1, 2]), vec![11, 13], 1e-3) };
        let r = run_galois_detect(&cfg, &ExecOptions::default()).unwrap();
        assert_eq!(r.degree, 2);
        assert_eq!(r.verdict, Verdict::ConsistentWithSymmetric(2));
        assert!(r.per_q.iter().all(|e| e.nonvanishing_wronskian == Some([0, 1, 2])));
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn biquadratic_pencil_is_rejected() {
        let cfg = GaloisConfig { mode: Mode::Budget(20_000), ..GaloisConfig::new(param(&[4, 2, 0]), vec![31], 1e-3) };
        let r = run_galois_detect(&cfg, &ExecOptions::default()).unwrap();
        assert_eq!(r.verdict.to_string(), "rejects S_4");
        let three_one = r.witnesses.iter().find(|w| w.label == ClassLabel::single(Partition::new(vec![3, 1]))).unwrap();
        assert_eq!(three_one.count, 0);
        assert!((three_one.predicted - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_must_be_a_probability() {
        let cfg = GaloisConfig::new(param(&[0, 1, 2]), vec![11], 1.0);
        assert!(matches!(run_galois_detect(&cfg, &ExecOptions::default()), Err(ExpError::OutOfRange(_))));
    }
}
