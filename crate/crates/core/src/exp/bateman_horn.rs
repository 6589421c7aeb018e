use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::engine::{population, run_trials, ExecOptions, Mode};
use super::report::{build_report, ExperimentReport, ReportInput};
use super::{ExpError, PolyDefect};
use crate::frob::type_from_univariate;
use crate::groups::{ClassLabel, GroupShape};
use crate::mpoly::{detect_nu, BiPoly, NU_RELIABLE_MIN_P};
use crate::poly::Poly;
use crate::stats::POOL_THRESHOLD;

/// Values `f(t)` of degree `n` substituted into `F_1, ..., F_m`.
#[derive(Clone, Debug)]
pub struct BHConfig {
    pub polys: Vec<BiPoly>,
    pub n: u32,
    pub mode: Mode,
    pub seed: u64,
    /// Turn violated hypotheses into an error instead of a warning.
    pub strict: bool,
    /// Splitting degrees; detected by point counting when absent and `q` is prime.
    pub nu: Option<Vec<u32>>,
    pub pool_threshold: f64,
}

impl BHConfig {
    pub fn new(polys: Vec<BiPoly>, n: u32) -> Self {
        BHConfig { polys, n, mode: Mode::default(), seed: 0, strict: false, nu: None, pool_threshold: POOL_THRESHOLD }
    }
}

/// The alternative sufficient conditions for equidistribution. One of them must hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub n_at_least_3: bool,
    pub q_odd_and_n_at_least_2: bool,
    pub p_exceeds_max_degree: bool,
}

impl Hypotheses {
    pub fn evaluate(q: u64, p: u64, n: u32, generic_degrees: &[u32]) -> Self {
        let max_d = generic_degrees.iter().copied().max().unwrap_or(0) as u64;
        Hypotheses {
            n_at_least_3: n >= 3,
            q_odd_and_n_at_least_2: q % 2 == 1 && n >= 2,
            p_exceeds_max_degree: p > max_d,
        }
    }

    pub fn any(&self) -> bool {
        self.n_at_least_3 || self.q_odd_and_n_at_least_2 || self.p_exceeds_max_degree
    }
}

fn screen(index: usize, f: &BiPoly, earlier: &[BiPoly]) -> Result<(), ExpError> {
    let defect = |defect| Err(ExpError::InvalidPolynomial { index, defect });
    if f.is_zero() {
        return defect(PolyDefect::Zero);
    }
    if f.partial_x().is_zero() {
        return defect(PolyDefect::NoSeparableX);
    }
    let min_a = f.terms().keys().map(|k| k.0).min().unwrap_or(0);
    let min_b = f.terms().keys().map(|k| k.1).min().unwrap_or(0);
    let is_cx = f.terms().len() == 1 && f.terms().contains_key(&(0, 1));
    if (min_a, min_b) != (0, 0) && !is_cx {
        return defect(PolyDefect::MonomialFactor);
    }
    for (j, g) in earlier.iter().enumerate() {
        if associates(f, g) {
            return defect(PolyDefect::AssociateOf(j));
        }
    }
    Ok(())
}

fn associates(f: &BiPoly, g: &BiPoly) -> bool {
    if f.terms().len() != g.terms().len() || !f.terms().keys().eq(g.terms().keys()) {
        return false;
    }
    let field = f.field();
    let (&k0, &c0) = f.terms().iter().next().expect("nonzero");
    let Ok(ratio) = field.div(c0, g.terms()[&k0]) else {
        return false;
    };
    f.terms().iter().all(|(k, &c)| field.mul(ratio, g.terms()[k]) == c)
}

/// Frobenius classes of `F_i(t, f(t))` over `f` of degree exactly `n`.
pub fn run_bateman_horn(cfg: &BHConfig, exec: &ExecOptions) -> Result<ExperimentReport, ExpError> {
    let started = Instant::now();
    let mut warnings = Vec::new();
    let Some(first) = cfg.polys.first() else {
        return Err(ExpError::OutOfRange("at least one polynomial F is required".into()));
    };
    if cfg.n == 0 {
        return Err(ExpError::OutOfRange("n must be at least 1".into()));
    }
    let field = first.field().clone();
    if cfg.polys.iter().any(|f| f.field() != &field) {
        return Err(ExpError::FieldMismatch);
    }
    for (i, f) in cfg.polys.iter().enumerate() {
        screen(i, f, &cfg.polys[..i])?;
    }
    let q = field.order();
    let p = field.characteristic();
    let generic: Vec<u32> = cfg.polys.iter().map(|f| f.generic_degree(cfg.n)).collect::<Result<_, _>>()?;

    let hypotheses = Hypotheses::evaluate(q, p, cfg.n, &generic);
    if !hypotheses.any() {
        let msg = format!(
            "none of: n >= 3; q odd and n >= 2; p > max generic degree {} (q = {q}, n = {})",
            generic.iter().max().unwrap_or(&0),
            cfg.n
        );
        if cfg.strict {
            return Err(ExpError::HypothesisViolation(msg));
        }
        warnings.push(format!("hypotheses violated: {msg}"));
    }

    let nu = match &cfg.nu {
        Some(nu) => {
            if nu.len() != cfg.polys.len() {
                return Err(ExpError::LengthMismatch { what: "nu", expected: cfg.polys.len(), got: nu.len() });
            }
            nu.clone()
        }
        None if field.is_prime_field() => {
            if p < NU_RELIABLE_MIN_P {
                warnings.push(format!("nu detection by point counting is unreliable for p = {p} < {NU_RELIABLE_MIN_P}"));
            }
            let mut out = Vec::with_capacity(cfg.polys.len());
            for (index, f) in cfg.polys.iter().enumerate() {
                let k_max = 2 * f.total_degree().unwrap_or(1);
                out.push(exec.install(|| detect_nu(f, k_max))?.map_err(|source| ExpError::NuUndetected { index, source })?);
            }
            out
        }
        None => {
            warnings.push(format!(
                "WARNING: q = {q} is not prime; nu cannot be detected and every nu_i is assumed to be 1"
            ));
            vec![1; cfg.polys.len()]
        }
    };
    let mut degrees = Vec::with_capacity(nu.len());
    for (index, (&g, &v)) in generic.iter().zip(&nu).enumerate() {
        if v == 0 || g % v != 0 {
            return Err(ExpError::NuIncompatible { index, nu: v, generic_degree: g });
        }
        degrees.push(g / v);
    }
    let shape = GroupShape::new(degrees, nu.clone())?;

    let n = cfg.n as usize;
    let mut radices = vec![q; n + 1];
    radices[n] = q - 1;
    let plan = cfg.mode.plan(population(&radices))?;
    let tally = run_trials(&radices, plan, cfg.seed, exec, |digits| {
        let mut coeffs = digits.to_vec();
        coeffs[n] += 1;
        let f = Poly::new(&field, coeffs);
        let mut parts = Vec::with_capacity(cfg.polys.len());
        for (big_f, &g) in cfg.polys.iter().zip(&generic) {
            let value = big_f.substitute(&f)?;
            match type_from_univariate(&value, g) {
                Ok(lambda) => parts.push(lambda),
                Err(e) => return Ok(Err(e)),
            }
        }
        Ok(Ok(ClassLabel::new(parts)))
    })?;

    let params = json!({
        "F": cfg.polys.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "n": cfg.n,
        "mode": cfg.mode,
        "nu": nu,
        "nu_supplied": cfg.nu.is_some(),
        "generic_degrees": generic,
        "hypotheses": hypotheses,
        "strict": cfg.strict,
        "pool_threshold": cfg.pool_threshold,
    });
    build_report(ReportInput {
        experiment: "bateman_horn",
        params,
        q,
        plan,
        shape,
        tally,
        seed: cfg.seed,
        pool_threshold: cfg.pool_threshold,
        warnings,
        started,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::groups::Partition;

    fn bi(field: &Field, terms: &[((u32, u32), i64)]) -> BiPoly {
        BiPoly::from_ints(field, terms.iter().copied())
    }

    fn exhaustive(polys: Vec<BiPoly>, n: u32) -> BHConfig {
        BHConfig { mode: Mode::Exhaustive, ..BHConfig::new(polys, n) }
    }

    #[test]
    fn linear_values_are_always_rational() {
        let f7 = Field::prime(7).unwrap();
        let cfg = exhaustive(vec![bi(&f7, &[((0, 1), 1), ((1, 0), -1)])], 1);
        let r = run_bateman_horn(&cfg, &ExecOptions::default()).unwrap();
        assert_eq!(r.trials, 42);
        assert_eq!(r.tv, Some(0.0));
        // A_1 = 1 cancels t
        assert_eq!(r.exclusions.degree_drop, 7);
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.shape, GroupShape::new(vec![1], vec![1]).unwrap());
    }

    #[test]
    fn quadratic_in_x_over_f13() {
        let f13 = Field::prime(13).unwrap();
        let cfg = exhaustive(vec![bi(&f13, &[((0, 2), 1), ((1, 0), 1)])], 2);
        let r = run_bateman_horn(&cfg, &ExecOptions::default()).unwrap();
        assert_eq!(r.trials, 2028);
        assert_eq!(r.shape, GroupShape::new(vec![4], vec![1]).unwrap());
        assert_eq!(r.trials, r.accepted + r.exclusions.total());
        assert!(r.tv.unwrap() < 2.0 / 13f64.sqrt());
    }

    #[test]
    fn wreath_shape_for_sum_of_squares() {
        let f11 = Field::prime(11).unwrap();
        let cfg = exhaustive(vec![bi(&f11, &[((0, 2), 1), ((2, 0), 1)])], 2);
        let r = run_bateman_horn(&cfg, &ExecOptions::default()).unwrap();
        assert_eq!(r.shape, GroupShape::new(vec![2], vec![2]).unwrap());
        let two_two = ClassLabel::single(Partition::new(vec![2, 2]));
        let four = ClassLabel::single(Partition::new(vec![4]));
        let predicted: Vec<_> = r.classes.iter().filter(|c| c.predicted > 0.0).map(|c| &c.label).collect();
        assert_eq!(predicted, [&two_two, &four]);
        assert!(r.classes.iter().all(|c| c.count == 0 || c.label == two_two || c.label == four));
    }

    #[test]
    fn degree_one_components_are_forced() {
        // over F_11, x^2 + t^2 splits into two conjugate lines, so with n = 1 it has
        // d = 1, nu = 2 and its component type must be {2}
        let f11 = Field::prime(11).unwrap();
        let polys = vec![bi(&f11, &[((0, 2), 1), ((2, 0), 1)]), bi(&f11, &[((0, 1), 1), ((0, 0), 1)])];
        let r = run_bateman_horn(&exhaustive(polys, 1), &ExecOptions::default()).unwrap();
        assert_eq!(r.shape, GroupShape::new(vec![1, 1], vec![2, 1]).unwrap());
        assert!(r.accepted > 0);
        let forced = ClassLabel::new(vec![Partition::new(vec![2]), Partition::new(vec![1])]);
        assert_eq!(r.count(&forced), r.accepted);
        assert_eq!(r.tv, Some(0.0));
    }

    #[test]
    fn screens_reject_degenerate_inputs() {
        let f5 = Field::prime(5).unwrap();
        let run = |polys| run_bateman_horn(&exhaustive(polys, 1), &ExecOptions::default());
        assert!(matches!(
            run(vec![BiPoly::zero(&f5)]),
            Err(ExpError::InvalidPolynomial { defect: PolyDefect::Zero, .. })
        ));
        assert!(matches!(
            run(vec![bi(&f5, &[((0, 5), 1), ((1, 0), 1)])]),
            Err(ExpError::InvalidPolynomial { defect: PolyDefect::NoSeparableX, .. })
        ));
        assert!(matches!(
            run(vec![bi(&f5, &[((1, 1), 1), ((2, 0), 1)])]),
            Err(ExpError::InvalidPolynomial { defect: PolyDefect::MonomialFactor, .. })
        ));
        let g = bi(&f5, &[((0, 1), 1), ((1, 0), 1)]);
        let g2 = bi(&f5, &[((0, 1), 2), ((1, 0), 2)]);
        assert!(matches!(
            run(vec![g, g2]),
            Err(ExpError::InvalidPolynomial { index: 1, defect: PolyDefect::AssociateOf(0) })
        ));
        assert!(run(vec![bi(&f5, &[((0, 1), 3)])]).is_ok());
    }

    #[test]
    fn hypotheses_and_strict_mode() {
        // q = 2, n = 1, and p = 2 does not exceed the generic degree 2
        let f2 = Field::prime(2).unwrap();
        let polys = vec![bi(&f2, &[((0, 2), 1), ((0, 1), 1), ((1, 0), 1)])];
        let cfg = BHConfig { nu: Some(vec![1]), ..exhaustive(polys, 1) };
        let lax = run_bateman_horn(&cfg, &ExecOptions::default()).unwrap();
        assert!(lax.warnings.iter().any(|w| w.contains("hypotheses violated")));
        let strict = BHConfig { strict: true, ..cfg };
        assert!(run_bateman_horn(&strict, &ExecOptions::default()).unwrap_err().is_hypothesis_violation());
    }

    #[test]
    fn non_prime_q_defaults_nu_to_one() {
        let f9 = crate::exp::field_for_order(9).unwrap();
        let cfg = exhaustive(vec![bi(&f9, &[((0, 2), 1), ((1, 0), 1)])], 1);
        let r = run_bateman_horn(&cfg, &ExecOptions::default()).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("not prime")));
        assert_eq!(r.trials, 72);
        let bad_nu = BHConfig { nu: Some(vec![1, 2]), ..cfg.clone() };
        assert!(matches!(run_bateman_horn(&bad_nu, &ExecOptions::default()), Err(ExpError::LengthMismatch { .. })));
        let odd_nu = BHConfig { nu: Some(vec![3]), ..cfg };
        assert!(matches!(run_bateman_horn(&odd_nu, &ExecOptions::default()), Err(ExpError::NuIncompatible { .. })));
    }
}
