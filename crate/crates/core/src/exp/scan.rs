use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::bateman_horn::{run_bateman_horn, BHConfig};
use super::engine::{ExecOptions, Mode};
use super::intersect::{run_plane_intersections, IntersectConfig};
use super::report::{elapsed_ms, ExperimentReport};
use super::sections::{run_curve_sections, SectionsConfig};
use super::{field_for_order, ExpError};
use crate::mpoly::IntBiPoly;
use crate::stats::{fit_exponent, ExponentFit, ScanPoint, StatsError, POOL_THRESHOLD};

/// A single-q experiment with field-independent inputs.
#[derive(Clone, Debug)]
pub enum ScanExperiment {
    BatemanHorn { polys: Vec<IntBiPoly>, n: u32, nu: Option<Vec<u32>> },
    Intersections { d1: u32, d2: u32 },
    Sections { param: Vec<IntBiPoly> },
}

impl ScanExperiment {
    fn name(&self) -> &'static str {
        match self {
            ScanExperiment::BatemanHorn { .. } => "bateman_horn",
            ScanExperiment::Intersections { .. } => "plane_intersections",
            ScanExperiment::Sections { .. } => "curve_sections",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub experiment: ScanExperiment,
    pub qs: Vec<u64>,
    pub mode: Mode,
    pub seed: u64,
    pub strict: bool,
    pub pool_threshold: f64,
}

impl ScanConfig {
    pub fn new(experiment: ScanExperiment, qs: Vec<u64>) -> Self {
        ScanConfig { experiment, qs, mode: Mode::default(), seed: 0, strict: false, pool_threshold: POOL_THRESHOLD }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub experiment: String,
    pub target: String,
    pub params: Value,
    pub points: Vec<ScanPoint>,
    pub slope: f64,
    pub fit: ExponentFit,
    pub reports: Vec<ExperimentReport>,
    pub seed: u64,
    pub runtime_ms: u64,
    pub warnings: Vec<String>,
}

fn run_one(cfg: &ScanConfig, q: u64, exec: &ExecOptions) -> Result<ExperimentReport, ExpError> {
    match &cfg.experiment {
        ScanExperiment::BatemanHorn { polys, n, nu } => {
            let field = field_for_order(q)?;
            let bh = BHConfig {
                polys: polys.iter().map(|f| f.bind(&field)).collect(),
                n: *n,
                mode: cfg.mode,
                seed: cfg.seed,
                strict: cfg.strict,
                nu: nu.clone(),
                pool_threshold: cfg.pool_threshold,
            };
            run_bateman_horn(&bh, exec)
        }
        &ScanExperiment::Intersections { d1, d2 } => {
            let ic = IntersectConfig { d1, d2, q, mode: cfg.mode, seed: cfg.seed, pool_threshold: cfg.pool_threshold };
            run_plane_intersections(&ic, exec)
        }
        ScanExperiment::Sections { param } => {
            let sc = SectionsConfig {
                param: param.clone(),
                q,
                mode: cfg.mode,
                seed: cfg.seed,
                pool_threshold: cfg.pool_threshold,
            };
            run_curve_sections(&sc, exec)
        }
    }
}

/// Runs the experiment at each `q` and fits `log tv` against `log q`.
pub fn run_q_scan(cfg: &ScanConfig, exec: &ExecOptions) -> Result<ScanReport, ExpError> {
    let started = Instant::now();
    if cfg.qs.len() < 3 {
        return Err(StatsError::InsufficientData(cfg.qs.len()).into());
    }
    let mut warnings = Vec::new();
    let mut points = Vec::with_capacity(cfg.qs.len());
    let mut reports = Vec::with_capacity(cfg.qs.len());
    for &q in &cfg.qs {
        let report = run_one(cfg, q, exec)?;
        match report.tv {
            Some(tv) => points.push(ScanPoint { q, tv, samples: report.accepted, exclusions: report.exclusions }),
            None => warnings.push(format!("q = {q} produced no accepted trial and is left out of the fit")),
        }
        reports.push(report);
    }
    let fit = fit_exponent(&points)?;
    if fit.dropped_zero_tv > 0 {
        warnings.push(format!("{} points with tv = 0 were left out of the fit", fit.dropped_zero_tv));
    }
    let params = match &cfg.experiment {
        ScanExperiment::BatemanHorn { polys, n, nu } => json!({
            "F": polys.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "n": n,
            "nu": nu,
            "strict": cfg.strict,
        }),
        ScanExperiment::Intersections { d1, d2 } => json!({ "d1": d1, "d2": d2 }),
        ScanExperiment::Sections { param } => json!({
            "param": param.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        }),
    };
    let params = json!({ "experiment": params, "q": cfg.qs, "mode": cfg.mode, "pool_threshold": cfg.pool_threshold });
    Ok(ScanReport {
        experiment: "scan".into(),
        target: cfg.experiment.name().into(),
        params,
        points,
        slope: fit.slope,
        fit,
        reports,
        seed: cfg.seed,
        runtime_ms: elapsed_ms(started),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn needs_three_values_of_q() {
        let cfg = ScanConfig::new(ScanExperiment::Intersections { d1: 1, d2: 2 }, vec![]);
        assert!(matches!(run_q_scan(&cfg, &ExecOptions::default()), Err(ExpError::InsufficientData(_))));
        let cfg = ScanConfig::new(ScanExperiment::Intersections { d1: 1, d2: 2 }, vec![5, 7]);
        assert!(matches!(run_q_scan(&cfg, &ExecOptions::default()), Err(ExpError::InsufficientData(_))));
    }

    #[test]
    fn sections_scan_reports_each_q() {
        let param = vec![IntBiPoly::new([((3, 0), 1)]), IntBiPoly::new([((1, 0), 1)]), IntBiPoly::new([((0, 0), 1)])];
        let cfg = ScanConfig { mode: Mode::Exhaustive, ..ScanConfig::new(ScanExperiment::Sections { param }, vec![7, 11, 13, 9]) };
        let r = run_q_scan(&cfg, &ExecOptions::default()).unwrap();
        assert_eq!(r.reports.len(), 4);
        assert_eq!(r.points.iter().map(|p| p.q).collect::<Vec<_>>(), [7, 11, 13, 9]);
        assert!(r.slope.is_finite());
        assert_eq!(r.target, "curve_sections");
    }
}
