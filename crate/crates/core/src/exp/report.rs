use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use super::engine::{Plan, Tally};
use super::{ExpError, RARITY_CONSTANT};
use crate::frob::Exclusions;
use crate::groups::{predict, ClassLabel, GroupShape};
use crate::stats::{chi_square, tv_distance, ChiSquare, Distribution};

/// One class of the comparison table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassRow {
    pub label: ClassLabel,
    pub count: u64,
    pub predicted: f64,
    pub predicted_exact: String,
}

/// Outcome of a single-q experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: Value,
    pub q: u64,
    pub exhaustive: bool,
    pub trials: u64,
    pub accepted: u64,
    pub exclusions: Exclusions,
    pub shape: GroupShape,
    pub classes: Vec<ClassRow>,
    pub tv: Option<f64>,
    pub chi2: Option<ChiSquare>,
    pub seed: u64,
    pub runtime_ms: u64,
    pub warnings: Vec<String>,
}

impl ExperimentReport {
    pub fn empirical(&self) -> Distribution<ClassLabel> {
        let n = self.accepted as f64;
        Distribution::new(
            self.classes
                .iter()
                .filter(|c| c.count > 0)
                .map(|c| (c.label.clone(), c.count as f64 / n))
                .collect(),
        )
    }

    pub fn predicted(&self) -> Distribution<ClassLabel> {
        Distribution::new(
            self.classes
                .iter()
                .filter(|c| c.predicted > 0.0)
                .map(|c| (c.label.clone(), c.predicted))
                .collect(),
        )
    }

    pub fn count(&self, label: &ClassLabel) -> u64 {
        self.classes.iter().find(|c| &c.label == label).map_or(0, |c| c.count)
    }

    pub fn exclusion_fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.exclusions.total() as f64 / self.trials as f64
        }
    }
}

pub(crate) struct ReportInput<'a> {
    pub experiment: &'a str,
    pub params: Value,
    pub q: u64,
    pub plan: Plan,
    pub shape: GroupShape,
    pub tally: Tally,
    pub seed: u64,
    pub pool_threshold: f64,
    pub warnings: Vec<String>,
    pub started: Instant,
}

pub(crate) fn build_report(input: ReportInput<'_>) -> Result<ExperimentReport, ExpError> {
    let ReportInput { experiment, params, q, plan, shape, tally, seed, pool_threshold, mut warnings, started } =
        input;
    let accepted = tally.counts.total();
    if tally.trials != accepted + tally.exclusions.total() || tally.trials != plan.trials() {
        return Err(ExpError::Invariant(format!(
            "{} trials planned, {} run, {} accepted, {} excluded",
            plan.trials(),
            tally.trials,
            accepted,
            tally.exclusions.total()
        )));
    }
    let law = predict(&shape)?;
    let predicted = Distribution::from_exact(&law);

    let labels: BTreeSet<&ClassLabel> = law.keys().chain(tally.counts.iter().map(|(k, _)| k)).collect();
    let mut classes = Vec::with_capacity(labels.len());
    for label in labels {
        let count = tally.counts.get(label);
        if count > 0 && !label.fits(&shape) {
            warnings.push(format!("observed class {label} is not a class of the predicted coset"));
        }
        let exact = law.get(label).copied().unwrap_or_default();
        classes.push(ClassRow {
            label: label.clone(),
            count,
            predicted: predicted.prob(label),
            predicted_exact: exact.to_string(),
        });
    }

    let (tv, chi2) = if accepted == 0 {
        warnings.push("no trial was accepted".to_string());
        (None, None)
    } else {
        let empirical = Distribution::from_counts(&tally.counts);
        let tv = tv_distance(&empirical, &predicted)?;
        (Some(tv), chi_square(&tally.counts, &predicted, pool_threshold).ok())
    };

    if tally.trials > 0 {
        let fraction = tally.exclusions.total() as f64 / tally.trials as f64;
        if fraction > RARITY_CONSTANT / q as f64 {
            warnings.push(format!(
                "exclusion fraction {fraction:.4} exceeds {RARITY_CONSTANT}/q = {:.4}",
                RARITY_CONSTANT / q as f64
            ));
        }
    }

    Ok(ExperimentReport {
        experiment: experiment.to_string(),
        params,
        q,
        exhaustive: plan.is_exhaustive(),
        trials: tally.trials,
        accepted,
        exclusions: tally.exclusions,
        shape,
        classes,
        tv,
        chi2,
        seed,
        runtime_ms: elapsed_ms(started),
        warnings,
    })
}

pub(crate) fn elapsed_ms(started: Instant) -> u64 {
    started.elapsed().as_millis() as u64
}

/// JSON text of `value` with every `runtime_ms` field removed, for reproducibility checks.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(map) => {
                map.remove("runtime_ms");
                map.values_mut().for_each(strip);
            }
            Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v = serde_json::to_value(value).expect("reports serialize");
    strip(&mut v);
    v.to_string()
}
