use std::collections::BTreeMap;
use std::io::{self, Write};

use frobstat::exp::{ExperimentReport, GaloisReport, ScanReport};
use frobstat::groups::{ClassLabel, GroupShape, Prob};
use frobstat::selftest::SuiteOutcome;
use serde::Serialize;
use serde_json::json;

use crate::OutFormat;

fn to_f64(p: &Prob) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    writeln!(out, "{text}")
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

pub fn prediction(
    out: &mut dyn Write,
    format: OutFormat,
    shape: &GroupShape,
    law: &BTreeMap<ClassLabel, Prob>,
    full_cycle: Prob,
) -> io::Result<()> {
    match format {
        OutFormat::Json => {
            let classes: Vec<_> = law
                .iter()
                .map(|(label, p)| json!({ "label": label, "predicted": to_f64(p), "predicted_exact": p.to_string() }))
                .collect();
            json_line(
                out,
                &json!({
                    "experiment": "predict",
                    "shape": shape,
                    "classes": classes,
                    "full_cycle_probability": full_cycle.to_string(),
                }),
            )
        }
        OutFormat::Tsv => {
            writeln!(out, "# shape\tdegrees={}\tsplittings={}", join(shape.degrees()), join(shape.splittings()))?;
            writeln!(out, "# full_cycle_probability\t{full_cycle}")?;
            writeln!(out, "label\tpredicted\tpredicted_exact")?;
            for (label, p) in law {
                writeln!(out, "{label}\t{:.6}\t{p}", to_f64(p))?;
            }
            Ok(())
        }
    }
}

fn report_tsv(out: &mut dyn Write, r: &ExperimentReport) -> io::Result<()> {
    writeln!(out, "# experiment\t{}", r.experiment)?;
    writeln!(out, "# q\t{}", r.q)?;
    writeln!(out, "# mode\t{}", if r.exhaustive { "exhaustive" } else { "sample" })?;
    writeln!(out, "# trials\t{}\taccepted\t{}", r.trials, r.accepted)?;
    writeln!(
        out,
        "# exclusions\tnot_squarefree={}\tdegree_drop={}\tnot_transversal={}",
        r.exclusions.not_squarefree, r.exclusions.degree_drop, r.exclusions.not_transversal
    )?;
    writeln!(out, "# shape\tdegrees={}\tsplittings={}", join(r.shape.degrees()), join(r.shape.splittings()))?;
    writeln!(out, "# tv\t{}", fmt_opt(r.tv))?;
    match &r.chi2 {
        Some(c) => writeln!(out, "# chi2\tstat={:.6}\tdof={}\tp={:.6e}", c.stat, c.dof, c.p)?,
        None => writeln!(out, "# chi2\tNA")?,
    }
    writeln!(out, "# seed\t{}", r.seed)?;
    writeln!(out, "# runtime_ms\t{}", r.runtime_ms)?;
    writeln!(out, "label\tcount\tobserved\tpredicted\tpredicted_exact")?;
    for c in &r.classes {
        let observed = if r.accepted > 0 { c.count as f64 / r.accepted as f64 } else { 0.0 };
        writeln!(out, "{}\t{}\t{observed:.6}\t{:.6}\t{}", c.label, c.count, c.predicted, c.predicted_exact)?;
    }
    Ok(())
}

pub fn report(out: &mut dyn Write, format: OutFormat, r: &ExperimentReport) -> io::Result<()> {
    match format {
        OutFormat::Json => json_line(out, r),
        OutFormat::Tsv => report_tsv(out, r),
    }
}

pub fn galois(out: &mut dyn Write, format: OutFormat, r: &GaloisReport) -> io::Result<()> {
    if format == OutFormat::Json {
        return json_line(out, r);
    }
    writeln!(out, "# experiment\t{}", r.experiment)?;
    writeln!(out, "# verdict\t{}", r.verdict)?;
    writeln!(out, "# alpha\t{}", r.alpha)?;
    for l in &r.limitations {
        writeln!(out, "# limitation\t{l}")?;
    }
    writeln!(out, "q\ttrials\taccepted\ttv\tchi2\tdof\tp_value\trejects\twronskian_triple")?;
    for e in &r.per_q {
        let (stat, dof) = e.report.chi2.map_or(("NA".into(), "NA".into()), |c| (format!("{:.4}", c.stat), c.dof.to_string()));
        let triple = e.nonvanishing_wronskian.map_or_else(|| "none".to_string(), |t| join(&t));
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{stat}\t{dof}\t{}\t{}\t{triple}",
            e.q,
            e.report.trials,
            e.report.accepted,
            fmt_opt(e.report.tv),
            e.p_value.map_or_else(|| "NA".to_string(), |p| format!("{p:.6e}")),
            e.rejects
        )?;
    }
    if !r.witnesses.is_empty() {
        writeln!(out)?;
        writeln!(out, "q\tlabel\tcount\tobserved\tpredicted\tresidual")?;
        for w in &r.witnesses {
            writeln!(out, "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.3}", w.q, w.label, w.count, w.observed, w.predicted, w.residual)?;
        }
    }
    Ok(())
}

pub fn scan(out: &mut dyn Write, format: OutFormat, r: &ScanReport) -> io::Result<()> {
    if format == OutFormat::Json {
        return json_line(out, r);
    }
    writeln!(out, "# experiment\tscan\ttarget={}", r.target)?;
    writeln!(out, "# slope\t{:.6}", r.slope)?;
    writeln!(out, "# fit\tused={}\tdropped_zero_tv={}", r.fit.used, r.fit.dropped_zero_tv)?;
    writeln!(out, "# seed\t{}", r.seed)?;
    writeln!(out, "q\ttv\tsamples\tnot_squarefree\tdegree_drop\tnot_transversal")?;
    for p in &r.points {
        writeln!(
            out,
            "{}\t{:.6}\t{}\t{}\t{}\t{}",
            p.q, p.tv, p.samples, p.exclusions.not_squarefree, p.exclusions.degree_drop, p.exclusions.not_transversal
        )?;
    }
    Ok(())
}

pub fn selftest(out: &mut dyn Write, format: OutFormat, outcomes: &[SuiteOutcome]) -> io::Result<()> {
    if format == OutFormat::Json {
        return json_line(out, &outcomes);
    }
    for o in outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "{status}\t{}\t{} cases", o.name, o.cases)?;
        for f in &o.failures {
            writeln!(out, "\t{f}")?;
        }
    }
    Ok(())
}
