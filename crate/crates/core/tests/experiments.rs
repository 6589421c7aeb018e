use frobstat::exp::{
    canonical_json, run_bateman_horn, run_curve_sections, run_galois_detect, run_plane_intersections, run_q_scan,
    BHConfig, ExecOptions, ExpError, GaloisConfig, IntersectConfig, Mode, ScanConfig, ScanExperiment,
    SectionsConfig,
};
use frobstat::ff::Field;
use frobstat::groups::{ClassLabel, GroupShape, Partition};
use frobstat::mpoly::{BiPoly, IntBiPoly};
use frobstat::stats::{fit_exponent, tv_distance, tv_standard_error, ScanPoint};
use proptest::prelude::*;

fn label(parts: &[u32]) -> ClassLabel {
    ClassLabel::single(Partition::new(parts.to_vec()))
}

fn pencil(exps: &[u32]) -> Vec<IntBiPoly> {
    exps.iter().map(|&a| IntBiPoly::new([((a, 0), 1)])).collect()
}

fn exec() -> ExecOptions {
    ExecOptions::default()
}

#[test]
fn bateman_horn_sampling_agrees_with_enumeration() {
    let f13 = Field::prime(13).unwrap();
    let f = BiPoly::from_ints(&f13, [((0, 2), 1), ((1, 0), 1)]);
    let full = run_bateman_horn(&BHConfig { mode: Mode::Exhaustive, ..BHConfig::new(vec![f.clone()], 2) }, &exec())
        .unwrap();
    let sampled =
        run_bateman_horn(&BHConfig { mode: Mode::Sample(20_000), seed: 5, ..BHConfig::new(vec![f], 2) }, &exec())
            .unwrap();
    assert!(full.exhaustive && !sampled.exhaustive);
    let se = tv_standard_error(&full.empirical(), sampled.accepted);
    let gap = (sampled.tv.unwrap() - full.tv.unwrap()).abs();
    assert!(gap <= 3.0 * se, "gap {gap} vs 3 se {}", 3.0 * se);
    // the sampled law is close to the exact one
    assert!(tv_distance(&sampled.empirical(), &full.empirical()).unwrap() <= 6.0 * se);
}

#[test]
fn intersections_examples() {
    let lines = run_plane_intersections(
        &IntersectConfig { mode: Mode::Budget(200_000), ..IntersectConfig::new(1, 1, 7) },
        &exec(),
    )
    .unwrap();
    assert!(lines.exhaustive);
    assert_eq!(lines.tv, Some(0.0));
    assert!(lines.classes.iter().all(|c| c.label == label(&[1])));

    let conics = run_plane_intersections(
        &IntersectConfig { mode: Mode::Sample(5000), seed: 42, ..IntersectConfig::new(2, 2, 11) },
        &exec(),
    )
    .unwrap();
    assert_eq!(conics.shape, GroupShape::new(vec![4], vec![1]).unwrap());
    assert_eq!(conics.trials, 5000);
    let predicted: Vec<(ClassLabel, String)> =
        conics.classes.iter().map(|c| (c.label.clone(), c.predicted_exact.clone())).collect();
    assert_eq!(
        predicted,
        [
            (label(&[1, 1, 1, 1]), "1/24".to_string()),
            (label(&[2, 1, 1]), "1/4".to_string()),
            (label(&[2, 2]), "1/8".to_string()),
            (label(&[3, 1]), "1/3".to_string()),
            (label(&[4]), "1/4".to_string()),
        ]
    );
    let bound = 2.0 / 11f64.sqrt() + 3.0 * tv_standard_error(&conics.predicted(), conics.accepted);
    assert!(conics.tv.unwrap() <= bound);
}

#[test]
fn sections_examples() {
    let trinomial = run_curve_sections(
        &SectionsConfig { mode: Mode::Budget(20_000), seed: 1, ..SectionsConfig::new(pencil(&[5, 1, 0]), 31) },
        &exec(),
    )
    .unwrap();
    assert_eq!(trinomial.shape, GroupShape::new(vec![5], vec![1]).unwrap());
    assert_eq!(trinomial.trials, 31 * 31);
    assert!(trinomial.tv.unwrap() < 2.0 / 31f64.sqrt());

    let biquadratic =
        run_curve_sections(&SectionsConfig { mode: Mode::Exhaustive, ..SectionsConfig::new(pencil(&[4, 2, 0]), 31) }, &exec())
            .unwrap();
    assert_eq!(biquadratic.count(&label(&[3, 1])), 0);
    // only classes of the dihedral group of order 8 occur
    for c in biquadratic.classes.iter().filter(|c| c.count > 0) {
        assert!([label(&[1, 1, 1, 1]), label(&[2, 1, 1]), label(&[2, 2]), label(&[4])].contains(&c.label));
    }
}

#[test]
fn galois_on_a_quadratic_pencil() {
    let r = run_galois_detect(&GaloisConfig::new(pencil(&[0, 1, 2]), vec![7, 11], 1e-3), &exec()).unwrap();
    assert_eq!(r.verdict.to_string(), "consistent with S_2");
    assert_eq!(r.limitations.len(), 2);
}

#[test]
fn scan_fit_and_errors() {
    let pts = [(4u64, 0.5), (16, 0.25)].map(|(q, tv)| ScanPoint { q, tv, samples: 1, exclusions: Default::default() });
    assert!((fit_exponent(&pts).unwrap().slope + 0.5).abs() < 1e-12);
    let cfg = ScanConfig::new(ScanExperiment::Sections { param: pencil(&[3, 1, 0]) }, vec![]);
    assert!(matches!(run_q_scan(&cfg, &exec()), Err(ExpError::InsufficientData(_))));
}

#[test]
fn report_json_has_stable_field_names() {
    let r = run_curve_sections(&SectionsConfig::new(pencil(&[3, 1, 0]), 7), &exec()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["experiment", "params", "q", "trials", "exclusions", "shape", "classes", "tv", "chi2", "seed", "runtime_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["not_squarefree", "degree_drop", "not_transversal"] {
        assert!(v["exclusions"].get(key).is_some(), "missing exclusions.{key}");
    }
    assert!(v["shape"].get("degrees").is_some() && v["shape"].get("splittings").is_some());
    let first = &v["classes"][0];
    assert!(first["label"].is_array() && first["label"][0].is_array());
    assert!(first.get("count").is_some() && first.get("predicted").is_some());
    for key in ["stat", "dof", "p"] {
        assert!(v["chi2"].get(key).is_some());
    }
}

fn small_bipoly() -> impl Strategy<Value = Vec<((u32, u32), i64)>> {
    prop::collection::vec(((0u32..3, 0u32..3), -3i64..4), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exclusion_accounting_and_worker_independence(
        terms in small_bipoly(),
        q in prop::sample::select(vec![5u64, 7, 11]),
        n in 1u32..3,
        seed in any::<u64>(),
    ) {
        let field = Field::prime(q).unwrap();
        let mut f = BiPoly::from_ints(&field, terms.into_iter().chain([((0, 1), 1)]));
        if f.terms().keys().all(|&(a, b)| a > 0 || b > 0) {
            f = f.add(&BiPoly::from_ints(&field, [((0, 0), 1)])).unwrap();
        }
        let cfg = BHConfig { mode: Mode::Sample(300), seed, nu: Some(vec![1]), ..BHConfig::new(vec![f], n) };
        let one = run_bateman_horn(&cfg, &ExecOptions::with_workers(1));
        let three = run_bateman_horn(&cfg, &ExecOptions::with_workers(3));
        match (one, three) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.trials, 300);
                prop_assert_eq!(a.trials, a.accepted + a.exclusions.total());
                prop_assert_eq!(a.accepted, a.classes.iter().map(|c| c.count).sum::<u64>());
                prop_assert_eq!(canonical_json(&a), canonical_json(&b));
            }
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            (a, b) => prop_assert!(false, "worker count changed the outcome: {:?} / {:?}", a.is_ok(), b.is_ok()),
        }
    }
}
