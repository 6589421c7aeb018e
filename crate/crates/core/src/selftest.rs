//! Oracle-equivalence suites: each fast routine against an independent slow one.

use serde::Serialize;

use crate::ff::{make_field, Field};
use crate::frob::{type_from_point_counts, type_from_univariate, Exclusion};
use crate::groups::{full_cycle_probability, predict, wreath_oracle, ClassLabel, GroupShape, Prob};
use crate::mpoly::{resultant, BiPoly, Var};
use crate::poly::Poly;
use crate::rng::{stream_seed, SplitMix64};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Suite {
    name: &'static str,
    cases: u64,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, cases: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        // keep reports short
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn done(self) -> SuiteOutcome {
        SuiteOutcome { name: self.name, cases: self.cases, failures: self.failures }
    }
}

/// All monic polynomials of degree `d` over the prime field `f`, in lexicographic order.
fn monic_of_degree(f: &Field, d: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = f.order();
    let count = q.pow(d as u32);
    (0..count).map(move |mut i| {
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push(i % q);
            i /= q;
        }
        c.push(1);
        Poly::new(f, c)
    })
}

/// Monic irreducibles of degree `1..=max_degree`, by sieving out products of smaller ones.
pub fn irreducibles_up_to(f: &Field, max_degree: usize) -> Vec<Poly> {
    let mut found: Vec<Poly> = Vec::new();
    for d in 1..=max_degree {
        let fresh: Vec<Poly> = monic_of_degree(f, d)
            .filter(|g| {
                found
                    .iter()
                    .take_while(|h| 2 * h.degree().unwrap_or(0) <= d)
                    .all(|h| !g.rem(h).map(|r| r.is_zero()).unwrap_or(false))
            })
            .collect();
        found.extend(fresh);
    }
    found
}

/// Factorization type by trial division with `irreducibles`, which must contain every
/// monic irreducible of degree up to `deg g / 2`.
pub fn trial_division_type(g: &Poly, irreducibles: &[Poly]) -> Result<Vec<u32>, Exclusion> {
    let mut rest = g.monic();
    let mut parts = Vec::new();
    for h in irreducibles {
        let e = h.degree().unwrap_or(0);
        if 2 * e > rest.degree().unwrap_or(0) {
            break;
        }
        let (quot, r) = rest.divrem(h).expect("nonzero divisor");
        if r.is_zero() {
            if quot.rem(h).expect("nonzero divisor").is_zero() {
                return Err(Exclusion::NotSquarefree);
            }
            parts.push(e as u32);
            rest = quot;
        }
    }
    if let Some(d) = rest.degree().filter(|&d| d > 0) {
        parts.push(d as u32);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Ok(parts)
}

/// `deg gcd(g, t^{q^k} - t)`: the number of roots of a squarefree `g` in `F_{q^k}`,
/// computed without any factorization.
pub fn roots_by_gcd(g: &Poly, k: u32) -> u64 {
    let q = g.field().order();
    let frob = Poly::t(g.field()).pow_mod(q.pow(k), g).expect("nonzero modulus");
    let h = frob.sub(&Poly::t(g.field())).expect("same field");
    g.gcd(&h).expect("same field").degree().unwrap_or(0) as u64
}

fn random_monic(f: &Field, rng: &mut SplitMix64, max_degree: u64) -> Poly {
    let d = 1 + rng.below(max_degree) as usize;
    let mut c: Vec<u64> = (0..d).map(|_| rng.below(f.order())).collect();
    c.push(1);
    Poly::new(f, c)
}

fn field_axioms(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("field axioms in F_{p^k}");
    for (i, &(p, k)) in [(2u64, 3u32), (2, 8), (3, 4), (5, 3), (7, 2), (101, 2), (3, 11)].iter().enumerate() {
        let f = match make_field(p, k, seed) {
            Ok(f) => f,
            Err(e) => {
                s.check(false, || format!("F_{p}^{k}: {e}"));
                continue;
            }
        };
        let q = f.order();
        let mut rng = SplitMix64::new(stream_seed(seed, i as u64));
        for _ in 0..200 {
            let (a, b, c) = (rng.below(q), rng.below(q), rng.below(q));
            s.check(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)), || format!("distributivity in F_{q}"));
            s.check(f.pow(a, q) == a, || format!("a^q != a for a = {a} in F_{q}"));
            if a != 0 {
                let inv = f.inv(a).unwrap_or(0);
                s.check(f.mul(a, inv) == 1, || format!("bad inverse of {a} in F_{q}"));
            }
        }
    }
    s.done()
}

fn ddf_vs_trial_division(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("distinct-degree types vs trial division");
    for (i, p) in [2u64, 3, 5, 7].into_iter().enumerate() {
        let f = Field::prime(p).expect("prime");
        let irr = irreducibles_up_to(&f, 4);
        let mut rng = SplitMix64::new(stream_seed(seed, 100 + i as u64));
        for _ in 0..150 {
            let g = random_monic(&f, &mut rng, 8);
            let d = g.degree().unwrap_or(0) as u32;
            let fast = type_from_univariate(&g, d).map(|p| p.parts().to_vec());
            let slow = trial_division_type(&g, &irr);
            s.check(fast == slow, || format!("{} over F_{p}: {fast:?} vs {slow:?}", g.display_with('t')));
        }
    }
    s.done()
}

fn ddf_vs_point_counts(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("distinct-degree types vs Moebius inversion of root counts");
    for (i, p) in [2u64, 3, 5, 7].into_iter().enumerate() {
        let f = Field::prime(p).expect("prime");
        let mut rng = SplitMix64::new(stream_seed(seed, 200 + i as u64));
        let mut done = 0;
        while done < 150 {
            let g = random_monic(&f, &mut rng, 8);
            if !g.is_squarefree().unwrap_or(false) {
                continue;
            }
            done += 1;
            let d = g.degree().unwrap_or(0) as u32;
            let counts: Vec<u64> = (1..=d).map(|k| roots_by_gcd(&g, k)).collect();
            let fast = type_from_univariate(&g, d);
            let slow = type_from_point_counts(&counts, d);
            s.check(fast.is_ok() && fast == slow, || format!("{} over F_{p}: {fast:?} vs {slow:?}", g.display_with('t')));
            let reported: Vec<u64> = (1..=d).map(|k| g.count_roots_in_extension(k).unwrap_or(u64::MAX)).collect();
            s.check(reported == counts, || format!("{}: root counts {reported:?} vs {counts:?}", g.display_with('t')));
        }
    }
    s.done()
}

fn roots_vs_evaluation(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("root counts vs evaluation over F_{p^k}");
    for (i, (p, k)) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 2)].into_iter().enumerate() {
        let f = Field::prime(p).expect("prime");
        let ext = match make_field(p, k, seed) {
            Ok(e) => e,
            Err(e) => {
                s.check(false, || format!("F_{p}^{k}: {e}"));
                continue;
            }
        };
        let mut rng = SplitMix64::new(stream_seed(seed, 300 + i as u64));
        let mut done = 0;
        while done < 40 {
            let g = random_monic(&f, &mut rng, 6);
            if !g.is_squarefree().unwrap_or(false) {
                continue;
            }
            done += 1;
            // prime-subfield coefficients keep their encoding in the extension
            let lifted = Poly::new(&ext, g.coeffs().to_vec());
            let by_eval = (0..ext.order()).filter(|&a| lifted.eval(a) == 0).count() as u64;
            let fast = g.count_roots_in_extension(k).unwrap_or(u64::MAX);
            s.check(fast == by_eval, || format!("{} over F_{p}^{k}: {fast} vs {by_eval}", g.display_with('t')));
        }
    }
    s.done()
}

fn predict_vs_wreath() -> SuiteOutcome {
    let mut s = Suite::new("predicted coset law vs brute-force wreath enumeration");
    for d in 1..=4u32 {
        for nu in 1..=3u32 {
            let shape = GroupShape::new(vec![d], vec![nu]).expect("valid shape");
            let predicted = predict(&shape).map(|law| {
                law.into_iter().map(|(label, p)| (label.components()[0].clone(), p)).collect::<Vec<_>>()
            });
            let oracle = wreath_oracle(d, nu).map(|law| law.into_iter().collect::<Vec<_>>());
            s.check(predicted.is_ok() && predicted == oracle, || format!("d = {d}, nu = {nu}"));
        }
    }
    s.done()
}

fn full_cycle_products() -> SuiteOutcome {
    let mut s = Suite::new("full-cycle probability is the product of 1/d_i");
    for d1 in 1..=6u32 {
        for d2 in 1..=6u32 {
            for nu1 in 1..=3u32 {
                let shape = GroupShape::new(vec![d1, d2], vec![nu1, 1]).expect("valid shape");
                let got = full_cycle_probability(&shape);
                let want = Prob::new(1, (d1 * d2) as i64);
                s.check(got == Ok(want), || format!("{shape:?}: {got:?}"));
            }
        }
    }
    s.done()
}

fn resultant_vs_common_roots(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("resultant zeros vs common roots of specializations");
    let p = 7u64;
    let f = Field::prime(p).expect("prime");
    let mut rng = SplitMix64::new(stream_seed(seed, 400));
    let mut random_bipoly = |deg: u32| -> BiPoly {
        let monomials: Vec<(u32, u32)> = (0..=deg).flat_map(|a| (0..=deg - a).map(move |b| (a, b))).collect();
        BiPoly::new(&f, monomials.into_iter().map(|m| (m, rng.below(p))))
    };
    for _ in 0..150 {
        let (a, b) = (random_bipoly(2), random_bipoly(2));
        if a.deg_x().unwrap_or(0) == 0 || b.deg_x().unwrap_or(0) == 0 {
            continue;
        }
        let Ok(r) = resultant(&a, &b, Var::X) else {
            s.check(false, || format!("resultant failed for {a} / {b}"));
            continue;
        };
        let (ca, cb) = (a.coefficients_in(Var::X), b.coefficients_in(Var::X));
        for t0 in 0..p {
            let at = |c: &[Poly]| Poly::new(&f, c.iter().map(|k| k.eval(t0)).collect());
            let (sa, sb) = (at(&ca), at(&cb));
            // specialization commutes with the resultant only when both leading terms survive
            if sa.degree() != a.deg_x().map(|d| d as usize) || sb.degree() != b.deg_x().map(|d| d as usize) {
                continue;
            }
            let common = sa.gcd(&sb).map(|g| g.degree().unwrap_or(0) > 0).unwrap_or(false);
            s.check((r.eval(t0) == 0) == common, || format!("{a} / {b} at t = {t0}"));
        }
    }
    s.done()
}

fn labels_fit_predictions() -> SuiteOutcome {
    let mut s = Suite::new("predicted labels fit their shape and sum to one");
    for shape in [vec![(3u32, 1u32), (2, 2)], vec![(4, 1)], vec![(2, 3), (1, 2), (5, 1)]] {
        let (d, nu): (Vec<u32>, Vec<u32>) = shape.into_iter().unzip();
        let shape = GroupShape::new(d, nu).expect("valid shape");
        match predict(&shape) {
            Ok(law) => {
                let total: Prob = law.values().copied().sum();
                s.check(total == Prob::from_integer(1), || format!("{shape:?} sums to {total}"));
                s.check(law.keys().all(|l: &ClassLabel| l.fits(&shape)), || format!("{shape:?}: stray label"));
            }
            Err(e) => s.check(false, || format!("{shape:?}: {e}")),
        }
    }
    s.done()
}

/// Runs every suite.
pub fn run_all(seed: u64) -> Vec<SuiteOutcome> {
    vec![
        field_axioms(seed),
        ddf_vs_trial_division(seed),
        ddf_vs_point_counts(seed),
        roots_vs_evaluation(seed),
        predict_vs_wreath(),
        full_cycle_products(),
        resultant_vs_common_roots(seed),
        labels_fit_predictions(),
    ]
}
