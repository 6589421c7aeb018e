//! Empirical laws, distances to a prediction, chi-square tests and the
//! error-exponent fit.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::frob::Exclusions;
use crate::groups::Prob;

/// Default expected-count threshold below which chi-square cells are pooled.
pub const POOL_THRESHOLD: f64 = 5.0;

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("distribution is not normalized (total mass {0})")]
    NotNormalized(f64),
    #[error("fewer than two cells remain after pooling")]
    TooFewCells,
    #[error("need at least two points with tv > 0 and distinct q, got {0}")]
    InsufficientData(usize),
}

/// Integer tallies keyed by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts<K: Ord> {
    cells: BTreeMap<K, u64>,
    total: u64,
}

impl<K: Ord> Default for Counts<K> {
    fn default() -> Self {
        Counts { cells: BTreeMap::new(), total: 0 }
    }
}

impl<K: Ord + Clone> Counts<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: K, n: u64) {
        *self.cells.entry(key).or_insert(0) += n;
        self.total += n;
    }

    pub fn merge(&mut self, other: &Counts<K>) {
        for (k, &n) in &other.cells {
            self.add(k.clone(), n);
        }
    }

    pub fn get(&self, key: &K) -> u64 {
        self.cells.get(key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, u64)> {
        self.cells.iter().map(|(k, &n)| (k, n))
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

impl<K: Ord + Clone> FromIterator<(K, u64)> for Counts<K> {
    fn from_iter<I: IntoIterator<Item = (K, u64)>>(iter: I) -> Self {
        let mut c = Counts::new();
        for (k, n) in iter {
            c.add(k, n);
        }
        c
    }
}

/// A probability law on labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<K: Ord> {
    probs: BTreeMap<K, f64>,
}

impl<K: Ord + Clone> Distribution<K> {
    /// Wraps raw masses without checking them.
    pub fn new(probs: BTreeMap<K, f64>) -> Self {
        Distribution { probs }
    }

    /// Empirical law of `counts`; empty when no counts were recorded.
    pub fn from_counts(counts: &Counts<K>) -> Self {
        let n = counts.total() as f64;
        Distribution {
            probs: counts.iter().map(|(k, c)| (k.clone(), c as f64 / n)).collect(),
        }
    }

    pub fn from_exact(law: &BTreeMap<K, Prob>) -> Self {
        Distribution {
            probs: law
                .iter()
                .map(|(k, p)| (k.clone(), p.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }

    pub fn prob(&self, key: &K) -> f64 {
        self.probs.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.probs.iter().map(|(k, &p)| (k, p))
    }

    pub fn mass(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.probs.values().all(|&p| p >= 0.0 && p.is_finite())
            && (self.mass() - 1.0).abs() <= NORMALIZATION_TOLERANCE
    }

    fn check(&self) -> Result<(), StatsError> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(StatsError::NotNormalized(self.mass()))
        }
    }
}

/// Half the l1 distance over the union of supports.
pub fn tv_distance<K: Ord + Clone>(p: &Distribution<K>, q: &Distribution<K>) -> Result<f64, StatsError> {
    p.check()?;
    q.check()?;
    let mut sum = 0.0;
    for (k, a) in p.iter() {
        sum += (a - q.prob(k)).abs();
    }
    for (k, b) in q.iter() {
        if !p.probs.contains_key(k) {
            sum += b;
        }
    }
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

/// `0.5 * sum_c sqrt(p_c (1 - p_c) / n)`, a first-order standard error for the
/// tv distance between an `n`-sample empirical law and `p`.
pub fn tv_standard_error<K: Ord + Clone>(p: &Distribution<K>, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    0.5 * p.iter().map(|(_, pc)| (pc * (1.0 - pc) / n as f64).max(0.0).sqrt()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub stat: f64,
    pub dof: usize,
    pub p: f64,
}

/// Pearson's test of `observed` against `expected` scaled to the observed total.
///
/// Cells are visited in label order. A cell whose expected count is below
/// `pool_threshold` joins a single pooled bucket. If the bucket itself stays
/// below the threshold it is folded into the standing cell with the smallest
/// expected count.
pub fn chi_square<K: Ord + Clone>(
    observed: &Counts<K>,
    expected: &Distribution<K>,
    pool_threshold: f64,
) -> Result<ChiSquare, StatsError> {
    expected.check()?;
    let n = observed.total() as f64;
    let mut labels: Vec<&K> = expected.probs.keys().collect();
    for (k, _) in observed.iter() {
        if !expected.probs.contains_key(k) {
            labels.push(k);
        }
    }
    labels.sort();

    // (observed, expected)
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    let mut pooled_any = false;
    for k in labels {
        let o = observed.get(k) as f64;
        let e = n * expected.prob(k);
        if e >= pool_threshold {
            cells.push((o, e));
        } else {
            pool.0 += o;
            pool.1 += e;
            pooled_any = true;
        }
    }
    if pooled_any {
        if pool.1 >= pool_threshold {
            cells.push(pool);
        } else if let Some(smallest) = cells
            .iter_mut()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        {
            smallest.0 += pool.0;
            smallest.1 += pool.1;
        } else {
            cells.push(pool);
        }
    }
    if cells.len() < 2 {
        return Err(StatsError::TooFewCells);
    }
    let stat: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let law = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    Ok(ChiSquare { stat, dof, p: law.sf(stat) })
}

/// One q of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub q: u64,
    pub tv: f64,
    pub samples: u64,
    pub exclusions: Exclusions,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub used: usize,
    pub dropped_zero_tv: usize,
}

/// Least-squares slope of `log tv` against `log q`.
pub fn fit_exponent(points: &[ScanPoint]) -> Result<ExponentFit, StatsError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.tv > 0.0)
        .map(|p| ((p.q as f64).ln(), p.tv.ln()))
        .collect();
    let dropped = points.len() - usable.len();
    let n = usable.len();
    if n < 2 {
        return Err(StatsError::InsufficientData(n));
    }
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(StatsError::InsufficientData(n));
    }
    let slope = sxy / sxx;
    Ok(ExponentFit { slope, intercept: my - slope * mx, used: n, dropped_zero_tv: dropped })
}
