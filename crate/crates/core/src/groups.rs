//! Cycle types, conjugacy-class sizes and predicted Frobenius-class laws.
//!
//! For a group shape with degrees `d_i` and splittings `nu_i` the ambient group is
//! the product of the wreath products `S_{d_i} wr Z/nu_i`, acting on `d_i * nu_i`
//! points per component. Classes that project to the generator of every `Z/nu_i`
//! are labelled by the induced cycle type on those points. In that coset the
//! `nu_i`-th power of an element restricted to one block is a uniform element
//! `sigma` of `S_{d_i}`, and the induced cycle type is `sigma`'s type with every
//! length multiplied by `nu_i`. [`predict`] uses this; [`wreath_class_counts`]
//! checks it by brute force.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Exact probability. Overflow is reported as [`GroupError::Overflow`].
pub type Prob = Ratio<i64>;

pub const MAX_PARTITION_WEIGHT: u32 = 40;
pub const MAX_CLASS_SIZE_WEIGHT: u32 = 20;
pub const MAX_PREDICT_DEGREE: u32 = 12;
pub const MAX_PREDICT_SPLITTING: u32 = 6;
pub const MAX_ORACLE_DEGREE: u32 = 4;
pub const MAX_ORACLE_SPLITTING: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("{what} = {value} is outside the supported range {min}..={max}")]
    OutOfRange { what: &'static str, value: u32, min: u32, max: u32 },
    #[error("degree and splitting lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("a group shape needs at least one component")]
    EmptyShape,
    #[error("exact rational arithmetic overflowed 64 bits")]
    Overflow,
}

fn check_range(what: &'static str, value: u32, min: u32, max: u32) -> Result<(), GroupError> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(GroupError::OutOfRange { what, value, min, max })
    }
}

/// A cycle type: weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Sorts `parts` descending and drops zeros.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every part multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> Partition {
        Partition(self.0.iter().map(|&p| p * factor).collect())
    }

    /// `m_j`, the number of parts equal to `j`, indexed by `j`.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.0.first().copied().unwrap_or(0) as usize + 1];
        for &p in &self.0 {
            m[p as usize] += 1;
        }
        m
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl FromIterator<u32> for Partition {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        Partition::new(iter.into_iter().collect())
    }
}

/// Degrees `(d_1..d_m)` and splittings `(nu_1..nu_m)` of a product of wreath products.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupShape {
    degrees: Vec<u32>,
    splittings: Vec<u32>,
}

impl GroupShape {
    pub fn new(degrees: Vec<u32>, splittings: Vec<u32>) -> Result<Self, GroupError> {
        if degrees.len() != splittings.len() {
            return Err(GroupError::LengthMismatch(degrees.len(), splittings.len()));
        }
        if degrees.is_empty() {
            return Err(GroupError::EmptyShape);
        }
        for (&d, &nu) in degrees.iter().zip(&splittings) {
            check_range("degree", d, 1, u32::MAX)?;
            check_range("splitting", nu, 1, u32::MAX)?;
        }
        Ok(GroupShape { degrees, splittings })
    }

    /// Shape with every splitting equal to 1.
    pub fn symmetric(degrees: Vec<u32>) -> Result<Self, GroupError> {
        let ones = vec![1; degrees.len()];
        Self::new(degrees, ones)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn splittings(&self) -> &[u32] {
        &self.splittings
    }

    pub fn components(&self) -> usize {
        self.degrees.len()
    }

    /// `sum d_i * nu_i`.
    pub fn total_degree(&self) -> u32 {
        self.degrees.iter().zip(&self.splittings).map(|(d, n)| d * n).sum()
    }
}

/// One partition per component of a [`GroupShape`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ClassLabel(Vec<Partition>);

impl ClassLabel {
    pub fn new(parts: Vec<Partition>) -> Self {
        ClassLabel(parts)
    }

    pub fn single(p: Partition) -> Self {
        ClassLabel(vec![p])
    }

    pub fn components(&self) -> &[Partition] {
        &self.0
    }

    /// Whether the label is a class of the coset for `shape`: component `i` has weight
    /// `d_i * nu_i` and all its parts are divisible by `nu_i`.
    pub fn fits(&self, shape: &GroupShape) -> bool {
        self.0.len() == shape.components()
            && self.0.iter().zip(shape.degrees.iter().zip(&shape.splittings)).all(|(lam, (&d, &nu))| {
                lam.weight() == d * nu && lam.parts().iter().all(|p| p % nu == 0)
            })
    }

    /// Every component is a single cycle.
    pub fn is_full_cycle(&self) -> bool {
        self.0.iter().all(|p| p.len() == 1)
    }
}

impl fmt::Debug for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p:?}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// All partitions of `d`, each once, in descending lexicographic order
/// (`{d}` first, `{1,...,1}` last).
pub fn partitions_of(d: u32) -> Result<Vec<Partition>, GroupError> {
    check_range("partition weight", d, 1, MAX_PARTITION_WEIGHT)?;
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    Ok(out)
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

/// Number of permutations of cycle type `lambda`: `d! / prod_j j^{m_j} m_j!`.
pub fn class_size(lambda: &Partition) -> Result<u64, GroupError> {
    check_range("class weight", lambda.weight(), 0, MAX_CLASS_SIZE_WEIGHT)?;
    let mut size = factorial(lambda.weight());
    for (j, &m) in lambda.multiplicities().iter().enumerate().skip(1) {
        size /= (j as u64).pow(m) * factorial(m);
    }
    Ok(size)
}

/// Cycle type of a permutation given as an image table on `0..n`.
pub fn cycle_type(perm: &[usize]) -> Partition {
    let mut seen = vec![false; perm.len()];
    let mut parts = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        parts.push(len);
    }
    Partition::new(parts)
}

fn add_prob(a: Prob, b: Prob) -> Result<Prob, GroupError> {
    a.checked_add(&b).ok_or(GroupError::Overflow)
}

/// Law of the induced cycle type for one component `(d, nu)`.
fn component_law(d: u32, nu: u32) -> Result<Vec<(Partition, Prob)>, GroupError> {
    let total = factorial(d) as i64;
    partitions_of(d)?
        .into_iter()
        .map(|lam| {
            let size = class_size(&lam)? as i64;
            Ok((lam.scaled(nu), Prob::new(size, total)))
        })
        .collect()
}

/// Predicted law of the Frobenius class for `shape`: component `i` takes the
/// scaled type `nu_i * lambda` with probability `|class(lambda)| / d_i!`,
/// independently across components.
pub fn predict(shape: &GroupShape) -> Result<BTreeMap<ClassLabel, Prob>, GroupError> {
    for (&d, &nu) in shape.degrees.iter().zip(&shape.splittings) {
        check_range("degree", d, 1, MAX_PREDICT_DEGREE)?;
        check_range("splitting", nu, 1, MAX_PREDICT_SPLITTING)?;
    }
    let mut joint: Vec<(Vec<Partition>, Prob)> = vec![(Vec::new(), Prob::one())];
    for (&d, &nu) in shape.degrees.iter().zip(&shape.splittings) {
        let law = component_law(d, nu)?;
        let mut next = Vec::with_capacity(joint.len() * law.len());
        for (prefix, pr) in &joint {
            for (lam, lp) in &law {
                let mut label = prefix.clone();
                label.push(lam.clone());
                next.push((label, pr.checked_mul(lp).ok_or(GroupError::Overflow)?));
            }
        }
        joint = next;
    }
    let mut out = BTreeMap::new();
    for (label, pr) in joint {
        let slot = out.entry(ClassLabel(label)).or_insert_with(Prob::zero);
        *slot = add_prob(*slot, pr)?;
    }
    Ok(out)
}

/// Probability under [`predict`] that every component is a single cycle.
pub fn full_cycle_probability(shape: &GroupShape) -> Result<Prob, GroupError> {
    predict(shape)?
        .into_iter()
        .filter(|(label, _)| label.is_full_cycle())
        .try_fold(Prob::zero(), |acc, (_, p)| add_prob(acc, p))
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Brute force over the coset: for every `(sigma_0..sigma_{nu-1})` in `S_d^nu`,
/// the cycle type on `d * nu` points of `(x, u) -> (sigma_u(x), u + 1 mod nu)`.
pub fn wreath_class_counts(d: u32, nu: u32) -> Result<BTreeMap<Partition, u64>, GroupError> {
    check_range("oracle degree", d, 1, MAX_ORACLE_DEGREE)?;
    check_range("oracle splitting", nu, 1, MAX_ORACLE_SPLITTING)?;
    let (d, nu) = (d as usize, nu as usize);
    let perms = all_permutations(d);
    let mut counts = BTreeMap::new();
    let mut choice = vec![0usize; nu];
    let mut image = vec![0usize; d * nu];
    loop {
        // point (x, u) is stored at u * d + x
        for u in 0..nu {
            let sigma = &perms[choice[u]];
            let next = (u + 1) % nu;
            for x in 0..d {
                image[u * d + x] = next * d + sigma[x];
            }
        }
        *counts.entry(cycle_type(&image)).or_insert(0) += 1;
        let mut pos = 0;
        loop {
            if pos == nu {
                return Ok(counts);
            }
            choice[pos] += 1;
            if choice[pos] < perms.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// [`wreath_class_counts`] normalized by the coset size `(d!)^nu`.
pub fn wreath_oracle(d: u32, nu: u32) -> Result<BTreeMap<Partition, Prob>, GroupError> {
    let counts = wreath_class_counts(d, nu)?;
    let total: u64 = counts.values().sum();
    Ok(counts.into_iter().map(|(k, c)| (k, Prob::new(c as i64, total as i64))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec())
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions_of(1).unwrap(), vec![part(&[1])]);
        assert_eq!(partitions_of(4).unwrap().len(), 5);
        assert_eq!(partitions_of(5).unwrap().len(), 7);
        // p(n) from the standard table
        assert_eq!(partitions_of(10).unwrap().len(), 42);
        assert_eq!(partitions_of(40).unwrap().len(), 37338);
        assert!(partitions_of(0).is_err());
        assert!(partitions_of(41).is_err());
    }

    #[test]
    fn partitions_are_distinct_and_sorted() {
        for d in 1..=12 {
            let all = partitions_of(d).unwrap();
            let set: std::collections::BTreeSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len());
            for p in &all {
                assert_eq!(p.weight(), d);
                assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn class_sizes() {
        assert_eq!(class_size(&part(&[1, 1, 1])).unwrap(), 1);
        assert_eq!(class_size(&part(&[2, 1])).unwrap(), 3);
        assert_eq!(class_size(&part(&[3])).unwrap(), 2);
        assert_eq!(class_size(&part(&[2, 2])).unwrap(), 3);
        assert_eq!(class_size(&part(&[20])).unwrap(), factorial(19));
        assert!(class_size(&part(&[21])).is_err());
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for d in 1..=10 {
            let total: u64 = partitions_of(d).unwrap().iter().map(|l| class_size(l).unwrap()).sum();
            assert_eq!(total, factorial(d), "d = {d}");
        }
    }

    #[test]
    fn class_size_matches_enumeration() {
        for d in 1..=6 {
            let mut counts: BTreeMap<Partition, u64> = BTreeMap::new();
            for p in all_permutations(d) {
                *counts.entry(cycle_type(&p)).or_insert(0) += 1;
            }
            for (lam, c) in counts {
                assert_eq!(class_size(&lam).unwrap(), c);
            }
        }
    }

    #[test]
    fn predict_examples() {
        let trivial = predict(&GroupShape::symmetric(vec![1]).unwrap()).unwrap();
        assert_eq!(trivial.len(), 1);
        assert_eq!(trivial[&ClassLabel::single(part(&[1]))], Prob::one());

        let s3 = predict(&GroupShape::symmetric(vec![3]).unwrap()).unwrap();
        assert_eq!(s3[&ClassLabel::single(part(&[3]))], Prob::new(1, 3));

        let w22 = predict(&GroupShape::new(vec![2], vec![2]).unwrap()).unwrap();
        assert_eq!(w22.len(), 2);
        assert_eq!(w22[&ClassLabel::single(part(&[2, 2]))], Prob::new(1, 2));
        assert_eq!(w22[&ClassLabel::single(part(&[4]))], Prob::new(1, 2));
    }

    #[test]
    fn predict_sums_to_one_and_labels_fit() {
        let shapes = [
            (vec![3, 2], vec![1, 1]),
            (vec![4], vec![3]),
            (vec![2, 2, 1], vec![2, 1, 5]),
            (vec![12], vec![6]),
            (vec![12, 11], vec![1, 1]),
        ];
        for (d, nu) in shapes {
            let shape = GroupShape::new(d, nu).unwrap();
            let law = predict(&shape).unwrap();
            let total = law.values().fold(Prob::zero(), |a, b| a + b);
            assert_eq!(total, Prob::one());
            assert!(law.keys().all(|l| l.fits(&shape)));
        }
    }

    #[test]
    fn predict_range_checks() {
        assert!(predict(&GroupShape::symmetric(vec![13]).unwrap()).is_err());
        assert!(predict(&GroupShape::new(vec![2], vec![7]).unwrap()).is_err());
        assert!(GroupShape::new(vec![2, 3], vec![1]).is_err());
        assert!(GroupShape::new(vec![0], vec![1]).is_err());
        // three S_12 factors need a 10^26 denominator
        assert_eq!(predict(&GroupShape::symmetric(vec![12, 12, 12]).unwrap()), Err(GroupError::Overflow));
    }

    #[test]
    fn wreath_oracle_examples() {
        let w = wreath_oracle(1, 3).unwrap();
        assert_eq!(w.into_iter().collect::<Vec<_>>(), vec![(part(&[3]), Prob::one())]);
        let w = wreath_oracle(2, 1).unwrap();
        assert_eq!(w[&part(&[1, 1])], Prob::new(1, 2));
        assert_eq!(w[&part(&[2])], Prob::new(1, 2));
        let w = wreath_oracle(2, 2).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[&part(&[2, 2])], Prob::new(1, 2));
        assert_eq!(w[&part(&[4])], Prob::new(1, 2));
        assert!(wreath_oracle(5, 1).is_err());
        assert!(wreath_oracle(2, 4).is_err());
    }

    #[test]
    fn predict_equals_wreath_oracle() {
        for d in 1..=MAX_ORACLE_DEGREE {
            for nu in 1..=MAX_ORACLE_SPLITTING {
                let oracle = wreath_oracle(d, nu).unwrap();
                let law = predict(&GroupShape::new(vec![d], vec![nu]).unwrap()).unwrap();
                let law: BTreeMap<Partition, Prob> =
                    law.into_iter().map(|(l, p)| (l.components()[0].clone(), p)).collect();
                assert_eq!(law, oracle, "d = {d}, nu = {nu}");
            }
        }
    }

    #[test]
    fn full_cycle_examples() {
        let fc = |d: Vec<u32>, nu: Vec<u32>| full_cycle_probability(&GroupShape::new(d, nu).unwrap()).unwrap();
        assert_eq!(fc(vec![3, 2], vec![1, 1]), Prob::new(1, 6));
        assert_eq!(fc(vec![2], vec![2]), Prob::new(1, 2));
        assert_eq!(fc(vec![1], vec![5]), Prob::one());
    }

    #[test]
    fn permutations_enumerated_once() {
        let all = all_permutations(4);
        assert_eq!(all.len(), 24);
        let set: std::collections::BTreeSet<_> = all.into_iter().collect();
        assert_eq!(set.len(), 24);
    }
}
