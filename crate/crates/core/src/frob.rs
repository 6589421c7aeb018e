//! Frobenius cycle types from concrete data.
//!
//! Two independent routes: the distinct-degree factorization of a squarefree
//! polynomial, and Möbius inversion of point counts `N_k = sum_{e | k} e a_e`
//! over the extensions `F_{q^k}`. Each serves as the other's oracle.
//!
//! Failures are data: experiment drivers tally them as exclusions.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::groups::{ClassLabel, Partition};
use crate::poly::{Poly, PolyError};

const MOBIUS_TABLE_SIZE: usize = 40;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exclusion {
    #[error("not squarefree")]
    NotSquarefree,
    #[error("degree below the generic degree")]
    DegreeDrop,
    #[error("not a transversal configuration")]
    NotTransversal,
    #[error("point counts are not those of a reduced zero-dimensional set")]
    Inconsistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    FromFactorization,
    FromPointCounts,
}

/// Per-reason tallies of excluded trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Exclusions {
    pub not_squarefree: u64,
    pub degree_drop: u64,
    pub not_transversal: u64,
}

impl Exclusions {
    pub fn record(&mut self, reason: Exclusion) {
        match reason {
            Exclusion::NotSquarefree => self.not_squarefree += 1,
            Exclusion::DegreeDrop => self.degree_drop += 1,
            Exclusion::NotTransversal | Exclusion::Inconsistent => self.not_transversal += 1,
        }
    }

    pub fn merge(&mut self, other: &Exclusions) {
        self.not_squarefree += other.not_squarefree;
        self.degree_drop += other.degree_drop;
        self.not_transversal += other.not_transversal;
    }

    pub fn total(&self) -> u64 {
        self.not_squarefree + self.degree_drop + self.not_transversal
    }
}

/// A class label together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusType {
    pub label: ClassLabel,
    pub provenance: Provenance,
}

fn mobius_table() -> &'static [i8] {
    static TABLE: OnceLock<Vec<i8>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=MOBIUS_TABLE_SIZE as u32).map(mobius_direct).collect())
}

fn mobius_direct(n: u32) -> i8 {
    if n == 0 {
        return 0;
    }
    let (mut n, mut sign, mut f) = (n, 1i8, 2u32);
    while f * f <= n {
        if n % f == 0 {
            n /= f;
            if n % f == 0 {
                return 0;
            }
            sign = -sign;
        }
        f += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Möbius function.
pub fn mobius(n: u32) -> i8 {
    mobius_table().get(n as usize).copied().unwrap_or_else(|| mobius_direct(n))
}

/// Cycle type of Frobenius on the roots of `g`, which must be squarefree of degree exactly `d`.
pub fn type_from_univariate(g: &Poly, expected_degree: u32) -> Result<Partition, Exclusion> {
    if g.degree() != Some(expected_degree as usize) {
        return Err(Exclusion::DegreeDrop);
    }
    match g.ddf_type() {
        Ok(p) => Ok(p),
        Err(PolyError::NotSquarefree) => Err(Exclusion::NotSquarefree),
        // zero and constants were ruled out by the degree check unless d = 0
        Err(_) => Err(Exclusion::DegreeDrop),
    }
}

/// Recovers the number `a_e` of closed points of degree `e` from `N_1..N_d` via
/// `e a_e = sum_{j | e} mu(e / j) N_j`, and returns the partition with `a_e` parts `e`.
pub fn type_from_point_counts(counts: &[u64], expected_size: u32) -> Result<Partition, Exclusion> {
    if counts.len() != expected_size as usize || counts.is_empty() {
        return Err(Exclusion::Inconsistent);
    }
    let mut parts = Vec::new();
    let mut weight: i128 = 0;
    for e in 1..=counts.len() as u32 {
        let weighted: i128 = (1..=e)
            .filter(|j| e % j == 0)
            .map(|j| mobius(e / j) as i128 * counts[j as usize - 1] as i128)
            .sum();
        if weighted < 0 || weighted % e as i128 != 0 {
            return Err(Exclusion::Inconsistent);
        }
        let a_e = weighted / e as i128;
        weight += weighted;
        parts.extend(std::iter::repeat_n(e, a_e as usize));
    }
    if weight != expected_size as i128 {
        return Err(Exclusion::NotTransversal);
    }
    Ok(Partition::new(parts))
}

impl FrobeniusType {
    pub fn from_univariate(g: &Poly, expected_degree: u32) -> Result<Self, Exclusion> {
        Ok(FrobeniusType {
            label: ClassLabel::single(type_from_univariate(g, expected_degree)?),
            provenance: Provenance::FromFactorization,
        })
    }

    pub fn from_point_counts(counts: &[u64], expected_size: u32) -> Result<Self, Exclusion> {
        Ok(FrobeniusType {
            label: ClassLabel::single(type_from_point_counts(counts, expected_size)?),
            provenance: Provenance::FromPointCounts,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::rng::SplitMix64;

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec())
    }

    #[test]
    fn mobius_values() {
        let first: Vec<i8> = (1..=12).map(mobius).collect();
        assert_eq!(first, [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(41), -1);
        assert_eq!(mobius(210), 1);
    }

    #[test]
    fn univariate_examples() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(type_from_univariate(&Poly::from_ints(&f2, &[1, 1, 0, 1]), 3), Ok(part(&[3])));
        let f3 = Field::prime(3).unwrap();
        assert_eq!(type_from_univariate(&Poly::from_ints(&f3, &[0, 0, 1]), 2), Err(Exclusion::NotSquarefree));
        let f5 = Field::prime(5).unwrap();
        assert_eq!(type_from_univariate(&Poly::from_ints(&f5, &[1, 1]), 2), Err(Exclusion::DegreeDrop));
        assert_eq!(type_from_univariate(&Poly::zero(&f5), 2), Err(Exclusion::DegreeDrop));
    }

    #[test]
    fn point_count_examples() {
        assert_eq!(type_from_point_counts(&[0, 0, 3], 3), Ok(part(&[3])));
        assert_eq!(type_from_point_counts(&[2, 2], 2), Ok(part(&[1, 1])));
        assert_eq!(type_from_point_counts(&[1, 1], 2), Err(Exclusion::NotTransversal));
        // N_2 - N_1 = 1 is odd
        assert_eq!(type_from_point_counts(&[1, 2], 2), Err(Exclusion::Inconsistent));
        assert_eq!(type_from_point_counts(&[3, 1, 3], 3), Err(Exclusion::Inconsistent));
        assert_eq!(type_from_point_counts(&[1], 2), Err(Exclusion::Inconsistent));
    }

    #[test]
    fn all_rational_counts() {
        for d in 1..=12u32 {
            let counts = vec![d as u64; d as usize];
            assert_eq!(type_from_point_counts(&counts, d).unwrap(), Partition::new(vec![1; d as usize]));
        }
    }

    #[test]
    fn engines_agree_on_random_polynomials() {
        for p in [2u64, 3, 5, 7] {
            let f = Field::prime(p).unwrap();
            let mut rng = SplitMix64::new(p);
            let mut checked = 0;
            while checked < 100 {
                let d = 1 + rng.below(8) as usize;
                let mut c: Vec<u64> = (0..d).map(|_| rng.below(p)).collect();
                c.push(1);
                let g = Poly::new(&f, c);
                if !g.is_squarefree().unwrap() {
                    continue;
                }
                let counts: Vec<u64> = (1..=d as u32).map(|k| g.count_roots_in_extension(k).unwrap()).collect();
                let a = FrobeniusType::from_univariate(&g, d as u32).unwrap();
                let b = FrobeniusType::from_point_counts(&counts, d as u32).unwrap();
                assert_eq!(a.label, b.label);
                assert_eq!(a.provenance, Provenance::FromFactorization);
                assert_eq!(b.provenance, Provenance::FromPointCounts);
                checked += 1;
            }
        }
    }
}
