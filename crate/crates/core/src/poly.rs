//! Dense univariate polynomials over a [`Field`].
//!
//! Besides ring arithmetic this module provides what the experiments need to
//! read off a Frobenius cycle type: squarefreeness, Rabin's irreducibility test
//! and the distinct-degree factorization type.

use std::fmt;

use thiserror::Error;

use crate::ff::{prime_factors, Field};
use crate::groups::Partition;
use crate::rng::SplitMix64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomial must have positive degree")]
    Constant,
}

/// Coefficients low to high, no trailing zeros; the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<u64>,
}

// Slice-level kernels. All operands are canonical representatives of `f`.

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn add_slices(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, &s) in out.iter_mut().zip(short) {
        *o = f.add(*o, s);
    }
    trim(&mut out);
    out
}

fn sub_slices(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), 0);
    }
    for (o, &s) in out.iter_mut().zip(b) {
        *o = f.sub(*o, s);
    }
    trim(&mut out);
    out
}

fn mul_slices(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` must be nonzero.
fn divrem_slices(f: &Field, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = f.inv(*b.last().expect("nonzero divisor")).expect("nonzero leading coefficient");
    let mut quot = vec![0u64; r.len() - b.len() + 1];
    for shift in (0..quot.len()).rev() {
        let c = f.mul(r[shift + b.len() - 1], lead_inv);
        quot[shift] = c;
        if c == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] = f.sub(r[shift + j], f.mul(c, bj));
        }
    }
    r.truncate(b.len() - 1);
    trim(&mut r);
    trim(&mut quot);
    (quot, r)
}

fn rem_slices(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    divrem_slices(f, a, b).1
}

fn monic_slices(f: &Field, a: &[u64]) -> Vec<u64> {
    match a.last() {
        None | Some(1) => a.to_vec(),
        Some(&lc) => {
            let inv = f.inv(lc).expect("nonzero leading coefficient");
            a.iter().map(|&c| f.mul(c, inv)).collect()
        }
    }
}

fn gcd_slices(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let r = rem_slices(f, &x, &y);
        x = y;
        y = r;
    }
    monic_slices(f, &x)
}

fn mulmod_slices(f: &Field, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    rem_slices(f, &mul_slices(f, a, b), m)
}

/// `base^e mod m` by square-and-multiply.
fn powmod_slices(f: &Field, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
    let mut result = rem_slices(f, &[1], m);
    let mut b = rem_slices(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod_slices(f, &result, &b, m);
        }
        e >>= 1;
        if e > 0 {
            b = mulmod_slices(f, &b, &b, m);
        }
    }
    result
}

/// `t^{q^i} - t mod m` for the `h = t^{q^i} mod m` already computed.
fn minus_t(f: &Field, h: &[u64]) -> Vec<u64> {
    sub_slices(f, h, &[0, 1])
}

impl Poly {
    /// Builds a polynomial from canonical representatives (low to high); trailing zeros are dropped.
    pub fn new(field: &Field, mut coeffs: Vec<u64>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| c < field.order()));
        trim(&mut coeffs);
        Poly { field: field.clone(), coeffs }
    }

    /// Integer coefficients (low to high) reduced into the prime subfield.
    pub fn from_ints(field: &Field, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Field) -> Self {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: &Field, c: u64) -> Self {
        Self::new(field, vec![c])
    }

    /// `c * t^degree`.
    pub fn monomial(field: &Field, c: u64, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Self::new(field, coeffs)
    }

    /// The variable `t`.
    pub fn t(field: &Field) -> Self {
        Self::monomial(field, 1, 1)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coefficient(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    fn check(&self, other: &Poly) -> Result<(), PolyError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(PolyError::FieldMismatch)
        }
    }

    fn wrap(&self, coeffs: Vec<u64>) -> Poly {
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        Ok(self.wrap(add_slices(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        Ok(self.wrap(sub_slices(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        Ok(self.wrap(mul_slices(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn neg(&self) -> Poly {
        self.wrap(self.coeffs.iter().map(|&c| self.field.neg(c)).collect())
    }

    pub fn scale(&self, c: u64) -> Poly {
        let mut out: Vec<u64> = self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect();
        trim(&mut out);
        self.wrap(out)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut result = Poly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.wrap(mul_slices(&self.field, &result.coeffs, &base.coeffs));
            }
            e >>= 1;
            if e > 0 {
                base = base.wrap(mul_slices(&self.field, &base.coeffs, &base.coeffs));
            }
        }
        result
    }

    /// `(quotient, remainder)` with `self = quotient * divisor + remainder`.
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        self.check(divisor)?;
        if divisor.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let (q, r) = divrem_slices(&self.field, &self.coeffs, &divisor.coeffs);
        Ok((self.wrap(q), self.wrap(r)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        Ok(self.divrem(divisor)?.1)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        Ok(self.wrap(gcd_slices(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn monic(&self) -> Poly {
        self.wrap(monic_slices(&self.field, &self.coeffs))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let mut out: Vec<u64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int((i as u64 % f.characteristic()) as i64)))
            .collect();
        trim(&mut out);
        self.wrap(out)
    }

    /// Horner evaluation at a representative of the same field.
    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| self.field.add(self.field.mul(acc, x), c))
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, e: u64, modulus: &Poly) -> Result<Poly, PolyError> {
        self.check(modulus)?;
        if modulus.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(self.wrap(powmod_slices(&self.field, &self.coeffs, e, &modulus.coeffs)))
    }

    /// No repeated root over the algebraic closure: `f' != 0` and `gcd(f, f') = 1`
    /// (constants count as squarefree).
    pub fn is_squarefree(&self) -> Result<bool, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.is_constant() {
            return Ok(true);
        }
        let d = self.derivative();
        if d.is_zero() {
            // a p-th power over a perfect field
            return Ok(false);
        }
        Ok(gcd_slices(&self.field, &self.coeffs, &d.coeffs).len() == 1)
    }

    /// Multiset of degrees of the monic irreducible factors of a squarefree `f`,
    /// by distinct-degree factorization: factor `gcd(f, t^{q^i} - t)` contributes
    /// `deg / i` parts equal to `i`.
    pub fn ddf_type(&self) -> Result<Partition, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.is_constant() {
            return Err(PolyError::Constant);
        }
        if !self.is_squarefree()? {
            return Err(PolyError::NotSquarefree);
        }
        let field = &self.field;
        let q = field.order();
        let mut rest = monic_slices(field, &self.coeffs);
        let mut h = vec![0, 1];
        let mut parts = Vec::new();
        let mut i = 1u32;
        while rest.len() > 1 {
            let deg = rest.len() as u32 - 1;
            if 2 * i > deg {
                // no factor of degree < i remains, so what is left is irreducible
                parts.push(deg);
                break;
            }
            h = powmod_slices(field, &h, q, &rest);
            let g = gcd_slices(field, &rest, &minus_t(field, &h));
            if g.len() > 1 {
                let gdeg = g.len() as u32 - 1;
                parts.extend(std::iter::repeat_n(i, (gdeg / i) as usize));
                rest = divrem_slices(field, &rest, &g).0;
                h = rem_slices(field, &h, &rest);
            }
            i += 1;
        }
        Ok(Partition::new(parts))
    }

    /// Rabin's test: `f` of degree `d` is irreducible iff `t^{q^d} = t mod f` and
    /// `gcd(f, t^{q^{d/r}} - t) = 1` for every prime `r | d`.
    pub fn is_irreducible(&self) -> Result<bool, PolyError> {
        let d = match self.degree() {
            None => return Err(PolyError::ZeroPolynomial),
            Some(0) => return Err(PolyError::Constant),
            Some(1) => return Ok(true),
            Some(d) => d as u64,
        };
        let field = &self.field;
        let q = field.order();
        let f = monic_slices(field, &self.coeffs);
        let frob_iter = |times: u64| {
            let mut h = vec![0, 1];
            for _ in 0..times {
                h = powmod_slices(field, &h, q, &f);
            }
            h
        };
        if !minus_t(field, &frob_iter(d)).is_empty() {
            return Ok(false);
        }
        for r in prime_factors(d) {
            let h = frob_iter(d / r);
            if gcd_slices(field, &f, &minus_t(field, &h)).len() != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Seeded search for a monic irreducible of exact degree `d`.
    pub fn random_irreducible(field: &Field, d: usize, seed: u64) -> Result<Poly, PolyError> {
        if d == 0 {
            return Err(PolyError::Constant);
        }
        let mut rng = SplitMix64::new(seed);
        loop {
            let mut coeffs: Vec<u64> = (0..d).map(|_| rng.below(field.order())).collect();
            coeffs.push(1);
            let f = Poly::new(field, coeffs);
            if f.is_irreducible()? {
                return Ok(f);
            }
        }
    }

    /// Number of roots of a squarefree `f` in `F_{q^k}`: `sum over e | k of e * a_e`,
    /// where `a_e` counts irreducible factors of degree `e`. Nonzero constants have none.
    pub fn count_roots_in_extension(&self, k: u32) -> Result<u64, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.is_constant() {
            return Ok(0);
        }
        let parts = self.ddf_type()?;
        Ok(parts.parts().iter().filter(|&&e| k.is_multiple_of(e)).map(|&e| e as u64).sum())
    }

    /// Renders with a chosen variable name, highest degree first.
    pub fn display_with(&self, var: char) -> PolyDisplay<'_> {
        PolyDisplay { poly: self, var }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    var: char,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.poly;
        if p.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in p.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = p.field.format_value(c);
            match (i, c) {
                (0, _) => write!(f, "{coeff}")?,
                (_, 1) => {}
                _ => write!(f, "{coeff}")?,
            }
            match i {
                0 => {}
                1 => write!(f, "{}", self.var)?,
                _ => write!(f, "{}^{i}", self.var)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with('t'))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self, self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    fn fp(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn poly(f: &Field, c: &[i64]) -> Poly {
        Poly::from_ints(f, c)
    }

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec())
    }

    #[test]
    fn arithmetic_examples() {
        let f5 = fp(5);
        let prod = poly(&f5, &[1, 1]).mul(&poly(&f5, &[4, 1])).unwrap();
        assert_eq!(prod, poly(&f5, &[4, 0, 1]));

        let f7 = fp(7);
        let g = poly(&f7, &[-1, 0, 1]).gcd(&poly(&f7, &[-1, 0, 0, 1])).unwrap();
        assert_eq!(g, poly(&f7, &[-1, 1]));

        let f3 = fp(3);
        assert_eq!(poly(&f3, &[1, 1, 0, 1]).derivative(), poly(&f3, &[1]));
    }

    #[test]
    fn divrem_identity() {
        let f = fp(11);
        let a = poly(&f, &[3, 0, 7, 1, 9, 4]);
        let b = poly(&f, &[5, 2, 8]);
        let (q, r) = a.divrem(&b).unwrap();
        assert!(r.degree() < b.degree());
        assert_eq!(q.mul(&b).unwrap().add(&r).unwrap(), a);
        assert_eq!(a.divrem(&Poly::zero(&f)).unwrap_err(), PolyError::DivisionByZero);
        assert_eq!(a.add(&Poly::one(&fp(13))).unwrap_err(), PolyError::FieldMismatch);
    }

    #[test]
    fn squarefree_examples() {
        assert!(!poly(&fp(2), &[0, 0, 1]).is_squarefree().unwrap());
        assert!(poly(&fp(3), &[1, 0, 1]).is_squarefree().unwrap());
        assert!(Poly::one(&fp(5)).is_squarefree().unwrap());
        assert_eq!(Poly::zero(&fp(5)).is_squarefree().unwrap_err(), PolyError::ZeroPolynomial);
        // t^3 + 1 = (t + 1)^3 in characteristic 3, derivative vanishes
        assert!(!poly(&fp(3), &[1, 0, 0, 1]).is_squarefree().unwrap());
    }

    #[test]
    fn ddf_examples() {
        assert_eq!(poly(&fp(2), &[0, 1, 1]).ddf_type().unwrap(), part(&[1, 1]));
        assert_eq!(poly(&fp(2), &[1, 1, 0, 1]).ddf_type().unwrap(), part(&[3]));
        assert_eq!(poly(&fp(3), &[1, 0, 0, 0, 1]).ddf_type().unwrap(), part(&[2, 2]));
        assert_eq!(poly(&fp(2), &[0, 0, 1]).ddf_type().unwrap_err(), PolyError::NotSquarefree);
        // (t^2 + 1)(t^3 + 2t + 1) t (t + 1) over F_3
        let f3 = fp(3);
        let g = poly(&f3, &[1, 0, 1])
            .mul(&poly(&f3, &[1, 2, 0, 1]))
            .unwrap()
            .mul(&poly(&f3, &[0, 1]))
            .unwrap()
            .mul(&poly(&f3, &[1, 1]))
            .unwrap();
        assert_eq!(g.ddf_type().unwrap(), part(&[3, 2, 1, 1]));
    }

    #[test]
    fn ddf_over_extension_field() {
        // t^2 + 1 over F_9 splits since -1 is a square there
        let f9 = make_field(3, 2, 0).unwrap();
        assert_eq!(poly(&f9, &[1, 0, 1]).ddf_type().unwrap(), part(&[1, 1]));
        // an irreducible quartic over F_3 splits into two quadratics over F_9
        let q = Poly::random_irreducible(&fp(3), 4, 5).unwrap();
        let lifted = Poly::new(&f9, q.coeffs().to_vec());
        assert_eq!(lifted.ddf_type().unwrap(), part(&[2, 2]));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(poly(&fp(3), &[1, 0, 1]).is_irreducible().unwrap());
        assert!(!poly(&fp(5), &[1, 0, 1]).is_irreducible().unwrap());
        assert!(!poly(&fp(2), &[0, 0, 1]).is_irreducible().unwrap());
        let g = Poly::random_irreducible(&fp(2), 4, 17).unwrap();
        assert_eq!(g.degree(), Some(4));
        assert_eq!(g.leading_coefficient(), 1);
        assert_eq!(g.ddf_type().unwrap(), part(&[4]));
        assert_eq!(Poly::random_irreducible(&fp(2), 4, 17).unwrap(), g);
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree n over F_q is (1/n) sum_{d|n} mu(d) q^{n/d}
        let f2 = fp(2);
        let expected = [2, 1, 2, 3, 6, 9];
        for (n, &want) in (1..=6usize).zip(&expected) {
            let count = (0..1u64 << n)
                .filter(|&bits| {
                    let mut c: Vec<u64> = (0..n).map(|i| (bits >> i) & 1).collect();
                    c.push(1);
                    Poly::new(&f2, c).is_irreducible().unwrap()
                })
                .count();
            assert_eq!(count, want, "degree {n}");
        }
    }

    #[test]
    fn root_counts() {
        let f3 = fp(3);
        let g = poly(&f3, &[1, 0, 1]);
        assert_eq!(g.count_roots_in_extension(1).unwrap(), 0);
        assert_eq!(g.count_roots_in_extension(2).unwrap(), 2);
        let c = poly(&fp(2), &[1, 1, 0, 1]);
        assert_eq!(c.count_roots_in_extension(3).unwrap(), 3);
        for k in 1..6 {
            assert_eq!(Poly::t(&fp(7)).count_roots_in_extension(k).unwrap(), 1);
        }
        assert_eq!(poly(&f3, &[0, 0, 1]).count_roots_in_extension(1).unwrap_err(), PolyError::NotSquarefree);
    }

    #[test]
    fn root_count_matches_evaluation() {
        let f = fp(7);
        let mut rng = SplitMix64::new(3);
        for _ in 0..200 {
            let deg = 1 + rng.below(6) as usize;
            let mut c: Vec<u64> = (0..deg).map(|_| rng.below(7)).collect();
            c.push(1 + rng.below(6));
            let g = Poly::new(&f, c);
            if !g.is_squarefree().unwrap() {
                continue;
            }
            let by_eval = (0..7).filter(|&x| g.eval(x) == 0).count() as u64;
            assert_eq!(g.count_roots_in_extension(1).unwrap(), by_eval);
        }
    }

    #[test]
    fn gcd_divides_both() {
        let f = fp(5);
        let mut rng = SplitMix64::new(9);
        for _ in 0..100 {
            let mut rand_poly = |n: usize| Poly::new(&f, (0..n).map(|_| rng.below(5)).collect());
            let common = rand_poly(3);
            let a = rand_poly(4).mul(&common).unwrap();
            let b = rand_poly(5).mul(&common).unwrap();
            let g = a.gcd(&b).unwrap();
            if g.is_zero() {
                continue;
            }
            assert_eq!(g.leading_coefficient(), 1);
            assert!(a.rem(&g).unwrap().is_zero());
            assert!(b.rem(&g).unwrap().is_zero());
        }
    }

    #[test]
    fn display() {
        let f = fp(5);
        assert_eq!(poly(&f, &[1, 1, 2, 0, 1]).to_string(), "t^4 + 2t^2 + t + 1");
        assert_eq!(Poly::zero(&f).to_string(), "0");
    }
}
