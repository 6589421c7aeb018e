//! Finite fields `F_p` and `F_{p^k}`.
//!
//! Elements are stored as canonical `u64` representatives. In `F_p` this is the
//! residue in `[0, p)`. In `F_{p^k}` an element `c_0 + c_1 a + ... + c_{k-1} a^{k-1}`
//! (with `a` a root of the field's modulus) is encoded as the base-`p` integer
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`, so the prime subfield keeps its natural
//! encoding and enumeration order is simply `0, 1, ..., q-1`.
//!
//! Arithmetic on raw representatives goes through the [`Field`] handle
//! (`field.mul(a, b)`); [`FieldElement`] bundles a value with its field and checks
//! that operands agree.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::poly::Poly;
use crate::rng::SplitMix64;

/// Largest supported characteristic.
pub const MAX_CHARACTERISTIC: u64 = 1 << 20;
/// Largest supported field order.
pub const MAX_FIELD_ORDER: u64 = 1 << 40;
/// Largest field order that [`enumerate`] will list.
pub const MAX_ENUMERATION_ORDER: u64 = 1 << 20;

const RANDOM_MODULUS_TRIALS: usize = 10_000;
// extension fields up to this order get exp/log tables at construction
const LOG_TABLE_LIMIT: u64 = 1 << 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} exceeds the supported bound")]
    TooLarge(u128),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for &w in &WITNESSES {
        let mut x = powmod(w, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

struct LogTables {
    // exp[i] = g^i for i in 0..2(q-1), doubled so log sums need no reduction
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct FieldInner {
    p: u64,
    k: u32,
    q: u64,
    // monic, low-to-high, length k+1; empty for prime fields
    modulus: Vec<u64>,
    tables: Option<LogTables>,
}

/// Handle to `F_q`, `q = p^k`. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.k.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            let base = Field::prime(self.0.p).expect("validated characteristic");
            let m = Poly::new(&base, self.0.modulus.clone());
            write!(f, "F_{} = F_{}[a]/({})", self.0.q, self.0.p, m.display_with('a'))
        }
    }
}

/// Builds `F_{p^k}`. For `k > 1` the modulus is a monic irreducible of degree `k`
/// found by seeded random search, falling back to a lexicographic scan after
/// 10^4 random candidates. The same `(p, k, seed)` always yields the same modulus.
pub fn make_field(p: u64, k: u32, seed: u64) -> Result<Field, FfError> {
    if k == 0 {
        return Err(FfError::ZeroDegree);
    }
    if !is_prime(p) {
        return Err(FfError::NotPrime(p));
    }
    if p > MAX_CHARACTERISTIC {
        return Err(FfError::TooLarge(p as u128));
    }
    let q128 = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
    if q128 > MAX_FIELD_ORDER as u128 {
        return Err(FfError::TooLarge(q128));
    }
    if k == 1 {
        return Ok(Field::prime_unchecked(p));
    }
    let base = Field::prime_unchecked(p);
    let modulus = find_irreducible_modulus(&base, k as usize, seed);
    let mut inner = FieldInner { p, k, q: q128 as u64, modulus, tables: None };
    if inner.q <= LOG_TABLE_LIMIT {
        inner.tables = Some(build_log_tables(&inner));
    }
    Ok(Field(Arc::new(inner)))
}

fn find_irreducible_modulus(base: &Field, k: usize, seed: u64) -> Vec<u64> {
    let p = base.characteristic();
    let mut rng = SplitMix64::new(seed);
    for _ in 0..RANDOM_MODULUS_TRIALS {
        let mut coeffs: Vec<u64> = (0..k).map(|_| rng.below(p)).collect();
        coeffs.push(1);
        let f = Poly::new(base, coeffs);
        if f.is_irreducible().unwrap_or(false) {
            return f.coeffs().to_vec();
        }
    }
    // irreducibles of every degree exist, so the scan terminates
    let mut digits = vec![0u64; k];
    loop {
        let mut coeffs = digits.clone();
        coeffs.push(1);
        let f = Poly::new(base, coeffs);
        if f.is_irreducible().unwrap_or(false) {
            return f.coeffs().to_vec();
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < p {
                break;
            }
            *d = 0;
        }
    }
}

fn build_log_tables(inner: &FieldInner) -> LogTables {
    let q = inner.q;
    let order = q - 1;
    let factors = prime_factors(order);
    let generator = (2..q)
        .find(|&g| factors.iter().all(|&r| slow_pow(inner, g, order / r) != 1))
        .unwrap_or(1);
    let mut exp = vec![0u32; 2 * order as usize];
    let mut log = vec![0u32; q as usize];
    let mut x = 1u64;
    for i in 0..order as usize {
        exp[i] = x as u32;
        exp[i + order as usize] = x as u32;
        log[x as usize] = i as u32;
        x = slow_mul(inner, x, generator);
    }
    LogTables { exp, log }
}

fn slow_mul(inner: &FieldInner, a: u64, b: u64) -> u64 {
    let (p, k) = (inner.p, inner.k as usize);
    let da = to_digits(a, p, k);
    let db = to_digits(b, p, k);
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for i in (k..2 * k - 1).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        for (j, &m) in inner.modulus[..k].iter().enumerate() {
            prod[i - k + j] = (prod[i - k + j] + (p - c) * m) % p;
        }
        prod[i] = 0;
    }
    from_digits(&prod[..k], p)
}

fn slow_pow(inner: &FieldInner, mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = slow_mul(inner, r, b);
        }
        b = slow_mul(inner, b, b);
        e >>= 1;
    }
    r
}

fn to_digits(mut a: u64, p: u64, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(a % p);
        a /= p;
    }
    out
}

fn from_digits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0u64, |acc, &x| acc * p + x)
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Field, FfError> {
        make_field(p, 1, 0)
    }

    fn prime_unchecked(p: u64) -> Field {
        Field(Arc::new(FieldInner { p, k: 1, q: p, modulus: Vec::new(), tables: None }))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    /// Coefficients of the defining polynomial over `F_p` (low to high), `None` for `F_p`.
    pub fn modulus(&self) -> Option<&[u64]> {
        if self.0.k == 1 {
            None
        } else {
            Some(&self.0.modulus)
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.0.p as i64) as u64
    }

    /// The [`FieldElement`] with representative `value`; `None` if `value >= q`.
    pub fn element(&self, value: u64) -> Option<FieldElement> {
        (value < self.0.q).then(|| FieldElement { field: self.clone(), value })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), value: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { field: self.clone(), value: 1 }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let p = self.0.p;
        if self.0.k == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut place, mut out) = (a, b, 1u64, 0u64);
        while a > 0 || b > 0 {
            let s = a % p + b % p;
            out += if s >= p { s - p } else { s } * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        let p = self.0.p;
        if self.0.k == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        if p == 2 {
            return a;
        }
        let (mut a, mut place, mut out) = (a, 1u64, 0u64);
        while a > 0 {
            let d = a % p;
            if d != 0 {
                out += (p - d) * place;
            }
            a /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if self.0.k == 1 {
            return if a >= b { a - b } else { a + self.0.p - b };
        }
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.0.k == 1 {
            return a * b % self.0.p;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.0.tables {
            Some(t) => t.exp[(t.log[a as usize] + t.log[b as usize]) as usize] as u64,
            None => slow_mul(&self.0, a, b),
        }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.0.tables {
            let order = self.0.q - 1;
            let l = (t.log[a as usize] as u128 * (e % order) as u128 % order as u128) as usize;
            return t.exp[l] as u64;
        }
        let (mut base, mut r) = (a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> Result<u64, FfError> {
        if a == 0 {
            return Err(FfError::DivisionByZero);
        }
        if self.0.k == 1 {
            // extended Euclid on residues
            let p = self.0.p as i64;
            let (mut r0, mut r1) = (p, a as i64);
            let (mut s0, mut s1) = (0i64, 1i64);
            while r1 != 0 {
                let quot = r0 / r1;
                (r0, r1) = (r1, r0 - quot * r1);
                (s0, s1) = (s1, s0 - quot * s1);
            }
            return Ok(s0.rem_euclid(p) as u64);
        }
        if let Some(t) = &self.0.tables {
            let order = (self.0.q - 1) as usize;
            return Ok(t.exp[order - t.log[a as usize] as usize] as u64);
        }
        Ok(self.pow(a, self.0.q - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64, FfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Writes a representative the way a human would: an integer in `F_p`, a
    /// polynomial in `a` otherwise.
    pub fn format_value(&self, v: u64) -> String {
        if self.0.k == 1 {
            return v.to_string();
        }
        let base = Field::prime_unchecked(self.0.p);
        let digits = to_digits(v, self.0.p, self.0.k as usize);
        let shown = Poly::new(&base, digits).display_with('a').to_string();
        if shown.contains(' ') {
            format!("({shown})")
        } else {
            shown
        }
    }
}

/// All `q` elements in representative order `0, 1, ..., q-1`.
pub fn enumerate(field: &Field) -> Result<Vec<FieldElement>, FfError> {
    if field.order() > MAX_ENUMERATION_ORDER {
        return Err(FfError::TooLarge(field.order() as u128));
    }
    Ok((0..field.order()).map(|value| FieldElement { field: field.clone(), value }).collect())
}

/// A value together with the field it lives in.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: Field,
    value: u64,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<(), FfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FfError::FieldMismatch)
        }
    }

    fn with(&self, value: u64) -> FieldElement {
        FieldElement { field: self.field.clone(), value }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn div(&self, other: &Self) -> Result<Self, FfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.div(self.value, other.value)?))
    }

    pub fn neg(&self) -> Self {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self, FfError> {
        Ok(self.with(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.with(self.field.pow(self.value, e))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self.field.format_value(self.value), self.field)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_value(self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(f: &Field, v: u64) -> FieldElement {
        f.element(v).unwrap()
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(1_000_003));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn prime_field_examples() {
        let f7 = make_field(7, 1, 99).unwrap();
        assert_eq!(f7.order(), 7);
        assert!(f7.modulus().is_none());
        let (a, b) = (el(&f7, 3), el(&f7, 5));
        assert_eq!(a.add(&b).unwrap().value(), 1);
        assert_eq!(a.mul(&b).unwrap().value(), 1);
        assert_eq!(a.inv().unwrap().value(), 5);
    }

    #[test]
    fn not_prime_and_bounds() {
        assert_eq!(make_field(4, 1, 0).unwrap_err(), FfError::NotPrime(4));
        assert_eq!(make_field(5, 0, 0).unwrap_err(), FfError::ZeroDegree);
        assert!(matches!(make_field(2, 41, 0), Err(FfError::TooLarge(_))));
        assert!(make_field(2, 40, 0).is_ok());
    }

    #[test]
    fn f8_frobenius_fixed_points() {
        for seed in [0, 1, 2, 77] {
            let f8 = make_field(2, 3, seed).unwrap();
            assert_eq!(f8.order(), 8);
            for a in enumerate(&f8).unwrap() {
                assert_eq!(a.pow(8), a);
            }
        }
    }

    #[test]
    fn modulus_is_reproducible_and_irreducible() {
        let a = make_field(3, 5, 1234).unwrap();
        let b = make_field(3, 5, 1234).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a, b);
        let m = Poly::new(&Field::prime(3).unwrap(), a.modulus().unwrap().to_vec());
        assert_eq!(m.degree(), Some(5));
        assert!(m.is_irreducible().unwrap());
    }

    #[test]
    fn division_errors() {
        let f = Field::prime(11).unwrap();
        assert_eq!(f.zero().inv().unwrap_err(), FfError::DivisionByZero);
        assert_eq!(f.one().div(&f.zero()).unwrap_err(), FfError::DivisionByZero);
        let g = Field::prime(13).unwrap();
        assert_eq!(f.one().add(&g.one()).unwrap_err(), FfError::FieldMismatch);
    }

    #[test]
    fn enumeration() {
        let f5 = Field::prime(5).unwrap();
        let vals: Vec<u64> = enumerate(&f5).unwrap().iter().map(|e| e.value()).collect();
        assert_eq!(vals, [0, 1, 2, 3, 4]);
        let f9 = make_field(3, 2, 5).unwrap();
        let all = enumerate(&f9).unwrap();
        assert_eq!(all.len(), 9);
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 9);
        assert_eq!(all[0], f9.zero());
        assert_eq!(all[1], f9.one());
        let big = make_field(2, 21, 0).unwrap();
        assert!(matches!(enumerate(&big), Err(FfError::TooLarge(_))));
    }

    #[test]
    fn fermat_on_every_element() {
        for (p, k) in [(2, 1), (5, 1), (2, 4), (3, 3), (7, 2), (13, 2)] {
            let f = make_field(p, k, 3).unwrap();
            let q = f.order();
            for a in enumerate(&f).unwrap() {
                assert_eq!(a.pow(q), a);
                if !a.is_zero() {
                    assert_eq!(a.pow(q - 1), f.one());
                    assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), f.one());
                }
            }
        }
    }

    #[test]
    fn table_and_schoolbook_paths_agree() {
        let f = make_field(5, 3, 8).unwrap();
        assert!(f.0.tables.is_some());
        for a in 0..f.order() {
            for b in (0..f.order()).step_by(7) {
                assert_eq!(f.mul(a, b), slow_mul(&f.0, a, b));
            }
        }
        // large enough to skip the tables
        let g = make_field(3, 13, 8).unwrap();
        assert!(g.0.tables.is_none());
        let x = 123_456;
        assert_eq!(g.pow(x, g.order()), x);
        assert_eq!(g.mul(x, g.inv(x).unwrap()), 1);
    }

    fn arb_field() -> impl Strategy<Value = Field> {
        prop::sample::select(vec![(2u64, 1u32), (7, 1), (1_048_573, 1), (2, 8), (3, 4), (5, 2), (3, 12)])
            .prop_map(|(p, k)| make_field(p, k, 11).unwrap())
    }

    proptest! {
        #[test]
        fn ring_axioms(field in arb_field(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let q = field.order();
            let (a, b, c) = (a % q, b % q, c % q);
            let f = &field;
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
            prop_assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }
}
