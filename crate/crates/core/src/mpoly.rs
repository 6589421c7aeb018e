//! Sparse bivariate polynomials `F(t, x)`.
//!
//! Covers substitution `x = f(t)`, the generic degree of `F(t, A_0 + ... + A_n t^n)`,
//! Sylvester resultants, the 3x3 Wronskian, and affine point counts over `F_{p^k}`
//! with the Lang-Weil based detector for the number of conjugate geometric components.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::ff::{make_field, FfError, Field};
use crate::poly::{Poly, PolyError};

/// Largest `p^{2k}` that [`count_plane_points`] will evaluate.
pub const POINT_COUNT_BUDGET: u64 = 1 << 34;
/// Largest `p^{4k}` for which [`detect_nu`] also confirms `N_{2k}`.
pub const NU_VALIDATION_BUDGET: u64 = 1 << 26;
/// Below this characteristic the separation of [`detect_nu`]'s threshold is not guaranteed.
pub const NU_RELIABLE_MIN_P: u64 = 11;

// fixed so that point counts never depend on caller seeds
const EXTENSION_SEED: u64 = 0x5eed;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MpolyError {
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("neither polynomial involves the eliminated variable")]
    NoEliminatedVariable,
    #[error("point counting needs a prime base field")]
    NonPrimeBase,
    #[error("evaluation grid of {0} points exceeds the budget")]
    BudgetExceeded(u128),
    #[error("no k <= {0} has N_k >= p^k / 2")]
    Undetected(u32),
    #[error("k_max = {k_max} is below twice the total degree {total_degree}")]
    KMaxTooSmall { k_max: u32, total_degree: u32 },
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Which variable a resultant eliminates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    T,
    X,
}

/// `sum c_{a,b} t^a x^b`, stored as a map `(a, b) -> c` without zero entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BiPoly {
    field: Field,
    terms: BTreeMap<(u32, u32), u64>,
    deg_t: Option<u32>,
    deg_x: Option<u32>,
    total_degree: Option<u32>,
}

impl BiPoly {
    /// Collects terms, summing repeated monomials and dropping zeros.
    pub fn new(field: &Field, terms: impl IntoIterator<Item = ((u32, u32), u64)>) -> Self {
        let mut map: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for (mono, c) in terms {
            let slot = map.entry(mono).or_insert(0);
            *slot = field.add(*slot, c);
        }
        map.retain(|_, c| *c != 0);
        Self::from_map(field, map)
    }

    fn from_map(field: &Field, terms: BTreeMap<(u32, u32), u64>) -> Self {
        let deg_t = terms.keys().map(|&(a, _)| a).max();
        let deg_x = terms.keys().map(|&(_, b)| b).max();
        let total_degree = terms.keys().map(|&(a, b)| a + b).max();
        BiPoly { field: field.clone(), terms, deg_t, deg_x, total_degree }
    }

    pub fn zero(field: &Field) -> Self {
        Self::from_map(field, BTreeMap::new())
    }

    /// Integer coefficients reduced into the prime subfield.
    pub fn from_ints(field: &Field, terms: impl IntoIterator<Item = ((u32, u32), i64)>) -> Self {
        Self::new(field, terms.into_iter().map(|(m, c)| (m, field.from_int(c))))
    }

    /// `f(t)` viewed as a polynomial free of `x`.
    pub fn from_poly_in_t(f: &Poly) -> Self {
        Self::new(f.field(), f.coeffs().iter().enumerate().map(|(a, &c)| ((a as u32, 0), c)))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), u64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_t(&self) -> Option<u32> {
        self.deg_t
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.deg_x
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.total_degree
    }

    fn check(&self, other: &BiPoly) -> Result<(), MpolyError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(MpolyError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &BiPoly) -> Result<BiPoly, MpolyError> {
        self.check(other)?;
        Ok(Self::new(&self.field, self.terms.iter().chain(&other.terms).map(|(&m, &c)| (m, c))))
    }

    pub fn mul(&self, other: &BiPoly) -> Result<BiPoly, MpolyError> {
        self.check(other)?;
        let f = &self.field;
        let products = self.terms.iter().flat_map(|(&(a1, b1), &c1)| {
            other.terms.iter().map(move |(&(a2, b2), &c2)| ((a1 + a2, b1 + b2), f.mul(c1, c2)))
        });
        Ok(Self::new(f, products.collect::<Vec<_>>()))
    }

    /// `dF/dx`.
    pub fn partial_x(&self) -> BiPoly {
        let f = &self.field;
        let p = f.characteristic();
        Self::new(
            f,
            self.terms
                .iter()
                .filter(|(&(_, b), _)| b > 0)
                .map(|(&(a, b), &c)| ((a, b - 1), f.mul(c, b as u64 % p))),
        )
    }

    /// Coefficients of the powers of `var`, each a polynomial in the other variable.
    pub fn coefficients_in(&self, var: Var) -> Vec<Poly> {
        let deg = match var {
            Var::X => self.deg_x,
            Var::T => self.deg_t,
        };
        let Some(deg) = deg else { return Vec::new() };
        let mut rows: Vec<Vec<u64>> = vec![Vec::new(); deg as usize + 1];
        for (&(a, b), &c) in &self.terms {
            let (outer, inner) = match var {
                Var::X => (b, a),
                Var::T => (a, b),
            };
            let row = &mut rows[outer as usize];
            if row.len() <= inner as usize {
                row.resize(inner as usize + 1, 0);
            }
            row[inner as usize] = c;
        }
        rows.into_iter().map(|r| Poly::new(&self.field, r)).collect()
    }

    /// Value at a point of the field (or of an extension sharing its encoding, see [`Self::embed`]).
    pub fn eval(&self, t: u64, x: u64) -> u64 {
        let f = &self.field;
        self.terms
            .iter()
            .fold(0, |acc, (&(a, b), &c)| f.add(acc, f.mul(c, f.mul(f.pow(t, a as u64), f.pow(x, b as u64)))))
    }

    /// Same coefficients over `target`, which must contain this (prime) field.
    pub fn embed(&self, target: &Field) -> Result<BiPoly, MpolyError> {
        if !self.field.is_prime_field() || target.characteristic() != self.field.characteristic() {
            return Err(MpolyError::NonPrimeBase);
        }
        // prime-subfield representatives coincide in every extension
        Ok(Self::from_map(target, self.terms.clone()))
    }

    /// `F(t, f(t))`, by Horner's scheme in `x` with coefficients in `F_q[t]`.
    pub fn substitute(&self, f: &Poly) -> Result<Poly, MpolyError> {
        if f.field() != &self.field {
            return Err(MpolyError::FieldMismatch);
        }
        let mut acc = Poly::zero(&self.field);
        for coeff in self.coefficients_in(Var::X).iter().rev() {
            acc = acc.mul(f)?.add(coeff)?;
        }
        Ok(acc)
    }

    /// `deg_t F(t, A_0 + ... + A_n t^n)` for independent `A_j`: `max(a + n b)` over
    /// the support. The top coefficient is a nonzero polynomial in `A_n`.
    pub fn generic_degree(&self, n: u32) -> Result<u32, MpolyError> {
        self.terms.keys().map(|&(a, b)| a + n * b).max().ok_or(MpolyError::ZeroPolynomial)
    }

    pub fn display_with(&self, tvar: char, xvar: char) -> BiPolyDisplay<'_> {
        BiPolyDisplay { poly: self, tvar, xvar }
    }
}

pub struct BiPolyDisplay<'a> {
    poly: &'a BiPoly,
    tvar: char,
    xvar: char,
}

fn write_monomial(
    f: &mut fmt::Formatter<'_>,
    coeff: &str,
    is_one: bool,
    vars: [(char, u32); 2],
) -> fmt::Result {
    let has_vars = vars.iter().any(|&(_, e)| e > 0);
    if !is_one || !has_vars {
        f.write_str(coeff)?;
    }
    for (v, e) in vars {
        match e {
            0 => {}
            1 => write!(f, "{v}")?,
            _ => write!(f, "{v}^{e}")?,
        }
    }
    Ok(())
}

impl fmt::Display for BiPolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.poly;
        if p.is_zero() {
            return f.write_str("0");
        }
        // x-degree first, then t-degree, both descending
        let mut terms: Vec<_> = p.terms.iter().collect();
        terms.sort_by_key(|(m, _)| std::cmp::Reverse((m.1, m.0)));
        for (i, (&(a, b), &c)) in terms.into_iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let coeff = p.field.format_value(c);
            write_monomial(f, &coeff, c == 1, [(self.xvar, b), (self.tvar, a)])?;
        }
        Ok(())
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with('t', 'x'))
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self, self.field)
    }
}

/// A bivariate polynomial with integer coefficients, independent of any field.
/// Bind it with [`IntBiPoly::bind`] once `q` is known, so one expression serves a whole scan.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntBiPoly {
    terms: BTreeMap<(u32, u32), i64>,
}

impl IntBiPoly {
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32), i64)>) -> Self {
        let mut map: BTreeMap<(u32, u32), i64> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        IntBiPoly { terms: map }
    }

    /// `(t-degree, x-degree) -> coefficient`.
    pub fn terms(&self) -> &BTreeMap<(u32, u32), i64> {
        &self.terms
    }

    pub fn bind(&self, field: &Field) -> BiPoly {
        BiPoly::from_ints(field, self.terms.iter().map(|(&m, &c)| (m, c)))
    }

    /// The univariate polynomial in `t`; `None` if `x` occurs.
    pub fn bind_univariate(&self, field: &Field) -> Option<Poly> {
        if self.terms.keys().any(|&(_, b)| b > 0) {
            return None;
        }
        let deg = self.terms.keys().map(|&(a, _)| a).max().unwrap_or(0) as usize;
        let mut coeffs = vec![0i64; deg + 1];
        for (&(a, _), &c) in &self.terms {
            coeffs[a as usize] = c;
        }
        Some(Poly::from_ints(field, &coeffs))
    }
}

impl fmt::Display for IntBiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| std::cmp::Reverse((m.1, m.0)));
        for (i, (&(a, b), &c)) in terms.into_iter().enumerate() {
            match (i, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.unsigned_abs();
            write_monomial(f, &mag.to_string(), mag == 1, [('x', b), ('t', a)])?;
        }
        Ok(())
    }
}

/// Determinant of a square matrix over `F_q[s]` by fraction-free (Bareiss) elimination.
fn bareiss_determinant(mut m: Vec<Vec<Poly>>, field: &Field) -> Result<Poly, PolyError> {
    let n = m.len();
    if n == 0 {
        return Ok(Poly::one(field));
    }
    let mut negate = false;
    let mut prev = Poly::one(field);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(pivot) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(Poly::zero(field));
            };
            m.swap(k, pivot);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k])?.sub(&m[i][k].mul(&m[k][j])?)?;
                // exact by Sylvester's identity
                m[i][j] = num.divrem(&prev)?.0;
            }
            m[i][k] = Poly::zero(field);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// `Res_var(F, G)`: the Sylvester determinant with entries in the polynomial ring of
/// the other variable. Identically zero iff `F` and `G` share a factor of positive
/// degree in `var`.
pub fn resultant(f: &BiPoly, g: &BiPoly, eliminate: Var) -> Result<Poly, MpolyError> {
    f.check(g)?;
    if f.is_zero() || g.is_zero() {
        return Err(MpolyError::ZeroPolynomial);
    }
    let fc = f.coefficients_in(eliminate);
    let gc = g.coefficients_in(eliminate);
    let (m, l) = (fc.len() - 1, gc.len() - 1);
    if m == 0 && l == 0 {
        return Err(MpolyError::NoEliminatedVariable);
    }
    let size = m + l;
    let zero = Poly::zero(&f.field);
    let mut matrix = vec![vec![zero; size]; size];
    // l shifted copies of F's coefficients, then m of G's, highest power first
    for row in 0..l {
        for (j, c) in fc.iter().rev().enumerate() {
            matrix[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in gc.iter().rev().enumerate() {
            matrix[l + row][row + j] = c.clone();
        }
    }
    Ok(bareiss_determinant(matrix, &f.field)?)
}

/// `det [[f, g, h], [f', g', h'], [f'', g'', h'']]`.
pub fn wronskian3(f: &Poly, g: &Poly, h: &Poly) -> Result<Poly, MpolyError> {
    if f.field() != g.field() || f.field() != h.field() {
        return Err(MpolyError::FieldMismatch);
    }
    let rows = [f, g, h].map(|p| [p.clone(), p.derivative(), p.derivative().derivative()]);
    // cofactor expansion along the first row (column-major rows above)
    let minor = |a: &Poly, b: &Poly, c: &Poly, d: &Poly| -> Result<Poly, PolyError> { a.mul(d)?.sub(&b.mul(c)?) };
    let [r0, r1, r2] = &rows;
    let t0 = r0[0].mul(&minor(&r1[1], &r2[1], &r1[2], &r2[2])?)?;
    let t1 = r1[0].mul(&minor(&r0[1], &r2[1], &r0[2], &r2[2])?)?;
    let t2 = r2[0].mul(&minor(&r0[1], &r1[1], &r0[2], &r1[2])?)?;
    Ok(t0.sub(&t1)?.add(&t2)?)
}

/// `#{(t, x) in F_{p^k}^2 : F(t, x) = 0}` by exhaustive evaluation over a freshly built
/// `F_{p^k}`. The base field must be prime.
pub fn count_plane_points(f: &BiPoly, k: u32) -> Result<u64, MpolyError> {
    if !f.field.is_prime_field() {
        return Err(MpolyError::NonPrimeBase);
    }
    let p = f.field.characteristic();
    let grid = (p as u128).checked_pow(2 * k).unwrap_or(u128::MAX);
    if grid > POINT_COUNT_BUDGET as u128 {
        return Err(MpolyError::BudgetExceeded(grid));
    }
    let ext = make_field(p, k, EXTENSION_SEED)?;
    let lifted = f.embed(&ext)?;
    let q = ext.order();
    let x_coeffs: Vec<Vec<(u32, u64)>> = {
        let mut by_b: BTreeMap<u32, Vec<(u32, u64)>> = BTreeMap::new();
        for (&(a, b), &c) in lifted.terms() {
            by_b.entry(b).or_default().push((a, c));
        }
        let deg_x = lifted.deg_x().unwrap_or(0);
        (0..=deg_x).map(|b| by_b.remove(&b).unwrap_or_default()).collect()
    };
    let count = (0..q)
        .into_par_iter()
        .map(|t| {
            let coeffs: Vec<u64> = x_coeffs
                .iter()
                .map(|terms| terms.iter().fold(0, |acc, &(a, c)| ext.add(acc, ext.mul(c, ext.pow(t, a as u64)))))
                .collect();
            (0..q)
                .filter(|&x| coeffs.iter().rev().fold(0, |acc, &c| ext.add(ext.mul(acc, x), c)) == 0)
                .count() as u64
        })
        .sum();
    Ok(count)
}

/// Number of Frobenius-conjugate absolutely irreducible components of an
/// `F_p`-irreducible `F`: the least `k <= k_max` with `N_k >= p^k / 2`. When
/// `p^{4k}` is within [`NU_VALIDATION_BUDGET`] the candidate is confirmed by
/// `N_{2k} >= p^{2k} / 2`; a failed confirmation moves on to the next `k`.
pub fn detect_nu(f: &BiPoly, k_max: u32) -> Result<u32, MpolyError> {
    let total = f.total_degree().ok_or(MpolyError::ZeroPolynomial)?;
    if k_max < 2 * total {
        return Err(MpolyError::KMaxTooSmall { k_max, total_degree: total });
    }
    if !f.field.is_prime_field() {
        return Err(MpolyError::NonPrimeBase);
    }
    let p = f.field.characteristic() as u128;
    for k in 1..=k_max {
        let grid = p.checked_pow(2 * k).unwrap_or(u128::MAX);
        if grid > POINT_COUNT_BUDGET as u128 {
            break;
        }
        let n_k = count_plane_points(f, k)? as u128;
        if 2 * n_k < p.pow(k) {
            continue;
        }
        let validation_grid = p.checked_pow(4 * k).unwrap_or(u128::MAX);
        if validation_grid <= NU_VALIDATION_BUDGET as u128 {
            let n_2k = count_plane_points(f, 2 * k)? as u128;
            if 2 * n_2k < p.pow(2 * k) {
                continue;
            }
        }
        return Ok(k);
    }
    Err(MpolyError::Undetected(k_max))
}
