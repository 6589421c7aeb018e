//! Polynomial expressions in `t` and `x` with integer coefficients.
//!
//! ```text
//! expr   := sign? term (sign term)*
//! term   := coeff ('*'? factor)* | factor ('*'? factor)*
//! factor := var ('^' digits)?
//! coeff  := digits
//! ```
//!
//! Whitespace between tokens is ignored.

use std::collections::BTreeMap;
use std::fmt;

use frobstat::mpoly::IntBiPoly;
use thiserror::Error;

pub const VARS_TX: &[char] = &['t', 'x'];
pub const VARS_T: &[char] = &['t'];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at position {position}: expected {expected}, found {}", found_text(.found))]
pub struct ParseError {
    /// Character offset into the source.
    pub position: usize,
    pub expected: String,
    pub found: Option<char>,
}

fn found_text(found: &Option<char>) -> String {
    match found {
        Some(c) => format!("'{c}'"),
        None => "end of input".to_string(),
    }
}

/// A parsed expression: `(t-degree, x-degree) -> coefficient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyExpr {
    pub source: String,
    pub terms: BTreeMap<(u32, u32), i64>,
}

impl PolyExpr {
    pub fn to_int_bipoly(&self) -> IntBiPoly {
        IntBiPoly::new(self.terms.iter().map(|(&m, &c)| (m, c)))
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_int_bipoly().fmt(f)
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a [char],
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn error(&mut self, expected: impl Into<String>) -> ParseError {
        let found = self.peek();
        ParseError { position: self.pos, expected: expected.into(), found }
    }

    fn expected_var(&self) -> String {
        let names: Vec<String> = self.vars.iter().map(|v| format!("'{v}'")).collect();
        names.join(" or ")
    }

    fn digits(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("a number"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let found = self.chars.get(start).copied();
        text.parse().map_err(|_| ParseError { position: start, expected: "a number below 2^64".into(), found })
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    /// Parses one variable power, or returns `None` if the next token is not a variable.
    fn factor(&mut self, exps: &mut [u32; 2]) -> Result<Option<()>, ParseError> {
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        if !c.is_alphabetic() {
            return Ok(None);
        }
        if !self.vars.contains(&c) {
            return Err(self.error(format!("variable {}", self.expected_var())));
        }
        self.pos += 1;
        let mut e = 1u32;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            let found = self.peek();
            e = u32::try_from(self.digits()?).map_err(|_| ParseError {
                position: start,
                expected: "an exponent below 2^32".into(),
                found,
            })?;
        }
        let slot = if c == 't' { 0 } else { 1 };
        exps[slot] = exps[slot].checked_add(e).ok_or_else(|| self.error("a smaller exponent"))?;
        Ok(Some(()))
    }

    fn term(&mut self) -> Result<((u32, u32), u64), ParseError> {
        let mut coeff = 1u64;
        let mut exps = [0u32; 2];
        let mut seen = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            coeff = self.digits()?;
            seen = true;
        }
        loop {
            let star = self.peek() == Some('*');
            if star {
                if !seen {
                    return Err(self.error(format!("a coefficient or {}", self.expected_var())));
                }
                self.pos += 1;
            }
            match self.factor(&mut exps)? {
                Some(()) => seen = true,
                None if star => return Err(self.error(format!("variable {}", self.expected_var()))),
                None if !seen => return Err(self.error(format!("a coefficient or {}", self.expected_var()))),
                None => break,
            }
        }
        Ok(((exps[0], exps[1]), coeff))
    }

    fn expr(&mut self) -> Result<BTreeMap<(u32, u32), i64>, ParseError> {
        let mut acc: BTreeMap<(u32, u32), i128> = BTreeMap::new();
        let mut negative = self.sign().unwrap_or(false);
        loop {
            let (m, c) = self.term()?;
            let c = if negative { -(c as i128) } else { c as i128 };
            *acc.entry(m).or_insert(0) += c;
            match self.sign() {
                Some(neg) => negative = neg,
                None => break,
            }
        }
        if self.peek().is_some() {
            return Err(self.error("'+', '-', '*' or end of input"));
        }
        acc.retain(|_, c| *c != 0);
        acc.into_iter()
            .map(|(m, c)| {
                i64::try_from(c)
                    .map(|c| (m, c))
                    .map_err(|_| ParseError { position: 0, expected: "coefficients within 64 bits".into(), found: None })
            })
            .collect()
    }
}

/// Parses `src` as a polynomial in the variables `vars` (a subset of `t`, `x`).
pub fn parse_poly(src: &str, vars: &[char]) -> Result<PolyExpr, ParseError> {
    let mut p = Parser { chars: src.chars().collect(), pos: 0, vars };
    if p.peek().is_none() {
        return Err(p.error("a polynomial"));
    }
    let terms = p.expr()?;
    Ok(PolyExpr { source: src.to_string(), terms })
}

/// Parses a comma-separated list of polynomials; positions refer to the whole string.
pub fn parse_poly_list(src: &str, vars: &[char]) -> Result<Vec<PolyExpr>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for piece in src.split(',') {
        let parsed = parse_poly(piece, vars).map_err(|e| ParseError { position: e.position + offset, ..e })?;
        out.push(parsed);
        offset += piece.chars().count() + 1;
    }
    Ok(out)
}
