//! Sparse multivariate polynomials over Q and exact interpolation.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::linalg::{solve, Solution};
use crate::rational::{fmt_rational, rat, Rational};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyQ {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("interpolation system is singular (rank {rank} < {needed})")]
    SingularSystem { rank: usize, needed: usize },
    #[error("samples are not interpolated by any polynomial of degree <= {degree}")]
    Inconsistent { degree: u32 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

impl PolyQ {
    pub fn zero(vars: &[&str]) -> Self {
        PolyQ { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], c: Rational) -> Self {
        let mut p = PolyQ::zero(vars);
        p.add_term(vec![0; vars.len()], &c);
        p
    }

    pub fn var(vars: &[&str], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = PolyQ::zero(vars);
        p.add_term(e, &Rational::one());
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: &Rational) {
        assert_eq!(e.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, k) in point.iter().zip(e) {
                t *= num_traits::pow(x.clone(), *k as usize);
            }
            acc += t;
        }
        acc
    }

    pub fn eval_i64(&self, point: &[i64]) -> Rational {
        let p: Vec<Rational> = point.iter().map(|x| rat(*x)).collect();
        self.eval(&p)
    }

    pub fn add(&self, o: &PolyQ) -> PolyQ {
        assert_eq!(self.vars, o.vars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> PolyQ {
        PolyQ { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn mul(&self, o: &PolyQ) -> PolyQ {
        assert_eq!(self.vars, o.vars);
        let mut out = PolyQ { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> PolyQ {
        let vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        let mut acc = PolyQ::constant(&vars, Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Parses an expression such as `16*(k + l - 3)*(4*k^3 - 29) + 1/2` over `vars`.
    pub fn parse(src: &str, vars: &[&str]) -> Result<PolyQ, PolyError> {
        let mut p = ExprParser { s: src.as_bytes(), pos: 0, vars };
        let out = p.sum()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }

    /// Rewrites the polynomial in a new variable list containing the old one.
    pub fn with_vars(&self, vars: &[&str]) -> Result<PolyQ, PolyError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).ok_or_else(|| PolyError::UnknownVariable(v.clone())))
            .collect::<Result<_, _>>()?;
        let mut out = PolyQ::zero(vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, k) in e.iter().enumerate() {
                ne[map[i]] = *k;
            }
            out.add_term(ne, c);
        }
        Ok(out)
    }

    /// Terms as `(exponents, "num/den")`, display order.
    pub fn records(&self) -> Vec<(Vec<u32>, String)> {
        self.ordered().into_iter().map(|(e, c)| (e.clone(), fmt_rational(c))).collect()
    }

    fn ordered(&self) -> Vec<(&Vec<u32>, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }
}

impl fmt::Display for PolyQ {
    /// Graded order: total degree descending, then lexicographic descending.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.ordered().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = e
                .iter()
                .zip(&self.vars)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Serialize for PolyQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Exponent vectors of total degree `<= deg` in `n` variables, graded descending.
pub fn monomials_upto(n: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, deg, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        db.cmp(&da).then_with(|| b.cmp(a))
    });
    out
}

/// Lattice points `x >= lower` with `sum (x_i - lower_i) <= deg`; unisolvent for degree `deg`.
pub fn simplex_points(lower: &[i64], deg: u32) -> Vec<Vec<i64>> {
    monomials_upto(lower.len(), deg)
        .into_iter()
        .rev()
        .map(|e| e.iter().zip(lower).map(|(k, l)| l + *k as i64).collect())
        .collect()
}

/// Solves for the polynomial of total degree `<= deg` through the samples.
pub fn interpolate(
    vars: &[&str],
    points: &[Vec<Rational>],
    values: &[Rational],
    deg: u32,
) -> Result<PolyQ, PolyError> {
    let basis = monomials_upto(vars.len(), deg);
    let rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| {
            basis
                .iter()
                .map(|e| {
                    p.iter()
                        .zip(e)
                        .fold(Rational::one(), |acc, (x, k)| acc * num_traits::pow(x.clone(), *k as usize))
                })
                .collect()
        })
        .collect();
    match solve(&rows, values, basis.len()) {
        Solution::Unique(c) => {
            let mut p = PolyQ::zero(vars);
            for (e, x) in basis.into_iter().zip(&c) {
                p.add_term(e, x);
            }
            Ok(p)
        }
        Solution::Underdetermined { rank, .. } => {
            Err(PolyError::SingularSystem { rank, needed: basis.len() })
        }
        Solution::Inconsistent { .. } => Err(PolyError::Inconsistent { degree: deg }),
    }
}

pub fn interpolate_univariate(var: &str, samples: &[(i64, Rational)], deg: u32) -> Result<PolyQ, PolyError> {
    let pts: Vec<Vec<Rational>> = samples.iter().map(|(x, _)| vec![rat(*x)]).collect();
    let vals: Vec<Rational> = samples.iter().map(|(_, y)| y.clone()).collect();
    interpolate(&[var], &pts, &vals, deg)
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl ExprParser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<PolyQ, PolyError> {
        let mut neg = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            neg = true;
        }
        let first = self.product()?;
        let mut acc = if neg { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<PolyQ, PolyError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    let vars = self.vars;
                    acc = acc.mul(&PolyQ::constant(vars, d.recip()));
                }
                Some(c) if c == b'(' || c.is_ascii_alphabetic() => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<PolyQ, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u32 = e.to_integer().try_into().map_err(|_| self.err("bad exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<Rational, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        let n: num_bigint::BigInt = txt.parse().map_err(|_| self.err("bad integer"))?;
        Ok(Rational::from_integer(n))
    }

    fn atom(&mut self) -> Result<PolyQ, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(PolyQ::constant(self.vars, n))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
                Ok(PolyQ::var(self.vars, i))
            }
            _ => Err(self.err("expected number, variable or `(`")),
        }
    }
}
