//! Text form of brackets: `tau(k, cls) tau(2, F + 2*e1) ...`.
//!
//! Indices are integers or variable names (for families). Classes are rational
//! combinations of `one, pt, W, F, beta, e1..e10, f1..f10, sigma, sigmabar`.
//! `beta` stays symbolic until a slice `m` is chosen, then becomes `W + m*F`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::engine::{Basis, CohClass, Insertion, PAIR_COUNT};
use crate::rational::{fmt_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("parse error at byte {pos}: expected {expected}, found {found}")]
    Parse { pos: usize, expected: String, found: String },
    #[error("index variable `{0}` has no value")]
    Unbound(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Index {
    Fixed(i64),
    Var(String),
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Fixed(k) => write!(f, "{k}"),
            Index::Var(v) => f.write_str(v),
        }
    }
}

/// `coh + beta * (W + m F)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ClassExpr {
    pub coh: CohClass,
    pub beta: Rational,
}

impl ClassExpr {
    pub fn basis(b: Basis) -> Self {
        ClassExpr { coh: CohClass::basis(b), beta: Rational::zero() }
    }

    pub fn beta() -> Self {
        ClassExpr { coh: CohClass::zero(), beta: Rational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.coh.is_zero() && self.beta.is_zero()
    }

    pub fn at_slice(&self, m: i64) -> CohClass {
        let mut c = self.coh.clone();
        c.add_term(Basis::W, &self.beta);
        c.add_term(Basis::F, &(&self.beta * rat(m)));
        c
    }
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.beta.is_zero() {
            return write!(f, "{}", self.coh);
        }
        let neg = self.beta.is_negative();
        let mag = self.beta.abs();
        let head = if self.coh.is_zero() {
            if neg { "-" } else { "" }.to_string()
        } else {
            format!("{} {} ", self.coh, if neg { "-" } else { "+" })
        };
        if mag.is_one() {
            write!(f, "{head}beta")
        } else {
            write!(f, "{head}{}*beta", fmt_rational(&mag))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DslInsertion {
    pub index: Index,
    pub class: ClassExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DslBracket {
    pub ins: Vec<DslInsertion>,
}

impl DslBracket {
    pub fn parse(src: &str) -> Result<DslBracket, DslError> {
        let mut p = Parser { s: src.as_bytes(), pos: 0 };
        let mut ins = Vec::new();
        loop {
            p.skip_ws();
            if p.pos == p.s.len() {
                break;
            }
            ins.push(p.insertion()?);
        }
        Ok(DslBracket { ins })
    }

    /// Variable names in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for i in &self.ins {
            if let Index::Var(v) = &i.index {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    pub fn bind(&self, values: &BTreeMap<String, i64>) -> Result<DslBracket, DslError> {
        let ins = self
            .ins
            .iter()
            .map(|i| {
                let index = match &i.index {
                    Index::Fixed(k) => Index::Fixed(*k),
                    Index::Var(v) => Index::Fixed(*values.get(v).ok_or_else(|| DslError::Unbound(v.clone()))?),
                };
                Ok(DslInsertion { index, class: i.class.clone() })
            })
            .collect::<Result<_, DslError>>()?;
        Ok(DslBracket { ins })
    }

    /// Engine insertions with `beta = W + m F`.
    pub fn insertions(&self, m: i64) -> Result<Vec<Insertion>, DslError> {
        self.ins
            .iter()
            .map(|i| match &i.index {
                Index::Fixed(k) => Ok(Insertion { k: *k, class: i.class.at_slice(m) }),
                Index::Var(v) => Err(DslError::Unbound(v.clone())),
            })
            .collect()
    }
}

impl fmt::Display for DslBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, i) in self.ins.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "tau({},{})", i.index, i.class)?;
        }
        Ok(())
    }
}

/// Parses a bare class such as `F + 2*e1`.
pub fn parse_class(src: &str) -> Result<ClassExpr, DslError> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let c = p.class()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("end of class"));
    }
    Ok(c)
}

fn symbol(name: &str) -> Option<ClassExpr> {
    let b = match name {
        "one" => Basis::One,
        "pt" => Basis::Pt,
        "W" => Basis::W,
        "F" => Basis::F,
        "sigma" => Basis::E(PAIR_COUNT),
        "sigmabar" => Basis::Fd(PAIR_COUNT),
        "beta" => return Some(ClassExpr::beta()),
        _ => {
            let (head, num) = name.split_at(1);
            let p: u8 = num.parse().ok().filter(|p| (1..=PAIR_COUNT).contains(p) && !num.starts_with('0'))?;
            match head {
                "e" => Basis::E(p),
                "f" => Basis::Fd(p),
                _ => return None,
            }
        }
    };
    Some(ClassExpr::basis(b))
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn found(&self) -> String {
        match self.s.get(self.pos) {
            None => "end of input".into(),
            Some(c) => format!("`{}`", *c as char),
        }
    }

    fn err(&self, expected: &str) -> DslError {
        DslError::Parse { pos: self.pos, expected: expected.into(), found: self.found() }
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), DslError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("`{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if !self.s.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic() || *c == b'_') {
            return None;
        }
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn digits(&mut self) -> Option<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn insertion(&mut self) -> Result<DslInsertion, DslError> {
        let at = self.pos;
        match self.ident() {
            Some(t) if t == "tau" => {}
            _ => {
                self.pos = at;
                self.skip_ws();
                return Err(self.err("`tau`"));
            }
        }
        self.expect(b'(')?;
        let index = self.index()?;
        self.expect(b',')?;
        let class = self.class()?;
        self.expect(b')')?;
        Ok(DslInsertion { index, class })
    }

    fn index(&mut self) -> Result<Index, DslError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        if let Some(k) = self.digits() {
            return Ok(Index::Fixed(if neg { -k } else { k }));
        }
        if !neg {
            if let Some(v) = self.ident() {
                return Ok(Index::Var(v));
            }
        }
        Err(self.err("an integer or an index variable"))
    }

    fn class(&mut self) -> Result<ClassExpr, DslError> {
        let mut acc = ClassExpr::default();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -Rational::one()
            }
            Some(b'+') => {
                self.pos += 1;
                Rational::one()
            }
            _ => Rational::one(),
        };
        loop {
            let (c, sym) = self.term()?;
            let c = c * &sign;
            acc.coh = acc.coh.add(&sym.coh.scale(&c));
            acc.beta += &sym.beta * &c;
            sign = match self.peek() {
                Some(b'+') => Rational::one(),
                Some(b'-') => -Rational::one(),
                _ => return Ok(acc),
            };
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(Rational, ClassExpr), DslError> {
        let coef = match self.digits() {
            Some(n) => {
                let mut c = rat(n);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    match self.digits() {
                        Some(d) if d != 0 => c /= rat(d),
                        _ => return Err(self.err("a nonzero denominator")),
                    }
                }
                self.expect(b'*')?;
                c
            }
            None => Rational::one(),
        };
        self.skip_ws();
        let at = self.pos;
        let Some(name) = self.ident() else {
            return Err(self.err("a class symbol"));
        };
        match symbol(&name) {
            Some(s) => Ok((coef, s)),
            None => {
                self.pos = at;
                Err(DslError::Parse {
                    pos: at,
                    expected: "one of one, pt, W, F, beta, e1..e10, f1..f10, sigma, sigmabar".into(),
                    found: format!("`{name}`"),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn parses_headline_bracket() {
        let b = DslBracket::parse("tau(8,one) tau(5, one) tau(10,one) tau(4,pt) tau(3,pt)").unwrap();
        assert_eq!(b.ins.len(), 5);
        assert_eq!(b.to_string(), "tau(8,one) tau(5,one) tau(10,one) tau(4,pt) tau(3,pt)");
        assert!(DslBracket::parse("").unwrap().ins.is_empty());
    }

    #[test]
    fn linear_combinations_and_beta() {
        let b = DslBracket::parse("tau(k, F + 2*e1 - 1/3*pt) tau(0, beta) tau(1, sigma - 2*beta)").unwrap();
        assert_eq!(b.variables(), vec!["k".to_string()]);
        assert_eq!(b.ins[0].class.coh.pairing(&CohClass::basis(Basis::One)), frac(-1, 3));
        let c = &b.ins[2].class;
        assert_eq!(c.beta, rat(-2));
        assert_eq!(c.to_string(), "e10 - 2*beta");
        let at = b.ins[1].class.at_slice(3);
        assert_eq!(at.to_string(), "W + 3*F");
    }

    #[test]
    fn errors_carry_position() {
        match DslBracket::parse("tau(1,pt) tau(2,q7)") {
            Err(DslError::Parse { pos, found, .. }) => {
                assert_eq!(pos, 16);
                assert_eq!(found, "`q7`");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(DslBracket::parse("tau(1 pt)"), Err(DslError::Parse { pos: 6, .. })));
        assert!(DslBracket::parse("tau(1,e11)").is_err());
        assert!(DslBracket::parse("tau(1,e0)").is_err());
        assert!(DslBracket::parse("tau(x,pt)").unwrap().insertions(0).is_err());
    }

    #[test]
    fn printed_forms_reparse() {
        for src in ["tau(-2,pt) tau(0,-F + 1/2*e3)", "tau(k,-beta) tau(l,pt + 3*beta)", "tau(1,sigmabar)"] {
            let b = DslBracket::parse(src).unwrap();
            assert_eq!(DslBracket::parse(&b.to_string()).unwrap(), b);
        }
    }
}
