//! Cohomology of the elliptic K3 model: basis, pairing, cup product, gradings.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{fmt_rational, Rational};

/// Number of hyperbolic pairs spanning the orthogonal complement of `W, F`.
pub const PAIR_COUNT: u8 = 10;

/// Basis symbols. `E(p)`, `Fd(p)` are the `p`-th hyperbolic pair `e_p, f_p`, `1 <= p <= 10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    One,
    Pt,
    W,
    F,
    E(u8),
    Fd(u8),
}

impl Basis {
    /// Complex cohomological degree.
    pub fn deg(self) -> i64 {
        match self {
            Basis::One => 0,
            Basis::Pt => 2,
            _ => 1,
        }
    }

    pub fn wt(self) -> i64 {
        match self {
            Basis::Pt | Basis::W => 1,
            Basis::One | Basis::F => -1,
            Basis::E(_) | Basis::Fd(_) => 0,
        }
    }

    pub fn is_v(self) -> bool {
        matches!(self, Basis::E(_) | Basis::Fd(_))
    }

    pub fn label(self) -> Option<u8> {
        match self {
            Basis::E(p) | Basis::Fd(p) => Some(p),
            _ => None,
        }
    }

    /// `∫ a b`.
    pub fn pairing(self, o: Basis) -> i64 {
        use Basis::*;
        match (self, o) {
            (One, Pt) | (Pt, One) | (W, F) | (F, W) => 1,
            (E(p), Fd(q)) | (Fd(p), E(q)) if p == q => 1,
            _ => 0,
        }
    }

    /// `a * b` as `coefficient * basis`, or `None` when it vanishes.
    pub fn cup(self, o: Basis) -> Option<(i64, Basis)> {
        match (self, o) {
            (Basis::One, x) | (x, Basis::One) => Some((1, x)),
            (a, b) if a.deg() == 1 && b.deg() == 1 => {
                let c = a.pairing(b);
                (c != 0).then_some((c, Basis::Pt))
            }
            _ => None,
        }
    }

    /// `∫ a b c`.
    pub fn triple(self, b: Basis, c: Basis) -> i64 {
        match self.cup(b) {
            Some((x, y)) => x * y.pairing(c),
            None => 0,
        }
    }

    /// The dual basis element under the pairing.
    pub fn dual(self) -> Basis {
        use Basis::*;
        match self {
            One => Pt,
            Pt => One,
            W => F,
            F => W,
            E(p) => Fd(p),
            Fd(p) => E(p),
        }
    }

    /// All 24 basis elements.
    pub fn all() -> Vec<Basis> {
        let mut v = vec![Basis::One, Basis::Pt, Basis::W, Basis::F];
        for p in 1..=PAIR_COUNT {
            v.push(Basis::E(p));
            v.push(Basis::Fd(p));
        }
        v
    }

    pub fn name(self) -> String {
        match self {
            Basis::One => "one".into(),
            Basis::Pt => "pt".into(),
            Basis::W => "W".into(),
            Basis::F => "F".into(),
            Basis::E(p) => format!("e{p}"),
            Basis::Fd(p) => format!("f{p}"),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A rational linear combination of basis symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CohClass {
    terms: BTreeMap<Basis, Rational>,
}

impl CohClass {
    pub fn zero() -> Self {
        CohClass::default()
    }

    pub fn basis(b: Basis) -> Self {
        let mut c = CohClass::zero();
        c.add_term(b, &Rational::one());
        c
    }

    pub fn add_term(&mut self, b: Basis, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(b).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn add(&self, o: &CohClass) -> CohClass {
        let mut out = self.clone();
        for (b, c) in &o.terms {
            out.add_term(*b, c);
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> CohClass {
        let mut out = CohClass::zero();
        for (b, c) in &self.terms {
            out.add_term(*b, &(c * r));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (Basis, &Rational)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pairing(&self, o: &CohClass) -> Rational {
        let mut acc = Rational::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let p = a.pairing(*b);
                if p != 0 {
                    acc += x * y * Rational::from_integer(p.into());
                }
            }
        }
        acc
    }

    /// Single basis symbol with coefficient one, if that is what this is.
    pub fn as_basis(&self) -> Option<Basis> {
        if self.terms.len() == 1 {
            let (b, c) = self.terms.iter().next().expect("one term");
            if c.is_one() {
                return Some(*b);
            }
        }
        None
    }
}

impl fmt::Display for CohClass {
    /// DSL syntax, e.g. `F + 2*e1 - 1/3*pt`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mag.is_one() {
                write!(f, "{b}")?;
            } else {
                write!(f, "{}*{b}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn pairing_table() {
        assert_eq!(Basis::W.pairing(Basis::F), 1);
        assert_eq!(Basis::W.pairing(Basis::W), 0);
        assert_eq!(Basis::E(3).pairing(Basis::Fd(3)), 1);
        assert_eq!(Basis::E(3).pairing(Basis::Fd(4)), 0);
        assert_eq!(Basis::One.pairing(Basis::Pt), 1);
        for b in Basis::all() {
            assert_eq!(b.pairing(b.dual()), 1);
            assert_eq!(b.dual().dual(), b);
        }
    }

    #[test]
    fn cup_products() {
        assert_eq!(Basis::One.cup(Basis::F), Some((1, Basis::F)));
        assert_eq!(Basis::W.cup(Basis::F), Some((1, Basis::Pt)));
        assert_eq!(Basis::F.cup(Basis::F), None);
        assert_eq!(Basis::Pt.cup(Basis::F), None);
        assert_eq!(Basis::One.triple(Basis::E(1), Basis::Fd(1)), 1);
    }

    #[test]
    fn gradings() {
        let total: i64 = Basis::all().iter().map(|b| b.wt()).sum();
        assert_eq!(total, 0);
        assert_eq!(Basis::Pt.deg(), 2);
    }

    #[test]
    fn class_display() {
        let mut c = CohClass::basis(Basis::F);
        c.add_term(Basis::E(1), &rat(2));
        c.add_term(Basis::Pt, &rat(-1));
        assert_eq!(c.to_string(), "-pt + F + 2*e1");
        assert_eq!(c.pairing(&CohClass::basis(Basis::W)), rat(1));
    }
}
