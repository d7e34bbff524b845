//! Brackets of basis-pure insertions, their canonical keys, and series values.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use super::classes::{Basis, CohClass};
use crate::qmod::{delta_inverse_series, QMod};
use crate::rational::{fmt_rational, rat, Rational};

/// An insertion `tau_k(class)` with a possibly mixed class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Insertion {
    pub k: i64,
    pub class: CohClass,
}

/// Multiset of basis-pure insertions `(k, basis)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Bracket {
    pub ins: Vec<(i64, Basis)>,
}

impl Bracket {
    pub fn new(mut ins: Vec<(i64, Basis)>) -> Self {
        ins.sort();
        Bracket { ins }
    }

    pub fn empty() -> Self {
        Bracket::default()
    }

    pub fn len(&self) -> usize {
        self.ins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ins.is_empty()
    }

    /// Genus fixed by the dimension constraint.
    pub fn genus(&self) -> i64 {
        self.ins.iter().map(|(k, b)| k + b.deg() - 1).sum()
    }

    /// Weight of the numerator quasimodular form.
    pub fn weight(&self) -> i64 {
        self.ins.iter().map(|(k, b)| 2 * k + 2 * b.deg() + b.wt() - 1).sum()
    }

    pub fn count(&self, b: Basis) -> usize {
        self.ins.iter().filter(|(_, x)| *x == b).count()
    }

    pub fn labels(&self) -> Vec<u8> {
        let mut v: Vec<u8> = self.ins.iter().filter_map(|(_, b)| b.label()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Smallest pair label not in use.
    pub fn fresh_label(&self) -> u8 {
        let used = self.labels();
        (1..).find(|p| !used.contains(p)).expect("labels are finite")
    }

    pub fn with(&self, extra: &[(i64, Basis)]) -> Bracket {
        let mut v = self.ins.clone();
        v.extend_from_slice(extra);
        Bracket::new(v)
    }

    pub fn without(&self, idx: &[usize]) -> Vec<(i64, Basis)> {
        self.ins.iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, x)| *x).collect()
    }

    pub fn replace(&self, i: usize, by: (i64, Basis)) -> Bracket {
        let mut v = self.ins.clone();
        v[i] = by;
        Bracket::new(v)
    }

    /// Resolves negative indices: `tau_{-2}(g)` becomes the factor `∫ g`, other
    /// negative indices vanish. Returns `None` when the bracket vanishes.
    pub fn resolve_negative(&self) -> Option<Bracket> {
        let mut keep = Vec::with_capacity(self.ins.len());
        for &(k, b) in &self.ins {
            if k >= 0 {
                keep.push((k, b));
            } else if k == -2 && b == Basis::Pt {
                // ∫ pt = 1, and ∫ of every other basis symbol is zero
            } else {
                return None;
            }
        }
        Some(Bracket::new(keep))
    }

    /// Canonical key; `None` when the bracket vanishes because some pair label
    /// carries unequal numbers of `e` and `f` insertions.
    pub fn canonical(&self) -> Option<Key> {
        let mut plain = Vec::new();
        let mut comps: BTreeMap<u8, (Vec<i64>, Vec<i64>)> = BTreeMap::new();
        for &(k, b) in &self.ins {
            match b {
                Basis::E(p) => comps.entry(p).or_default().0.push(k),
                Basis::Fd(p) => comps.entry(p).or_default().1.push(k),
                _ => plain.push((k, b)),
            }
        }
        plain.sort();
        let mut cs = Vec::with_capacity(comps.len());
        for (_, (mut e, mut f)) in comps {
            if e.len() != f.len() {
                return None;
            }
            e.sort();
            f.sort();
            cs.push(if e <= f { (e, f) } else { (f, e) });
        }
        cs.sort();
        Some(Key { plain, comps: cs })
    }
}

impl fmt::Display for Bracket {
    /// DSL form, e.g. `tau(2,pt) tau(0,e1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, b)) in self.ins.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "tau({k},{b})")?;
        }
        Ok(())
    }
}

/// Canonical form: non-V insertions sorted, plus one entry per pair label
/// holding the sorted indices on each side (sides ordered, entries sorted).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key {
    pub plain: Vec<(i64, Basis)>,
    pub comps: Vec<(Vec<i64>, Vec<i64>)>,
}

impl Key {
    /// Representative bracket with labels `1..=c` in component order.
    pub fn bracket(&self) -> Bracket {
        let mut v = self.plain.clone();
        for (i, (e, f)) in self.comps.iter().enumerate() {
            let p = i as u8 + 1;
            v.extend(e.iter().map(|k| (*k, Basis::E(p))));
            v.extend(f.iter().map(|k| (*k, Basis::Fd(p))));
        }
        Bracket::new(v)
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bracket())
    }
}

/// A bracket series `numerator / Delta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesValue {
    pub numerator: QMod,
}

impl SeriesValue {
    pub fn new(numerator: QMod) -> Self {
        SeriesValue { numerator }
    }

    pub fn weight(&self) -> Option<u32> {
        self.numerator.weight()
    }

    /// Coefficient of `q^m`, `m >= -1`.
    pub fn coefficient_at(&self, m: i64) -> Rational {
        coefficient_at(&self.numerator, m)
    }

    /// `q^-1 .. q^(top)` coefficients.
    pub fn laurent(&self, top: i64) -> Vec<Rational> {
        (-1..=top).map(|m| self.coefficient_at(m)).collect()
    }
}

/// `[N / Delta]_{q^m}`.
pub fn coefficient_at(n: &QMod, m: i64) -> Rational {
    if m < -1 {
        return Rational::zero();
    }
    let top = (m + 1) as usize;
    let ne = n.qexpand(top);
    let inv = delta_inverse_series(top);
    (0..=top).map(|j| ne.coeff(j) * inv.coeff(top - j)).sum()
}

/// `D_q (N / Delta) = (D_q N + 24 G2 N) / Delta`, on numerators.
pub fn dq_numerator(n: &QMod) -> QMod {
    let mut out = n.d_q();
    out += &(&QMod::g2().scale(&rat(24)) * n);
    out
}

impl Serialize for SeriesValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SeriesValue", 3)?;
        st.serialize_field("numerator", &self.numerator.to_string())?;
        st.serialize_field("weight", &self.weight())?;
        st.serialize_field("denominator", "Delta")?;
        st.end()
    }
}

/// `coef * D_q^dq <bracket>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coef: Rational,
    pub dq: u32,
    pub bracket: Bracket,
}

impl Term {
    pub fn new(coef: Rational, dq: u32, bracket: Bracket) -> Self {
        Term { coef, dq, bracket }
    }

    pub fn plain(coef: Rational, bracket: Bracket) -> Self {
        Term { coef, dq: 0, bracket }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rational(&self.coef))?;
        if self.dq > 0 {
            write!(f, " Dq^{}", self.dq)?;
        }
        write!(f, " <{}>", self.bracket)
    }
}

/// Formal linear combination of `D_q`-decorated brackets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BracketExpression {
    pub terms: Vec<Term>,
}

impl BracketExpression {
    pub fn push(&mut self, t: Term) {
        if !t.coef.is_zero() {
            self.terms.push(t);
        }
    }
}

impl From<Vec<Term>> for BracketExpression {
    fn from(v: Vec<Term>) -> Self {
        let mut e = BracketExpression::default();
        for t in v {
            e.push(t);
        }
        e
    }
}

/// Expands mixed-class insertions by multilinearity.
pub fn expand_insertions(ins: &[Insertion]) -> Vec<(Rational, Bracket)> {
    let mut acc: Vec<(Rational, Vec<(i64, Basis)>)> = vec![(Rational::one(), Vec::new())];
    for i in ins {
        let mut next = Vec::new();
        for (c, v) in &acc {
            for (b, x) in i.class.terms() {
                let mut w = v.clone();
                w.push((i.k, b));
                next.push((c * x, w));
            }
        }
        acc = next;
    }
    let mut merged: BTreeMap<Vec<(i64, Basis)>, Rational> = BTreeMap::new();
    for (c, mut v) in acc {
        v.sort();
        *merged.entry(v).or_insert_with(Rational::zero) += c;
    }
    merged.into_iter().filter(|(_, c)| !c.is_zero()).map(|(v, c)| (c, Bracket::new(v))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Basis::*;

    #[test]
    fn genus_and_weight() {
        let b = Bracket::new(vec![(8, One), (5, One), (10, One), (4, Pt), (3, Pt)]);
        assert_eq!(b.genus(), 29);
        assert_eq!(b.weight(), 2 * 29 + 5 - 3 + 2);
        assert_eq!(Bracket::empty().weight(), 0);
    }

    #[test]
    fn canonical_keys() {
        let a = Bracket::new(vec![(2, E(1)), (3, Fd(1))]);
        let b = Bracket::new(vec![(3, Fd(5)), (2, E(5))]);
        let c = Bracket::new(vec![(2, Fd(7)), (3, E(7))]);
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical(), c.canonical());
        let d = Bracket::new(vec![(2, E(1)), (3, Fd(2))]);
        assert_eq!(d.canonical(), None);
        let e = Bracket::new(vec![(2, E(1)), (3, Fd(1)), (1, E(2)), (1, Fd(2))]);
        let f = Bracket::new(vec![(1, E(1)), (1, Fd(1)), (2, Fd(3)), (3, E(3))]);
        assert_eq!(e.canonical(), f.canonical());
        let g = Bracket::new(vec![(2, E(1)), (3, Fd(2)), (1, E(2)), (1, Fd(1))]);
        assert_ne!(e.canonical(), g.canonical());
    }

    #[test]
    fn key_roundtrip() {
        let e = Bracket::new(vec![(2, E(4)), (3, Fd(4)), (1, Pt), (0, F)]);
        let k = e.canonical().unwrap();
        assert_eq!(k.bracket().canonical().unwrap(), k);
        assert_eq!(k.to_string(), "tau(0,F) tau(1,pt) tau(2,e1) tau(3,f1)");
    }

    #[test]
    fn negative_indices() {
        let b = Bracket::new(vec![(-2, Pt), (1, F)]);
        let r = b.resolve_negative().unwrap();
        assert_eq!(r, Bracket::new(vec![(1, F)]));
        assert!(Bracket::new(vec![(-1, Pt)]).resolve_negative().is_none());
        assert!(Bracket::new(vec![(-2, F)]).resolve_negative().is_none());
    }

    #[test]
    fn delta_inverse_coefficients() {
        let one = QMod::one();
        assert_eq!(coefficient_at(&one, -1), rat(1));
        assert_eq!(coefficient_at(&one, 0), rat(24));
        assert_eq!(coefficient_at(&one, 1), rat(324));
    }

    #[test]
    fn multilinear_expansion() {
        let mut cls = CohClass::basis(F);
        cls.add_term(E(1), &rat(2));
        let ins = vec![Insertion { k: 1, class: cls.clone() }, Insertion { k: 1, class: cls }];
        let ex = expand_insertions(&ins);
        assert_eq!(ex.len(), 3);
        let mixed = ex.iter().find(|(_, b)| b.count(F) == 1).unwrap();
        assert_eq!(mixed.0, rat(4));
    }
}
