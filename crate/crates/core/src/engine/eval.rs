//! The memoized evaluator.

use std::collections::HashMap;

use super::bracket::{dq_numerator, expand_insertions, Bracket, Insertion, Key, SeriesValue, Term};
use super::classes::Basis;
use super::rules::{divisor, dilaton, hae_terms, remove_one_explicit, remove_w, string, HaeTag};
use super::EngineError;
use crate::kernels::{a_series, b_series, c_series};
use crate::qmod::QMod;
use crate::rational::{rat, Rational};

/// How `tau_k(1)` insertions are removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemovalRoute {
    /// Closed form when it applies, general recursion otherwise.
    Auto,
    /// Always the general recursion.
    General,
}

/// How the general recursion obtains the `G2`-derivative of the `W` bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerDerivative {
    /// Evaluate the bracket and differentiate the numerator.
    Direct,
    /// Remove `W`, then apply the anomaly equation to each piece and commute
    /// the derivative past `D_q`.
    Hae,
}

pub struct Engine {
    memo: HashMap<Key, QMod>,
    preload: HashMap<String, QMod>,
    route: RemovalRoute,
    inner: InnerDerivative,
    max_label: u8,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine {
            memo: HashMap::new(),
            preload: HashMap::new(),
            route: RemovalRoute::Auto,
            inner: InnerDerivative::Direct,
            max_label: 0,
        }
    }

    pub fn with_route(mut self, route: RemovalRoute) -> Self {
        self.route = route;
        self
    }

    pub fn with_inner(mut self, inner: InnerDerivative) -> Self {
        self.inner = inner;
        self
    }

    /// Largest pair label touched so far.
    pub fn max_label(&self) -> u8 {
        self.max_label
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Memoized values as `(canonical bracket text, weight, numerator)`.
    pub fn memo_entries(&self) -> Vec<(String, i64, QMod)> {
        let mut v: Vec<_> =
            self.memo.iter().map(|(k, n)| (k.to_string(), k.bracket().weight(), n.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Seeds values keyed by canonical bracket text.
    pub fn preload(&mut self, entries: impl IntoIterator<Item = (String, QMod)>) {
        self.preload.extend(entries);
    }

    pub fn evaluate(&mut self, b: &Bracket) -> Result<SeriesValue, EngineError> {
        Ok(SeriesValue::new(self.numerator(b)?))
    }

    pub fn evaluate_insertions(&mut self, ins: &[Insertion]) -> Result<SeriesValue, EngineError> {
        let mut acc = QMod::zero();
        for (c, b) in expand_insertions(ins) {
            acc += &self.numerator(&b)?.scale(&c);
        }
        Ok(SeriesValue::new(acc))
    }

    pub fn evaluate_terms(&mut self, terms: &[Term]) -> Result<SeriesValue, EngineError> {
        Ok(SeriesValue::new(self.terms_numerator(terms)?))
    }

    fn terms_numerator(&mut self, terms: &[Term]) -> Result<QMod, EngineError> {
        let mut acc = QMod::zero();
        for t in terms {
            let mut v = self.numerator(&t.bracket)?;
            for _ in 0..t.dq {
                v = dq_numerator(&v);
            }
            acc += &v.scale(&t.coef);
        }
        Ok(acc)
    }

    /// Numerator of `<b>` over `Delta`.
    pub fn numerator(&mut self, b: &Bracket) -> Result<QMod, EngineError> {
        let Some(b) = b.resolve_negative() else {
            return Ok(QMod::zero());
        };
        // Negative genus forces a tau_0(1), which the string rule removes; the contracted
        // components it accounts for can make such brackets nonzero.
        let Some(key) = b.canonical() else {
            return Ok(QMod::zero());
        };
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let v = match self.preload.get(&key.to_string()) {
            Some(v) => v.clone(),
            None => self.compute(&key)?,
        };
        let w = key.bracket().weight();
        if !v.is_zero() && (w < 0 || !v.is_homogeneous(w as u32)) {
            return Err(EngineError::WeightLaw { bracket: key.to_string(), expected: w });
        }
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn compute(&mut self, key: &Key) -> Result<QMod, EngineError> {
        let b = key.bracket();
        if b.is_empty() {
            return Ok(QMod::one());
        }
        if let Some(i) = b.ins.iter().position(|x| *x == (0, Basis::One)) {
            return self.terms_numerator(&string(&b, i));
        }
        if let Some(i) = b.ins.iter().position(|x| *x == (1, Basis::One)) {
            return self.terms_numerator(&dilaton(&b, i));
        }
        let has_w = b.count(Basis::W) > 0;
        let has_one = b.count(Basis::One) > 0;
        if has_w || has_one {
            if let Some(i) = b.ins.iter().position(|(k, g)| *k == 0 && g.deg() == 1) {
                return self.terms_numerator(&divisor(&b, i));
            }
        }
        if has_w {
            let terms = remove_w(&b)?;
            self.note_label(b.fresh_label());
            return self.terms_numerator(&terms);
        }
        if has_one {
            let idx = chosen_one(&b);
            if self.route == RemovalRoute::Auto && b.count(Basis::One) == 1 {
                let terms = remove_one_explicit(&b, idx)?;
                self.note_label(b.fresh_label());
                return self.terms_numerator(&terms);
            }
            return self.remove_one_general(&b, idx);
        }
        stationary(&b)
    }

    fn note_label(&mut self, p: u8) {
        self.max_label = self.max_label.max(p);
    }

    /// Solves `-2 I = d/dG2 <I_W> - (anomaly terms of I_W other than the one giving I)`.
    fn remove_one_general(&mut self, b: &Bracket, idx: usize) -> Result<QMod, EngineError> {
        let (k, _) = b.ins[idx];
        let iw = b.replace(idx, (k - 1, Basis::W));
        let widx = iw.ins.iter().position(|x| *x == (k - 1, Basis::W)).expect("W inserted");
        let rest: Vec<Term> = hae_terms(&iw)
            .into_iter()
            .filter(|(tag, _)| *tag != HaeTag::Pushforward(widx))
            .map(|(_, t)| t)
            .collect();
        let rest = self.terms_numerator(&rest)?;
        let path = match self.inner {
            InnerDerivative::Direct => self.numerator(&iw)?.d_dg2(),
            InnerDerivative::Hae => {
                let pieces = remove_w(&iw)?;
                self.note_label(iw.fresh_label());
                let mut acc = QMod::zero();
                for t in &pieces {
                    acc += &self.derivative_of_dq_power(&t.bracket, t.dq)?.scale(&t.coef);
                }
                acc
            }
        };
        Ok((&rest - &path).scale(&Rational::new(1.into(), 2.into())))
    }

    /// `d/dG2 (D_q^j <b>)` using the anomaly equation for `d/dG2 <b>` and
    /// `d/dG2 D_q = D_q d/dG2 - 2 (w - 12)` on a weight-`w` numerator.
    fn derivative_of_dq_power(&mut self, b: &Bracket, j: u32) -> Result<QMod, EngineError> {
        let hae: Vec<Term> = hae_terms(b).into_iter().map(|(_, t)| t).collect();
        let mut d = self.terms_numerator(&hae)?;
        let mut v = self.numerator(b)?;
        let w = b.weight();
        for i in 0..j as i64 {
            d = &dq_numerator(&d) - &v.scale(&rat(2 * (w + 2 * i - 12)));
            v = dq_numerator(&v);
        }
        Ok(d)
    }
}

/// The `tau_k(1)` to remove: largest `k`, first in canonical order on ties.
fn chosen_one(b: &Bracket) -> usize {
    let mut best: Option<usize> = None;
    for (i, (k, g)) in b.ins.iter().enumerate() {
        if *g == Basis::One && best.is_none_or(|j| *k > b.ins[j].0) {
            best = Some(i);
        }
    }
    best.expect("bracket has a ONE insertion")
}

/// Stationary evaluation: `prod A_k` over `F`, `prod B_k` over `pt`, and for
/// each pair label the permanent of `C` between its `e` and `f` sides.
pub fn stationary(b: &Bracket) -> Result<QMod, EngineError> {
    let mut acc = QMod::one();
    let key = b.canonical();
    let Some(key) = key else {
        return Ok(QMod::zero());
    };
    for (k, g) in &key.plain {
        let f = match g {
            Basis::F => a_series(*k as u32),
            Basis::Pt => b_series(*k as u32),
            other => {
                return Err(EngineError::PreconditionViolated(format!(
                    "stationary evaluation cannot take {other}"
                )))
            }
        };
        acc = &acc * &f;
    }
    for (e, f) in &key.comps {
        acc = &acc * &permanent(e, f);
    }
    Ok(acc)
}

/// Permanent of `C_{e_a, f_b}` by dynamic programming over column subsets.
fn permanent(e: &[i64], f: &[i64]) -> QMod {
    let n = e.len();
    let mut dp: HashMap<u32, QMod> = HashMap::new();
    dp.insert(0, QMod::one());
    for (row, ke) in e.iter().enumerate() {
        let mut next: HashMap<u32, QMod> = HashMap::new();
        for (mask, v) in &dp {
            if mask.count_ones() as usize != row {
                continue;
            }
            for (col, kf) in f.iter().enumerate() {
                if mask >> col & 1 == 1 {
                    continue;
                }
                let c = c_series(*ke as u32, *kf as u32);
                if c.is_zero() {
                    continue;
                }
                let slot = next.entry(mask | 1 << col).or_insert_with(QMod::zero);
                *slot += &(v * &c);
            }
        }
        dp = next;
    }
    dp.remove(&((1u32 << n) - 1)).unwrap_or_else(QMod::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::coefficient_at;
    use Basis::*;

    fn br(v: &[(i64, Basis)]) -> Bracket {
        Bracket::new(v.to_vec())
    }

    #[test]
    fn empty_and_points() {
        let mut e = Engine::new();
        assert_eq!(e.numerator(&Bracket::empty()).unwrap(), QMod::one());
        let v = e.numerator(&br(&[(0, Pt)])).unwrap();
        assert_eq!(v, QMod::g2().d_q());
        assert_eq!(coefficient_at(&v, -1), rat(0));
        assert_eq!(coefficient_at(&v, 0), rat(1));
    }

    #[test]
    fn contracted_component_below_genus_zero() {
        let mut e = Engine::new();
        let b = br(&[(0, W), (0, One), (0, F)]);
        assert_eq!(b.genus(), -1);
        assert_eq!(e.numerator(&b).unwrap(), QMod::one());
        assert_eq!(e.numerator(&br(&[(0, One), (0, One), (0, Pt)])).unwrap(), QMod::one());
        // anomaly equation on <tau_0(W)>: 2 + 2 + 20 = 24
        let terms: Vec<Term> = hae_terms(&br(&[(0, W)])).into_iter().map(|(_, t)| t).collect();
        assert_eq!(e.terms_numerator(&terms).unwrap(), QMod::constant(rat(24)));
        assert_eq!(e.numerator(&br(&[(0, W)])).unwrap().d_dg2(), QMod::constant(rat(24)));
    }

    #[test]
    fn one_insertion_closed_forms() {
        for route in [RemovalRoute::Auto, RemovalRoute::General] {
            let mut e = Engine::new().with_route(route);
            for k in 0..=8 {
                let lhs = e.numerator(&br(&[(k, One)])).unwrap();
                let mut rhs = e.numerator(&br(&[(k - 3, Pt)])).unwrap();
                rhs += &e.numerator(&br(&[(k - 1, F)])).unwrap().scale(&rat(2 * (k - 2)));
                assert_eq!(lhs, rhs, "k={k} {route:?}");
            }
        }
    }

    #[test]
    fn general_inner_modes_agree() {
        let mut d = Engine::new().with_route(RemovalRoute::General);
        let mut h = Engine::new().with_route(RemovalRoute::General).with_inner(InnerDerivative::Hae);
        for b in [br(&[(3, One)]), br(&[(4, One), (1, Pt)]), br(&[(3, One), (2, E(1)), (2, Fd(1))])] {
            assert_eq!(d.numerator(&b).unwrap(), h.numerator(&b).unwrap(), "{b}");
        }
    }

    #[test]
    fn genus_29() {
        let mut e = Engine::new();
        let b = br(&[(8, One), (5, One), (10, One), (4, Pt), (3, Pt)]);
        let t = std::time::Instant::now();
        let v = e.numerator(&b).unwrap();
        let c = coefficient_at(&v, 3);
        eprintln!("{} in {:?}, memo {}, labels {}", c, t.elapsed(), e.memo_len(), e.max_label());
        assert_eq!(crate::rational::fmt_rational(&c), "-13094491/333598540006510406597452234752000000");
    }

    #[test]
    fn one_and_point_closed_form() {
        for route in [RemovalRoute::Auto, RemovalRoute::General] {
            let mut e = Engine::new().with_route(route);
            for k in 0..=6 {
                for l in 0..=4 {
                    let lhs = e.numerator(&br(&[(k, One), (l, Pt)])).unwrap();
                    let mut rhs = e.numerator(&br(&[(k - 3, Pt), (l, Pt)])).unwrap();
                    rhs += &e.numerator(&br(&[(k - 2, Pt), (l - 1, Pt)])).unwrap();
                    rhs += &e.numerator(&br(&[(k - 1, F), (l, Pt)])).unwrap().scale(&rat(2 * k + 2 * l));
                    rhs -= &e.numerator(&br(&[(k - 1, E(1)), (l + 1, Fd(1))])).unwrap();
                    assert_eq!(lhs, rhs, "k={k} l={l} {route:?}");
                }
            }
        }
    }

    #[test]
    fn anomaly_consistency_on_stationary() {
        let mut e = Engine::new();
        let cases = [
            br(&[(2, Pt), (3, F)]),
            br(&[(1, Pt), (2, E(1)), (3, Fd(1))]),
            br(&[(2, E(1)), (1, Fd(1)), (0, E(2)), (3, Fd(2))]),
            br(&[(2, E(1)), (1, E(1)), (0, Fd(1)), (3, Fd(1)), (1, Pt)]),
        ];
        for b in cases {
            let lhs = e.numerator(&b).unwrap().d_dg2();
            let hae: Vec<Term> = hae_terms(&b).into_iter().map(|(_, t)| t).collect();
            assert_eq!(lhs, e.evaluate_terms(&hae).unwrap().numerator, "{b}");
        }
    }
}
