//! The ring Q[G2, G4, G6] of quasi-modular forms, its two derivations,
//! q-expansions, Eisenstein reduction and the discriminant.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::linalg::{solve, Solution};
use crate::rational::{bernoulli, big, fmt_rational, parse_rational, rat, sigma, Rational};

/// Exponents `(a, b, c)` of `G2^a G4^b G6^c`.
pub type Mono = (u32, u32, u32);

pub fn mono_weight(m: Mono) -> u32 {
    2 * m.0 + 4 * m.1 + 6 * m.2
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QModError {
    #[error("quasi-modular form is not homogeneous")]
    NonHomogeneousInput,
    #[error("cannot parse quasi-modular form record `{0}`")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QMod {
    terms: BTreeMap<Mono, Rational>,
}

impl QMod {
    pub fn zero() -> Self {
        QMod::default()
    }

    pub fn one() -> Self {
        QMod::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        QMod::monomial((0, 0, 0), c)
    }

    pub fn monomial(m: Mono, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        QMod { terms }
    }

    pub fn g2() -> Self {
        QMod::monomial((1, 0, 0), Rational::one())
    }
    pub fn g4() -> Self {
        QMod::monomial((0, 1, 0), Rational::one())
    }
    pub fn g6() -> Self {
        QMod::monomial((0, 0, 1), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &Rational) -> QMod {
        if c.is_zero() {
            return QMod::zero();
        }
        QMod {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> QMod {
        let mut acc = QMod::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Weight if every monomial has the same weight; `None` for zero or mixed input.
    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| mono_weight(*m));
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    pub fn is_homogeneous(&self, w: u32) -> bool {
        self.terms.keys().all(|m| mono_weight(*m) == w)
    }

    pub fn is_modular(&self) -> bool {
        self.terms.keys().all(|m| m.0 == 0)
    }

    /// Partial derivative in G2.
    pub fn d_dg2(&self) -> QMod {
        let mut out = QMod::zero();
        for (&(a, b, c), x) in &self.terms {
            if a > 0 {
                out.add_term((a - 1, b, c), &(x * rat(a as i64)));
            }
        }
        out
    }

    /// Antiderivative in G2 with zero integration constant.
    pub fn integrate_g2(&self) -> QMod {
        let mut out = QMod::zero();
        for (&(a, b, c), x) in &self.terms {
            out.add_term((a + 1, b, c), &(x / rat(a as i64 + 1)));
        }
        out
    }

    /// `q d/dq`, extended from its values on the generators as a derivation.
    pub fn d_q(&self) -> QMod {
        let [dg2, dg4, dg6] = generator_derivatives();
        let mut out = QMod::zero();
        for (&(a, b, c), x) in &self.terms {
            for (e, gen, unit) in [(a, dg2, (1, 0, 0)), (b, dg4, (0, 1, 0)), (c, dg6, (0, 0, 1))] {
                if e == 0 {
                    continue;
                }
                let rest = (a - unit.0, b - unit.1, c - unit.2);
                let f = x * rat(e as i64);
                for (m, y) in &gen.terms {
                    out.add_term((rest.0 + m.0, rest.1 + m.1, rest.2 + m.2), &(&f * y));
                }
            }
        }
        out
    }

    /// Exact q-expansion through `q^n`.
    pub fn qexpand(&self, n: usize) -> QExpansion {
        let mut powers = PowerTable::new(n);
        let mut out = QExpansion::zero(n);
        for (&m, c) in &self.terms {
            let p = powers.monomial(m);
            out = &out + &p.scale(c);
        }
        out
    }

    /// Records `(a, b, c, "num/den")` in display order.
    pub fn records(&self) -> Vec<(u32, u32, u32, String)> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| (m.0, m.1, m.2, fmt_rational(c)))
            .collect()
    }

    /// Parses a polynomial expression in `G2, G4, G6`, e.g. `2*G2^2 + 1/6*G4`.
    pub fn parse(src: &str) -> Result<QMod, QModError> {
        let p = crate::poly::PolyQ::parse(src, &["G2", "G4", "G6"]).map_err(|e| QModError::Parse(e.to_string()))?;
        let mut out = QMod::zero();
        for (e, c) in p.terms() {
            out.add_term((e[0], e[1], e[2]), c);
        }
        Ok(out)
    }

    /// Compact text form `a,b,c,num/den;...` (`0` for zero), used by the cache file.
    pub fn to_compact(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.records()
            .iter()
            .map(|(a, b, c, r)| format!("{a},{b},{c},{r}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn from_compact(s: &str) -> Result<QMod, QModError> {
        let err = || QModError::Parse(s.to_string());
        let mut out = QMod::zero();
        if s.trim() == "0" {
            return Ok(out);
        }
        for rec in s.split(';') {
            let parts: Vec<&str> = rec.split(',').collect();
            if parts.len() != 4 {
                return Err(err());
            }
            let e = |i: usize| parts[i].trim().parse::<u32>().map_err(|_| err());
            let c = parse_rational(parts[3]).map_err(|_| err())?;
            out.add_term((e(0)?, e(1)?, e(2)?), &c);
        }
        Ok(out)
    }
}

/// `[d/dG2, D_q] x == -2 wt(x) x` for homogeneous `x`.
pub fn commutator_wt_check(x: &QMod) -> Result<bool, QModError> {
    let w = match x.weight() {
        Some(w) => w,
        None if x.is_zero() => 0,
        None => return Err(QModError::NonHomogeneousInput),
    };
    let lhs = &x.d_q().d_dg2() - &x.d_dg2().d_q();
    Ok(lhs == x.scale(&rat(-2 * w as i64)))
}

impl fmt::Display for QMod {
    /// Terms in descending lexicographic order of `(a, b, c)`, e.g. `2*G2^2 + 1/6*G4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b, c), x) in self.terms.iter().rev() {
            let neg = x < &Rational::zero();
            let mag = if neg { -x.clone() } else { x.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mut factors = Vec::new();
            for (e, name) in [(a, "G2"), (b, "G4"), (c, "G6")] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
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

impl fmt::Debug for QMod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMod({self})")
    }
}

impl Serialize for QMod {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let recs = self.records();
        let mut seq = s.serialize_seq(Some(recs.len()))?;
        for r in &recs {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

impl Add<&QMod> for &QMod {
    type Output = QMod;
    fn add(self, rhs: &QMod) -> QMod {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&QMod> for QMod {
    fn add_assign(&mut self, rhs: &QMod) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c);
        }
    }
}

impl SubAssign<&QMod> for QMod {
    fn sub_assign(&mut self, rhs: &QMod) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, &-c);
        }
    }
}

impl Sub<&QMod> for &QMod {
    type Output = QMod;
    fn sub(self, rhs: &QMod) -> QMod {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &QMod {
    type Output = QMod;
    fn neg(self) -> QMod {
        QMod {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul<&QMod> for &QMod {
    type Output = QMod;
    fn mul(self, rhs: &QMod) -> QMod {
        let mut acc: HashMap<Mono, Rational> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let m = (m1.0 + m2.0, m1.1 + m2.1, m1.2 + m2.2);
                let p = c1 * c2;
                match acc.get_mut(&m) {
                    Some(x) => *x += p,
                    None => {
                        acc.insert(m, p);
                    }
                }
            }
        }
        QMod {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<QMod> for QMod {
            type Output = QMod;
            fn $f(self, rhs: QMod) -> QMod {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Truncated power series in q: coefficients of `q^0..=q^n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QExpansion {
    pub coeffs: Vec<Rational>,
}

impl QExpansion {
    pub fn zero(n: usize) -> Self {
        QExpansion { coeffs: vec![Rational::zero(); n + 1] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn truncate(&self, n: usize) -> QExpansion {
        assert!(n <= self.order());
        QExpansion { coeffs: self.coeffs[..=n].to_vec() }
    }

    pub fn scale(&self, c: &Rational) -> QExpansion {
        QExpansion { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// `q d/dq`.
    pub fn q_derivative(&self) -> QExpansion {
        QExpansion {
            coeffs: self.coeffs.iter().enumerate().map(|(i, x)| x * rat(i as i64)).collect(),
        }
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn inverse(&self) -> QExpansion {
        let n = self.order();
        let inv0 = self.coeffs[0].recip();
        let mut out = vec![Rational::zero(); n + 1];
        out[0] = inv0.clone();
        for i in 1..=n {
            let mut s = Rational::zero();
            for j in 1..=i {
                s += &self.coeffs[j] * &out[i - j];
            }
            out[i] = -s * &inv0;
        }
        QExpansion { coeffs: out }
    }
}

impl Add<&QExpansion> for &QExpansion {
    type Output = QExpansion;
    fn add(self, rhs: &QExpansion) -> QExpansion {
        let n = self.order().min(rhs.order());
        QExpansion { coeffs: (0..=n).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect() }
    }
}

impl Sub<&QExpansion> for &QExpansion {
    type Output = QExpansion;
    fn sub(self, rhs: &QExpansion) -> QExpansion {
        let n = self.order().min(rhs.order());
        QExpansion { coeffs: (0..=n).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect() }
    }
}

impl Mul<&QExpansion> for &QExpansion {
    type Output = QExpansion;
    fn mul(self, rhs: &QExpansion) -> QExpansion {
        let n = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        QExpansion { coeffs: out }
    }
}

/// Divisor-sum expansion of `G_k = -B_k/(2k) + sum sigma_{k-1}(n) q^n` through `q^n`.
pub fn eisenstein_qexp(k: usize, n: usize) -> QExpansion {
    assert!(k >= 2 && k % 2 == 0);
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(-bernoulli(k) / rat(2 * k as i64));
    for i in 1..=n {
        coeffs.push(Rational::from_integer(sigma(k as u32 - 1, i as u64)));
    }
    QExpansion { coeffs }
}

struct PowerTable {
    n: usize,
    gens: [QExpansion; 3],
    cache: HashMap<(usize, u32), QExpansion>,
}

impl PowerTable {
    fn new(n: usize) -> Self {
        PowerTable {
            n,
            gens: [eisenstein_qexp(2, n), eisenstein_qexp(4, n), eisenstein_qexp(6, n)],
            cache: HashMap::new(),
        }
    }

    fn power(&mut self, g: usize, e: u32) -> QExpansion {
        if e == 0 {
            let mut one = QExpansion::zero(self.n);
            one.coeffs[0] = Rational::one();
            return one;
        }
        if let Some(p) = self.cache.get(&(g, e)) {
            return p.clone();
        }
        let p = &self.power(g, e - 1) * &self.gens[g];
        self.cache.insert((g, e), p.clone());
        p
    }

    fn monomial(&mut self, m: Mono) -> QExpansion {
        let a = self.power(0, m.0);
        let b = self.power(1, m.1);
        let c = self.power(2, m.2);
        &(&a * &b) * &c
    }
}

/// All monomials of weight `w`, in descending lexicographic order.
pub fn qmod_monomials(w: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    if w % 2 != 0 {
        return out;
    }
    for a in (0..=w / 2).rev() {
        for b in (0..=(w - 2 * a) / 4).rev() {
            let rest = w - 2 * a - 4 * b;
            if rest % 6 == 0 {
                out.push((a, b, rest / 6));
            }
        }
    }
    out
}

/// Modular monomials `G4^a G6^b` of weight `w`, G4-exponent descending.
pub fn modular_basis(w: u32) -> Vec<QMod> {
    qmod_monomials(w)
        .into_iter()
        .filter(|m| m.0 == 0)
        .map(|m| QMod::monomial(m, Rational::one()))
        .collect()
}

/// Finds the combination of `basis` whose q-expansion equals `target`.
/// Panics if it is not unique; callers only use bases where it is.
fn fit_expansion(basis: &[Mono], target: &QExpansion) -> QMod {
    let n = target.order();
    let mut pt = PowerTable::new(n);
    let cols: Vec<QExpansion> = basis.iter().map(|m| pt.monomial(*m)).collect();
    let rows: Vec<Vec<Rational>> = (0..=n)
        .map(|i| cols.iter().map(|c| c.coeffs[i].clone()).collect())
        .collect();
    match solve(&rows, &target.coeffs, basis.len()) {
        Solution::Unique(x) => {
            let mut out = QMod::zero();
            for (m, c) in basis.iter().zip(&x) {
                out.add_term(*m, c);
            }
            out
        }
        other => panic!("q-expansion fit is not unique: {other:?}"),
    }
}

fn generator_derivatives() -> [&'static QMod; 3] {
    static GENS: OnceLock<[QMod; 3]> = OnceLock::new();
    let g = GENS.get_or_init(|| {
        [2usize, 4, 6].map(|k| {
            let basis = qmod_monomials(k as u32 + 2);
            let n = basis.len() + 6;
            fit_expansion(&basis, &eisenstein_qexp(k, n).q_derivative())
        })
    });
    [&g[0], &g[1], &g[2]]
}

/// The modular form of weight `k` (even, `k >= 4`) equal to `G_k`.
pub fn eisenstein_reduce(k: u32) -> QMod {
    assert!(k >= 4 && k % 2 == 0, "eisenstein_reduce needs even k >= 4");
    static CACHE: OnceLock<Mutex<HashMap<u32, QMod>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(x) = cache.lock().expect("eisenstein cache poisoned").get(&k) {
        return x.clone();
    }
    let basis: Vec<Mono> = qmod_monomials(k).into_iter().filter(|m| m.0 == 0).collect();
    let n = basis.len() + 4;
    let x = fit_expansion(&basis, &eisenstein_qexp(k as usize, n));
    cache.lock().expect("eisenstein cache poisoned").insert(k, x.clone());
    x
}

/// `G_k` as an element of the ring for any even `k >= 2`.
pub fn eisenstein(k: u32) -> QMod {
    if k == 2 {
        QMod::g2()
    } else {
        eisenstein_reduce(k)
    }
}

/// `Delta / q = prod (1 - q^n)^24` through `q^n`.
pub fn delta_series(n: usize) -> QExpansion {
    let mut c: Vec<num_bigint::BigInt> = vec![big(0); n + 1];
    c[0] = big(1);
    for m in 1..=n {
        for _ in 0..24 {
            for i in (m..=n).rev() {
                let t = c[i - m].clone();
                c[i] -= t;
            }
        }
    }
    QExpansion { coeffs: c.into_iter().map(Rational::from_integer).collect() }
}

/// `q / Delta` through `q^n`, cached.
pub fn delta_inverse_series(n: usize) -> QExpansion {
    static CACHE: OnceLock<Mutex<Option<QExpansion>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cache.lock().expect("delta cache poisoned");
    if let Some(x) = guard.as_ref() {
        if x.order() >= n {
            return x.truncate(n);
        }
    }
    let m = n.max(16);
    let inv = delta_series(m).inverse();
    *guard = Some(inv.clone());
    inv.truncate(n)
}

/// `D_q Delta / Delta`.
pub fn delta_logderiv() -> QMod {
    QMod::g2().scale(&rat(-24))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn qe(v: &[Rational]) -> QExpansion {
        QExpansion { coeffs: v.to_vec() }
    }

    #[test]
    fn generator_expansions() {
        assert_eq!(QMod::g2().qexpand(3), qe(&[frac(-1, 24), rat(1), rat(3), rat(4)]));
        assert_eq!(QMod::g4().qexpand(2), qe(&[frac(1, 240), rat(1), rat(9)]));
        assert_eq!(QMod::one().qexpand(4), qe(&[rat(1), rat(0), rat(0), rat(0), rat(0)]));
    }

    #[test]
    fn derivation_on_generators() {
        let dg2 = &QMod::g2().pow(2).scale(&rat(-2)) + &QMod::g4().scale(&frac(5, 6));
        assert_eq!(QMod::g2().d_q(), dg2);
        let dg4 = &(&QMod::g2() * &QMod::g4()).scale(&rat(-8)) + &QMod::g6().scale(&frac(7, 10));
        assert_eq!(QMod::g4().d_q(), dg4);
        let dg6 =
            &(&QMod::g2() * &QMod::g6()).scale(&rat(-12)) + &QMod::g4().pow(2).scale(&frac(400, 7));
        assert_eq!(QMod::g6().d_q(), dg6);
        assert!(QMod::one().d_q().is_zero());
    }

    #[test]
    fn derivation_matches_q_derivative() {
        for w in [2u32, 4, 6, 8, 10, 12] {
            for m in qmod_monomials(w) {
                let x = QMod::monomial(m, rat(1));
                let lhs = x.d_q().qexpand(8);
                let rhs = x.qexpand(8).q_derivative();
                assert_eq!(lhs, rhs, "monomial {m:?}");
            }
        }
    }

    #[test]
    fn display_order() {
        let a2 = &QMod::g2().pow(2).scale(&rat(2)) + &QMod::g4().scale(&frac(1, 6));
        assert_eq!(a2.to_string(), "2*G2^2 + 1/6*G4");
        let b1 = &(&QMod::g2().pow(3).scale(&frac(-8, 3))
            + &(&QMod::g2() * &QMod::g4()).scale(&frac(4, 3)))
            + &QMod::g6().scale(&frac(-7, 360));
        assert_eq!(b1.to_string(), "-8/3*G2^3 + 4/3*G2*G4 - 7/360*G6");
        assert_eq!(QMod::zero().to_string(), "0");
        assert_eq!(QMod::g4().scale(&rat(-1)).to_string(), "-G4");
    }

    #[test]
    fn compact_roundtrip() {
        let x = &QMod::g2().pow(3).scale(&frac(-8, 3)) + &QMod::constant(frac(5, 7));
        assert_eq!(QMod::from_compact(&x.to_compact()).unwrap(), x);
        assert_eq!(QMod::from_compact("0").unwrap(), QMod::zero());
        assert!(QMod::from_compact("1,2").is_err());
    }

    #[test]
    fn square_example() {
        let b0 = &QMod::g2().pow(2).scale(&rat(-2)) + &QMod::g4().scale(&frac(5, 6));
        let expect = &(&QMod::g2().pow(4).scale(&rat(4))
            - &(&QMod::g2().pow(2) * &QMod::g4()).scale(&frac(10, 3)))
            + &QMod::g4().pow(2).scale(&frac(25, 36));
        assert_eq!(&b0 * &b0, expect);
        assert_eq!((&b0 * &b0).qexpand(5), &b0.qexpand(5) * &b0.qexpand(5));
    }

    #[test]
    fn eisenstein_reduction() {
        assert_eq!(eisenstein_reduce(4), QMod::g4());
        assert_eq!(eisenstein_reduce(8), QMod::g4().pow(2).scale(&rat(120)));
        assert_eq!(eisenstein_reduce(10), (&QMod::g4() * &QMod::g6()).scale(&frac(5040, 11)));
        for k in (4..=24).step_by(2) {
            assert_eq!(eisenstein_reduce(k).qexpand(20), eisenstein_qexp(k as usize, 20), "k={k}");
        }
    }

    #[test]
    fn delta() {
        let d = delta_series(3);
        assert_eq!(d, qe(&[rat(1), rat(-24), rat(252), rat(-1472)]));
        let inv = delta_inverse_series(2);
        assert_eq!(inv, qe(&[rat(1), rat(24), rat(324)]));
        // D_q(Delta)/Delta == -24 G2, compared on expansions
        let n = 10;
        let full = {
            let mut c = vec![rat(0)];
            c.extend(delta_series(n).coeffs);
            QExpansion { coeffs: c }
        };
        let lhs = full.q_derivative();
        let rhs = &delta_logderiv().qexpand(n + 1) * &full;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn modular_basis_dimensions() {
        assert_eq!(modular_basis(0), vec![QMod::one()]);
        assert!(modular_basis(2).is_empty());
        assert_eq!(modular_basis(12), vec![QMod::g4().pow(3), QMod::g6().pow(2)]);
        for w in (0..=40u32).step_by(2) {
            let dim = if w % 12 == 2 { w / 12 } else { w / 12 + 1 };
            assert_eq!(modular_basis(w).len() as u32, dim, "w={w}");
        }
    }

    #[test]
    fn commutator() {
        assert!(commutator_wt_check(&QMod::g2()).unwrap());
        assert!(commutator_wt_check(&QMod::one()).unwrap());
        assert!(commutator_wt_check(&(&QMod::g4() * &QMod::g6())).unwrap());
        let mixed = &QMod::g2() + &QMod::g4();
        assert_eq!(commutator_wt_check(&mixed), Err(QModError::NonHomogeneousInput));
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let x = &QMod::g2().pow(3) + &(&QMod::g2() * &QMod::g4()).scale(&frac(3, 5));
        assert_eq!(x.integrate_g2().d_dg2(), x);
    }
}
