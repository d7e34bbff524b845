//! Truncated Laurent series over an exact coefficient ring, plus the
//! two-variable expansion used by the iterated residue.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::qmod::{eisenstein, QMod};
use crate::rational::{binomial, factorial, rat, Rational};

/// Exact coefficient rings the series are generic over.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

impl Coeff for QMod {
    fn zero() -> Self {
        QMod::zero()
    }
    fn one() -> Self {
        QMod::one()
    }
    fn is_zero(&self) -> bool {
        QMod::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        QMod::scale(self, r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Z,
    Z1,
    Z2,
    P,
    Q,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series in different variables ({0:?} vs {1:?})")]
    VariableMismatch(Var, Var),
    #[error("coefficient of exponent {wanted} requested but the series is only exact below {prec}")]
    TruncationTooShort { wanted: i64, prec: i64 },
    #[error("leading exponent {0} is odd")]
    OddLeadingExponent(i64),
    #[error("leading coefficient is not one")]
    NonUnitLeadingCoefficient,
    #[error("fractional power of an untruncated series needs an explicit precision")]
    UnboundedPrecision,
    #[error("series is zero to its precision")]
    ZeroSeries,
}

/// `sum_{i} coeffs[i] * var^(lo + i)`, exact for exponents below `prec`
/// (`None` means the stored terms are the whole series).
#[derive(Clone, PartialEq)]
pub struct LaurentSeries<C: Coeff> {
    pub var: Var,
    lo: i64,
    coeffs: Vec<C>,
    prec: Option<i64>,
}

impl<C: Coeff> fmt::Debug for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[", self.var)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " ({:?})^{}", c, self.lo + i as i64)?;
            }
        }
        match self.prec {
            Some(p) => write!(f, " + O({p})]"),
            None => write!(f, " ]"),
        }
    }
}

impl<C: Coeff> LaurentSeries<C> {
    pub fn new(var: Var, lo: i64, coeffs: Vec<C>, prec: Option<i64>) -> Self {
        let mut s = LaurentSeries { var, lo, coeffs, prec };
        s.normalize();
        s
    }

    pub fn zero(var: Var, prec: Option<i64>) -> Self {
        LaurentSeries::new(var, 0, Vec::new(), prec)
    }

    pub fn monomial(var: Var, e: i64, c: C) -> Self {
        LaurentSeries::new(var, e, vec![c], None)
    }

    pub fn from_terms(var: Var, terms: &[(i64, C)], prec: Option<i64>) -> Self {
        let mut s = LaurentSeries::zero(var, prec);
        for (e, c) in terms {
            s.add_at(*e, c);
        }
        s.normalize();
        s
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    /// Lowest exponent with a nonzero stored coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.lo + i as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p - self.lo).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(i) => {
                self.coeffs.drain(..i);
                self.lo += i as i64;
            }
            None => {
                self.coeffs.clear();
                self.lo = 0;
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    fn add_at(&mut self, e: i64, c: &C) {
        if c.is_zero() || self.prec.is_some_and(|p| e >= p) {
            return;
        }
        if self.coeffs.is_empty() {
            self.lo = e;
        }
        if e < self.lo {
            let shift = (self.lo - e) as usize;
            let mut v = vec![C::zero(); shift];
            v.append(&mut self.coeffs);
            self.coeffs = v;
            self.lo = e;
        }
        let i = (e - self.lo) as usize;
        if i >= self.coeffs.len() {
            self.coeffs.resize(i + 1, C::zero());
        }
        self.coeffs[i] = self.coeffs[i].add(c);
    }

    /// Coefficient of `var^e`, checked against the precision.
    pub fn coefficient(&self, e: i64) -> Result<C, SeriesError> {
        if let Some(p) = self.prec {
            if e >= p {
                return Err(SeriesError::TruncationTooShort { wanted: e, prec: p });
            }
        }
        Ok(self.coeff_unchecked(e))
    }

    fn coeff_unchecked(&self, e: i64) -> C {
        if e < self.lo {
            return C::zero();
        }
        self.coeffs.get((e - self.lo) as usize).cloned().unwrap_or_else(C::zero)
    }

    pub fn residue(&self) -> Result<C, SeriesError> {
        self.coefficient(-1)
    }

    /// Drops every term at or above `p`.
    pub fn truncate(&self, p: i64) -> Self {
        let prec = Some(self.prec.map_or(p, |q| q.min(p)));
        LaurentSeries::new(self.var, self.lo, self.coeffs.clone(), prec)
    }

    fn check_var(&self, o: &Self) -> Result<(), SeriesError> {
        if self.var != o.var {
            return Err(SeriesError::VariableMismatch(self.var, o.var));
        }
        Ok(())
    }

    fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check_var(o)?;
        let mut out = self.clone();
        out.prec = Self::min_prec(self.prec, o.prec);
        for (i, c) in o.coeffs.iter().enumerate() {
            out.add_at(o.lo + i as i64, c);
        }
        out.normalize();
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, SeriesError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            var: self.var,
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            prec: self.prec,
        }
    }

    pub fn scalar_mul(&self, c: &C) -> Self {
        LaurentSeries::new(
            self.var,
            self.lo,
            self.coeffs.iter().map(|x| x.mul(c)).collect(),
            self.prec,
        )
    }

    pub fn scale(&self, r: &Rational) -> Self {
        LaurentSeries::new(self.var, self.lo, self.coeffs.iter().map(|x| x.scale(r)).collect(), self.prec)
    }

    pub fn mul(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check_var(o)?;
        // a truncated zero still bounds the product's precision by its own precision
        let v1 = self.valuation().or(self.prec);
        let v2 = o.valuation().or(o.prec);
        let prec = match (self.prec, o.prec) {
            (None, None) => None,
            (Some(p1), None) => v2.map(|v| p1 + v),
            (None, Some(p2)) => v1.map(|v| p2 + v),
            (Some(p1), Some(p2)) => Some((p1 + v2.unwrap_or(p2)).min(p2 + v1.unwrap_or(p1))),
        };
        let (Some(_), Some(_)) = (self.valuation(), o.valuation()) else {
            return Ok(LaurentSeries::zero(self.var, prec));
        };
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut coeffs = vec![C::zero(); n];
        let lo = self.lo + o.lo;
        let limit = prec.map(|p| (p - lo).max(0) as usize).unwrap_or(n).min(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= limit {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= limit {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Ok(LaurentSeries::new(self.var, lo, coeffs, prec))
    }

    pub fn pow(&self, e: u32) -> Result<Self, SeriesError> {
        let mut acc = LaurentSeries::monomial(self.var, 0, C::one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `x^alpha` for a series `var^lo (1 + u)` with unit leading coefficient,
    /// normalized to leading term `var^(lo*alpha)`. `lo*alpha` must be an integer.
    pub fn pow_rational(&self, alpha: &Rational) -> Result<Self, SeriesError> {
        let lo = self.valuation().ok_or(SeriesError::ZeroSeries)?;
        let lead = self.coeff_unchecked(lo);
        if lead != C::one() {
            return Err(SeriesError::NonUnitLeadingCoefficient);
        }
        let new_lo = alpha * rat(lo);
        if !new_lo.is_integer() {
            return Err(SeriesError::OddLeadingExponent(lo));
        }
        let new_lo = new_lo.to_integer().try_into().expect("exponent fits in i64");
        let h: Vec<C> = self.coeffs.clone();
        let rel = match self.prec {
            Some(p) => (p - lo) as usize,
            None if h.len() == 1 => {
                return Ok(LaurentSeries::monomial(self.var, new_lo, C::one()));
            }
            None => return Err(SeriesError::UnboundedPrecision),
        };
        let g = power_series_pow(&h, alpha, rel);
        Ok(LaurentSeries::new(self.var, new_lo, g, Some(new_lo + rel as i64)))
    }

    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        if let Some(lo) = self.valuation() {
            if lo % 2 != 0 {
                return Err(SeriesError::OddLeadingExponent(lo));
            }
        }
        self.pow_rational(&Rational::new(1.into(), 2.into()))
    }

    /// Stored `(exponent, coefficient)` pairs with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lo + i as i64, c))
    }
}

/// First `n` coefficients of `h^alpha` for a power series `h` with `h[0] = 1`,
/// via `g_m = (1/m) sum_{j=1}^m ((alpha+1) j - m) h_j g_{m-j}`.
pub fn power_series_pow<C: Coeff>(h: &[C], alpha: &Rational, n: usize) -> Vec<C> {
    let mut g: Vec<C> = Vec::with_capacity(n);
    if n == 0 {
        return g;
    }
    g.push(C::one());
    let a1 = alpha + <Rational as One>::one();
    for m in 1..n {
        let mut acc = C::zero();
        for j in 1..=m.min(h.len().saturating_sub(1)) {
            if h[j].is_zero() {
                continue;
            }
            let f = &a1 * rat(j as i64) - rat(m as i64);
            if Zero::is_zero(&f) {
                continue;
            }
            acc = acc.add(&h[j].mul(&g[m - j]).scale(&f));
        }
        g.push(acc.scale(&Rational::new(1.into(), (m as i64).into())));
    }
    g
}

/// A series in `z2` whose coefficients are series in `z1`; the expansion
/// region is `|z2| < |z1|`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariateLaurent<C: Coeff> {
    terms: BTreeMap<i64, LaurentSeries<C>>,
    prec2: Option<i64>,
}

impl<C: Coeff> BivariateLaurent<C> {
    pub fn new(terms: BTreeMap<i64, LaurentSeries<C>>, prec2: Option<i64>) -> Self {
        BivariateLaurent { terms, prec2 }
    }

    /// Coefficient of `z2^e` as a series in `z1`.
    pub fn inner(&self, e: i64) -> Result<LaurentSeries<C>, SeriesError> {
        if let Some(p) = self.prec2 {
            if e >= p {
                return Err(SeriesError::TruncationTooShort { wanted: e, prec: p });
            }
        }
        Ok(self.terms.get(&e).cloned().unwrap_or_else(|| LaurentSeries::zero(Var::Z1, None)))
    }

    /// Multiplies by a series in `z2`.
    pub fn mul_outer(&self, y: &LaurentSeries<C>) -> Result<Self, SeriesError> {
        if y.var != Var::Z2 {
            return Err(SeriesError::VariableMismatch(y.var, Var::Z2));
        }
        let vk = self.terms.keys().next().copied().or(self.prec2);
        let vy = y.valuation().or(y.prec);
        let prec2 = match (self.prec2, y.prec) {
            (None, None) => None,
            (Some(p), None) => vy.map(|v| p + v),
            (None, Some(p)) => vk.map(|v| p + v),
            (Some(p1), Some(p2)) => Some((p1 + vy.unwrap_or(p2)).min(p2 + vk.unwrap_or(p1))),
        };
        let mut terms: BTreeMap<i64, LaurentSeries<C>> = BTreeMap::new();
        for (ey, cy) in y.terms() {
            for (ek, ck) in &self.terms {
                let e = ey + ek;
                if prec2.is_some_and(|p| e >= p) {
                    continue;
                }
                let piece = ck.scalar_mul(cy);
                let slot = terms.entry(e).or_insert_with(|| LaurentSeries::zero(Var::Z1, None));
                *slot = slot.add(&piece)?;
            }
        }
        Ok(BivariateLaurent { terms, prec2 })
    }

    /// Multiplies every coefficient by a series in `z1`.
    pub fn mul_inner(&self, x: &LaurentSeries<C>) -> Result<Self, SeriesError> {
        let mut terms = BTreeMap::new();
        for (e, s) in &self.terms {
            terms.insert(*e, s.mul(x)?);
        }
        Ok(BivariateLaurent { terms, prec2: self.prec2 })
    }
}

/// `Res_{z1} Res_{z2}`: the `z2^-1` coefficient first, then its `z1^-1` coefficient.
pub fn double_residue<C: Coeff>(x: &BivariateLaurent<C>) -> Result<C, SeriesError> {
    x.inner(-1)?.residue()
}

/// Coefficient `2 G_{2j+2} / (2j)!` of `z^{2j}` in the Weierstrass function.
pub fn wp_coefficient(j: u32) -> QMod {
    eisenstein(2 * j + 2).scale(&(rat(2) / Rational::from_integer(factorial(2 * j as u64))))
}

/// `wp(z1 - z2) + 2 G2` expanded for `|z2| < |z1|`, through `z2^order` and `z1^order`.
pub fn kernel_z1_minus_z2(order: i64) -> BivariateLaurent<QMod> {
    assert!(order >= 1);
    let mut terms = BTreeMap::new();
    for n in 0..=order {
        let mut pieces: Vec<(i64, QMod)> = vec![(-n - 2, QMod::constant(rat(n + 1)))];
        if n == 0 {
            pieces.push((0, QMod::g2().scale(&rat(2))));
        }
        let mut j = ((n + 1) / 2).max(1);
        while 2 * j - n <= order {
            let b = Rational::from_integer(binomial(2 * j as u64, n as u64));
            let sign = if n % 2 == 0 { rat(1) } else { rat(-1) };
            pieces.push((2 * j - n, wp_coefficient(j as u32).scale(&(b * sign))));
            j += 1;
        }
        terms.insert(n, LaurentSeries::from_terms(Var::Z1, &pieces, Some(order + 1)));
    }
    BivariateLaurent::new(terms, Some(order + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn r(terms: &[(i64, i64)], prec: Option<i64>) -> LaurentSeries<Rational> {
        let t: Vec<(i64, Rational)> = terms.iter().map(|(e, c)| (*e, rat(*c))).collect();
        LaurentSeries::from_terms(Var::Z, &t, prec)
    }

    #[test]
    fn arithmetic_and_truncation() {
        let a = r(&[(-2, 1), (0, 1)], None);
        let b = r(&[(2, 1)], None);
        assert_eq!(a.mul(&b).unwrap(), r(&[(0, 1), (2, 1)], None));
        let inv = r(&[(-1, 1)], None);
        assert_eq!(inv.mul(&inv).unwrap(), r(&[(-2, 1)], None));
        let t = r(&[(-2, 1), (0, 3)], Some(4));
        let p = t.mul(&t).unwrap();
        assert_eq!(p.prec(), Some(2));
        let other = LaurentSeries::<Rational>::zero(Var::Z1, None);
        assert!(matches!(a.add(&other), Err(SeriesError::VariableMismatch(..))));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(r(&[(0, 1)], None).sqrt().unwrap(), r(&[(0, 1)], None));
        let x = LaurentSeries::from_terms(Var::Z, &[(-2, rat(1)), (0, rat(-4))], Some(4));
        let s = x.sqrt().unwrap();
        for (e, c) in [(-1, rat(1)), (1, rat(-2)), (3, rat(-2))] {
            assert_eq!(s.coefficient(e).unwrap(), c);
        }
        assert_eq!(s.mul(&s).unwrap().truncate(4), x);
        assert_eq!(r(&[(-1, 1), (1, 1)], Some(5)).sqrt(), Err(SeriesError::OddLeadingExponent(-1)));
        assert_eq!(r(&[(-2, 2)], Some(5)).sqrt(), Err(SeriesError::NonUnitLeadingCoefficient));
    }

    #[test]
    fn residues() {
        assert_eq!(r(&[(-1, 1), (1, 3)], None).residue().unwrap(), rat(1));
        assert!(matches!(
            r(&[(-3, 1)], Some(-1)).residue(),
            Err(SeriesError::TruncationTooShort { .. })
        ));
    }

    #[test]
    fn weierstrass_sqrt_window() {
        let wp = crate::kernels::wp_z(6);
        let f = wp.sub(&LaurentSeries::monomial(Var::Z, 0, QMod::g2().scale(&rat(4)))).unwrap();
        let s = f.sqrt().unwrap();
        assert_eq!(s.coefficient(-1).unwrap(), QMod::one());
        assert_eq!(s.coefficient(1).unwrap(), QMod::g2().scale(&rat(-2)));
        let c3 = &QMod::g2().pow(2).scale(&rat(-2)) + &QMod::g4().scale(&frac(1, 2));
        assert_eq!(s.coefficient(3).unwrap(), c3);
        assert_eq!(s.residue().unwrap(), QMod::one());
        let f32 = f.mul(&s).unwrap();
        assert_eq!(f32.coefficient(-3).unwrap(), QMod::one());
        assert_eq!(f32.residue().unwrap(), QMod::g2().scale(&rat(-6)));
    }

    #[test]
    fn kernel_low_terms() {
        let k = kernel_z1_minus_z2(4);
        let k0 = k.inner(0).unwrap();
        assert_eq!(k0.coefficient(-2).unwrap(), QMod::one());
        assert_eq!(k0.coefficient(0).unwrap(), QMod::g2().scale(&rat(2)));
        assert_eq!(k0.coefficient(2).unwrap(), QMod::g4());
        let k1 = k.inner(1).unwrap();
        assert_eq!(k1.coefficient(-3).unwrap(), QMod::constant(rat(2)));
        let unit = BivariateLaurent::new(
            [(-1, LaurentSeries::monomial(Var::Z1, -1, rat(1)))].into_iter().collect(),
            None,
        );
        assert_eq!(double_residue(&unit).unwrap(), rat(1));
        let none = BivariateLaurent::new(
            [(0, LaurentSeries::monomial(Var::Z1, -1, rat(1)))].into_iter().collect(),
            None,
        );
        assert_eq!(double_residue(&none).unwrap(), rat(0));
    }
}
