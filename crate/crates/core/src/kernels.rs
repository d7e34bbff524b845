//! Stationary kernels `A_k`, `B_k`, `C_{k,l}` as quasimodular forms, their
//! Fourier-side cross-checks, and reconstruction from the holomorphic anomaly.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::linalg::{solve, Solution};
use crate::poly::{interpolate, interpolate_univariate, simplex_points, PolyError};
use crate::qmod::{modular_basis, QExpansion, QMod};
use crate::rational::{binomial, double_factorial_odd, factorial, frac, neg4_pow, rat, sigma, Rational};
use crate::series::{
    double_residue, kernel_z1_minus_z2, wp_coefficient, BivariateLaurent, LaurentSeries, SeriesError, Var,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("not enough interpolation data for the q^{n} coefficient at index {k}")]
    InsufficientInterpolationData { k: u32, n: u32 },
    #[error("interpolation failed: {0}")]
    Interpolation(#[from] PolyError),
    #[error("reconstruction constraints are inconsistent at index {0}")]
    Inconsistent(String),
    #[error("reconstruction leaves {0} free parameters")]
    Underdetermined(usize),
}

/// `wp(z) = z^-2 + sum_{j>=1} 2 G_{2j+2}/(2j)! z^{2j}`, exact below `z^(order+1)`.
pub fn wp_z(order: i64) -> LaurentSeries<QMod> {
    let mut terms = vec![(-2, QMod::one())];
    let mut j = 1;
    while 2 * j <= order {
        terms.push((2 * j, wp_coefficient(j as u32)));
        j += 1;
    }
    LaurentSeries::from_terms(Var::Z, &terms, Some(order + 1))
}

#[derive(Default)]
struct Tables {
    /// `h_j`: coefficients of `z^2 (wp - 4 G2)` in `w = z^2`.
    h: Vec<QMod>,
    /// Coefficients of `(1 + u)^(k + 1/2)` in `w`, extended on demand.
    t: HashMap<u32, Vec<QMod>>,
    a: HashMap<u32, QMod>,
    b: HashMap<u32, QMod>,
    c: HashMap<(u32, u32), QMod>,
}

impl Tables {
    fn h(&mut self, j: usize) -> &QMod {
        while self.h.len() <= j {
            let i = self.h.len();
            let v = match i {
                0 => QMod::one(),
                1 => QMod::g2().scale(&rat(-4)),
                _ => wp_coefficient(i as u32 - 1),
            };
            self.h.push(v);
        }
        &self.h[j]
    }

    /// `[T_k]_{w^m}`.
    fn t(&mut self, k: u32, m: usize) -> QMod {
        let have = self.t.get(&k).map_or(0, |v| v.len());
        if have <= m {
            for j in 0..=m {
                self.h(j);
            }
            let alpha1 = rat(k as i64) + frac(3, 2);
            let g = self.t.entry(k).or_insert_with(|| vec![QMod::one()]);
            for n in g.len()..=m {
                let mut acc = QMod::zero();
                for j in 1..=n {
                    let f = &alpha1 * rat(j as i64) - rat(n as i64);
                    if f.is_zero() {
                        continue;
                    }
                    acc += &(&self.h[j] * &g[n - j]).scale(&f);
                }
                g.push(acc.scale(&frac(1, n as i64)));
            }
        }
        self.t[&k][m].clone()
    }
}

fn tables() -> &'static Mutex<Tables> {
    static T: OnceLock<Mutex<Tables>> = OnceLock::new();
    T.get_or_init(|| Mutex::new(Tables::default()))
}

fn dfo(k: i64) -> Rational {
    Rational::from_integer(double_factorial_odd(k))
}

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

/// `A_k = (-1)^k/(2k+1)!! [T_k]_{w^k}`.
pub fn a_series(k: u32) -> QMod {
    let mut tb = tables().lock().expect("kernel table poisoned");
    if let Some(v) = tb.a.get(&k) {
        return v.clone();
    }
    let v = tb.t(k, k as usize).scale(&(sign(k as i64) / dfo(k as i64)));
    tb.a.insert(k, v.clone());
    v
}

/// `B_k = (-1)^k/(2k+3)!! Res X_{k+1} (wp + 2 G2)`.
pub fn b_series(k: u32) -> QMod {
    let mut tb = tables().lock().expect("kernel table poisoned");
    if let Some(v) = tb.b.get(&k) {
        return v.clone();
    }
    let kk = (k + 1) as usize;
    let mut acc = tb.t(k + 1, kk + 1);
    acc += &(&QMod::g2().scale(&rat(2)) * &tb.t(k + 1, kk));
    for j in 1..=kk {
        acc += &(&wp_coefficient(j as u32) * &tb.t(k + 1, kk - j));
    }
    let v = acc.scale(&(sign(k as i64) / dfo(k as i64 + 1)));
    tb.b.insert(k, v.clone());
    v
}

/// `C_{k,l}` by the closed double-sum form of the iterated residue.
pub fn c_series(k: u32, l: u32) -> QMod {
    let mut tb = tables().lock().expect("kernel table poisoned");
    if let Some(v) = tb.c.get(&(k, l)) {
        return v.clone();
    }
    let (ku, lu) = (k as usize, l as usize);
    let two_g2 = QMod::g2().scale(&rat(2));
    let mut acc = QMod::zero();
    for i in 0..=lu {
        let y = tb.t(l, lu - i);
        if y.is_zero() {
            continue;
        }
        let mut inner = tb.t(k, ku + i + 1).scale(&rat(2 * i as i64 + 1));
        if i == 0 {
            inner += &(&two_g2 * &tb.t(k, ku));
        }
        for j in i.max(1)..=ku + i {
            let b = Rational::from_integer(binomial(2 * j as u64, 2 * i as u64));
            inner += &(&wp_coefficient(j as u32) * &tb.t(k, ku + i - j)).scale(&b);
        }
        acc += &(&y * &inner);
    }
    let pre = sign(k as i64 + l as i64 - 1) / (dfo(k as i64) * dfo(l as i64));
    let v = acc.scale(&pre);
    tb.c.insert((k, l), v.clone());
    v
}

/// `X_k = (wp - 4 G2)^(k + 1/2)` as a plain Laurent series, through `z^order`.
pub fn x_series(k: u32, order: i64) -> Result<LaurentSeries<QMod>, SeriesError> {
    let shift = LaurentSeries::monomial(Var::Z, 0, QMod::g2().scale(&rat(-4)));
    let f = wp_z(order + 2 * k as i64 + 2).add(&shift)?;
    let x = f.pow_rational(&(rat(k as i64) + frac(1, 2)))?;
    Ok(x.truncate(order + 1))
}

/// `A_k` through the generic series route.
pub fn a_series_generic(k: u32) -> Result<QMod, SeriesError> {
    let x = x_series(k, 1)?;
    let shift = LaurentSeries::monomial(Var::Z, 0, QMod::g2().scale(&rat(-4)));
    let f = wp_z(2 * k as i64 + 4).add(&shift)?;
    let r = f.pow_rational(&(rat(k as i64) + frac(1, 2)))?;
    drop(x);
    Ok(r.residue()?.scale(&(sign(k as i64) / dfo(k as i64))))
}

/// `B_k` through the generic series route.
pub fn b_series_generic(k: u32) -> Result<QMod, SeriesError> {
    let x = x_series(k + 1, 2)?;
    let w = wp_z(2 * k as i64 + 4).add(&LaurentSeries::monomial(Var::Z, 0, QMod::g2().scale(&rat(2))))?;
    Ok(x.mul(&w)?.residue()?.scale(&(sign(k as i64) / dfo(k as i64 + 1))))
}

/// `C_{k,l}` through the bivariate route.
pub fn c_series_generic(k: u32, l: u32) -> Result<QMod, SeriesError> {
    let order = 2 * (k + l) as i64 + 4;
    let rename = |s: LaurentSeries<QMod>, v: Var| {
        let t: Vec<(i64, QMod)> = s.terms().map(|(e, c)| (e, c.clone())).collect();
        LaurentSeries::from_terms(v, &t, s.prec())
    };
    let x1 = rename(x_series(k, order)?, Var::Z1);
    let x2 = rename(x_series(l, order)?, Var::Z2);
    let kern: BivariateLaurent<QMod> = kernel_z1_minus_z2(order);
    let prod = kern.mul_outer(&x2)?.mul_inner(&x1)?;
    let r = double_residue(&prod)?;
    Ok(r.scale(&(sign(k as i64 + l as i64 - 1) / (dfo(k as i64) * dfo(l as i64)))))
}

/// `F_n(p)` for `n < nq`, as Laurent series in `u = 1/p` exact below `u^(np+1)`.
pub fn wp_fourier(nq: usize, np: i64) -> Vec<LaurentSeries<Rational>> {
    let mut out = Vec::with_capacity(nq);
    for d in 0..nq {
        if d == 0 {
            let mut t = vec![(0, frac(1, 4))];
            t.extend((1..=np).map(|n| (n, rat(n))));
            out.push(LaurentSeries::from_terms(Var::P, &t, Some(np + 1)));
            continue;
        }
        let d64 = d as i64;
        let mut t: Vec<(i64, Rational)> = Vec::new();
        for k in 1..=d64 {
            if d64 % k == 0 {
                t.push((-k, rat(k)));
                t.push((k, rat(k)));
            }
        }
        t.push((0, -Rational::from_integer(sigma(1, d as u64)) * rat(6)));
        let s = LaurentSeries::from_terms(Var::P, &t, None);
        out.push(s.truncate(np + 1));
    }
    out
}

/// `q^n` coefficients, `n < nq`, of the square root of the Fourier expansion.
fn fourier_sqrt(nq: usize, np: i64) -> Result<Vec<LaurentSeries<Rational>>, SeriesError> {
    let f = wp_fourier(nq, np);
    let s0 = f[0].scale(&rat(4)).sqrt()?.scale(&frac(1, 2));
    let inv = s0.scale(&rat(2)).pow_rational(&rat(-1))?;
    let mut s = vec![s0];
    for n in 1..nq {
        let mut rhs = f[n].clone();
        for i in 1..n {
            rhs = rhs.sub(&s[i].mul(&s[n - i])?)?;
        }
        s.push(rhs.mul(&inv)?);
    }
    Ok(s)
}

fn qseries_mul(
    a: &[LaurentSeries<Rational>],
    b: &[LaurentSeries<Rational>],
) -> Result<Vec<LaurentSeries<Rational>>, SeriesError> {
    let n = a.len().min(b.len());
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        let mut acc = a[0].mul(&b[m])?;
        for i in 1..=m {
            acc = acc.add(&a[i].mul(&b[m - i])?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `2^(2k+1) [s^(2k+1)]_{p^0}` through `q^nq`.
pub fn p0_coefficient(k: u32, nq: usize) -> Result<QExpansion, SeriesError> {
    let len = nq + 1;
    let np = 2 * len as i64 + 4;
    let s = fourier_sqrt(len, np)?;
    let mut acc = s.clone();
    for _ in 0..2 * k {
        acc = qseries_mul(&acc, &s)?;
    }
    let scale = num_traits::pow(rat(2), 2 * k as usize + 1);
    let coeffs = acc.iter().map(|c| c.coefficient(0).map(|x| x * &scale)).collect::<Result<Vec<_>, _>>()?;
    Ok(QExpansion { coeffs })
}

/// Residue of `f^(k+1/2)` agrees with twice the constant Fourier term of
/// `s^(2k+1)` through `q^k`, compared after scaling both sides by `4^k`.
pub fn residue_vs_p0_check(k: u32) -> Result<bool, SeriesError> {
    let res = a_series(k).scale(&(neg4_pow(k as i64) * dfo(k as i64)));
    let lhs = res.qexpand(k as usize);
    let rhs = p0_coefficient(k, k as usize)?;
    Ok(lhs == rhs)
}

/// `(-4)^k (2k+1)!! [A_k]_{q^n}`, a polynomial of degree `2n` in `k` for `k >= n`.
pub fn a_normalized_coeff(k: u32, n: usize) -> Rational {
    let a = a_series(k).qexpand(n + 1);
    a.coeff(n) * neg4_pow(k as i64) * dfo(k as i64)
}

/// `(-4)^(k-1)(2k-1)!! (-4)^(l-1)(2l-1)!! [C_{k,l}]_{q^n}`.
pub fn c_normalized_coeff(k: u32, l: u32, n: usize) -> Rational {
    let c = c_series(k, l).qexpand(n + 1);
    c.coeff(n) * neg4_pow(k as i64 - 1) * dfo(k as i64 - 1) * neg4_pow(l as i64 - 1) * dfo(l as i64 - 1)
}

fn b_norm(k: u32) -> Rational {
    Rational::new(
        factorial(k as u64),
        factorial(2 * k as u64 + 1) * num_bigint::BigInt::from(-2).pow(k),
    )
}

/// Interpolates the `q^n` coefficient pattern of `A` in `k` from the samples
/// `k = n, ..., 3n` and predicts `k = 3n+1`.
pub fn a_polynomiality_check(n: usize) -> Result<bool, KernelError> {
    let samples: Vec<(i64, Rational)> =
        (n..=3 * n).map(|k| (k as i64, a_normalized_coeff(k as u32, n))).collect();
    let p = interpolate_univariate("k", &samples, 2 * n as u32)?;
    let next = 3 * n as i64 + 1;
    Ok(p.eval_i64(&[next]) == a_normalized_coeff(next as u32, n))
}

fn fit_modular_part(
    base: &QMod,
    weight: u32,
    targets: &[(usize, Rational)],
    label: &str,
) -> Result<QMod, KernelError> {
    let basis = modular_basis(weight);
    let nmax = targets.iter().map(|(n, _)| *n).max().unwrap_or(0);
    let be = base.qexpand(nmax + 1);
    let bexp: Vec<QExpansion> = basis.iter().map(|b| b.qexpand(nmax + 1)).collect();
    let rows: Vec<Vec<Rational>> =
        targets.iter().map(|(n, _)| bexp.iter().map(|e| e.coeff(*n).clone()).collect()).collect();
    let rhs: Vec<Rational> = targets.iter().map(|(n, t)| t - be.coeff(*n)).collect();
    let coeffs = if basis.is_empty() {
        if rhs.iter().any(|r| !r.is_zero()) {
            return Err(KernelError::Inconsistent(label.to_string()));
        }
        Vec::new()
    } else {
        match solve(&rows, &rhs, basis.len()) {
            Solution::Unique(c) => c,
            Solution::Underdetermined { rank, .. } => {
                return Err(KernelError::Underdetermined(basis.len() - rank))
            }
            Solution::Inconsistent { .. } => return Err(KernelError::Inconsistent(label.to_string())),
        }
    };
    let mut out = base.clone();
    for (b, c) in basis.iter().zip(&coeffs) {
        out += &b.scale(c);
    }
    Ok(out)
}

/// Univariate target from earlier samples: fit on the first `deg+1` points and
/// check any remaining ones.
fn predict(samples: &[(i64, Rational)], deg: u32, at: i64, k: u32, n: u32) -> Result<Rational, KernelError> {
    let need = deg as usize + 1;
    if samples.len() < need {
        return Err(KernelError::InsufficientInterpolationData { k, n });
    }
    let p = interpolate_univariate("k", &samples[..need], deg)?;
    for (x, y) in &samples[need..] {
        if &p.eval_i64(&[*x]) != y {
            return Err(KernelError::Inconsistent(format!("k={k}, q^{n}")));
        }
    }
    Ok(p.eval_i64(&[at]))
}

/// `A_0..=A_kmax` from the anomaly recursion and low Fourier coefficients.
pub fn reconstruct_a(kmax: u32) -> Result<Vec<QMod>, KernelError> {
    let mut a = vec![QMod::one()];
    for k in 1..=kmax {
        let base = a[k as usize - 1].integrate_g2().scale(&rat(2));
        let nmax = (2 * k / 12) as usize;
        let mut targets = Vec::new();
        for n in 0..=nmax {
            let samples: Vec<(i64, Rational)> = (n as u32..k)
                .map(|kp| {
                    let c = a[kp as usize].qexpand(n + 1).coeff(n).clone();
                    (kp as i64, c * neg4_pow(kp as i64) * dfo(kp as i64))
                })
                .take(2 * n + 2)
                .collect();
            let pn = predict(&samples, 2 * n as u32, k as i64, k, n as u32)?;
            targets.push((n, pn / (neg4_pow(k as i64) * dfo(k as i64))));
        }
        a.push(fit_modular_part(&base, 2 * k, &targets, &format!("A_{k}"))?);
    }
    Ok(a)
}

/// `B_0..=B_kmax`, given reconstructed `A` through `kmax+1`.
pub fn reconstruct_b(kmax: u32) -> Result<Vec<QMod>, KernelError> {
    let a = reconstruct_a(kmax + 1)?;
    let mut b: Vec<QMod> = Vec::new();
    for k in 0..=kmax {
        let mut rhs = a[k as usize + 1].scale(&rat(-2));
        if k > 0 {
            rhs += &b[k as usize - 1].scale(&rat(2));
        }
        let base = rhs.integrate_g2();
        let weight = 2 * k + 4;
        let nmax = (weight / 12) as usize;
        let mut targets = vec![(0, Rational::zero())];
        if k == 0 {
            targets.push((1, Rational::one()));
        }
        for n in 1..=nmax {
            let lo = (n as u32).saturating_sub(1);
            let samples: Vec<(i64, Rational)> = (lo..k)
                .map(|kp| {
                    let c = b[kp as usize].qexpand(n + 1).coeff(n).clone();
                    (kp as i64, c / b_norm(kp))
                })
                .take(2 * n)
                .collect();
            let qn = predict(&samples, 2 * n as u32 - 2, k as i64, k, n as u32)?;
            targets.push((n, qn * b_norm(k)));
        }
        b.push(fit_modular_part(&base, weight, &targets, &format!("B_{k}"))?);
    }
    Ok(b)
}

/// `C_{k,l}` for all `k + l <= total`, keyed by `(k, l)`.
pub fn reconstruct_c(total: u32) -> Result<HashMap<(u32, u32), QMod>, KernelError> {
    let a = reconstruct_a(total)?;
    let b = reconstruct_b(total.saturating_sub(1))?;
    let mut c: HashMap<(u32, u32), QMod> = HashMap::new();
    let norm = |k: u32, l: u32| {
        neg4_pow(k as i64 - 1) * dfo(k as i64 - 1) * neg4_pow(l as i64 - 1) * dfo(l as i64 - 1)
    };
    for s in 0..=total {
        for k in 0..=s {
            let l = s - k;
            if k == 0 || l == 0 {
                let v = if s == 0 { QMod::zero() } else { b[s as usize - 1].clone() };
                c.insert((k, l), v);
                continue;
            }
            let mut rhs = (&a[k as usize] * &a[l as usize]).scale(&rat(-2));
            rhs += &c[&(k - 1, l)].scale(&rat(2));
            rhs += &c[&(k, l - 1)].scale(&rat(2));
            let base = rhs.integrate_g2();
            let weight = 2 * (k + l) + 2;
            let nmax = (weight / 12) as usize;
            let mut targets = vec![(0, Rational::zero())];
            for n in 1..=nmax {
                let lower = (n as i64 - 1).max(1);
                let deg = 2 * n as u32 - 2;
                let pts = simplex_points(&[lower, lower], deg);
                let mut ptsr = Vec::new();
                let mut vals = Vec::new();
                for p in &pts {
                    let key = (p[0] as u32, p[1] as u32);
                    let v = c.get(&key).ok_or(KernelError::InsufficientInterpolationData { k, n: n as u32 })?;
                    ptsr.push(vec![rat(p[0]), rat(p[1])]);
                    vals.push(v.qexpand(n + 1).coeff(n) * norm(key.0, key.1));
                }
                // one extra point just past the sampled simplex, when already known
                let extra = (lower as u32 + deg + 1, lower as u32);
                if let Some(v) = c.get(&extra) {
                    ptsr.push(vec![rat(extra.0 as i64), rat(extra.1 as i64)]);
                    vals.push(v.qexpand(n + 1).coeff(n) * norm(extra.0, extra.1));
                }
                let p = interpolate(&["k", "l"], &ptsr, &vals, deg).map_err(|e| match e {
                    PolyError::Inconsistent { .. } => KernelError::Inconsistent(format!("C_{k},{l}")),
                    other => other.into(),
                })?;
                targets.push((n, p.eval_i64(&[k as i64, l as i64]) / norm(k, l)));
            }
            c.insert((k, l), fit_modular_part(&base, weight, &targets, &format!("C_{k},{l}"))?);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QMod {
        let mut out = QMod::zero();
        // terms "c*G2^a*G4^b*G6^c" separated by " + "
        for t in s.split(" + ") {
            let mut c = Rational::one();
            let mut m = (0, 0, 0);
            for f in t.split('*') {
                if let Some(e) = f.strip_prefix("G2^") {
                    m.0 = e.parse().unwrap();
                } else if f == "G2" {
                    m.0 = 1;
                } else if let Some(e) = f.strip_prefix("G4^") {
                    m.1 = e.parse().unwrap();
                } else if f == "G4" {
                    m.1 = 1;
                } else if f == "G6" {
                    m.2 = 1;
                } else {
                    c = crate::rational::parse_rational(f).unwrap();
                }
            }
            out.add_term(m, &c);
        }
        out
    }

    #[test]
    fn low_kernels() {
        assert_eq!(a_series(0), QMod::one());
        assert_eq!(a_series(1), q("2*G2"));
        assert_eq!(a_series(2), q("2*G2^2 + 1/6*G4"));
        assert_eq!(b_series(0), q("-2*G2^2 + 5/6*G4"));
        assert_eq!(b_series(1), q("-8/3*G2^3 + 4/3*G2*G4 + -7/360*G6"));
        assert_eq!(c_series(0, 0), QMod::zero());
        assert_eq!(c_series(1, 0), b_series(0));
        assert_eq!(c_series(1, 1), q("-16/3*G2^3 + 10/3*G2*G4 + -7/72*G6"));
    }

    #[test]
    fn weights_and_symmetry() {
        for k in 0..6 {
            assert!(a_series(k).is_homogeneous(2 * k));
            assert!(b_series(k).is_homogeneous(2 * k + 4));
            for l in 0..5 {
                assert!(c_series(k, l).is_homogeneous(2 * (k + l) + 2));
                assert_eq!(c_series(k, l), c_series(l, k));
            }
        }
    }

    #[test]
    fn fast_route_matches_generic_route() {
        for k in 0..4 {
            assert_eq!(a_series(k), a_series_generic(k).unwrap());
            assert_eq!(b_series(k), b_series_generic(k).unwrap());
        }
        for k in 0..3 {
            for l in 0..3 {
                assert_eq!(c_series(k, l), c_series_generic(k, l).unwrap(), "C_{k}{l}");
            }
        }
    }

    #[test]
    fn anomaly_relations() {
        for k in 1..6 {
            assert_eq!(a_series(k).d_dg2(), a_series(k - 1).scale(&rat(2)));
            assert_eq!(b_series(k).d_dg2(), (&b_series(k - 1) - &a_series(k + 1)).scale(&rat(2)));
        }
        for k in 1..4 {
            for l in 1..4 {
                let rhs = (&(&c_series(k - 1, l) + &c_series(k, l - 1)) - &(&a_series(k) * &a_series(l)))
                    .scale(&rat(2));
                assert_eq!(c_series(k, l).d_dg2(), rhs);
            }
        }
    }

    #[test]
    fn fourier_constant_terms() {
        let f = wp_fourier(3, 6);
        assert_eq!(f[0].coefficient(3).unwrap(), rat(3));
        assert_eq!(f[2].coefficient(-2).unwrap(), rat(2));
        assert_eq!(f[2].coefficient(0).unwrap(), rat(-18));
        for k in 0..5 {
            assert!(residue_vs_p0_check(k).unwrap(), "k={k}");
        }
    }

    #[test]
    fn polynomial_pattern() {
        assert!(a_polynomiality_check(1).unwrap());
        assert!(a_polynomiality_check(2).unwrap());
    }

    #[test]
    fn reconstruction_matches_direct() {
        let a = reconstruct_a(8).unwrap();
        for (k, v) in a.iter().enumerate() {
            assert_eq!(v, &a_series(k as u32));
        }
        let b = reconstruct_b(5).unwrap();
        for (k, v) in b.iter().enumerate() {
            assert_eq!(v, &b_series(k as u32));
        }
        let c = reconstruct_c(6).unwrap();
        for ((k, l), v) in &c {
            assert_eq!(v, &c_series(*k, *l), "C_{k}{l}");
        }
    }

    #[test]
    fn wp_window() {
        let w = wp_z(6);
        assert_eq!(w.prec(), Some(7));
        assert_eq!(w.coefficient(2).unwrap(), wp_coefficient(1));
    }
}
