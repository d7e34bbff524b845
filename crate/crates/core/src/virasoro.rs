//! A Virasoro-type constraint with unknown coefficients `w_{k,m}`, solved exactly.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::engine::{coefficient_at, Basis, CohClass, Engine, EngineError, Insertion, PAIR_COUNT};
use crate::linalg::{solve, Solution};
use crate::qmod::QMod;
use crate::rational::{fmt_rational, frac, rat, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VirasoroError {
    #[error("coefficient index q = {q} outside 0..={max}")]
    QOutOfRange { q: i64, max: i64 },
    #[error("k must be at least 2, got {0}")]
    KTooSmall(i64),
    #[error("insertion class {0} is neither F nor pt")]
    UnsupportedClass(Basis),
    #[error("constraints are inconsistent; first conflicting instance: {witness}")]
    InconsistentSystem { witness: String },
    #[error("constraints leave the coefficients undetermined (rank {rank} of {unknowns})")]
    UnderdeterminedSystem { rank: usize, unknowns: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Coefficient of `x^q` in `(x + a)(x + a + 1)...(x + a + p)`.
pub fn pochhammer_coeff(a: &Rational, p: i64, q: i64) -> Result<Rational, VirasoroError> {
    if p < 0 || q < 0 || q > p + 1 {
        return Err(VirasoroError::QOutOfRange { q, max: p + 1 });
    }
    // coefficients in x, low degree first
    let mut poly = vec![Rational::one()];
    for i in 0..=p {
        let c = a + rat(i);
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (d, x) in poly.iter().enumerate() {
            next[d] += x * &c;
            next[d + 1] += x;
        }
        poly = next;
    }
    Ok(poly[q as usize].clone())
}

/// `p - 1/2` for the Hodge type `(p, q)`; the last pair plays the role of
/// the holomorphic two-form and its conjugate.
pub fn b_value(b: Basis) -> Rational {
    match b {
        Basis::One | Basis::Fd(PAIR_COUNT) => frac(-1, 2),
        Basis::Pt | Basis::E(PAIR_COUNT) => frac(3, 2),
        _ => frac(1, 2),
    }
}

/// How the pairing sums are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Convention {
    /// Reproduces the tabulated coefficients: the `w`-term keeps only the
    /// `(pt, one)` entry of the pairing sum, giving `<tau_m(pt) tau_{k-2-m}(F) ...>`,
    /// and `sigmabar` enters the quadratic term with the `(1,1)` value `b = 1/2`.
    Tabulated,
    /// Full pairing sums with Hodge `b`-values. The `w`-term is then symmetric
    /// under `m <-> k-2-m`, so only `w_m + w_{k-2-m}` is determined.
    Literal,
}

impl Convention {
    fn pairing_b(self, a: Basis) -> Rational {
        match (self, a) {
            (Convention::Tabulated, Basis::Fd(PAIR_COUNT)) => frac(1, 2),
            _ => b_value(a),
        }
    }
}

/// Settings for assembling constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct Setup {
    pub convention: Convention,
    /// The pairing `(sigma, sigmabar)`.
    pub sigma_scale: Rational,
}

impl Default for Setup {
    fn default() -> Self {
        Setup { convention: Convention::Tabulated, sigma_scale: Rational::one() }
    }
}

/// The basis used in the pairing sums, with `(sigma, sigmabar)` scaled to `scale`.
struct FrameBasis {
    scale: Rational,
}

impl FrameBasis {
    fn class(&self, b: Basis) -> CohClass {
        match b {
            Basis::Fd(PAIR_COUNT) => CohClass::basis(b).scale(&self.scale),
            _ => CohClass::basis(b),
        }
    }

    /// Nonzero entries `(a, b, g^{ab})` of the inverse pairing matrix.
    fn inverse_pairing(&self) -> Vec<(Basis, Basis, Rational)> {
        Basis::all()
            .into_iter()
            .map(|a| {
                let b = a.dual();
                let g = self.class(a).pairing(&self.class(b));
                (a, b, g.recip())
            })
            .collect()
    }
}

/// `gamma * F`.
fn times_f(c: &CohClass) -> CohClass {
    let mut out = CohClass::zero();
    for (b, x) in c.terms() {
        if let Some((s, r)) = b.cup(Basis::F) {
            out.add_term(r, &(x * rat(s)));
        }
    }
    out
}

/// Series-level constraint: `constant + sum_m coeffs[m] * w_{k,m}` over `Delta`.
#[derive(Clone, Debug)]
pub struct SeriesConstraint {
    pub constant: QMod,
    pub coeffs: Vec<QMod>,
}

/// The constraint at one slice.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub constant: Rational,
    pub coeffs: Vec<Rational>,
}

impl SeriesConstraint {
    pub fn at_slice(&self, m: i64) -> Constraint {
        Constraint {
            constant: coefficient_at(&self.constant, m),
            coeffs: self.coeffs.iter().map(|c| coefficient_at(c, m)).collect(),
        }
    }
}

fn with_rest(head: Vec<Insertion>, rest: &[(i64, Basis)]) -> Vec<Insertion> {
    let mut v = head;
    v.extend(rest.iter().map(|(k, b)| Insertion { k: *k, class: CohClass::basis(*b) }));
    v
}

/// Builds the constraint for `k` and insertions drawn from `{F, pt}`.
pub fn build_series_constraint(
    engine: &mut Engine,
    k: i64,
    rest: &[(i64, Basis)],
    setup: &Setup,
) -> Result<SeriesConstraint, VirasoroError> {
    if k < 2 {
        return Err(VirasoroError::KTooSmall(k));
    }
    if let Some((_, b)) = rest.iter().find(|(_, b)| !matches!(b, Basis::F | Basis::Pt)) {
        return Err(VirasoroError::UnsupportedClass(*b));
    }
    let convention = setup.convention;
    let frame = FrameBasis { scale: setup.sigma_scale.clone() };
    let ins = |k: i64, c: CohClass| Insertion { k, class: c };
    let mut eval = |list: Vec<Insertion>| engine.evaluate_insertions(&list).map(|v| v.numerator);
    let half = pochhammer_coeff(&frac(1, 2), k, 0)?;

    let mut constant = QMod::zero();
    let one = eval(with_rest(vec![ins(k + 1, CohClass::basis(Basis::One))], rest))?;
    constant -= &one.scale(&half);
    let fib = eval(with_rest(vec![ins(k, CohClass::basis(Basis::F))], rest))?;
    constant -= &fib.scale(&(&half * rat(2 * k + 2)));
    for j in 0..rest.len() {
        let (kj, bj) = rest[j];
        let mut others = rest.to_vec();
        others.remove(j);
        let c = pochhammer_coeff(&(b_value(bj) + rat(kj)), k, 0)?;
        let v = eval(with_rest(vec![ins(k + kj, CohClass::basis(bj))], &others))?;
        constant += &v.scale(&c);
    }
    let pairs = frame.inverse_pairing();
    for m in 0..k {
        let sign = if m % 2 == 0 { frac(-1, 2) } else { frac(1, 2) };
        for (a, b, g) in &pairs {
            let c = pochhammer_coeff(&(-convention.pairing_b(*a) - rat(m)), k, 0)? * g * &sign;
            if c.is_zero() {
                continue;
            }
            let v = eval(with_rest(vec![ins(m, frame.class(*a)), ins(k - 1 - m, frame.class(*b))], rest))?;
            constant += &v.scale(&c);
        }
    }
    let mut coeffs = Vec::new();
    for m in 0..=k - 2 {
        let mut acc = QMod::zero();
        for (a, b, g) in &pairs {
            if convention == Convention::Tabulated && *a != Basis::Pt {
                continue;
            }
            let bf = times_f(&frame.class(*b));
            if bf.is_zero() {
                continue;
            }
            let v = eval(with_rest(vec![ins(m, frame.class(*a)), ins(k - 2 - m, bf)], rest))?;
            acc += &v.scale(g);
        }
        coeffs.push(acc);
    }
    Ok(SeriesConstraint { constant, coeffs })
}

/// The constraint at the slice `q^slice`.
pub fn build_constraint(
    engine: &mut Engine,
    k: i64,
    rest: &[(i64, Basis)],
    slice: i64,
) -> Result<Constraint, VirasoroError> {
    Ok(build_series_constraint(engine, k, rest, &Setup::default())?.at_slice(slice))
}

/// Instances used to determine `w_{k,m}`: no insertion, one insertion `tau_j(pt)` or
/// `tau_j(F)`, and two such insertions, all with `j <= k`.
pub fn instance_schedule(k: i64) -> Vec<Vec<(i64, Basis)>> {
    let mut v = vec![Vec::new()];
    for j in 0..=k {
        v.push(vec![(j, Basis::Pt)]);
        v.push(vec![(j, Basis::F)]);
    }
    for i in 0..=k {
        for j in 0..=i {
            v.push(vec![(i, Basis::Pt), (j, Basis::Pt)]);
            v.push(vec![(i, Basis::F), (j, Basis::F)]);
            v.push(vec![(i, Basis::Pt), (j, Basis::F)]);
            if i != j {
                v.push(vec![(j, Basis::Pt), (i, Basis::F)]);
            }
        }
    }
    v
}

pub const SLICES: [i64; 6] = [-1, 0, 1, 2, 3, 4];

#[derive(Clone, Debug, Serialize)]
pub struct VirasoroReport {
    pub k: i64,
    #[serde(serialize_with = "ser_map")]
    pub w: BTreeMap<i64, Rational>,
    pub rank: usize,
    pub equations: usize,
}

fn ser_map<S: serde::Serializer>(m: &BTreeMap<i64, Rational>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut out = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        out.serialize_entry(&k.to_string(), &fmt_rational(v))?;
    }
    out.end()
}

fn instance_name(rest: &[(i64, Basis)], slice: i64) -> String {
    let ins: Vec<String> = rest.iter().map(|(k, b)| format!("tau({k},{b})")).collect();
    format!("[{}] at q^{slice}", ins.join(" "))
}

/// Solves for `w_{k,0..k-2}` over every scheduled instance and slice.
pub fn solve_w_with(engine: &mut Engine, k: i64, setup: &Setup) -> Result<VirasoroReport, VirasoroError> {
    let unknowns = (k - 1) as usize;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut names = Vec::new();
    for rest in instance_schedule(k) {
        let sc = build_series_constraint(engine, k, &rest, setup)?;
        for slice in SLICES {
            let c = sc.at_slice(slice);
            rows.push(c.coeffs);
            rhs.push(-c.constant);
            names.push(instance_name(&rest, slice));
        }
    }
    match solve(&rows, &rhs, unknowns) {
        Solution::Unique(w) => Ok(VirasoroReport {
            k,
            w: w.into_iter().enumerate().map(|(m, x)| (m as i64, x)).collect(),
            rank: unknowns,
            equations: rows.len(),
        }),
        Solution::Underdetermined { rank, .. } => Err(VirasoroError::UnderdeterminedSystem { rank, unknowns }),
        Solution::Inconsistent { .. } => {
            let n = (1..=rows.len())
                .find(|&n| matches!(solve(&rows[..n], &rhs[..n], unknowns), Solution::Inconsistent { .. }))
                .expect("full system is inconsistent");
            Err(VirasoroError::InconsistentSystem { witness: names[n - 1].clone() })
        }
    }
}

pub fn solve_w(engine: &mut Engine, k: i64) -> Result<VirasoroReport, VirasoroError> {
    solve_w_with(engine, k, &Setup::default())
}

/// Tabulated values of `w_{k,m}` for `k = 2..6`.
pub fn expected_w(k: i64) -> Option<Vec<Rational>> {
    let v = match k {
        2 => vec![frac(-3, 4)],
        3 => vec![rat(3), frac(-27, 4)],
        4 => vec![frac(195, 16), frac(45, 16), frac(-645, 16)],
        5 => vec![frac(1935, 32), frac(945, 64), rat(0), frac(-16785, 64)],
        6 => vec![frac(22995, 64), frac(315, 4), frac(1575, 64), frac(-315, 8), frac(-123165, 64)],
        _ => return None,
    };
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer() {
        assert_eq!(pochhammer_coeff(&frac(1, 2), 1, 0).unwrap(), frac(3, 4));
        assert_eq!(pochhammer_coeff(&frac(7, 3), 0, 1).unwrap(), rat(1));
        assert_eq!(pochhammer_coeff(&frac(1, 2), 2, 0).unwrap(), frac(15, 8));
        // (x + 1)(x + 2) = x^2 + 3x + 2
        assert_eq!(pochhammer_coeff(&rat(1), 1, 1).unwrap(), rat(3));
        assert!(pochhammer_coeff(&rat(1), 1, 3).is_err());
    }

    #[test]
    fn b_values() {
        assert_eq!(b_value(Basis::One), frac(-1, 2));
        assert_eq!(b_value(Basis::W), frac(1, 2));
        assert_eq!(b_value(Basis::E(9)), frac(1, 2));
        assert_eq!(b_value(Basis::E(PAIR_COUNT)), frac(3, 2));
        assert_eq!(b_value(Basis::Fd(PAIR_COUNT)), frac(-1, 2));
    }

    #[test]
    fn low_k_values() {
        let mut e = Engine::new();
        for k in 2..=4 {
            let r = solve_w(&mut e, k).unwrap();
            assert_eq!(r.w.values().cloned().collect::<Vec<_>>(), expected_w(k).unwrap());
        }
    }

    #[test]
    fn pairing_scale_is_irrelevant() {
        let mut e = Engine::new();
        let a = solve_w(&mut e, 3).unwrap();
        let b = solve_w_with(&mut e, 3, &Setup { sigma_scale: rat(5), ..Setup::default() }).unwrap();
        assert_eq!(a.w, b.w);
    }

    #[test]
    fn literal_reading_fixes_only_symmetric_sums() {
        let mut e = Engine::new();
        let literal = Setup { convention: Convention::Literal, ..Setup::default() };
        assert!(matches!(
            solve_w_with(&mut e, 3, &literal),
            Err(VirasoroError::UnderdeterminedSystem { rank: 1, unknowns: 2 })
        ));
    }

    #[test]
    fn rejects_other_classes() {
        let mut e = Engine::new();
        assert!(matches!(
            build_constraint(&mut e, 2, &[(1, Basis::W)], 0),
            Err(VirasoroError::UnsupportedClass(Basis::W))
        ));
    }
}
