//! Normalized invariants and their polynomial dependence on descendent indices.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dsl::{ClassExpr, DslBracket, DslError, Index};
use crate::engine::{Basis, Engine, EngineError};
use crate::poly::{interpolate, simplex_points, PolyError, PolyQ};
use crate::rational::{double_factorial_odd, fmt_rational, neg4_pow, rat, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyfitError {
    #[error("class `{0}` is not one of: one, a multiple of beta or F, a class orthogonal to beta, pt")]
    KindClassificationFailed(String),
    #[error("not polynomial: at {point:?} the fit predicts {predicted} but the invariant is {actual}")]
    NotPolynomial { point: Vec<i64>, predicted: String, actual: String },
    #[error("sample grid too small: rank {rank} of {needed}")]
    SingularSystem { rank: usize, needed: usize },
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Insertion kinds, each with its own normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kind {
    One,
    Beta,
    Delta,
    Point,
}

pub fn classify(c: &ClassExpr) -> Result<Kind, PolyfitError> {
    let fail = || PolyfitError::KindClassificationFailed(c.to_string());
    if !c.beta.is_zero() {
        return if c.coh.is_zero() { Ok(Kind::Beta) } else { Err(fail()) };
    }
    let support: Vec<Basis> = c.coh.terms().map(|(b, _)| b).collect();
    match support.as_slice() {
        [] => Err(fail()),
        [Basis::One] => Ok(Kind::One),
        [Basis::Pt] => Ok(Kind::Point),
        [Basis::F] => Ok(Kind::Beta),
        s if s.iter().all(|b| b.is_v()) => Ok(Kind::Delta),
        _ => Err(fail()),
    }
}

/// Factor multiplying `<tau_k(.)>` in the normalized bracket.
pub fn normalization(kind: Kind, k: i64) -> Rational {
    let (e, df) = match kind {
        Kind::One | Kind::Delta => (k - 1, k - 1),
        Kind::Beta | Kind::Point => (k, k),
    };
    neg4_pow(e) * Rational::from_integer(double_factorial_odd(df))
}

/// The normalized coefficient at `q^m` of a bracket with integer indices.
pub fn normalized_bracket(engine: &mut Engine, b: &DslBracket, m: i64) -> Result<Rational, PolyfitError> {
    let mut factor = Rational::one();
    for i in &b.ins {
        let kind = classify(&i.class)?;
        let Index::Fixed(k) = i.index else {
            return Err(DslError::Unbound(i.index.to_string()).into());
        };
        factor *= normalization(kind, k);
    }
    let v = engine.evaluate_insertions(&b.insertions(m)?)?;
    Ok(v.coefficient_at(m) * factor)
}

/// A family of brackets indexed by the variables of its template, at one slice.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub template: DslBracket,
    pub m: i64,
}

impl FamilySpec {
    pub fn parse(src: &str, m: i64) -> Result<FamilySpec, PolyfitError> {
        let template = DslBracket::parse(src)?;
        for i in &template.ins {
            classify(&i.class)?;
        }
        Ok(FamilySpec { template, m })
    }

    pub fn variables(&self) -> Vec<String> {
        self.template.variables()
    }

    fn counts(&self) -> BTreeMap<&'static str, i64> {
        let mut c = BTreeMap::from([("r", 0), ("s", 0), ("t", 0), ("u", 0)]);
        for i in &self.template.ins {
            let key = match classify(&i.class).expect("checked at parse") {
                Kind::One => "r",
                Kind::Beta => "s",
                Kind::Delta => "t",
                Kind::Point => "u",
            };
            *c.get_mut(key).expect("present") += 1;
        }
        c
    }

    /// Smallest admissible value of each variable, rounding fractional bounds up.
    pub fn lower_bounds(&self) -> Vec<i64> {
        let c = self.counts();
        let (t, u) = (c["t"], c["u"]);
        let bound = |shift: i64| Integer::div_ceil(&(2 * (self.m + shift - u) - t), &2);
        self.variables()
            .iter()
            .map(|v| {
                self.template
                    .ins
                    .iter()
                    .filter(|i| i.index == Index::Var(v.clone()))
                    .map(|i| match classify(&i.class).expect("checked at parse") {
                        Kind::One => bound(3).max(1),
                        Kind::Delta => bound(1).max(1),
                        Kind::Beta | Kind::Point => bound(1).max(0),
                    })
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    /// `2m + 2 - 2u - t + r`.
    pub fn degree_bound(&self) -> i64 {
        let c = self.counts();
        2 * self.m + 2 - 2 * c["u"] - c["t"] + c["r"]
    }

    pub fn value_at(&self, engine: &mut Engine, point: &[i64]) -> Result<Rational, PolyfitError> {
        let values: BTreeMap<String, i64> = self.variables().into_iter().zip(point.iter().copied()).collect();
        normalized_bracket(engine, &self.template.bind(&values)?, self.m)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplePoint {
    pub point: Vec<i64>,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub family: String,
    pub beta_sq_half: i64,
    pub variables: Vec<String>,
    pub lower_bounds: Vec<i64>,
    pub degree_bound: u32,
    pub polynomial: PolyQ,
    pub samples: Vec<SamplePoint>,
    pub checks: Vec<SamplePoint>,
}

/// Out-of-sample points: the diagonal just beyond the sampling simplex.
fn check_points(lower: &[i64], deg: u32) -> Vec<Vec<i64>> {
    let v = lower.len() as i64;
    if v == 0 {
        return Vec::new();
    }
    let t0 = deg as i64 / v + 1;
    (t0..t0 + 3).map(|t| lower.iter().map(|l| l + t).collect()).collect()
}

/// Interpolates the family on a simplex grid of total degree `degree_bound`
/// and confirms the fit at three further points.
pub fn fit_polynomial(engine: &mut Engine, spec: &FamilySpec, degree_bound: u32) -> Result<FitReport, PolyfitError> {
    let vars = spec.variables();
    let var_refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    let lower = spec.lower_bounds();
    let mut samples = Vec::new();
    for p in simplex_points(&lower, degree_bound) {
        let value = spec.value_at(engine, &p)?;
        samples.push(SamplePoint { point: p, value });
    }
    let pts: Vec<Vec<Rational>> = samples.iter().map(|s| s.point.iter().map(|x| rat(*x)).collect()).collect();
    let vals: Vec<Rational> = samples.iter().map(|s| s.value.clone()).collect();
    let polynomial = match interpolate(&var_refs, &pts, &vals, degree_bound) {
        Ok(p) => p,
        Err(PolyError::SingularSystem { rank, needed }) => return Err(PolyfitError::SingularSystem { rank, needed }),
        Err(e) => return Err(e.into()),
    };
    let mut checks = Vec::new();
    for p in check_points(&lower, degree_bound) {
        let value = spec.value_at(engine, &p)?;
        let predicted = polynomial.eval_i64(&p);
        if predicted != value {
            return Err(PolyfitError::NotPolynomial {
                point: p,
                predicted: fmt_rational(&predicted),
                actual: fmt_rational(&value),
            });
        }
        checks.push(SamplePoint { point: p, value });
    }
    Ok(FitReport {
        family: spec.template.to_string(),
        beta_sq_half: spec.m,
        variables: vars,
        lower_bounds: lower,
        degree_bound,
        polynomial,
        samples,
        checks,
    })
}

/// Fit with the conjectured degree bound (negative bounds become 0).
pub fn fit_family(engine: &mut Engine, spec: &FamilySpec) -> Result<FitReport, PolyfitError> {
    fit_polynomial(engine, spec, spec.degree_bound().max(0) as u32)
}

/// A tabulated polynomial. `K` in `expected` abbreviates `k1 + k2 + k3`.
#[derive(Clone, Copy, Debug)]
pub struct TableEntry {
    pub id: &'static str,
    pub family: &'static str,
    pub m: i64,
    pub expected: &'static str,
}

const TABLES: &[TableEntry] = &[
    TableEntry { id: "pp@1", family: "tau(k,pt) tau(l,pt)", m: 1, expected: "1" },
    TableEntry { id: "pp@2", family: "tau(k,pt) tau(l,pt)", m: 2, expected: "8*k^2 + 8*l^2 - 12*k - 12*l + 20" },
    TableEntry {
        id: "pp@3",
        family: "tau(k,pt) tau(l,pt)",
        m: 3,
        expected: "64/3*k^4 + 64*k^2*l^2 + 64/3*l^4 - 512/3*k^3 - 96*k^2*l - 96*k*l^2 - 512/3*l^3 \
                   + 1712/3*k^2 + 144*k*l + 1712/3*l^2 - 1024/3*k - 1024/3*l - 64",
    },
    TableEntry { id: "pp-l0@2", family: "tau(k,pt) tau(0,pt)", m: 2, expected: "8*k^2 - 12*k + 28" },
    TableEntry { id: "a1a2@0", family: "tau(k,e1) tau(l,f1)", m: 0, expected: "-1/4" },
    TableEntry {
        id: "a1a2@1",
        family: "tau(k,e1) tau(l,f1)",
        m: 1,
        expected: "-2*k^2 - 2*k*l - 2*l^2 + 7*k + 7*l - 29/2",
    },
    TableEntry {
        id: "a1a2@2",
        family: "tau(k,e1) tau(l,f1)",
        m: 2,
        expected: "-16/3*k^4 - 32/3*k^3*l - 64/3*k^2*l^2 - 32/3*k*l^3 - 16/3*l^4 + 64*k^3 + 368/3*k^2*l \
                   + 368/3*k*l^2 + 64*l^3 - 1016/3*k^2 - 432*k*l - 1016/3*l^2 + 678*k + 678*l - 606",
    },
    TableEntry { id: "pF@0", family: "tau(k,pt) tau(l,F)", m: 0, expected: "1" },
    TableEntry { id: "pF@1", family: "tau(k,pt) tau(l,F)", m: 1, expected: "8*k^2 + 16*l^2 - 12*k - 24*l + 6" },
    TableEntry {
        id: "pF@2",
        family: "tau(k,pt) tau(l,F)",
        m: 2,
        expected: "64/3*k^4 + 128*k^2*l^2 + 64*l^4 - 512/3*k^3 - 192*k^2*l - 192*k*l^2 - 512*l^3 \
                   + 1376/3*k^2 + 288*k*l + 1344*l^2 - 520/3*k - 472*l - 512",
    },
    TableEntry {
        id: "111@-1",
        family: "tau(k1,one) tau(k2,one) tau(k3,one)",
        m: -1,
        expected: "4*(K - 4)*(2*K - 7)*(K - 3)",
    },
    TableEntry {
        id: "111@0",
        family: "tau(k1,one) tau(k2,one) tau(k3,one)",
        m: 0,
        expected: "32*(K - 4)*(2*K - 7)*(2*k1^3 + 2*k1^2*k2 + 2*k1*k2^2 + 2*k2^3 + 2*k1^2*k3 + 2*k2^2*k3 \
                   + 2*k1*k3^2 + 2*k2*k3^2 + 2*k3^3 - 9*k1^2 - 6*k1*k2 - 9*k2^2 - 6*k1*k3 - 6*k2*k3 - 9*k3^2 \
                   + 17*k1 + 17*k2 + 17*k3 - 21)",
    },
    TableEntry {
        id: "111@1",
        family: "tau(k1,one) tau(k2,one) tau(k3,one)",
        m: 1,
        expected: "16*(K - 4)*(2*K - 7)*(16*k1^5 + 16*k1^4*k2 + 64*k1^3*k2^2 + 64*k1^2*k2^3 + 16*k1*k2^4 \
                   + 16*k2^5 + 16*k1^4*k3 + 64*k1^2*k2^2*k3 + 16*k2^4*k3 + 64*k1^3*k3^2 + 64*k1^2*k2*k3^2 \
                   + 64*k1*k2^2*k3^2 + 64*k2^3*k3^2 + 64*k1^2*k3^3 + 64*k2^2*k3^3 + 16*k1*k3^4 + 16*k2*k3^4 \
                   + 16*k3^5 - 176*k1^4 - 224*k1^3*k2 - 384*k1^2*k2^2 - 224*k1*k2^3 - 176*k2^4 - 224*k1^3*k3 \
                   - 192*k1^2*k2*k3 - 192*k1*k2^2*k3 - 224*k2^3*k3 - 384*k1^2*k3^2 - 192*k1*k2*k3^2 \
                   - 384*k2^2*k3^2 - 224*k1*k3^3 - 224*k2*k3^3 - 176*k3^4 + 792*k1^3 + 744*k1^2*k2 \
                   + 744*k1*k2^2 + 792*k2^3 + 744*k1^2*k3 + 432*k1*k2*k3 + 744*k2^2*k3 + 744*k1*k3^2 \
                   + 744*k2*k3^2 + 792*k3^3 - 1402*k1^2 - 980*k1*k2 - 1402*k2^2 - 980*k1*k3 - 980*k2*k3 \
                   - 1402*k3^2 + 1221*k1 + 1221*k2 + 1221*k3 - 873)",
    },
    TableEntry { id: "11@-1", family: "tau(k,one) tau(l,one)", m: -1, expected: "2*(k + l - 3)*(2*k + 2*l - 5)" },
    TableEntry {
        id: "11@0",
        family: "tau(k,one) tau(l,one)",
        m: 0,
        expected: "16*(k + l - 3)*(4*k^3 + 4*k^2*l + 4*k*l^2 + 4*l^3 - 16*k^2 - 12*k*l - 16*l^2 + 29*k + 29*l - 29)",
    },
    TableEntry {
        id: "11@1",
        family: "tau(k,one) tau(l,one)",
        m: 1,
        expected: "8*(k + l - 3)*(32*k^5 + 32*k^4*l + 128*k^3*l^2 + 128*k^2*l^3 + 32*k*l^4 + 32*l^5 \
                   - 336*k^4 - 448*k^3*l - 704*k^2*l^2 - 448*k*l^3 - 336*l^4 + 1392*k^3 + 1328*k^2*l \
                   + 1328*k*l^2 + 1392*l^3 - 2236*k^2 - 1624*k*l - 2236*l^2 + 1780*k + 1780*l - 1049)",
    },
    TableEntry {
        id: "11-l1@0",
        family: "tau(k,one) tau(1,one)",
        m: 0,
        expected: "32*(k^2 - 2*k + 3)*(2*k - 3)*(k - 1)",
    },
    TableEntry { id: "11-l2@0", family: "tau(k,one) tau(2,one)", m: 0, expected: "16*(2*k^3 - 5*k^2 + 12*k - 6)*(2*k - 1)" },
    TableEntry { id: "11-l3@0", family: "tau(k,one) tau(3,one)", m: 0, expected: "16*(4*k^3 - 4*k^2 + 29*k + 22)*k" },
];

pub fn tables() -> &'static [TableEntry] {
    TABLES
}

pub fn table(id: &str) -> Result<&'static TableEntry, PolyfitError> {
    TABLES.iter().find(|t| t.id == id).ok_or_else(|| PolyfitError::UnknownTable(id.to_string()))
}

impl TableEntry {
    pub fn spec(&self) -> FamilySpec {
        FamilySpec::parse(self.family, self.m).expect("built-in family parses")
    }

    pub fn expected_poly(&self) -> PolyQ {
        let spec = self.spec();
        let vars = spec.variables();
        let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
        PolyQ::parse(&self.expected.replace('K', "(k1 + k2 + k3)"), &refs).expect("built-in table parses")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub id: String,
    pub family: String,
    pub beta_sq_half: i64,
    pub expected: String,
    pub fitted: Option<String>,
    /// Monomials whose coefficients differ, as `fitted - expected`.
    pub mismatches: Vec<String>,
    pub error: Option<String>,
    pub matches: bool,
}

/// Refits a tabulated family and compares it coefficient by coefficient.
pub fn verify_table(engine: &mut Engine, id: &str) -> Result<TableReport, PolyfitError> {
    let t = table(id)?;
    let spec = t.spec();
    let expected = t.expected_poly();
    let mut report = TableReport {
        id: t.id.to_string(),
        family: t.family.to_string(),
        beta_sq_half: t.m,
        expected: expected.to_string(),
        fitted: None,
        mismatches: Vec::new(),
        error: None,
        matches: false,
    };
    match fit_family(engine, &spec) {
        Ok(fit) => {
            let diff = fit.polynomial.add(&expected.neg());
            report.mismatches = diff.records().into_iter().map(|(e, c)| format!("{e:?}: {c}")).collect();
            report.matches = diff.is_zero();
            report.fitted = Some(fit.polynomial.to_string());
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds() {
        let k = |s: &str| classify(&crate::dsl::parse_class(s).unwrap());
        assert_eq!(k("one").unwrap(), Kind::One);
        assert_eq!(k("beta").unwrap(), Kind::Beta);
        assert_eq!(k("F").unwrap(), Kind::Beta);
        assert_eq!(k("e1 + 2*f3").unwrap(), Kind::Delta);
        assert_eq!(k("pt").unwrap(), Kind::Point);
        assert!(k("W").is_err());
        assert!(k("pt + F").is_err());
        assert!(k("beta + e1").is_err());
    }

    #[test]
    fn ranges_and_degrees() {
        let s = FamilySpec::parse("tau(k,pt) tau(l,pt)", 2).unwrap();
        assert_eq!(s.lower_bounds(), vec![1, 1]);
        assert_eq!(s.degree_bound(), 2);
        let s = FamilySpec::parse("tau(k,one) tau(l,e1)", 1).unwrap();
        // 1 + 3 - 1/2 rounds up to 4; 1 + 1 - 1/2 rounds up to 2.
        assert_eq!(s.lower_bounds(), vec![4, 2]);
        assert_eq!(s.degree_bound(), 4);
    }

    #[test]
    fn small_normalized_values() {
        let mut e = Engine::new();
        for (k, l) in [(1, 1), (2, 3), (4, 1)] {
            let b = DslBracket::parse(&format!("tau({k},pt) tau({l},pt)")).unwrap();
            assert_eq!(normalized_bracket(&mut e, &b, 1).unwrap(), rat(1));
            let b = DslBracket::parse(&format!("tau({k},e1) tau({l},f1)")).unwrap();
            assert_eq!(normalized_bracket(&mut e, &b, 0).unwrap(), crate::rational::frac(-1, 4));
        }
    }

    #[test]
    fn low_tables() {
        let mut e = Engine::new();
        for id in ["pp@2", "pF@1", "a1a2@1", "11@-1", "pp-l0@2"] {
            let r = verify_table(&mut e, id).unwrap();
            assert!(r.matches, "{r:?}");
        }
    }

    #[test]
    fn boundary_differs_from_generic_fit() {
        let generic = table("pp@2").unwrap().expected_poly();
        let boundary = table("pp-l0@2").unwrap().expected_poly();
        for k in 1..6 {
            assert_eq!(boundary.eval_i64(&[k]) - generic.eval_i64(&[k, 0]), rat(8));
        }
    }

    #[test]
    fn wrong_degree_is_reported() {
        let mut e = Engine::new();
        let spec = FamilySpec::parse("tau(k,pt) tau(l,pt)", 2).unwrap();
        assert!(matches!(fit_polynomial(&mut e, &spec, 1), Err(PolyfitError::NotPolynomial { .. })));
    }
}
