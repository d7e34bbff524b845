//! Descendent brackets on the elliptic K3 model and their evaluation.

pub mod bracket;
pub mod classes;
mod eval;
pub mod rules;

pub use bracket::{coefficient_at, dq_numerator, Bracket, BracketExpression, Insertion, Key, SeriesValue, Term};
pub use classes::{Basis, CohClass, PAIR_COUNT};
pub use eval::{stationary, Engine, InnerDerivative, RemovalRoute};

use crate::qmod::QMod;
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(
        "no unused hyperbolic pair is left (needed pair {needed}, only {} exist); the recursion needs pairs orthogonal to every insertion",
        PAIR_COUNT
    )]
    RankBudgetExceeded { needed: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("numerator of <{bracket}> is not homogeneous of weight {expected}")]
    WeightLaw { bracket: String, expected: i64 },
}

/// `(beta.beta)^s prod_{p=1}^{r} (2g + p + s - 3)` with `beta^2 = -2`,
/// `g = sum k + sum l - r`.
pub fn maulik_closed_form(ks: &[i64], ls: &[i64]) -> Rational {
    let r = ks.len() as i64;
    let s = ls.len() as i64;
    let g: i64 = ks.iter().sum::<i64>() + ls.iter().sum::<i64>() - r;
    let mut acc = num_traits::pow(rat(-2), s as usize);
    for p in 1..=r {
        acc *= rat(2 * g + p + s - 3);
    }
    acc
}

/// Checks `<X Y>' = prod <x_i>' * <Y>'` for `X` in `{F, pt}` and `Y` in pair classes,
/// where `<.>'` is the numerator.
pub fn splitting_check(
    engine: &mut Engine,
    singles: &[(i64, Basis)],
    paired: &[(i64, Basis)],
) -> Result<bool, EngineError> {
    let mut all = singles.to_vec();
    all.extend_from_slice(paired);
    let whole = engine.numerator(&Bracket::new(all))?;
    let mut prod = QMod::one();
    for s in singles {
        prod = &prod * &engine.numerator(&Bracket::new(vec![*s]))?;
    }
    prod = &prod * &engine.numerator(&Bracket::new(paired.to_vec()))?;
    Ok(whole == prod)
}
