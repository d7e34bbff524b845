//! Exact rational scalars and the small number-theoretic helpers used throughout.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The coefficient field. `BigRational` keeps the canonical form
/// (reduced, positive denominator, zero is 0/1) after every operation.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Formats as `"num/den"`, or `"num"` when the denominator is one.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `"a"`, `"-a"`, or `"a/b"` with arbitrary-size integers.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

/// `(2k+1)!! = (2k+1)(2k-1)...3*1`; equals 1 for k = -1.
pub fn double_factorial_odd(k: i64) -> BigInt {
    assert!(k >= -1, "double factorial of a negative odd number");
    let mut acc = BigInt::one();
    let mut j = 1i64;
    while j <= 2 * k + 1 {
        acc *= j;
        j += 2;
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * j)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// `(-4)^e` as a rational; `e` may be negative.
pub fn neg4_pow(e: i64) -> Rational {
    let base = Rational::from_integer(big(-4));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base, (-e) as usize).recip()
    }
}

pub fn sigma(power: u32, n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += num_traits::pow(BigInt::from(d), power as usize);
            let e = n / d;
            if e != d {
                s += num_traits::pow(BigInt::from(e), power as usize);
            }
        }
        d += 1;
    }
    s
}

fn bernoulli_table() -> &'static Mutex<Vec<Rational>> {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rational::one()]))
}

/// Bernoulli number `B_n` with the convention `B_1 = -1/2`, from
/// `sum_{j=0}^{m} C(m+1, j) B_j = 0`.
pub fn bernoulli(n: usize) -> Rational {
    let mut table = bernoulli_table().lock().expect("bernoulli table poisoned");
    while table.len() <= n {
        let m = table.len();
        let mut s = Rational::zero();
        for (j, b) in table.iter().enumerate() {
            s += Rational::from_integer(binomial(m as u64 + 1, j as u64)) * b;
        }
        let next = -s / Rational::from_integer(big(m as i64 + 1));
        table.push(next);
    }
    table[n].clone()
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat(1));
        assert_eq!(bernoulli(1), frac(-1, 2));
        assert_eq!(bernoulli(2), frac(1, 6));
        assert_eq!(bernoulli(4), frac(-1, 30));
        assert_eq!(bernoulli(6), frac(1, 42));
        assert_eq!(bernoulli(12), frac(-691, 2730));
        assert_eq!(bernoulli(5), rat(0));
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial_odd(-1), big(1));
        assert_eq!(double_factorial_odd(0), big(1));
        assert_eq!(double_factorial_odd(2), big(15));
        assert_eq!(double_factorial_odd(4), big(945));
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(sigma(1, 6), big(12));
        assert_eq!(sigma(3, 2), big(9));
        assert_eq!(sigma(0, 12), big(6));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(fmt_rational(&frac(-3, 2)), "-3/2");
        assert_eq!(fmt_rational(&rat(7)), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
