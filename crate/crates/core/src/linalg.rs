//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    /// The unique solution.
    Unique(Vec<Rational>),
    /// Consistent but with free variables; a particular solution (free variables set to zero).
    Underdetermined { particular: Vec<Rational>, rank: usize },
    /// No solution.
    Inconsistent { rank: usize },
}

/// Solves `a * x = b` for a rectangular system with `a.len()` equations.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Solution {
    assert_eq!(a.len(), b.len());
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), ncols);
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=ncols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let rank = pivots.len();
    if m[rank..].iter().any(|row| !row[ncols].is_zero()) {
        return Solution::Inconsistent { rank };
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][ncols].clone();
    }
    if rank == ncols {
        Solution::Unique(x)
    } else {
        Solution::Underdetermined { particular: x, rank }
    }
}

/// Rank of a rational matrix.
pub fn rank(a: &[Vec<Rational>], ncols: usize) -> usize {
    let zeros = vec![Rational::zero(); a.len()];
    match solve(a, &zeros, ncols) {
        Solution::Unique(_) => ncols,
        Solution::Underdetermined { rank, .. } | Solution::Inconsistent { rank } => rank,
    }
}

pub fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};

    #[test]
    fn unique_square() {
        let a = vec![vec![rat(2), rat(1)], vec![rat(1), rat(3)]];
        let b = vec![rat(3), rat(5)];
        assert_eq!(solve(&a, &b, 2), Solution::Unique(vec![frac(4, 5), frac(7, 5)]));
    }

    #[test]
    fn overdetermined_consistent_and_not() {
        let a = vec![vec![rat(1)], vec![rat(2)], vec![rat(3)]];
        assert_eq!(solve(&a, &[rat(1), rat(2), rat(3)], 1), Solution::Unique(vec![rat(1)]));
        assert_eq!(
            solve(&a, &[rat(1), rat(2), rat(4)], 1),
            Solution::Inconsistent { rank: 1 }
        );
    }

    #[test]
    fn underdetermined_reports_rank() {
        let a = vec![vec![rat(1), rat(1)]];
        match solve(&a, &[rat(2)], 2) {
            Solution::Underdetermined { rank, .. } => assert_eq!(rank, 1),
            other => panic!("{other:?}"),
        }
        assert_eq!(rank(&identity(3), 3), 3);
    }
}
