//! Formal rewrite rules on brackets. Each returns a list of `D_q`-decorated terms.

use num_traits::One;

use super::bracket::{Bracket, Term};
use super::classes::{Basis, PAIR_COUNT};
use super::EngineError;
use crate::rational::{rat, Rational};

fn r(n: i64) -> Rational {
    rat(n)
}

/// String rule for `tau_0(1)` at position `idx`.
pub fn string(b: &Bracket, idx: usize) -> Vec<Term> {
    assert_eq!(b.ins[idx], (0, Basis::One));
    let rest = Bracket::new(b.without(&[idx]));
    let mut out = Vec::new();
    for i in 0..rest.len() {
        let (k, g) = rest.ins[i];
        out.push(Term::plain(r(1), rest.replace(i, (k - 1, g))));
    }
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let ((ki, gi), (kj, gj)) = (rest.ins[i], rest.ins[j]);
            let c = gi.pairing(gj);
            if ki == 0 && kj == 0 && c != 0 {
                out.push(Term::plain(r(c), Bracket::new(rest.without(&[i, j]))));
            }
        }
    }
    out
}

/// Dilaton rule for `tau_1(1)` at position `idx`.
pub fn dilaton(b: &Bracket, idx: usize) -> Vec<Term> {
    assert_eq!(b.ins[idx], (1, Basis::One));
    let g = b.genus();
    let rest = Bracket::new(b.without(&[idx]));
    let n = rest.len() as i64;
    vec![Term::plain(r(2 * g - 1 + n), rest)]
}

/// Divisor rule for `tau_0(D)`, `D` of degree one, at position `idx`. The
/// factor `beta . D` on the slice `beta = W + m F` is `D.W + (D.F) m`, and `m` acts as `D_q`.
pub fn divisor(b: &Bracket, idx: usize) -> Vec<Term> {
    let (k0, d) = b.ins[idx];
    assert!(k0 == 0 && d.deg() == 1);
    let rest = Bracket::new(b.without(&[idx]));
    let mut out = Vec::new();
    let dw = d.pairing(Basis::W);
    let df = d.pairing(Basis::F);
    if dw != 0 {
        out.push(Term::plain(r(dw), rest.clone()));
    }
    if df != 0 {
        out.push(Term::new(r(df), 1, rest.clone()));
    }
    for i in 0..rest.len() {
        let (k, g) = rest.ins[i];
        if let Some((c, prod)) = g.cup(d) {
            out.push(Term::plain(r(c), rest.replace(i, (k - 1, prod))));
        }
    }
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let ((ki, gi), (kj, gj)) = (rest.ins[i], rest.ins[j]);
            let c = gi.triple(gj, d);
            if ki == 0 && kj == 0 && c != 0 {
                out.push(Term::plain(r(c), Bracket::new(rest.without(&[i, j]))));
            }
        }
    }
    out
}

/// Replaces every `W` by `m F + e_p` and every `F` by `F + f_p` for the fresh label `p`;
/// each `m` becomes one `D_q`. Terms with unbalanced label `p` vanish and are skipped.
pub fn remove_w(b: &Bracket) -> Result<Vec<Term>, EngineError> {
    let p = b.fresh_label();
    if p > PAIR_COUNT {
        return Err(EngineError::RankBudgetExceeded { needed: p as usize });
    }
    let ws: Vec<usize> = (0..b.len()).filter(|&i| b.ins[i].1 == Basis::W).collect();
    let fs: Vec<usize> = (0..b.len()).filter(|&i| b.ins[i].1 == Basis::F).collect();
    let mut out = Vec::new();
    for wmask in 0u32..(1 << ws.len()) {
        let e_count = wmask.count_ones();
        for fmask in 0u32..(1 << fs.len()) {
            if fmask.count_ones() != e_count {
                continue;
            }
            let mut v = b.ins.clone();
            for (bit, &i) in ws.iter().enumerate() {
                v[i].1 = if wmask >> bit & 1 == 1 { Basis::E(p) } else { Basis::F };
            }
            for (bit, &i) in fs.iter().enumerate() {
                if fmask >> bit & 1 == 1 {
                    v[i].1 = Basis::Fd(p);
                }
            }
            out.push(Term::new(r(1), ws.len() as u32 - e_count, Bracket::new(v)));
        }
    }
    Ok(out)
}

/// Which part of the anomaly equation a term comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaeTag {
    Pair,
    Pushforward(usize),
    Fiber(usize),
    Split(usize, usize),
}

/// Right-hand side of the holomorphic anomaly equation, tagged by origin.
pub fn hae_terms(b: &Bracket) -> Vec<(HaeTag, Term)> {
    let mut out = Vec::new();
    out.push((HaeTag::Pair, Term::plain(r(2), b.with(&[(0, Basis::One), (0, Basis::F)]))));
    for (i, &(k, g)) in b.ins.iter().enumerate() {
        let push = match g {
            Basis::W => Some(Basis::One),
            Basis::Pt => Some(Basis::F),
            _ => None,
        };
        if let Some(h) = push {
            out.push((HaeTag::Pushforward(i), Term::plain(r(-2), b.replace(i, (k + 1, h)))));
        }
        let gf = g.pairing(Basis::F);
        if gf != 0 {
            out.push((HaeTag::Fiber(i), Term::plain(r(20 * gf), b.replace(i, (k, Basis::F)))));
        }
    }
    let used = b.labels();
    let fresh = b.fresh_label();
    let spare = PAIR_COUNT as i64 - used.len() as i64;
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let ((ki, gi), (kj, gj)) = (b.ins[i], b.ins[j]);
            let tag = HaeTag::Split(i, j);
            let set = |x: Basis, y: Basis| {
                let mut v = b.ins.clone();
                v[i] = (ki, x);
                v[j] = (kj, y);
                Bracket::new(v)
            };
            match (gi, gj) {
                (Basis::W, Basis::W) => {
                    for &p in &used {
                        out.push((tag, Term::plain(r(-2), set(Basis::E(p), Basis::Fd(p)))));
                        out.push((tag, Term::plain(r(-2), set(Basis::Fd(p), Basis::E(p)))));
                    }
                    if spare > 0 {
                        let p = fresh;
                        out.push((tag, Term::plain(r(-2 * spare), set(Basis::E(p), Basis::Fd(p)))));
                        out.push((tag, Term::plain(r(-2 * spare), set(Basis::Fd(p), Basis::E(p)))));
                    }
                }
                (Basis::W, a) if a.is_v() => out.push((tag, Term::plain(r(2), set(a, Basis::F)))),
                (a, Basis::W) if a.is_v() => out.push((tag, Term::plain(r(2), set(Basis::F, a)))),
                (a, c) if a.is_v() && c.is_v() => {
                    let pr = a.pairing(c);
                    if pr != 0 {
                        out.push((tag, Term::plain(r(-2 * pr), set(Basis::F, Basis::F))));
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Closed-form removal of the single `tau_k(1)` at `idx` when all other classes
/// are `F`, `pt` or pair classes.
pub fn remove_one_explicit(b: &Bracket, idx: usize) -> Result<Vec<Term>, EngineError> {
    let (k, one) = b.ins[idx];
    assert!(one == Basis::One && k >= 2);
    let rest = Bracket::new(b.without(&[idx]));
    if rest.ins.iter().any(|(_, g)| matches!(g, Basis::One | Basis::W)) {
        return Err(EngineError::PreconditionViolated("explicit removal needs one ONE and no W".into()));
    }
    let p = rest.fresh_label();
    if p > PAIR_COUNT {
        return Err(EngineError::RankBudgetExceeded { needed: p as usize });
    }
    let (a1, a2) = (Basis::E(p), Basis::Fd(p));
    let n = rest.len() as i64;
    let pts = rest.count(Basis::Pt) as i64;
    let s: i64 = rest.ins.iter().map(|(ki, g)| ki + g.deg()).sum();
    let mut out = vec![
        Term::plain(r(2 * k - 4 - n + pts + 2 * s), rest.with(&[(k - 1, Basis::F)])),
        Term::plain(Rational::one(), rest.with(&[(k - 2, Basis::Pt), (0, Basis::One)])),
    ];
    for i in 0..rest.len() {
        let (ki, gi) = rest.ins[i];
        if gi == Basis::Pt {
            let others = Bracket::new(rest.without(&[i]));
            out.push(Term::plain(r(-1), others.with(&[(k - 1, a1), (ki + 1, a2)])));
        }
        if gi.is_v() {
            let others = Bracket::new(rest.without(&[i]));
            out.push(Term::plain(r(1), others.with(&[(ki, Basis::F), (k - 1, gi)])));
            for j in 0..rest.len() {
                let (kj, gj) = rest.ins[j];
                if j == i || !gj.is_v() {
                    continue;
                }
                let c = gi.pairing(gj);
                if c != 0 {
                    let others = Bracket::new(rest.without(&[i, j]));
                    out.push(Term::plain(r(-c), others.with(&[(k - 1, a1), (ki, a2), (kj, Basis::F)])));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Basis::*;

    #[test]
    fn string_examples() {
        let b = Bracket::new(vec![(0, One), (1, Pt)]);
        let t = string(&b, 0);
        assert_eq!(t, vec![Term::plain(r(1), Bracket::new(vec![(0, Pt)]))]);
        let b = Bracket::new(vec![(0, One), (0, E(1)), (0, Fd(1))]);
        let t = string(&b, 0);
        assert!(t.contains(&Term::plain(r(1), Bracket::empty())));
    }

    #[test]
    fn dilaton_example() {
        let b = Bracket::new(vec![(1, One)]);
        assert_eq!(dilaton(&b, 0), vec![Term::plain(r(-1), Bracket::empty())]);
    }

    #[test]
    fn divisor_on_w_and_f() {
        let b = Bracket::new(vec![(0, W), (2, Pt)]);
        let t = divisor(&b, 0);
        assert_eq!(t, vec![Term::new(r(1), 1, Bracket::new(vec![(2, Pt)]))]);
        let b = Bracket::new(vec![(0, F), (2, One)]);
        let t = divisor(&b, 0);
        assert_eq!(t.len(), 2);
        assert!(t.contains(&Term::plain(r(1), Bracket::new(vec![(1, F)]))));
    }

    #[test]
    fn w_removal_shapes() {
        let b = Bracket::new(vec![(3, W)]);
        let t = remove_w(&b).unwrap();
        assert_eq!(t, vec![Term::new(r(1), 1, Bracket::new(vec![(3, F)]))]);
        let b = Bracket::new(vec![(3, W), (2, F)]);
        let t = remove_w(&b).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.contains(&Term::new(r(1), 0, Bracket::new(vec![(3, E(1)), (2, Fd(1))]))));
        let full: Vec<(i64, Basis)> = (1..=10).flat_map(|p| [(1, E(p)), (1, Fd(p))]).collect();
        let b = Bracket::new(full).with(&[(1, W)]);
        assert!(matches!(remove_w(&b), Err(EngineError::RankBudgetExceeded { .. })));
    }

    #[test]
    fn hae_shapes() {
        let b = Bracket::new(vec![(2, F)]);
        let t = hae_terms(&b);
        assert_eq!(t.len(), 1);
        let b = Bracket::new(vec![(2, W)]);
        let t = hae_terms(&b);
        assert!(t.contains(&(HaeTag::Pushforward(0), Term::plain(r(-2), Bracket::new(vec![(3, One)])))));
        assert!(t.contains(&(HaeTag::Fiber(0), Term::plain(r(20), Bracket::new(vec![(2, F)])))));
        let b = Bracket::new(vec![(2, E(1)), (3, Fd(1))]);
        let t = hae_terms(&b);
        assert!(t.contains(&(HaeTag::Split(0, 1), Term::plain(r(-2), Bracket::new(vec![(2, F), (3, F)])))));
        let b = Bracket::new(vec![(1, W), (2, W)]);
        let split: Vec<_> = hae_terms(&b).into_iter().filter(|(t, _)| matches!(t, HaeTag::Split(..))).collect();
        assert_eq!(split.len(), 2);
        assert_eq!(split[0].1.coef, r(-20));
    }

    #[test]
    fn explicit_coefficient() {
        let b = Bracket::new(vec![(4, One), (2, Pt)]);
        let idx = b.ins.iter().position(|x| x.1 == One).unwrap();
        let t = remove_one_explicit(&b, idx).unwrap();
        assert_eq!(t[0].coef, r(2 * 4 + 2 * 2));
    }
}
