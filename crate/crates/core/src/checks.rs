//! Numbered verification suites, shared by the acceptance target and `selftest`.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::dsl::{ClassExpr, DslBracket, DslInsertion, Index};
use crate::engine::rules::hae_terms;
use crate::engine::{coefficient_at, maulik_closed_form, Basis, Bracket, Engine, RemovalRoute, Term};
use crate::kernels::{
    a_polynomiality_check, a_series, b_series, c_series, reconstruct_a, reconstruct_b, reconstruct_c,
    residue_vs_p0_check,
};
use crate::polyfit::{normalized_bracket, tables, verify_table};
use crate::qmod::{commutator_wt_check, QMod};
use crate::rational::{fmt_rational, rat};
use crate::virasoro::{expected_w, solve_w};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const NAMES: [&str; 10] = [
    "closed-form kernels",
    "point insertions",
    "genus 29 invariant",
    "tau_k(1) removal identities",
    "rational-curve closed form",
    "polynomial tables",
    "Virasoro coefficients",
    "kernel reconstruction",
    "Fourier constant terms and polynomiality",
    "property suites",
];

/// Suites run by `selftest --level quick`.
pub const QUICK: [u32; 7] = [1, 2, 4, 6, 8, 9, 10];

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn run(id: u32, level: Level) -> Outcome {
    let start = Instant::now();
    let result = std::panic::catch_unwind(|| match id {
        1 => kernels_closed_form(),
        2 => point_insertions(),
        3 => genus_29(),
        4 => removal_identities(),
        5 => rational_curve(),
        6 => polynomial_tables(level),
        7 => virasoro_table(),
        8 => reconstruction(),
        9 => fourier_side(),
        10 => properties(),
        _ => Err(format!("no suite {id}")),
    })
    .unwrap_or_else(|_| Err("panicked".into()));
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome {
        id,
        name: NAMES.get(id as usize - 1).copied().unwrap_or("unknown"),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn suite(level: Level) -> Vec<u32> {
    match level {
        Level::Quick => QUICK.to_vec(),
        Level::Full => (1..=10).collect(),
    }
}

fn kernels_closed_form() -> Check {
    let cases = [
        ("A_0", a_series(0), "1"),
        ("A_1", a_series(1), "2*G2"),
        ("A_2", a_series(2), "2*G2^2 + 1/6*G4"),
        ("B_0", b_series(0), "-2*G2^2 + 5/6*G4"),
        ("B_1", b_series(1), "-8/3*G2^3 + 4/3*G2*G4 - 7/360*G6"),
        ("C_00", c_series(0, 0), "0"),
        ("C_10", c_series(1, 0), "-2*G2^2 + 5/6*G4"),
        ("C_11", c_series(1, 1), "-16/3*G2^3 + 10/3*G2*G4 - 7/72*G6"),
    ];
    for (name, got, want) in cases {
        let want = QMod::parse(want).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("{name} = {got}, expected {want}"))?;
    }
    ensure(b_series(0) == QMod::g2().d_q(), || "B_0 != D_q G2".into())?;
    Ok("8 kernels match; B_0 = D_q G2".into())
}

fn point_insertions() -> Check {
    let mut e = Engine::new();
    let dg2 = QMod::g2().d_q();
    for n in 0..=4usize {
        let v = e.numerator(&Bracket::new(vec![(0, Basis::Pt); n])).map_err(|x| x.to_string())?;
        let want = dg2.pow(n as u32);
        for m in -1..=4 {
            let (a, b) = (coefficient_at(&v, m), coefficient_at(&want, m));
            ensure(a == b, || format!("n={n} m={m}: {a} vs {b}"))?;
        }
    }
    Ok("n <= 4, slices -1..4".into())
}

pub const GENUS_29: &str = "-13094491/333598540006510406597452234752000000";

fn genus_29() -> Check {
    let mut e = Engine::new();
    let b = Bracket::new(vec![(8, Basis::One), (5, Basis::One), (10, Basis::One), (4, Basis::Pt), (3, Basis::Pt)]);
    let v = e.numerator(&b).map_err(|x| x.to_string())?;
    let c = fmt_rational(&coefficient_at(&v, 3));
    ensure(c == GENUS_29, || format!("got {c}"))?;
    Ok(c)
}

fn removal_identities() -> Check {
    use Basis::*;
    let br = |v: &[(i64, Basis)]| Bracket::new(v.to_vec());
    for route in [RemovalRoute::Auto, RemovalRoute::General] {
        let mut e = Engine::new().with_route(route);
        let mut n = |b: Bracket| e.numerator(&b).map_err(|x| x.to_string());
        for k in 0..=8 {
            let lhs = n(br(&[(k, One)]))?;
            let rhs = &n(br(&[(k - 3, Pt)]))? + &n(br(&[(k - 1, F)]))?.scale(&rat(2 * (k - 2)));
            ensure(lhs == rhs, || format!("single insertion k={k} ({route:?})"))?;
        }
        for k in 0..=6 {
            for l in 0..=4 {
                let lhs = n(br(&[(k, One), (l, Pt)]))?;
                let mut rhs = &n(br(&[(k - 3, Pt), (l, Pt)]))? + &n(br(&[(k - 2, Pt), (l - 1, Pt)]))?;
                rhs += &n(br(&[(k - 1, F), (l, Pt)]))?.scale(&rat(2 * k + 2 * l));
                rhs -= &n(br(&[(k - 1, E(1)), (l + 1, Fd(1))]))?;
                ensure(lhs == rhs, || format!("with a point k={k} l={l} ({route:?})"))?;
            }
        }
    }
    Ok("k <= 8 and k <= 6, l <= 4 on both removal routes".into())
}

fn multisets(lo: i64, hi: i64, n: usize) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in multisets(first, hi, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn rational_curve() -> Check {
    let mut e = Engine::new();
    let mut count = 0;
    for r in 0..=3 {
        for s in 0..=2 {
            for ks in multisets(2, 6, r) {
                for ls in multisets(0, 6, s) {
                    let mut ins: Vec<DslInsertion> = ks
                        .iter()
                        .map(|k| DslInsertion { index: Index::Fixed(*k), class: ClassExpr::basis(Basis::One) })
                        .collect();
                    ins.extend(ls.iter().map(|l| DslInsertion { index: Index::Fixed(*l), class: ClassExpr::beta() }));
                    let got = normalized_bracket(&mut e, &DslBracket { ins }, -1).map_err(|x| x.to_string())?;
                    let want = maulik_closed_form(&ks, &ls);
                    ensure(got == want, || format!("k={ks:?} l={ls:?}: {got} vs {want}"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} brackets"))
}

fn polynomial_tables(level: Level) -> Check {
    let mut e = Engine::new();
    let mut n = 0;
    for t in tables() {
        if level == Level::Quick && t.m > 1 {
            continue;
        }
        let r = verify_table(&mut e, t.id).map_err(|x| x.to_string())?;
        ensure(r.matches, || format!("{}: fitted {:?}, error {:?}", t.id, r.fitted, r.error))?;
        n += 1;
    }
    Ok(format!("{n} tables match"))
}

fn virasoro_table() -> Check {
    let mut e = Engine::new();
    for k in 2..=6 {
        let r = solve_w(&mut e, k).map_err(|x| format!("k={k}: {x}"))?;
        let got: Vec<_> = r.w.values().cloned().collect();
        ensure(Some(got.clone()) == expected_w(k), || format!("k={k}: {got:?}"))?;
    }
    Ok("k = 2..6, 15 coefficients, full rank".into())
}

fn reconstruction() -> Check {
    let a = reconstruct_a(8).map_err(|x| x.to_string())?;
    for (k, v) in a.iter().enumerate() {
        ensure(v == &a_series(k as u32), || format!("A_{k}"))?;
    }
    let b = reconstruct_b(6).map_err(|x| x.to_string())?;
    for (k, v) in b.iter().enumerate() {
        ensure(v == &b_series(k as u32), || format!("B_{k}"))?;
    }
    let c = reconstruct_c(8).map_err(|x| x.to_string())?;
    for ((k, l), v) in &c {
        ensure(v == &c_series(*k, *l), || format!("C_{k}{l}"))?;
    }
    Ok(format!("A_0..8, B_0..6, {} C entries", c.len()))
}

fn fourier_side() -> Check {
    for k in 0..=6 {
        ensure(residue_vs_p0_check(k).map_err(|x| x.to_string())?, || format!("residue k={k}"))?;
    }
    for n in 1..=4 {
        ensure(a_polynomiality_check(n).map_err(|x| x.to_string())?, || format!("polynomiality n={n}"))?;
    }
    Ok("residues k <= 6, polynomiality n <= 4".into())
}

const CLASSES: [Basis; 8] =
    [Basis::One, Basis::Pt, Basis::W, Basis::F, Basis::E(1), Basis::Fd(1), Basis::E(2), Basis::Fd(2)];

/// A random bracket of genus at most `max_genus`; labelled classes come in balanced pairs.
pub fn random_bracket(rng: &mut StdRng, max_genus: i64) -> Bracket {
    loop {
        let n = rng.gen_range(1..=4);
        let mut ins = Vec::new();
        for _ in 0..n {
            let b = CLASSES[rng.gen_range(0..CLASSES.len())];
            ins.push((rng.gen_range(0..=4), b));
            if let Basis::E(p) = b {
                ins.push((rng.gen_range(0..=3), Basis::Fd(p)));
            }
        }
        let b = Bracket::new(ins);
        let g = b.genus();
        if (0..=max_genus).contains(&g) {
            return b;
        }
    }
}

/// Relabels pairs by `perm` and swaps `e`/`f` on labels in `swap`.
pub fn relabel(b: &Bracket, perm: &[u8], swap: &[bool]) -> Bracket {
    Bracket::new(
        b.ins
            .iter()
            .map(|(k, c)| {
                let c = match *c {
                    Basis::E(p) if swap[p as usize - 1] => Basis::Fd(perm[p as usize - 1]),
                    Basis::E(p) => Basis::E(perm[p as usize - 1]),
                    Basis::Fd(p) if swap[p as usize - 1] => Basis::E(perm[p as usize - 1]),
                    Basis::Fd(p) => Basis::Fd(perm[p as usize - 1]),
                    other => other,
                };
                (*k, c)
            })
            .collect(),
    )
}

fn properties() -> Check {
    let mut rng = StdRng::seed_from_u64(0x6b33);
    let mut e = Engine::new();
    let mut general = Engine::new().with_route(RemovalRoute::General);
    let err = |x: crate::engine::EngineError| x.to_string();

    // anomaly equation
    let mut hae = 0;
    while hae < 24 {
        let b = random_bracket(&mut rng, 6);
        let lhs = e.numerator(&b).map_err(err)?.d_dg2();
        let terms: Vec<Term> = hae_terms(&b).into_iter().map(|(_, t)| t).collect();
        let rhs = e.evaluate_terms(&terms).map_err(err)?.numerator;
        ensure(lhs == rhs, || format!("anomaly equation fails on <{b}>"))?;
        hae += 1;
    }

    // explicit against general removal
    let mut removal = 0;
    while removal < 24 {
        let mut b = random_bracket(&mut rng, 5);
        b.ins.retain(|(_, c)| *c != Basis::One);
        let b = b.with(&[(rng.gen_range(2..=5), Basis::One)]);
        if b.genus() > 7 {
            continue;
        }
        let x = e.numerator(&b).map_err(err)?;
        let y = general.numerator(&b).map_err(err)?;
        ensure(x == y, || format!("removal routes differ on <{b}>"))?;
        removal += 1;
    }

    // relabelling
    for _ in 0..24 {
        let b = random_bracket(&mut rng, 6);
        let mut perm: Vec<u8> = (1..=10).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let swap: Vec<bool> = (0..10).map(|_| rng.gen_bool(0.5)).collect();
        let c = relabel(&b, &perm, &swap);
        ensure(e.numerator(&b).map_err(err)? == e.numerator(&c).map_err(err)?, || format!("<{b}> vs <{c}>"))?;
    }

    // weight law on everything evaluated so far
    let entries = e.memo_entries();
    for (key, w, n) in &entries {
        ensure(n.is_zero() || n.is_homogeneous(*w as u32), || format!("weight of <{key}>"))?;
    }

    // kernel symmetry and derivations
    let opt = |k: i64, f: &dyn Fn(u32) -> QMod| if k < 0 { QMod::zero() } else { f(k as u32) };
    for k in 0..=8u32 {
        let ki = k as i64;
        if k >= 1 {
            ensure(a_series(k).d_dg2() == a_series(k - 1).scale(&rat(2)), || format!("dA_{k}"))?;
        }
        if k <= 6 {
            let want = (&opt(ki - 1, &b_series) - &a_series(k + 1)).scale(&rat(2));
            ensure(b_series(k).d_dg2() == want, || format!("dB_{k}"))?;
        }
        for l in 0..=8 - k {
            let li = l as i64;
            ensure(c_series(k, l) == c_series(l, k), || format!("C_{k}{l} symmetry"))?;
            let mut want = &opt(ki - 1, &|x| c_series(x, l)) + &opt(li - 1, &|x| c_series(k, x));
            want -= &(&a_series(k) * &a_series(l));
            if k == 0 && l == 0 {
                want += &QMod::one();
            }
            ensure(c_series(k, l).d_dg2() == want.scale(&rat(2)), || format!("dC_{k}{l}"))?;
        }
    }

    // commutator on a corpus
    let mut corpus = Vec::new();
    for k in 0..=6 {
        corpus.push(a_series(k));
        corpus.push(b_series(k));
        corpus.push(c_series(k, 2));
    }
    corpus.extend(entries.iter().take(40).map(|(_, _, n)| n.clone()));
    for x in &corpus {
        ensure(commutator_wt_check(x).map_err(|e| e.to_string())?, || format!("commutator on {x}"))?;
    }
    Ok(format!(
        "{hae} anomaly, {removal} removal, 24 relabel cases; {} weights; {} commutator cases",
        entries.len(),
        corpus.len()
    ))
}
