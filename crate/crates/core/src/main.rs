use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use k3gw::cache;
use k3gw::checks::{self, Level};
use k3gw::dsl::DslBracket;
use k3gw::engine::{Engine, EngineError, RemovalRoute, SeriesValue};
use k3gw::kernels::{a_series, b_series, c_series};
use k3gw::polyfit::{fit_family, fit_polynomial, tables, verify_table, FamilySpec, PolyfitError};
use k3gw::qmod::QMod;
use k3gw::rational::fmt_rational;
use k3gw::virasoro::{expected_w, solve_w_with, Convention, Setup, VirasoroError};

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "k3gw", version, about = "Exact descendent invariants of K3 surfaces in primitive classes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form kernel series A_k, B_k, C_{k,l}.
    Kernel {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, value_enum, default_value_t = Format::Qmod)]
        format: Format,
        /// Highest power of q in `qexp` output.
        #[arg(long, default_value_t = 6)]
        qprec: usize,
        #[arg(long)]
        json: bool,
    },
    /// Invariant of a bracket in the class with beta^2 = 2m.
    Invariant {
        #[arg(long)]
        bracket: String,
        #[arg(long, allow_hyphen_values = true)]
        beta_sq_half: i64,
        /// Also report the whole series, with `beta` fixed at this slice.
        #[arg(long)]
        series: bool,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value_t = Route::Auto)]
        route: Route,
    },
    /// Polynomial fit of a bracket family in the index variables.
    Fit {
        #[arg(long, conflicts_with = "table", required_unless_present_any = ["table", "list"])]
        family: Option<String>,
        #[arg(long, allow_hyphen_values = true, required_unless_present_any = ["table", "list"])]
        beta_sq_half: Option<i64>,
        /// Override the total degree bound.
        #[arg(long)]
        degree: Option<u32>,
        /// Verify a stored table by id.
        #[arg(long)]
        table: Option<String>,
        /// List stored table ids.
        #[arg(long)]
        list: bool,
    },
    /// Solve for the coefficients w_{k,m} of the descendent constraint.
    Virasoro {
        #[arg(long)]
        k: i64,
        #[arg(long, value_enum, default_value_t = Conv::Tabulated)]
        convention: Conv,
        /// Exit 3 unless the solution equals the stored values.
        #[arg(long)]
        verify: bool,
    },
    /// Run the numbered verification suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = Lvl::Quick)]
        level: Lvl,
        /// Run only these suite numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Qmod,
    Qexp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Auto,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum Conv {
    Tabulated,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lvl {
    Quick,
    Full,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl ToString) -> Self {
        Failure { code: EXIT_USAGE, msg: msg.to_string() }
    }
    fn compute(msg: impl ToString) -> Self {
        Failure { code: EXIT_COMPUTE, msg: msg.to_string() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::RankBudgetExceeded { .. } => Failure::compute(format!(
                "{e}. Removing tau_k(1) requires an unused hyperbolic pair orthogonal to all insertions; \
                 use fewer tau_k(1) insertions or fewer labelled pairs"
            )),
            e => Failure::compute(e),
        }
    }
}

impl From<PolyfitError> for Failure {
    fn from(e: PolyfitError) -> Self {
        match e {
            PolyfitError::Engine(inner) => inner.into(),
            PolyfitError::Dsl(_) | PolyfitError::KindClassificationFailed(_) | PolyfitError::UnknownTable(_) => {
                Failure::usage(e)
            }
            e => Failure::compute(e),
        }
    }
}

impl From<VirasoroError> for Failure {
    fn from(e: VirasoroError) -> Self {
        match e {
            VirasoroError::Engine(inner) => inner.into(),
            VirasoroError::KTooSmall(_) | VirasoroError::UnsupportedClass(_) => Failure::usage(e),
            e => Failure::compute(e),
        }
    }
}

/// Writes a line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn print_json(v: &impl serde::Serialize) {
    emit(&serde_json::to_string_pretty(v).expect("serializable"));
}

fn qexp_string(x: &QMod, n: usize) -> (String, Vec<String>) {
    let e = x.qexpand(n);
    let coeffs: Vec<String> = e.coeffs.iter().map(fmt_rational).collect();
    let mut parts = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c == "0" {
            continue;
        }
        let q = if i == 1 { "q".to_string() } else { format!("q^{i}") };
        parts.push(match (i, c.as_str()) {
            (0, _) => c.clone(),
            (_, "1") => q,
            (_, "-1") => format!("-{q}"),
            _ => format!("{c}*{q}"),
        });
    }
    parts.push(format!("O(q^{})", n + 1));
    (parts.join(" + ").replace("+ -", "- "), coeffs)
}

/// Engine seeded from `K3GW_CACHE` when set.
fn engine(route: RemovalRoute) -> Result<Engine, Failure> {
    let mut e = Engine::new().with_route(route);
    if let Some(p) = cache::path_from_env() {
        cache::load_into(&mut e, &p).map_err(Failure::compute)?;
    }
    Ok(e)
}

fn persist(e: &Engine) -> Result<(), Failure> {
    if let Some(p) = cache::path_from_env() {
        cache::save_from(e, &p).map_err(Failure::compute)?;
    }
    Ok(())
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Kernel { which, k, l, format, qprec, json } => {
            let (name, x) = match which {
                Which::A => (format!("A_{k}"), a_series(k)),
                Which::B => (format!("B_{k}"), b_series(k)),
                Which::C => (format!("C_{k},{l}"), c_series(k, l)),
            };
            match (format, json) {
                (Format::Qmod, false) => emit(&x.to_string()),
                (Format::Qmod, true) => print_json(&json!({ "kernel": name, "qmod": x.to_string(), "terms": x })),
                (Format::Qexp, false) => emit(&qexp_string(&x, qprec).0),
                (Format::Qexp, true) => print_json(&json!({ "kernel": name, "qexp": qexp_string(&x, qprec).1 })),
            }
        }
        Cmd::Invariant { bracket, beta_sq_half: m, series, json, route } => {
            let b = DslBracket::parse(&bracket).map_err(Failure::usage)?;
            let ins = b.insertions(m).map_err(Failure::usage)?;
            let route = match route {
                Route::Auto => RemovalRoute::Auto,
                Route::General => RemovalRoute::General,
            };
            let mut e = engine(route)?;
            let v: SeriesValue = e.evaluate_insertions(&ins)?;
            persist(&e)?;
            let value = fmt_rational(&v.coefficient_at(m));
            if json || series {
                let mut out = json!({ "bracket": b.to_string(), "beta_sq_half": m, "value": value });
                if series {
                    out["series"] = serde_json::to_value(&v).expect("serializable");
                    let top = m.max(4);
                    let laurent: Vec<Value> = v.laurent(top).iter().map(|c| fmt_rational(c).into()).collect();
                    out["laurent_from_q^-1"] = laurent.into();
                }
                print_json(&out);
            } else {
                emit(&value);
            }
        }
        Cmd::Fit { list: true, .. } => {
            for t in tables() {
                emit(&format!("{}\t{}\tm={}\t{}", t.id, t.family, t.m, t.expected));
            }
        }
        Cmd::Fit { table: Some(id), .. } => {
            let mut e = engine(RemovalRoute::Auto)?;
            let r = verify_table(&mut e, &id)?;
            persist(&e)?;
            print_json(&r);
            if !r.matches {
                return Err(Failure { code: EXIT_MISMATCH, msg: format!("table {id} does not match") });
            }
        }
        Cmd::Fit { family, beta_sq_half, degree, .. } => {
            let (Some(family), Some(m)) = (family, beta_sq_half) else {
                return Err(Failure::usage("--family and --beta-sq-half are required"));
            };
            let spec = FamilySpec::parse(&family, m)?;
            let mut e = engine(RemovalRoute::Auto)?;
            let r = match degree {
                Some(d) => fit_polynomial(&mut e, &spec, d),
                None => fit_family(&mut e, &spec),
            };
            persist(&e)?;
            print_json(&r?);
        }
        Cmd::Virasoro { k, convention, verify } => {
            let setup = Setup {
                convention: match convention {
                    Conv::Tabulated => Convention::Tabulated,
                    Conv::Literal => Convention::Literal,
                },
                ..Setup::default()
            };
            let mut e = engine(RemovalRoute::Auto)?;
            let r = solve_w_with(&mut e, k, &setup)?;
            persist(&e)?;
            print_json(&r);
            if verify {
                let got: Vec<_> = r.w.values().cloned().collect();
                match expected_w(k) {
                    Some(w) if w == got => {}
                    Some(_) => return Err(Failure { code: EXIT_MISMATCH, msg: format!("w_{k} differs from the stored values") }),
                    None => return Err(Failure::usage(format!("no stored values for k = {k}"))),
                }
            }
        }
        Cmd::Selftest { level, only } => {
            let level = match level {
                Lvl::Quick => Level::Quick,
                Lvl::Full => Level::Full,
            };
            let ids = if only.is_empty() { checks::suite(level) } else { only };
            let mut outcomes = Vec::new();
            for id in ids {
                let o = checks::run(id, level);
                eprintln!("{} {:>2} {} ({:.1}s): {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.name, o.seconds, o.detail);
                outcomes.push(o);
            }
            let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
            print_json(&json!({ "passed": failed.is_empty(), "failed": failed, "outcomes": outcomes }));
            if !failed.is_empty() {
                return Err(Failure { code: EXIT_MISMATCH, msg: format!("suites {failed:?} failed") });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // Deep recursions on large brackets.
    let worker = std::thread::Builder::new().stack_size(512 << 20).spawn(move || run(cli.cmd));
    match worker.expect("spawn worker").join() {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(EXIT_COMPUTE)
        }
    }
}
