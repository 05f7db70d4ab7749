//! Command-line front end. `run` is the whole program; `main` only wires process I/O.

use std::ffi::OsString;
use std::io::Write;
use std::ops::RangeInclusive;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use stickelberger_core::characters::character_by_label;
use stickelberger_core::oracles::{birch_tate_order, minus_class_number, stickelberger_index};
use stickelberger_core::stickelberger::{
    annihilation_divisibility_check, character_identity_check, fourier_reconstruct,
    integrality_check, restriction_identity_check,
};
use stickelberger_core::sweep::{self, Check, Grid, SweepOutcome, SweepSpec};
use stickelberger_core::tower::{w_invariant_factors, TowerSpec};
use stickelberger_core::{
    build_theta_tower, enumerate_characters, k_of_v, theta, w_invariant, AbelianFieldSpec, Error,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IDENTITY: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "stickelberger",
    version,
    about = "Higher Stickelberger elements for abelian fields over Q"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// A field given by its conductor and an optional fixing subgroup H of (Z/fZ)^×.
#[derive(Debug, Args)]
struct FieldArgs {
    #[arg(long)]
    f: u64,
    /// Comma-separated elements of H; defaults to {1}, i.e. Q(μ_f).
    #[arg(long, value_delimiter = ',')]
    subgroup: Option<Vec<u64>>,
}

impl FieldArgs {
    fn field(&self) -> Result<AbelianFieldSpec, Error> {
        match &self.subgroup {
            Some(h) => AbelianFieldSpec::new(self.f, h),
            None => AbelianFieldSpec::cyclotomic(self.f),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Θ_n(b, f) as a group-ring element.
    Theta {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        b: u64,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        json: bool,
    },
    /// Identity checks.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// The compatible family Θ_n(b, f_k) along F(μ_{l^k}).
    Tower {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        json: bool,
    },
    /// w_n(F).
    Wn {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        json: bool,
    },
    /// k(v) = v_l(q^n - 1).
    Kv {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        json: bool,
    },
    /// Analytic minus class number of a CM field.
    Hminus {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        json: bool,
    },
    /// Birch–Tate order w_2(F)|ζ_F(-1)| of a totally real field.
    K2order {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        json: bool,
    },
    /// Index of the Stickelberger ideal in the minus part of Z[G(Q(μ_p)/Q)].
    Index {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        json: bool,
    },
    /// l-adic valuation of the norm of χ(Θ_n(b, f)).
    Divcheck {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        chi: String,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Res Θ_n(b, f') = ∏ (1 - σ_l^{-1} l^n) Θ_n(b, f).
    Lemma21 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        b: u64,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        fprime: u64,
        #[arg(long)]
        json: bool,
    },
    /// Δ_{n+1} ≡ (ab)^n Δ_1 mod w_n over a grid; ranges are `k` or `lo..hi` (inclusive).
    Congruence {
        #[arg(long, default_value = "1..30")]
        f: Span<u64>,
        #[arg(long, default_value = "1..4")]
        n: Span<u32>,
        #[arg(long, default_value = "1..20")]
        b: Span<u64>,
        /// Compare against Δ_{m+1} modulo w_{min(m,n)} instead.
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// χ(Θ) against the L-value formula for every character, plus Fourier inversion.
    Character {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        json: bool,
    },
    /// The full property suite.
    All {
        #[arg(long, default_value_t = 30)]
        max_f: u64,
        #[arg(long)]
        json: bool,
    },
}

/// An inclusive range written `k` or `lo..hi`.
#[derive(Debug, Clone)]
struct Span<T>(RangeInclusive<T>);

impl<T: FromStr + Copy + PartialOrd> FromStr for Span<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<T>()
                .map_err(|_| format!("bad bound {t:?}"))
        };
        match s.split_once("..") {
            Some((lo, hi)) => {
                let hi = hi.strip_prefix('=').unwrap_or(hi);
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(format!("empty range {s:?}"));
                }
                Ok(Span(lo..=hi))
            }
            None => {
                let k = parse(s)?;
                Ok(Span(k..=k))
            }
        }
    }
}

/// Fails an invocation: usage errors exit 1, identity failures exit 2.
enum Failure {
    Usage(String),
    Identity(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::RouteMismatch { f, n, b } => Failure::Identity(json!({
                "identity": "theta_routes",
                "f": f,
                "n": n,
                "b": b,
            })),
            Error::CompatibilityFailure {
                level,
                restricted,
                expected,
            } => Failure::Identity(json!({
                "identity": "tower_compatibility",
                "level": level,
                "restricted": to_value(restricted),
                "expected": to_value(expected),
            })),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

type Outcome = Result<(), Failure>;

fn emit(out: &mut dyn Write, line: impl std::fmt::Display) {
    // A closed stdout (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(out, "{line}");
}

/// Size the global rayon pool from STICKELBERGER_THREADS; ignored once a pool exists.
pub fn configure_threads() {
    if let Some(n) = std::env::var("STICKELBERGER_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    configure_threads();
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Identity(counterexample)) => {
            emit(out, json!({ "counterexample": counterexample }));
            EXIT_IDENTITY
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Theta { n, b, field, json } => {
            let t = theta(n, b, &field.field()?)?;
            if json {
                emit(out, t.value.to_json());
            } else {
                let report = integrality_check(&t);
                emit(out, format!("Θ_{n}({b}, {}) = {}", t.conductor(), t.value));
                if report.integral {
                    emit(out, "integral");
                } else {
                    emit(
                        out,
                        format!("not integral at {:?}", report.offending_primes),
                    );
                }
            }
            Ok(())
        }
        Command::Verify { which } => verify(which, out),
        Command::Tower {
            field,
            l,
            n,
            b,
            depth,
            json,
        } => {
            let spec = TowerSpec::new(&field.field()?, l, depth)?;
            let family = build_theta_tower(&spec, n, b)?;
            if json {
                emit(out, serde_json::to_string(&family).expect("serializable"));
            } else {
                for (k, level) in family.levels.iter().enumerate() {
                    emit(
                        out,
                        format!("f_{k} = {}: {}", level.conductor(), level.value),
                    );
                }
                emit(out, format!("compat: {:?}", family.compat));
            }
            Ok(())
        }
        Command::Wn { n, field, json } => {
            let k = field.field()?;
            let w = w_invariant(n, &k)?;
            if json {
                let factors: Vec<Value> = w_invariant_factors(n, &k)
                    .into_iter()
                    .map(|(l, e)| json!([l, e]))
                    .collect();
                emit(
                    out,
                    json!({"n": n, "f": k.conductor(), "H": k.subgroup(), "w": w, "factors": factors}),
                );
            } else {
                emit(out, w);
            }
            Ok(())
        }
        Command::Kv { l, q, n, json } => {
            let k = k_of_v(l, q, n)?;
            if json {
                emit(out, json!({"l": l, "q": q, "n": n, "k": k}));
            } else {
                emit(out, k);
            }
            Ok(())
        }
        Command::Hminus { field, json } => {
            let report = minus_class_number(&field.field()?)?;
            if json {
                emit(out, to_value(&report));
            } else {
                emit(out, &report.h_minus);
            }
            Ok(())
        }
        Command::K2order { field, json } => {
            let report = birch_tate_order(&field.field()?)?;
            if json {
                emit(out, to_value(&report));
            } else {
                emit(out, &report.order);
            }
            Ok(())
        }
        Command::Index { p, json } => {
            let report = stickelberger_index(p)?;
            if json {
                emit(out, to_value(&report));
            } else {
                emit(out, &report.index);
            }
            Ok(())
        }
        Command::Divcheck {
            field,
            n,
            b,
            chi,
            l,
            json,
        } => {
            let k = field.field()?;
            let t = theta(n, b, &k)?;
            let chi = character_by_label(&k, &chi)?;
            let report = annihilation_divisibility_check(&t, &chi, l)?;
            if json {
                emit(out, to_value(&report));
            } else {
                emit(
                    out,
                    format!(
                        "χ = {}: χ(Θ) = {}, norm = {}, v_{l} = {}",
                        report.label,
                        report.value,
                        stickelberger_core::format_rational(&report.norm),
                        report.valuation
                    ),
                );
            }
            Ok(())
        }
    }
}

fn verify(which: Verify, out: &mut dyn Write) -> Outcome {
    match which {
        Verify::Lemma21 {
            n,
            b,
            field,
            fprime,
            json,
        } => {
            let r = restriction_identity_check(n, b, fprime, &field.field()?)?;
            let value = to_value(&r);
            if !r.holds {
                return Err(Failure::Identity(value));
            }
            if json {
                emit(out, value);
            } else {
                emit(
                    out,
                    format!(
                        "restriction identity holds: n = {n}, b = {b}, f = {} -> f' = {fprime}, Euler primes {:?}",
                        r.f, r.euler_primes
                    ),
                );
            }
            Ok(())
        }
        Verify::Congruence { f, n, b, m, json } => {
            let mut spec = SweepSpec::standard(0).only(&[Check::Congruence]);
            spec.congruence = Grid {
                f: f.0,
                n: n.0,
                b: b.0,
            };
            spec.congruence_m = m;
            report_sweep(sweep::run(&spec), json, out)
        }
        Verify::Character { field, n, b, json } => {
            let k = field.field()?;
            let t = theta(n, b, &k)?;
            let mut failures = Vec::new();
            for chi in enumerate_characters(&k) {
                let r = character_identity_check(&t, &chi)?;
                if json {
                    emit(out, to_value(&r));
                } else {
                    emit(
                        out,
                        format!(
                            "χ = {}: {} = {} [{}]",
                            r.label,
                            r.direct,
                            r.oracle,
                            if r.holds { "ok" } else { "FAIL" }
                        ),
                    );
                }
                if !r.holds {
                    failures.push(to_value(&r));
                }
            }
            let reconstructed = fourier_reconstruct(&t.value)?;
            if reconstructed != t.value {
                return Err(Failure::Identity(json!({
                    "identity": "fourier_inversion",
                    "theta": to_value(&t.value),
                    "reconstructed": to_value(&reconstructed),
                })));
            }
            if !json {
                emit(out, "Fourier inversion reconstructs Θ");
            }
            match failures.into_iter().next() {
                Some(first) => Err(Failure::Identity(first)),
                None => Ok(()),
            }
        }
        Verify::All { max_f, json } => {
            report_sweep(sweep::run(&SweepSpec::standard(max_f)), json, out)
        }
    }
}

fn report_sweep(outcome: SweepOutcome, json: bool, out: &mut dyn Write) -> Outcome {
    if json {
        for r in &outcome.records {
            emit(out, to_value(r));
        }
        for s in &outcome.summaries {
            emit(out, json!({ "summary": to_value(s) }));
        }
    } else {
        for r in outcome.records.iter().filter(|r| !r.ok) {
            emit(out, format!("FAIL {}", to_value(r)));
        }
        for s in &outcome.summaries {
            emit(
                out,
                format!(
                    "{:<12} {:>6} checked  {:>6} passed  {:>4} failed",
                    to_value(&s.check).as_str().unwrap_or_default(),
                    s.total,
                    s.passed,
                    s.failed
                ),
            );
        }
    }
    match outcome.first_failure() {
        Some(r) => Err(Failure::Identity(to_value(r))),
        None => Ok(()),
    }
}
