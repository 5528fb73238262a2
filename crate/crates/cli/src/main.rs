//! `cse`: construct, verify and classify solutions of
//! `f(xy) = f(x)g(y) + g(x)f(y) + h(x)h(y)` on finite semigroups.
//!
//! Exit codes: 0 success, 1 malformed input, 2 the input fails a
//! verification, 3 critical (an unclassifiable solution or a violated
//! structural property).

mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cossin::oracle::OracleConfig;
use cossin::scalar::json::ScalarJson;
use cossin::{Cyclo, Error, Scalar, C64};
use serde_json::Value;

use input::Env;

#[derive(Parser)]
#[command(name = "cse", version, about = "Cosine-sine equation on finite semigroups")]
struct Cli {
    /// Arithmetic: exact cyclotomic or double precision complex.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Float tolerance (ignored in exact mode).
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for the oracle.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Cayley tables.
    #[command(subcommand)]
    Sgp(Sgp),
    /// Multiplicative functions.
    #[command(subcommand)]
    Chars(Chars),
    /// The sine addition law.
    #[command(subcommand)]
    Sine(Sine),
    /// The ψ-equation.
    #[command(subcommand)]
    Psi(Psi),
    /// The cosine-sine equation itself.
    #[command(subcommand)]
    Cossin(Cossin),
    /// Numerical search for solutions.
    #[command(subcommand)]
    Oracle(Oracle),
    /// The equation f(xy) = f(x)g(y) + g(x)f(y) − g(x)g(y).
    #[command(subcommand)]
    Cor(Cor),
}

#[derive(Subcommand)]
enum Sgp {
    Check { table: String },
    /// E.g. `sgp make cyclic 3` or `sgp make adjoin_identity 'null(2)'`.
    Make { name: String, params: Vec<String> },
    Enum {
        n: usize,
        /// Keep one table per isomorphism class.
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        allow_n4: bool,
    },
}

#[derive(Subcommand)]
enum Chars {
    Enum { sgp: String },
}

#[derive(Subcommand)]
enum Sine {
    Solve { sgp: String, chi: String },
    Decompose { sgp: String, f: String, g: String },
}

#[derive(Subcommand)]
enum Psi {
    Solve { sgp: String, chi: String, phi: String },
}

#[derive(Subcommand)]
enum Cossin {
    Construct {
        #[arg(long)]
        variant: String,
        #[arg(long)]
        delta: Option<String>,
        /// JSON object of constants and functions, e.g.
        /// `{"c": "1/2", "chi": "char:1", "phi": "sine:1:0"}`.
        #[arg(long)]
        params: Option<String>,
        sgp: String,
    },
    Verify { sgp: String, f: String, g: String, h: String },
    Classify { sgp: String, f: String, g: String, h: String },
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = OracleConfig::default().attempts)]
    attempts: usize,
    #[arg(long, default_value_t = OracleConfig::default().classify_tol)]
    classify_tol: f64,
}

#[derive(Subcommand)]
enum Oracle {
    Solve {
        sgp: String,
        #[command(flatten)]
        args: OracleArgs,
    },
    Census {
        n: usize,
        #[command(flatten)]
        args: OracleArgs,
    },
}

#[derive(Args)]
pub struct CorArgs {
    #[arg(long)]
    family: u8,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    chi: Option<String>,
    #[arg(long)]
    chi1: Option<String>,
    #[arg(long)]
    chi2: Option<String>,
    #[arg(long)]
    phi: Option<String>,
}

#[derive(Subcommand)]
enum Cor {
    Construct {
        #[command(flatten)]
        args: CorArgs,
        sgp: String,
    },
    Classify { sgp: String, f: String, g: String },
}

/// A report and the exit code it carries.
pub struct Outcome {
    report: Value,
    code: u8,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, code: 0 }
    }

    fn failed(report: Value, code: u8) -> Self {
        Outcome { report, code }
    }
}

#[derive(Debug)]
pub struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotASolution(_) | Error::NotSinePair(_) | Error::Inconsistent(_) => 2,
            Error::Unclassifiable(_) | Error::NoAdmissibleDelta(_) => 3,
            _ => 1,
        };
        Failure {
            message: e.to_string(),
            code,
        }
    }
}

fn oracle_config(seed: u64, a: &OracleArgs) -> OracleConfig {
    OracleConfig {
        attempts: a.attempts,
        classify_tol: a.classify_tol,
        seed,
        ..OracleConfig::default()
    }
}

fn run_in<T: Scalar>(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = if T::is_exact() { 0.0 } else { cli.tol };
    match &cli.command {
        Command::Sgp(Sgp::Check { table }) => commands::sgp_check(table),
        Command::Sgp(Sgp::Make { name, params }) => commands::sgp_make(name, params),
        Command::Sgp(Sgp::Enum { n, dedup, allow_n4 }) => commands::sgp_enum(*n, *dedup, *allow_n4),
        Command::Chars(Chars::Enum { sgp }) => commands::chars_enum(&Env::<T>::new(sgp)?, tol),
        Command::Sine(Sine::Solve { sgp, chi }) => commands::sine_solve(&Env::<T>::new(sgp)?, chi, tol),
        Command::Sine(Sine::Decompose { sgp, f, g }) => {
            commands::sine_decompose(&Env::<T>::new(sgp)?, f, g, tol)
        }
        Command::Psi(Psi::Solve { sgp, chi, phi }) => {
            commands::psi_solve(&Env::<T>::new(sgp)?, chi, phi, tol)
        }
        Command::Cossin(Cossin::Construct {
            variant,
            delta,
            params,
            sgp,
        }) => commands::cossin_construct(
            &Env::<T>::new(sgp)?,
            variant,
            delta.as_deref(),
            params.as_deref(),
            tol,
        ),
        Command::Cossin(Cossin::Verify { sgp, f, g, h }) => {
            commands::cossin_verify(&Env::<T>::new(sgp)?, [f, g, h], tol)
        }
        Command::Cossin(Cossin::Classify { sgp, f, g, h }) => {
            commands::cossin_classify(&Env::<T>::new(sgp)?, [f, g, h], tol)
        }
        Command::Oracle(Oracle::Solve { sgp, args }) => {
            commands::oracle_solve(&input::semigroup(sgp)?, &oracle_config(cli.seed, args))
        }
        Command::Oracle(Oracle::Census { n, args }) => {
            commands::oracle_census(*n, &oracle_config(cli.seed, args))
        }
        Command::Cor(Cor::Construct { args, sgp }) => {
            commands::cor_construct(&Env::<T>::new(sgp)?, args, tol)
        }
        Command::Cor(Cor::Classify { sgp, f, g }) => {
            commands::cor_classify(&Env::<T>::new(sgp)?, f, g, tol)
        }
    }
}

/// Scalars in the notation of their `Display` impls.
fn scalar_text(v: &Value) -> Option<String> {
    let m = v.as_object()?;
    if m.contains_key("order") && m.contains_key("coeffs") {
        Cyclo::from_json(v).ok().map(|x| x.to_string())
    } else if m.len() == 2 && m.contains_key("re") && m.contains_key("im") {
        C64::from_json(v).ok().map(|x| x.to_string())
    } else {
        None
    }
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Object(_) => scalar_text(v),
        Value::Array(a) => {
            let parts: Option<Vec<String>> = a.iter().map(inline).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        Value::String(s) => Some(s.clone()),
        other => Some(other.to_string()),
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(x, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other).unwrap_or_default())),
    }
}

fn emit(cli: &Cli, report: &Value) -> std::io::Result<()> {
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(report).expect("plain data") + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(report, 0, &mut s);
            s
        }
    };
    match &cli.output {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    // usage errors are malformed input, not clap's default exit code 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.mode {
        ModeArg::Exact => run_in::<Cyclo>(&cli),
        ModeArg::Float => run_in::<C64>(&cli),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.report) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
