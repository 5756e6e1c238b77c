//! Command-line front end: verification suites, triplet evaluation, and the
//! point-interaction solver. Data goes to stdout, diagnostics to stderr.
//! Exit codes: 0 success, 1 input validation, 2 numerical failure,
//! 3 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use kreinlab::cayley::cayley_transform;
use kreinlab::error::Error;
use kreinlab::extensions::{krein_resolvent, q_operator, secular, BoundaryPair};
use kreinlab::pointint::{BoundState, GridSpec, PointModel};
use kreinlab::triplet::OperatorTriplet;
use kreinlab::verify::{run_verify, VerifyConfig};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser)]
#[command(name = "kreinlab", version, about = "Krein resolvent calculus on matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seeded identity suite and emit a JSON report
    Verify(VerifyArgs),
    /// Operations on an operator triplet file
    #[command(subcommand)]
    Triplet(TripletCommand),
    /// Point-interaction model operations
    #[command(subcommand)]
    Pointint(PointintCommand),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, default_value_t = 1)]
    m_min: usize,
    #[arg(long, default_value_t = 4)]
    m_max: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum TripletCommand {
    /// Evaluate a z-dependent quantity of the triplet
    Eval(EvalArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Triplet JSON file { "A0": ..., "Pi": ..., "Lambda": ... }
    #[arg(long)]
    input: PathBuf,
    /// Boundary pair JSON file { "beta0": ..., "beta1": ... }; required for
    /// q, krein, and secular
    #[arg(long)]
    pair: Option<PathBuf>,
    /// Spectral parameter as "a+bi"
    #[arg(long)]
    z: String,
    #[arg(long, value_enum)]
    what: EvalWhat,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalWhat {
    M,
    Q,
    Resolvent,
    Krein,
    Theta,
    Secular,
}

#[derive(Subcommand)]
enum PointintCommand {
    /// Locate real bound states on [zmin, zmax]
    Spectrum(SpectrumArgs),
    /// Tabulate the resolvent kernel on a lattice, emitting CSV
    Kernel(KernelArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// Model JSON file
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    zmin: f64,
    #[arg(long)]
    zmax: f64,
}

#[derive(Args)]
struct KernelArgs {
    /// Model JSON file
    #[arg(long)]
    model: PathBuf,
    /// Spectral parameter as "a+bi"
    #[arg(long)]
    z: String,
    /// Grid JSON file { "origin": ..., "step": ..., "shape": ..., "y": ... }
    #[arg(long)]
    grid: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

fn numerical_exit(e: &Error) -> u8 {
    match e {
        Error::ShapeMismatch(_)
        | Error::NonFinite
        | Error::NotHermitian(_)
        | Error::NotInvertible(_)
        | Error::RankDeficient
        | Error::NonRealCoupling
        | Error::InvalidInput(_) => EXIT_VALIDATION,
        _ => EXIT_NUMERICAL,
    }
}

fn fail(message: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

/// Parse "a+bi" / "a-bi" with optional whitespace; bare "a" and "bi" accepted.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Ok(re) = t.parse::<f64>() {
        return Ok(Complex64::new(re, 0.0));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Err(format!("cannot parse '{s}' as a+bi"));
    };
    let imag_part = |p: &str| -> Result<f64, String> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p.parse().map_err(|_| format!("cannot parse '{s}' as a+bi")),
        }
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re: f64 = body[..i]
                .parse()
                .map_err(|_| format!("cannot parse '{s}' as a+bi"))?;
            Ok(Complex64::new(re, imag_part(&body[i..])?))
        }
        None => Ok(Complex64::new(0.0, imag_part(body)?)),
    }
}

fn load_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

fn emit_json<T: Serialize>(value: &T) {
    // one canonical serialization so identical runs stay byte-identical
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    let cfg = VerifyConfig {
        seed: args.seed,
        instances: args.instances,
        n_range: (args.n_min, args.n_max),
        m_range: (args.m_min, args.m_max),
        tol: args.tol,
    };
    if let Err(msg) = cfg.validate() {
        return fail(msg, EXIT_VALIDATION);
    }
    match run_verify(&cfg) {
        Ok(report) => {
            emit_json(&report);
            eprintln!("elapsed: {:.3}s", report.elapsed_seconds);
            if report.pass {
                ExitCode::SUCCESS
            } else {
                fail("identity suite failed", EXIT_VERIFICATION)
            }
        }
        Err(e) => fail(&e, numerical_exit(&e)),
    }
}

fn cmd_eval(args: &EvalArgs) -> ExitCode {
    let triplet: OperatorTriplet = match load_json(&args.input) {
        Ok(t) => t,
        Err(msg) => return fail(msg, EXIT_VALIDATION),
    };
    let z = match parse_complex(&args.z) {
        Ok(z) => z,
        Err(msg) => return fail(msg, EXIT_VALIDATION),
    };
    let pair = match args.pair.as_ref() {
        Some(path) => match load_json::<BoundaryPair>(path) {
            Ok(p) => Some(p),
            Err(msg) => return fail(msg, EXIT_VALIDATION),
        },
        None => None,
    };
    let need_pair = || fail("--pair is required for q, krein, and secular", EXIT_VALIDATION);
    match args.what {
        EvalWhat::M => match triplet.m_operator(z) {
            Ok(m) => {
                emit_json(&m);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e, numerical_exit(&e)),
        },
        EvalWhat::Resolvent => match triplet.resolvent(z) {
            Ok(m) => {
                emit_json(&m);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e, numerical_exit(&e)),
        },
        EvalWhat::Theta => match cayley_transform(&triplet, z) {
            Ok(m) => {
                emit_json(&m);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e, numerical_exit(&e)),
        },
        EvalWhat::Q => match pair {
            Some(p) => match q_operator(&triplet, &p, z) {
                Ok(m) => {
                    emit_json(&m);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, numerical_exit(&e)),
            },
            None => need_pair(),
        },
        EvalWhat::Krein => match pair {
            Some(p) => match krein_resolvent(&triplet, &p, z) {
                Ok(m) => {
                    emit_json(&m);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, numerical_exit(&e)),
            },
            None => need_pair(),
        },
        EvalWhat::Secular => match pair {
            Some(p) => match secular(&triplet, &p, z) {
                Ok(d) => {
                    emit_json(&d);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, numerical_exit(&e)),
            },
            None => need_pair(),
        },
    }
}

#[derive(Serialize)]
struct SpectrumOutput {
    version: String,
    zmin: f64,
    zmax: f64,
    /// relative singular-value cutoff defining root multiplicity
    kernel_sv_factor: f64,
    /// relative bisection tolerance on root location
    root_xtol_factor: f64,
    bound_states: Vec<BoundState>,
}

fn cmd_spectrum(args: &SpectrumArgs) -> ExitCode {
    let model: PointModel = match load_json(&args.model) {
        Ok(m) => m,
        Err(msg) => return fail(msg, EXIT_VALIDATION),
    };
    match model.bound_states(args.zmin, args.zmax) {
        Ok(states) => {
            emit_json(&SpectrumOutput {
                version: env!("CARGO_PKG_VERSION").to_string(),
                zmin: args.zmin,
                zmax: args.zmax,
                kernel_sv_factor: 1e-8,
                root_xtol_factor: 1e-12,
                bound_states: states,
            });
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, numerical_exit(&e)),
    }
}

fn cmd_kernel(args: &KernelArgs) -> ExitCode {
    let model: PointModel = match load_json(&args.model) {
        Ok(m) => m,
        Err(msg) => return fail(msg, EXIT_VALIDATION),
    };
    let grid: GridSpec = match load_json(&args.grid) {
        Ok(g) => g,
        Err(msg) => return fail(msg, EXIT_VALIDATION),
    };
    let z = match parse_complex(&args.z) {
        Ok(z) => z,
        Err(msg) => return fail(msg, EXIT_VALIDATION),
    };
    let rows = match model.kernel_grid(z, &grid) {
        Ok(r) => r,
        Err(e) => return fail(&e, numerical_exit(&e)),
    };
    let mut csv = String::from("x1,x2,x3,re,im,excluded\n");
    for row in &rows {
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.x[0],
            row.x[1],
            row.x[2],
            fmt(row.re),
            fmt(row.im),
            u8::from(row.excluded)
        ));
    }
    if let Err(e) = std::fs::write(&args.out, csv) {
        return fail(format!("cannot write {}: {e}", args.out.display()), EXIT_VALIDATION);
    }
    eprintln!("wrote {} rows to {}", rows.len(), args.out.display());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("KREINLAB_THREADS") {
        match v.parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
            Err(_) => return fail("KREINLAB_THREADS must be a nonnegative integer", EXIT_VALIDATION),
        }
    }
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Triplet(TripletCommand::Eval(args)) => cmd_eval(args),
        Command::Pointint(PointintCommand::Spectrum(args)) => cmd_spectrum(args),
        Command::Pointint(PointintCommand::Kernel(args)) => cmd_kernel(args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("-0.5 - 3i").unwrap(), Complex64::new(-0.5, -3.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e-4i").unwrap(), Complex64::new(1e-3, 2e-4));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }
}
