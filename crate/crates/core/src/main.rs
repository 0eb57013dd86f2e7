use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use abscompat::format::{read_matrix_file, to_json_string, write_json, MatrixJson};
use abscompat::harness::{generate, run_property_suite, Generated, GeneratorConfig, GeneratorKind, Padding};
use abscompat::{
    canonical_decompose, check_characterization, construct_pair, five_block_decompose,
    halmos_decompose, is_abs_compatible, Error, ProjectionMatrix, Result, Tolerance,
    UnitIntervalElement,
};

/// Absolute compatibility of matrix contractions: checks, decompositions and
/// property suites.
#[derive(Parser)]
#[command(name = "abscompat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// Bound on operator-norm residuals.
    #[arg(long = "tol", default_value_t = Tolerance::DEFAULT_RES)]
    tol_res: f64,
    /// Eigenvalue classification window.
    #[arg(long = "tol-eig", default_value_t = Tolerance::DEFAULT_EIG)]
    tol_eig: f64,
}

impl TolArgs {
    fn tolerance(&self) -> Result<Tolerance> {
        Tolerance::new(self.tol_eig, self.tol_res)
    }
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance as matrix JSON files.
    Gen {
        #[arg(long, value_parser = parse_kind)]
        kind: GeneratorKind,
        /// Base dimension (the output dimension for generic-projections).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = abscompat::harness::DEFAULT_MARGIN)]
        margin: f64,
        /// Five-block padding for compatible-pair, as `p1,p2,n1,n2`.
        #[arg(long, value_parser = parse_padding)]
        padding: Option<Padding>,
        /// Fixed principal angle for generic-projections.
        #[arg(long)]
        angle: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test `|a − b| + |1 − a − b| = 1`; exit 0 iff it holds.
    Check(PairArgs),
    /// Block-condition residuals against a witness projection; exit 0 iff certified.
    Characterize {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        p1: PathBuf,
    },
    /// Canonical form of a strict compatible pair, or the five-block reduction.
    Decompose {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        five_block: bool,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the doubled compatible pair from a strict commuting pair.
    Construct {
        #[command(flatten)]
        pair: PairArgs,
        /// Directory receiving a1.json and b1.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Canonical form of two projections in generic position.
    Halmos {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Run every registered property; exit 0 iff all pass.
    Suite {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long = "max-n", default_value_t = 16)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tol: TolArgs,
        /// Write the full report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> std::result::Result<GeneratorKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_padding(s: &str) -> std::result::Result<Padding, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad padding '{s}': {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [p1, p2, n1, n2] => Ok(Padding { p1, p2, n1, n2 }),
        _ => Err(format!("padding needs four counts p1,p2,n1,n2, got '{s}'")),
    }
}

const EXIT_FALSE: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Serialize)]
struct Failure<'a> {
    status: &'static str,
    reason: &'a str,
    message: String,
}

fn print<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", to_json_string(value)?);
    Ok(())
}

fn unit(path: &Path, tol: &Tolerance) -> Result<UnitIntervalElement> {
    read_matrix_file(path)?.to_unit_interval(tol)
}

fn projection(path: &Path, tol: &Tolerance) -> Result<ProjectionMatrix> {
    read_matrix_file(path)?.to_projection(tol)
}

fn verdict(ok: bool) -> u8 {
    if ok {
        0
    } else {
        EXIT_FALSE
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen { kind, n, seed, margin, padding, angle, out } => {
            let mut cfg = GeneratorConfig::new(kind, n, seed).with_margin(margin);
            if let Some(p) = padding {
                cfg = cfg.with_padding(p);
            }
            if let Some(theta) = angle {
                cfg = cfg.with_fixed_angle(theta);
            }
            std::fs::create_dir_all(&out)?;
            let files: Vec<(&str, MatrixJson)> = match generate(&cfg)? {
                Generated::Single(a) => vec![("a.json", MatrixJson::from_matrix(a.as_matrix()))],
                Generated::Pair(a, b) => vec![
                    ("a.json", MatrixJson::from_matrix(a.as_matrix())),
                    ("b.json", MatrixJson::from_matrix(b.as_matrix())),
                ],
                Generated::Projections(p, q) => vec![
                    ("p.json", MatrixJson::from_projection(&p)),
                    ("q.json", MatrixJson::from_projection(&q)),
                ],
            };
            for (name, m) in &files {
                write_json(&out.join(name), m)?;
            }
            Ok(0)
        }
        Command::Check(pair) => {
            let tol = pair.tol.tolerance()?;
            let report = is_abs_compatible(&unit(&pair.a, &tol)?, &unit(&pair.b, &tol)?, &tol)?;
            print(&report)?;
            Ok(verdict(report.verdict))
        }
        Command::Characterize { pair, p1 } => {
            let tol = pair.tol.tolerance()?;
            let (a, b) = (unit(&pair.a, &tol)?, unit(&pair.b, &tol)?);
            let report = check_characterization(&a, &b, &projection(&p1, &tol)?, &tol)?;
            print(&report)?;
            Ok(verdict(report.certified))
        }
        Command::Decompose { pair, five_block, out } => {
            let tol = pair.tol.tolerance()?;
            let (a, b) = (unit(&pair.a, &tol)?, unit(&pair.b, &tol)?);
            let text = if five_block {
                to_json_string(&five_block_decompose(&a, &b, &tol)?)?
            } else {
                to_json_string(&canonical_decompose(&a, &b, &tol)?)?
            };
            if let Some(path) = out {
                std::fs::write(path, format!("{text}\n"))?;
            }
            println!("{text}");
            Ok(0)
        }
        Command::Construct { pair, out } => {
            let tol = pair.tol.tolerance()?;
            let (a1, b1) = construct_pair(&unit(&pair.a, &tol)?, &unit(&pair.b, &tol)?, &tol)?;
            std::fs::create_dir_all(&out)?;
            write_json(&out.join("a1.json"), &a1)?;
            write_json(&out.join("b1.json"), &b1)?;
            let report = is_abs_compatible(&a1, &b1, &tol)?;
            print(&report)?;
            Ok(0)
        }
        Command::Halmos { p, q, tol } => {
            let tol = tol.tolerance()?;
            let form = halmos_decompose(&projection(&p, &tol)?, &projection(&q, &tol)?, &tol)?;
            print(&form)?;
            Ok(0)
        }
        Command::Suite { trials, max_n, seed, tol, json } => {
            let tol = tol.tolerance()?;
            let report = run_property_suite(trials, max_n, seed, &tol)?;
            for p in &report.properties {
                let mark = if p.passed() { "PASS" } else { "FAIL" };
                eprintln!(
                    "{mark} {:<45} {:>4}/{:<4} max {:.3e} (bound {:.1e}) {:.2}s",
                    p.name,
                    p.trials - p.failures,
                    p.trials,
                    p.max_residual,
                    p.tolerance,
                    p.elapsed
                );
                if let Some(f) = &p.first_failure {
                    eprintln!("     first failure: trial {} dim {}: {}", f.trial, f.dim, f.detail);
                }
            }
            eprintln!(
                "{} properties, {} failures, {:.2}s",
                report.properties.len(),
                report.failures(),
                report.elapsed
            );
            if let Some(path) = json {
                write_json(&path, &report)?;
            }
            Ok(verdict(report.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = if e.is_precondition() { EXIT_PRECONDITION } else { EXIT_IO };
            let status = if e.is_precondition() { "precondition_failed" } else { "error" };
            let failure = Failure { status, reason: e.reason(), message: e.to_string() };
            match to_json_string(&failure) {
                Ok(s) => println!("{s}"),
                Err(_) => println!("{{\"status\":\"{status}\",\"reason\":\"{}\"}}", e.reason()),
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
