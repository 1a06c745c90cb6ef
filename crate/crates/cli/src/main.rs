use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use blab_core::decomposition::{bvn_decompose, mirsky_decompose, DecompositionError, FiniteBlock};
use blab_core::matrices::{CoeffMatrix, MatrixClass};
use blab_core::scalar::{Rational, Scalar, FLOAT_TOLERANCE};
use blab_core::suites::{run_suite, Arithmetic, OutputFormat, RunConfig, Suite, SuiteError};

const EXIT_ASSERTION: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;
const EXIT_BUDGET: u8 = 5;

#[derive(Parser)]
#[command(name = "blab", version, about = "Doubly stochastic matrix laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a matrix file as Permutation, PS, DS, DSS_strict or Other.
    Classify {
        file: PathBuf,
        /// Read entries as floats instead of exact rationals.
        #[arg(long)]
        float: bool,
    },
    /// Decompose a finite block into (partial) permutation matrices.
    Decompose {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Exact rational arithmetic (the default).
        #[arg(long, conflicts_with = "float")]
        exact: bool,
        /// Float arithmetic with residual tolerance 1e-9.
        #[arg(long)]
        float: bool,
    },
    /// Run a verification suite and print its report.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long)]
        perms: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long = "max-n")]
        max_n: Option<usize>,
        #[arg(long = "max-m")]
        max_m: Option<usize>,
        #[arg(long, env = "BLAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Out::Json)]
        out: Out,
        /// Run randomized trials in float arithmetic.
        #[arg(long)]
        float: bool,
        /// Tolerance for verdicts and float comparisons (float mode only).
        #[arg(long, requires = "float")]
        tol: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Bvn,
    Mirsky,
}

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Isbell,
    Topology,
    Exposed,
    Commutant,
    Span,
    Contraction,
    Extremality,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Isbell => Suite::Isbell,
            SuiteArg::Topology => Suite::Topology,
            SuiteArg::Exposed => Suite::Exposed,
            SuiteArg::Commutant => Suite::Commutant,
            SuiteArg::Span => Suite::Span,
            SuiteArg::Contraction => Suite::Contraction,
            SuiteArg::Extremality => Suite::Extremality,
        }
    }
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn parse_json(path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn classify<S: Scalar>(value: &Value) -> Result<String, Failure> {
    let matrix: CoeffMatrix<S> = match value {
        Value::Array(_) | Value::Object(_) if value.get("tail").is_none() => {
            FiniteBlock::<S>::from_json_value(value)
                .map(|b| b.to_matrix())
                .or_else(|_| dense_any_sign::<S>(value))?
        }
        _ => CoeffMatrix::from_json_str(&value.to_string()).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?,
    };
    let class = matrix.classify();
    let mut out = format!("{class}\n");
    if class == MatrixClass::Other {
        for violation in matrix.violations() {
            out.push_str(&format!("  {violation}\n"));
        }
    }
    Ok(out)
}

/// Dense rows that may contain negative entries, for classification only.
fn dense_any_sign<S: Scalar>(value: &Value) -> Result<CoeffMatrix<S>, Failure> {
    let rows = value.get("rows").unwrap_or(value);
    let rows: Vec<Vec<S>> = rows
        .as_array()
        .ok_or_else(|| Failure::new(EXIT_PARSE, "expected a matrix document or dense rows"))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Failure::new(EXIT_PARSE, "each row must be an array"))?
                .iter()
                .map(|v| blab_core::scalar::scalar_from_json::<S>(v).map_err(|e| Failure::new(EXIT_PARSE, e.to_string())))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(CoeffMatrix::from_dense(&rows))
}

fn decomposition_failure(e: DecompositionError) -> Failure {
    let code = match e {
        DecompositionError::NotDoublyStochastic { .. }
        | DecompositionError::NotSubstochastic { .. }
        | DecompositionError::NegativeEntry { .. } => EXIT_PRECONDITION,
        DecompositionError::NotSquare { .. } | DecompositionError::Format(_) => EXIT_PARSE,
        _ => EXIT_ASSERTION,
    };
    Failure::new(code, e.to_string())
}

fn decompose<S: Scalar>(value: &Value, mode: Mode) -> Result<String, Failure> {
    let block = FiniteBlock::<S>::from_json_value(value).map_err(decomposition_failure)?;
    let n = block.size();
    let combination = match mode {
        Mode::Bvn => bvn_decompose(&block),
        Mode::Mirsky => mirsky_decompose(&block),
    }
    .map_err(decomposition_failure)?;
    let rebuilt = combination.reconstruct(n).map_err(decomposition_failure)?;
    let residual = rebuilt
        .entries()
        .zip(block.entries())
        .map(|((_, _, a), (_, _, b))| (a.clone() - b).abs())
        .fold(S::zero(), |acc, d| if d > acc { d } else { acc });
    if !residual.is_negligible() {
        return Err(Failure::new(
            EXIT_ASSERTION,
            format!("reconstruction residual {residual} exceeds tolerance"),
        ));
    }
    let report = json!({
        "mode": match mode { Mode::Bvn => "bvn", Mode::Mirsky => "mirsky" },
        "arithmetic": if S::EXACT { "exact" } else { "float" },
        "n": n,
        "terms": combination.to_json_value(),
        "residual": residual.to_json(),
    });
    Ok(serde_json::to_string_pretty(&report).expect("serializable") + "\n")
}

fn suite_failure(e: SuiteError) -> Failure {
    let code = match e {
        SuiteError::BudgetExceeded { .. } => EXIT_BUDGET,
        SuiteError::InvalidParameter(_) => EXIT_PARSE,
    };
    Failure::new(code, e.to_string())
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Classify { file, float } => {
            let value = parse_json(&file)?;
            if float {
                classify::<f64>(&value)
            } else {
                classify::<Rational>(&value)
            }
        }
        Command::Decompose { file, mode, float, .. } => {
            let value = parse_json(&file)?;
            if float {
                decompose::<f64>(&value, mode)
            } else {
                decompose::<Rational>(&value, mode)
            }
        }
        Command::Verify {
            suite,
            blocks,
            perms,
            trials,
            max_n,
            max_m,
            seed,
            out,
            float,
            tol,
        } => {
            let config = RunConfig {
                arithmetic: if float {
                    Arithmetic::Float {
                        tol: tol.unwrap_or(FLOAT_TOLERANCE),
                    }
                } else {
                    Arithmetic::Exact
                },
                seed,
                output: match out {
                    Out::Json => OutputFormat::Json,
                    Out::Csv => OutputFormat::Csv,
                },
                blocks,
                perms,
                trials,
                max_n,
                max_m,
            };
            let report = run_suite(suite.into(), &config).map_err(suite_failure)?;
            let text = report.render(config.output);
            if report.passed() {
                Ok(text)
            } else {
                print!("{text}");
                let failed: Vec<String> = report.failures().map(|a| format!("  {}: measured {}, bound {}", a.name, a.measured, a.bound)).collect();
                Err(Failure::new(
                    EXIT_ASSERTION,
                    format!("{} assertion(s) failed:\n{}", failed.len(), failed.join("\n")),
                ))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
