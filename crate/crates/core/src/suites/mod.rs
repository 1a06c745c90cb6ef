//! Reproducible verification suites.
//!
//! Every suite draws its random inputs from a stream derived from the run
//! seed and the suite name, one independent stream per trial, so reports
//! are byte-identical across runs and thread counts.

mod checks;
pub mod random;

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::lab::SeminormReport;
use crate::scalar::FLOAT_TOLERANCE;

pub use checks::isbell_case;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Isbell,
    Topology,
    Exposed,
    Commutant,
    Span,
    Contraction,
    Extremality,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Isbell,
        Suite::Topology,
        Suite::Exposed,
        Suite::Commutant,
        Suite::Span,
        Suite::Contraction,
        Suite::Extremality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Isbell => "isbell",
            Suite::Topology => "topology",
            Suite::Exposed => "exposed",
            Suite::Commutant => "commutant",
            Suite::Span => "span",
            Suite::Contraction => "contraction",
            Suite::Extremality => "extremality",
        }
    }

    /// The claim the suite checks.
    pub fn claim(self) -> &'static str {
        match self {
            Suite::Isbell => {
                "a convex combination of p finitary permutations stays at squared distance at least (n - p^2)/n \
                 from the block-average doubly stochastic matrix, witnessed on block n"
            }
            Suite::Topology => {
                "the rank-one sequence e_1 e_n^T converges strongly but not strongly*, \
                 and block-swap permutations converge weakly to zero"
            }
            Suite::Exposed => "every partial permutation is the unique maximizer of its exposing functional",
            Suite::Commutant => {
                "the commutant of the permutation representation of S_m is spanned by the identity \
                 and the all-ones matrix"
            }
            Suite::Span => {
                "n x n permutation matrices span a space of dimension (n-1)^2+1, while corners of \
                 finitary permutations span all n x n matrices"
            }
            Suite::Contraction => "doubly substochastic matrices are contractions",
            Suite::Extremality => {
                "doubly substochastic blocks are convex combinations of partial permutation matrices, \
                 and these are exactly the extreme points"
            }
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| SuiteError::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arithmetic {
    Exact,
    Float { tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Parameters of a suite run. Unset sizes fall back to per-suite defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub arithmetic: Arithmetic,
    pub seed: u64,
    pub output: OutputFormat,
    pub blocks: Option<usize>,
    pub perms: Option<usize>,
    pub trials: Option<usize>,
    pub max_n: Option<usize>,
    pub max_m: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            arithmetic: Arithmetic::Exact,
            seed: 0,
            output: OutputFormat::Json,
            blocks: None,
            perms: None,
            trials: None,
            max_n: None,
            max_m: None,
        }
    }
}

impl RunConfig {
    /// Tolerance for verdicts and float comparisons.
    pub fn tolerance(&self) -> f64 {
        match self.arithmetic {
            Arithmetic::Exact => FLOAT_TOLERANCE,
            Arithmetic::Float { tol } => tol,
        }
    }

    fn to_json(&self) -> Value {
        let arithmetic = match self.arithmetic {
            Arithmetic::Exact => json!("exact"),
            Arithmetic::Float { tol } => json!({ "float": tol }),
        };
        json!({
            "arithmetic": arithmetic,
            "seed": self.seed,
            "blocks": self.blocks,
            "perms": self.perms,
            "trials": self.trials,
            "max_n": self.max_n,
            "max_m": self.max_m,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuiteError {
    #[error("{param} = {requested} exceeds the budget of {limit}")]
    BudgetExceeded {
        param: &'static str,
        requested: usize,
        limit: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// One checked statement: what was measured, against which bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub measured: Value,
    pub bound: Value,
    pub holds: bool,
    /// Extra context; for failures, the offending input.
    pub detail: Option<Value>,
}

impl Assertion {
    pub fn new(name: impl Into<String>, measured: Value, bound: Value, holds: bool) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            holds,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("name".into(), json!(self.name));
        map.insert("measured".into(), self.measured.clone());
        map.insert("bound".into(), self.bound.clone());
        map.insert("holds".into(), json!(self.holds));
        if let Some(detail) = &self.detail {
            map.insert("detail".into(), detail.clone());
        }
        Value::Object(map)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: RunConfig,
    pub assertions: Vec<Assertion>,
    pub reports: Vec<SeminormReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.holds)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "verifies": self.suite.claim(),
            "config": self.config.to_json(),
            "assertions": self.assertions.iter().map(Assertion::to_json).collect::<Vec<_>>(),
            "reports": self.reports.iter().map(SeminormReport::to_json).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }

    /// One row per assertion.
    pub fn to_csv(&self) -> String {
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["suite", "assertion", "measured", "bound", "holds"])
            .expect("in-memory write");
        for a in &self.assertions {
            writer
                .write_record([
                    self.suite.name().to_string(),
                    a.name.clone(),
                    cell(&a.measured),
                    cell(&a.bound),
                    a.holds.to_string(),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut text = serde_json::to_string_pretty(&self.to_json()).expect("serializable report");
                text.push('\n');
                text
            }
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

/// Runs one suite.
pub fn run_suite(suite: Suite, config: &RunConfig) -> Result<SuiteReport, SuiteError> {
    if let Arithmetic::Float { tol } = config.arithmetic {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(SuiteError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
    }
    let (assertions, reports) = match suite {
        Suite::Isbell => checks::isbell(config)?,
        Suite::Topology => checks::topology(config)?,
        Suite::Exposed => checks::exposed(config)?,
        Suite::Commutant => checks::commutant(config)?,
        Suite::Span => checks::span(config)?,
        Suite::Contraction => checks::contraction(config)?,
        Suite::Extremality => checks::extremality(config)?,
    };
    Ok(SuiteReport {
        suite,
        config: config.clone(),
        assertions,
        reports,
    })
}
