//! Problem and config file formats, trace emission, and the summary/report
//! payloads behind the CLI. Problems and configs are JSON with a
//! `schema_version` field; traces are JSONL with one iteration record per
//! line. Floats round-trip exactly through serde_json's shortest
//! representation, so identical runs produce identical bytes. File writes
//! go through a temp-file-and-rename so readers never observe a partial
//! file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::monotone::MonotoneMap;
use crate::operators::{FneOperator, OperatorStack};
use crate::solver::{
    BetaSchedule, ErrorModel, IterationRecord, LambdaSchedule, MuChoice, ScmConfig, SolveStatus,
};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable supplying the default seed when a config omits one.
pub const SEED_ENV_VAR: &str = "SCM_SEED";

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_epsilon() -> f64 {
    0.5
}

fn default_trace_every() -> u64 {
    1
}

fn default_error() -> ErrorSpec {
    ErrorSpec::None
}

// ---- problem schema --------------------------------------------------------

/// On-disk problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub dim: usize,
    pub operators: Vec<OperatorSpec>,
    #[serde(rename = "F")]
    pub f: MapSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_solution: Option<Vec<f64>>,
}

/// Operator descriptor; matrices are row-major nested arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OperatorSpec {
    Halfspace { a: Vec<f64>, b: f64 },
    Hyperplane { a: Vec<f64>, b: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    SoftThreshold { t: f64 },
    LinearResolvent { #[serde(rename = "A")] a: Vec<Vec<f64>>, r: f64 },
}

/// Map descriptor. The affine kind accepts optional `(eta, kappa)`
/// declarations; see `MonotoneMap::affine_with_constants` for the
/// acceptance rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    ClosestPoint {
        a: Vec<f64>,
    },
    Affine {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
    },
}

/// A validated in-memory problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub dim: usize,
    pub stack: OperatorStack,
    pub f: MonotoneMap,
    pub known_solution: Option<Vec<f64>>,
}

impl ProblemFile {
    pub fn parse(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: ProblemFile = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json_atomic(path, self)
    }

    /// Validates every field and builds the operator stack and map.
    pub fn build(&self) -> Result<Problem> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidProblem(format!(
                "schema_version = {} unsupported, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidProblem("dim must be >= 1".into()));
        }
        if self.operators.is_empty() {
            return Err(Error::InvalidProblem(
                "operators must be nonempty (m >= 1)".into(),
            ));
        }
        let mut ops = Vec::with_capacity(self.operators.len());
        for (i, spec) in self.operators.iter().enumerate() {
            let op = build_operator(spec)
                .map_err(|e| Error::InvalidProblem(format!("operators[{i}]: {e}")))?;
            ops.push(op);
        }
        let stack = OperatorStack::new(ops, self.dim)
            .map_err(|e| Error::InvalidProblem(format!("operators: {e}")))?;
        let f = build_map(&self.f).map_err(|e| Error::InvalidProblem(format!("F: {e}")))?;
        if let Some(d) = f.dim() {
            if d != self.dim {
                return Err(Error::InvalidProblem(format!(
                    "F: dimension {d} does not match problem dim {}",
                    self.dim
                )));
            }
        }
        if let Some(known) = &self.known_solution {
            if known.len() != self.dim {
                return Err(Error::InvalidProblem(format!(
                    "known_solution: dimension {} does not match problem dim {}",
                    known.len(),
                    self.dim
                )));
            }
            if !known.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidProblem(
                    "known_solution: entries must be finite".into(),
                ));
            }
        }
        Ok(Problem {
            dim: self.dim,
            stack,
            f,
            known_solution: self.known_solution.clone(),
        })
    }
}

fn build_operator(spec: &OperatorSpec) -> Result<FneOperator> {
    match spec {
        OperatorSpec::Halfspace { a, b } => FneOperator::halfspace(a.clone(), *b),
        OperatorSpec::Hyperplane { a, b } => FneOperator::hyperplane(a.clone(), *b),
        OperatorSpec::Ball { center, radius } => FneOperator::ball(center.clone(), *radius),
        OperatorSpec::Box { lo, hi } => FneOperator::axis_box(lo.clone(), hi.clone()),
        OperatorSpec::SoftThreshold { t } => FneOperator::soft_threshold(*t),
        OperatorSpec::LinearResolvent { a, r } => {
            FneOperator::linear_resolvent(Matrix::from_rows(a.clone())?, *r)
        }
    }
}

fn build_map(spec: &MapSpec) -> Result<MonotoneMap> {
    match spec {
        MapSpec::Identity => Ok(MonotoneMap::identity()),
        MapSpec::ClosestPoint { a } => MonotoneMap::closest_point(a.clone()),
        MapSpec::Affine { a, b, eta, kappa } => {
            let matrix = Matrix::from_rows(a.clone())?;
            match (eta, kappa) {
                (Some(e), Some(k)) => {
                    MonotoneMap::affine_with_constants(matrix, b.clone(), *e, *k)
                }
                (None, None) => MonotoneMap::affine(matrix, b.clone()),
                _ => Err(Error::InvalidMap(
                    "eta and kappa must be declared together or not at all".into(),
                )),
            }
        }
    }
}

// ---- config schema ---------------------------------------------------------

/// On-disk run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub mu: MuSpec,
    pub beta: BetaSpec,
    pub lambda: LambdaSpec,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_error")]
    pub error: ErrorSpec,
    pub max_iters: u64,
    pub residual_tol: f64,
    #[serde(default = "default_trace_every")]
    pub trace_every: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `"auto"` or a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuSpec {
    Keyword(String),
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BetaSpec {
    Power { beta0: f64, p: f64 },
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LambdaSpec {
    Constant { value: f64 },
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ErrorSpec {
    None,
    PowerRandom {
        c: f64,
        q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    PowerFixed {
        c: f64,
        q: f64,
        direction: Vec<f64>,
    },
}

impl ConfigFile {
    pub fn parse(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: ConfigFile = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json_atomic(path, self)
    }

    /// Validates against the convergence hypotheses and assembles the run
    /// configuration. `allow_unsafe_error` admits non-summable error models
    /// (`q <= 1`), which the theory does not cover; it is gated behind the
    /// CLI `--unsafe-error` flag. The seed defaults to the `SCM_SEED`
    /// environment variable, then 0.
    pub fn build(&self, allow_unsafe_error: bool) -> Result<ScmConfig> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "schema_version = {} unsupported, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        let mu = match &self.mu {
            MuSpec::Keyword(word) if word == "auto" => MuChoice::Auto,
            MuSpec::Keyword(word) => {
                return Err(Error::InvalidConfig(format!(
                    "mu = {word:?} not recognized; use \"auto\" or a number in (0, 2*eta/kappa^2)"
                )));
            }
            MuSpec::Value(v) => MuChoice::Fixed(*v),
        };
        let beta = match &self.beta {
            BetaSpec::Power { beta0, p } => BetaSchedule::power(*beta0, *p)?,
            BetaSpec::Explicit { values } => BetaSchedule::explicit(values.clone())?,
        };
        let lambda = match &self.lambda {
            LambdaSpec::Constant { value } => LambdaSchedule::constant(*value, self.epsilon)?,
            LambdaSpec::Explicit { values } => {
                LambdaSchedule::explicit(values.clone(), self.epsilon)?
            }
        };
        let seed = match self.seed {
            Some(s) => s,
            None => seed_from_env(),
        };
        let error = match &self.error {
            ErrorSpec::None => ErrorModel::None,
            ErrorSpec::PowerRandom { c, q, seed: error_seed } => {
                let s = error_seed.unwrap_or(seed);
                if allow_unsafe_error {
                    ErrorModel::power_random_unchecked(*c, *q, s)?
                } else {
                    ErrorModel::power_random(*c, *q, s)?
                }
            }
            ErrorSpec::PowerFixed { c, q, direction } => {
                if allow_unsafe_error {
                    ErrorModel::power_fixed_unchecked(*c, *q, direction.clone())?
                } else {
                    ErrorModel::power_fixed(*c, *q, direction.clone())?
                }
            }
        };
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if !(self.residual_tol.is_finite() && self.residual_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "residual_tol = {} must be finite and >= 0",
                self.residual_tol
            )));
        }
        if self.trace_every < 1 {
            return Err(Error::InvalidConfig("trace_every must be >= 1".into()));
        }
        Ok(ScmConfig {
            mu,
            beta,
            lambda,
            error,
            max_iters: self.max_iters,
            residual_tol: self.residual_tol,
            trace_every: self.trace_every,
            seed,
        })
    }
}

fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV_VAR)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

// ---- run outputs -----------------------------------------------------------

/// Summary written after a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub x_final: Vec<f64>,
    pub status: SolveStatus,
    pub iters: u64,
    pub final_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_to_known: Option<f64>,
}

/// Output of the `oracle` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleOutput {
    pub schema_version: u32,
    pub status: OracleStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    /// Active halfspace indices at the solution; all-halfspace problems only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_set: Option<Vec<usize>>,
    /// KKT multipliers of the variational inequality, aligned with
    /// `active_set`; all-halfspace problems only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Ok,
    Infeasible,
}

// ---- serialization helpers --------------------------------------------------

/// Serializes to a temp file in the target directory, then renames over the
/// destination.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })?;
    write_atomic(path, text.as_bytes())
}

/// One JSON object per line.
pub fn write_jsonl_trace(path: &Path, trace: &[IterationRecord]) -> Result<()> {
    let mut buffer = String::new();
    for record in trace {
        let line = serde_json::to_string(record).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
        buffer.push_str(&line);
        buffer.push('\n');
    }
    write_atomic(path, buffer.as_bytes())
}

pub fn read_jsonl_trace(path: &Path) -> Result<Vec<IterationRecord>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut trace = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let record: IterationRecord =
            serde_json::from_str(line).map_err(|source| Error::Json {
                path: path.display().to_string(),
                source,
            })?;
        trace.push(record);
    }
    Ok(trace)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    fs::write(&tmp, bytes).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_problem_json() -> &'static str {
        r#"{
            "schema_version": 1,
            "dim": 2,
            "operators": [
                {"type": "halfspace", "a": [-1.0, -1.0], "b": -1.0},
                {"type": "halfspace", "a": [-1.0, 0.0], "b": 0.0}
            ],
            "F": {"type": "identity"},
            "known_solution": [0.5, 0.5]
        }"#
    }

    fn sample_config_json() -> &'static str {
        r#"{
            "schema_version": 1,
            "mu": "auto",
            "beta": {"type": "power", "beta0": 1.0, "p": 1.0},
            "lambda": {"type": "constant", "value": 0.5},
            "epsilon": 0.5,
            "error": {"type": "none"},
            "max_iters": 1000,
            "residual_tol": 0.0,
            "trace_every": 10,
            "seed": 7
        }"#
    }

    #[test]
    fn problem_round_trip_is_identical() {
        let file: ProblemFile = serde_json::from_str(sample_problem_json()).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let reparsed: ProblemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file, reparsed);
        let problem = file.build().unwrap();
        assert_eq!(problem.dim, 2);
        assert_eq!(problem.stack.len(), 2);
    }

    #[test]
    fn config_round_trip_and_build() {
        let file: ConfigFile = serde_json::from_str(sample_config_json()).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let reparsed: ConfigFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file, reparsed);
        let cfg = file.build(false).unwrap();
        assert_eq!(cfg.max_iters, 1000);
        assert_eq!(cfg.trace_every, 10);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.mu, MuChoice::Auto);
    }

    #[test]
    fn mu_accepts_number_and_rejects_junk() {
        let json = sample_config_json().replace("\"auto\"", "0.5");
        let file: ConfigFile = serde_json::from_str(&json).unwrap();
        assert_eq!(file.build(false).unwrap().mu, MuChoice::Fixed(0.5));
        let json = sample_config_json().replace("\"auto\"", "\"fast\"");
        let file: ConfigFile = serde_json::from_str(&json).unwrap();
        let err = file.build(false).unwrap_err().to_string();
        assert!(err.contains("auto"), "{err}");
    }

    #[test]
    fn nonsummable_error_gated() {
        let json = sample_config_json().replace(
            r#"{"type": "none"}"#,
            r#"{"type": "power_random", "c": 0.1, "q": 0.9}"#,
        );
        let file: ConfigFile = serde_json::from_str(&json).unwrap();
        let err = file.build(false).unwrap_err().to_string();
        assert!(err.contains("summability"), "{err}");
        assert!(file.build(true).is_ok());
    }

    #[test]
    fn power_p_above_one_names_divergence_hypothesis() {
        let json = sample_config_json().replace("\"p\": 1.0", "\"p\": 1.5");
        let file: ConfigFile = serde_json::from_str(&json).unwrap();
        let err = file.build(false).unwrap_err().to_string();
        assert!(err.contains("divergence"), "{err}");
    }

    #[test]
    fn error_seed_defaults_to_run_seed() {
        let json = sample_config_json().replace(
            r#"{"type": "none"}"#,
            r#"{"type": "power_random", "c": 0.1, "q": 1.5}"#,
        );
        let file: ConfigFile = serde_json::from_str(&json).unwrap();
        let cfg = file.build(false).unwrap();
        match cfg.error {
            ErrorModel::PowerRandom { seed, .. } => assert_eq!(seed, 7),
            _ => panic!("expected power_random"),
        }
    }

    #[test]
    fn problem_validation_names_offending_field() {
        let json = sample_problem_json().replace("[-1.0, -1.0]", "[0.0, 0.0]");
        let file: ProblemFile = serde_json::from_str(&json).unwrap();
        let err = file.build().unwrap_err().to_string();
        assert!(err.contains("operators[0]"), "{err}");
    }

    #[test]
    fn affine_map_with_declared_constants() {
        let json = r#"{
            "dim": 2,
            "operators": [{"type": "ball", "center": [0.0, 0.0], "radius": 1.0}],
            "F": {"type": "affine", "A": [[1.0, 0.0], [0.0, 2.0]], "b": [0.0, 0.0],
                   "eta": 1.0, "kappa": 2.0}
        }"#;
        let file: ProblemFile = serde_json::from_str(json).unwrap();
        let problem = file.build().unwrap();
        assert_eq!(problem.f.eta(), 1.0);
        assert_eq!(problem.f.kappa(), 2.0);
    }

    #[test]
    fn trace_jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.jsonl");
        let trace = vec![
            IterationRecord {
                n: 1,
                beta_n: 1.0,
                lambda_n: 0.5,
                fixed_point_residual: 0.25,
                step_norm: 1.5,
                error_norm_total: 0.0,
                dist_to_known: None,
            },
            IterationRecord {
                n: 2,
                beta_n: 0.5,
                lambda_n: 0.5,
                fixed_point_residual: 0.125,
                step_norm: 0.75,
                error_norm_total: 0.009765625,
                dist_to_known: Some(0.3333333333333333),
            },
        ];
        write_jsonl_trace(&path, &trace).unwrap();
        let back = read_jsonl_trace(&path).unwrap();
        assert_eq!(trace, back);
    }

    #[test]
    fn atomic_write_replaces_existing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_json_atomic(&path, &serde_json::json!({"v": 1})).unwrap();
        write_json_atomic(&path, &serde_json::json!({"v": 2})).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains('2'));
        assert!(!dir.path().join("out.json.tmp").exists());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = ProblemFile::parse(Path::new("/nonexistent/problem.json")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
