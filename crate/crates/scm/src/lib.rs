//! Solver toolkit for variational inequalities over the intersection of
//! fixed-point sets of firmly nonexpansive operators.
//!
//! The constraint set is given implicitly as `C = ∩ Fix T_i` for a stack of
//! firmly nonexpansive operators `T_i` (projections, proximal maps, linear
//! resolvents). The objective direction is a strongly monotone, Lipschitz
//! continuous map `F`. The sequential constraint method drives the iterate
//! with a damped step `x - μ β_n F(x)` followed by one pass through the
//! operator stack, with optional norm-controlled error injection per
//! operator, and a relaxed convex combination of the two:
//!
//! ```text
//! φ_0 = x_n - μ β_n F(x_n)
//! φ_i = T_i φ_{i-1} + e_i,   i = 1..m
//! x_{n+1} = (1 - λ_n) φ_0 + λ_n φ_m
//! ```
//!
//! Alongside the solver the crate ships:
//!
//! - [`oracle`]: exact desk-scale references — polyhedral projection by KKT
//!   active-set enumeration, a cyclic-correction intersection projector, and
//!   a projected-iteration reference solver used as ground truth in tests;
//! - [`diagnostics`]: numerical certification of the operator and map
//!   properties the convergence argument rests on (firm nonexpansiveness,
//!   cutter/1-SQNE, the damped-step contraction, the composition bound, the
//!   per-iteration Fejér inequality);
//! - [`io`]: JSON problem/config schemas, JSONL trace emission, and the
//!   `scm` command-line interface built on them.
//!
//! Everything is deterministic: all randomness flows through seeded
//! generators keyed by `(seed, label)` or `(seed, operator, iteration)`, so
//! repeated runs produce bitwise-identical traces.

pub mod diagnostics;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod monotone;
pub mod operators;
pub mod oracle;
pub mod sampling;
pub mod solver;

pub use linalg::Matrix;
pub use monotone::{tau, u_beta_step, MonotoneMap, StepParams};
pub use operators::{FneOperator, OperatorStack, StackPass};
pub use oracle::{
    project_polyhedron_exact, solve_vip_reference, vip_residual, Polyhedron, PolyhedralProjection,
};
pub use solver::{
    solve, solve_observed, BetaSchedule, ErrorModel, IterationRecord, LambdaSchedule, MuChoice,
    ScmConfig, SolveResult, SolveStatus,
};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("schedule exhausted: iteration {n} exceeds the {len} explicit values")]
    ScheduleExhausted { n: u64, len: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("reference solve did not converge within {0} iterations")]
    NonConvergence(u64),

    #[error("empty sample list")]
    EmptySampleList,

    #[error("feasible sampling exhausted after {0} attempts")]
    SamplingExhausted(u64),

    #[error("not a common fixed point: residual {0:.3e}")]
    NotFixedPoint(f64),

    #[error("infeasible: the constraint sets have empty intersection")]
    Infeasible,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
