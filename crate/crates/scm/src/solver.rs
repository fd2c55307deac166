//! The sequential constraint method: damped step, sequential operator pass
//! with per-operator error injection, relaxed convex combination. Schedules
//! and the error model are validated against the convergence hypotheses at
//! construction; the run itself is strictly sequential and fully
//! deterministic given the seeds.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, ensure_dim, ensure_finite};
use crate::monotone::MonotoneMap;
use crate::operators::OperatorStack;
use crate::sampling;
use crate::{Error, Result};

/// Step-size schedule `{β_n} ⊂ (0, 1]`. The power form `β_n = β₀ / n^p`
/// with `p ∈ (0, 1]` vanishes while its series diverges; explicit lists are
/// accepted as user-asserted and only range-checked.
#[derive(Debug, Clone)]
pub enum BetaSchedule {
    Power { beta0: f64, p: f64 },
    Explicit(Vec<f64>),
}

impl BetaSchedule {
    pub fn power(beta0: f64, p: f64) -> Result<Self> {
        if !(beta0 > 0.0 && beta0 <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "beta.beta0 = {beta0} outside (0, 1]"
            )));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "beta.p = {p} violates the divergence hypothesis: the power schedule \
                 requires p in (0, 1] so that the beta series is non-summable \
                 while beta_n -> 0"
            )));
        }
        Ok(Self::Power { beta0, p })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("beta.values is empty".into()));
        }
        for (i, v) in values.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0 && *v <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "beta.values[{i}] = {v} outside (0, 1]; explicit schedules are \
                     user-asserted for decay and divergence"
                )));
            }
        }
        Ok(Self::Explicit(values))
    }

    /// `β_n` for 1-based `n`.
    pub fn value(&self, n: u64) -> Result<f64> {
        debug_assert!(n >= 1);
        match self {
            Self::Power { beta0, p } => Ok(beta0 / (n as f64).powf(*p)),
            Self::Explicit(values) => values
                .get((n - 1) as usize)
                .copied()
                .ok_or(Error::ScheduleExhausted {
                    n,
                    len: values.len(),
                }),
        }
    }
}

/// Relaxation schedule `{λ_n} ⊂ [ε, 1−ε]` for some `ε ∈ (0, 1/2]`.
#[derive(Debug, Clone)]
pub struct LambdaSchedule {
    kind: LambdaKind,
    epsilon: f64,
}

#[derive(Debug, Clone)]
enum LambdaKind {
    Constant(f64),
    Explicit(Vec<f64>),
}

impl LambdaSchedule {
    pub fn constant(value: f64, epsilon: f64) -> Result<Self> {
        Self::check_epsilon(epsilon)?;
        Self::check_value(value, epsilon, "lambda.value")?;
        Ok(Self {
            kind: LambdaKind::Constant(value),
            epsilon,
        })
    }

    pub fn explicit(values: Vec<f64>, epsilon: f64) -> Result<Self> {
        Self::check_epsilon(epsilon)?;
        if values.is_empty() {
            return Err(Error::InvalidConfig("lambda.values is empty".into()));
        }
        for (i, v) in values.iter().enumerate() {
            Self::check_value(*v, epsilon, &format!("lambda.values[{i}]"))?;
        }
        Ok(Self {
            kind: LambdaKind::Explicit(values),
            epsilon,
        })
    }

    fn check_epsilon(epsilon: f64) -> Result<()> {
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(Error::InvalidConfig(format!(
                "epsilon = {epsilon} outside (0, 1/2]; the relaxation interval \
                 [epsilon, 1-epsilon] must be nonempty and bounded away from 0 and 1"
            )));
        }
        Ok(())
    }

    fn check_value(value: f64, epsilon: f64, field: &str) -> Result<()> {
        if !(value.is_finite() && value >= epsilon && value <= 1.0 - epsilon) {
            return Err(Error::InvalidConfig(format!(
                "{field} = {value} outside [epsilon, 1-epsilon] = [{epsilon}, {}]",
                1.0 - epsilon
            )));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `λ_n` for 1-based `n`.
    pub fn value(&self, n: u64) -> Result<f64> {
        debug_assert!(n >= 1);
        match &self.kind {
            LambdaKind::Constant(v) => Ok(*v),
            LambdaKind::Explicit(values) => {
                values
                    .get((n - 1) as usize)
                    .copied()
                    .ok_or(Error::ScheduleExhausted {
                        n,
                        len: values.len(),
                    })
            }
        }
    }
}

/// Per-operator error injection with summable norms `‖e_i^n‖ = c / n^q`,
/// `q > 1`. Random directions are keyed by `(seed, i, n)` so a draw never
/// depends on evaluation order; fixed directions are normalized once.
#[derive(Debug, Clone)]
pub enum ErrorModel {
    None,
    PowerRandom { c: f64, q: f64, seed: u64 },
    PowerFixed { c: f64, q: f64, direction: Vec<f64> },
}

impl ErrorModel {
    pub fn none() -> Self {
        Self::None
    }

    pub fn power_random(c: f64, q: f64, seed: u64) -> Result<Self> {
        Self::check_cq(c, q, false)?;
        Ok(Self::PowerRandom { c, q, seed })
    }

    pub fn power_fixed(c: f64, q: f64, direction: Vec<f64>) -> Result<Self> {
        Self::check_cq(c, q, false)?;
        Self::fixed_with_direction(c, q, direction)
    }

    /// Escape hatch behind the CLI `--unsafe-error` flag: accepts `q <= 1`,
    /// i.e. non-summable error series outside the convergence hypotheses.
    pub fn power_random_unchecked(c: f64, q: f64, seed: u64) -> Result<Self> {
        Self::check_cq(c, q, true)?;
        Ok(Self::PowerRandom { c, q, seed })
    }

    pub fn power_fixed_unchecked(c: f64, q: f64, direction: Vec<f64>) -> Result<Self> {
        Self::check_cq(c, q, true)?;
        Self::fixed_with_direction(c, q, direction)
    }

    fn fixed_with_direction(c: f64, q: f64, direction: Vec<f64>) -> Result<Self> {
        ensure_finite(&direction, "error.direction")?;
        let norm = linalg::norm(&direction);
        if norm <= 0.0 {
            return Err(Error::InvalidConfig(
                "error.direction must be nonzero".into(),
            ));
        }
        Ok(Self::PowerFixed {
            c,
            q,
            direction: linalg::scale(1.0 / norm, &direction),
        })
    }

    fn check_cq(c: f64, q: f64, allow_nonsummable: bool) -> Result<()> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidConfig(format!("error.c = {c} must be >= 0")));
        }
        if !q.is_finite() || q <= 0.0 || (!allow_nonsummable && q <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "error.q = {q} violates the summability hypothesis: q > 1 is required \
                 so that the per-operator error-norm series converges \
                 (pass --unsafe-error to explore the non-summable regime)"
            )));
        }
        Ok(())
    }

    /// The prescribed per-operator norm `c / n^q` at iteration `n` (zero for
    /// `None`).
    pub fn norm_at(&self, n: u64) -> f64 {
        match self {
            Self::None => 0.0,
            Self::PowerRandom { c, q, .. } | Self::PowerFixed { c, q, .. } => {
                c / (n as f64).powf(*q)
            }
        }
    }

    /// Draws the `m` error vectors for iteration `n`, each of norm
    /// `c / n^q`. Reproducible from the model alone.
    pub fn draw(&self, n: u64, m: usize, dim: usize) -> Vec<Vec<f64>> {
        debug_assert!(n >= 1);
        let scale = self.norm_at(n);
        match self {
            Self::None => vec![vec![0.0; dim]; m],
            Self::PowerFixed { direction, .. } => {
                vec![linalg::scale(scale, direction); m]
            }
            Self::PowerRandom { seed, .. } => (0..m)
                .map(|i| {
                    let mut rng = sampling::rng_from_indices(*seed, i as u64 + 1, n);
                    linalg::scale(scale, &sampling::unit_vector(&mut rng, dim))
                })
                .collect(),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Self::None)
    }
}

/// Step-size constant choice: `"auto"` resolves to the map's `η/κ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuChoice {
    Auto,
    Fixed(f64),
}

/// Full run configuration.
#[derive(Debug, Clone)]
pub struct ScmConfig {
    pub mu: MuChoice,
    pub beta: BetaSchedule,
    pub lambda: LambdaSchedule,
    pub error: ErrorModel,
    pub max_iters: u64,
    pub residual_tol: f64,
    pub trace_every: u64,
    pub seed: u64,
}

impl ScmConfig {
    /// A reproducible default: `β_n = 1/n`, `λ_n ≡ 1/2` (with `ε = 1/2` the
    /// interval collapses to exactly that point), no errors.
    pub fn default_for(max_iters: u64) -> Self {
        Self {
            mu: MuChoice::Auto,
            beta: BetaSchedule::power(1.0, 1.0).expect("valid default"),
            lambda: LambdaSchedule::constant(0.5, 0.5).expect("valid default"),
            error: ErrorModel::None,
            max_iters,
            residual_tol: 0.0,
            trace_every: 1,
            seed: 0,
        }
    }

    /// Resolves `μ` against the map's certified constants and validates it
    /// sits in `(0, 2η/κ²)`.
    pub fn resolve_mu(&self, map: &MonotoneMap) -> Result<f64> {
        let mu = match self.mu {
            MuChoice::Auto => map.auto_mu(),
            MuChoice::Fixed(v) => v,
        };
        let upper = 2.0 * map.eta() / (map.kappa() * map.kappa());
        if !(mu > 0.0 && mu < upper) {
            return Err(Error::InvalidConfig(format!(
                "mu = {mu} outside the admissible interval (0, {upper}) = (0, 2*eta/kappa^2) \
                 for eta={}, kappa={}",
                map.eta(),
                map.kappa()
            )));
        }
        Ok(mu)
    }

    fn validate(&self) -> Result<()> {
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
        Ok(())
    }
}

/// One row of the run trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: u64,
    pub beta_n: f64,
    pub lambda_n: f64,
    pub fixed_point_residual: f64,
    pub step_norm: f64,
    pub error_norm_total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist_to_known: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    ResidualMet,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x_final: Vec<f64>,
    pub status: SolveStatus,
    pub iters: u64,
    pub trace: Vec<IterationRecord>,
}

/// One iteration: `φ_0 = x − μ β_n F(x)`, the sequential pass with errors
/// drawn for index `n`, then `x_{n+1} = (1−λ_n) φ_0 + λ_n φ_m`. Returns the
/// next iterate, its trace record, and the intermediates `φ_0 .. φ_m`.
pub fn scm_step(
    x: &[f64],
    n: u64,
    stack: &OperatorStack,
    map: &MonotoneMap,
    cfg: &ScmConfig,
    known: Option<&[f64]>,
) -> Result<(Vec<f64>, IterationRecord, Vec<Vec<f64>>)> {
    let mu = cfg.resolve_mu(map)?;
    let beta_n = cfg.beta.value(n)?;
    let lambda_n = cfg.lambda.value(n)?;
    ensure_dim(x, stack.dim())?;

    let fx = map.eval(x)?;
    let phi0 = linalg::add_scaled(x, -mu * beta_n, &fx);

    let pass = if cfg.error.is_none() {
        stack.apply_stack(&phi0, None)?
    } else {
        let errors = cfg.error.draw(n, stack.len(), stack.dim());
        stack.apply_stack(&phi0, Some(&errors))?
    };

    let x_next = linalg::linear_comb(1.0 - lambda_n, &phi0, lambda_n, &pass.output);
    ensure_finite(&x_next, &format!("iterate at n={n}"))?;

    let record = IterationRecord {
        n,
        beta_n,
        lambda_n,
        fixed_point_residual: stack.fixed_point_residual(&x_next)?,
        step_norm: linalg::dist(&x_next, x),
        error_norm_total: stack.len() as f64 * cfg.error.norm_at(n),
        dist_to_known: known.map(|z| linalg::dist(&x_next, z)),
    };
    Ok((x_next, record, pass.intermediates))
}

/// Runs the iteration from `x0`, stopping once both the fixed-point
/// residual and the step norm fall to `residual_tol` (feasibility alone
/// does not certify optimality) or at `max_iters`. The trace keeps every
/// `trace_every`-th record plus always the final one. `observer` sees every
/// iteration's record and intermediates, thinned or not.
pub fn solve_observed<Obs>(
    stack: &OperatorStack,
    map: &MonotoneMap,
    x0: &[f64],
    cfg: &ScmConfig,
    known: Option<&[f64]>,
    mut observer: Obs,
) -> Result<SolveResult>
where
    Obs: FnMut(&IterationRecord, &[Vec<f64>]),
{
    cfg.validate()?;
    cfg.resolve_mu(map)?;
    ensure_dim(x0, stack.dim())?;
    ensure_finite(x0, "x0")?;
    if let Some(d) = map.dim() {
        if d != stack.dim() {
            return Err(Error::DimensionMismatch {
                expected: stack.dim(),
                got: d,
            });
        }
    }
    if let Some(z) = known {
        ensure_dim(z, stack.dim())?;
    }

    let mut x = x0.to_vec();
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut status = SolveStatus::MaxIters;
    let mut iters = 0;

    for n in 1..=cfg.max_iters {
        let (x_next, record, intermediates) = scm_step(&x, n, stack, map, cfg, known)?;
        observer(&record, &intermediates);
        let converged = record.fixed_point_residual <= cfg.residual_tol
            && record.step_norm <= cfg.residual_tol;
        let last = n == cfg.max_iters || converged;
        if n % cfg.trace_every == 0 || last {
            trace.push(record);
        }
        x = x_next;
        iters = n;
        if converged {
            status = SolveStatus::ResidualMet;
            break;
        }
    }

    Ok(SolveResult {
        x_final: x,
        status,
        iters,
        trace,
    })
}

/// [`solve_observed`] without an observer or a known solution.
pub fn solve(
    stack: &OperatorStack,
    map: &MonotoneMap,
    x0: &[f64],
    cfg: &ScmConfig,
) -> Result<SolveResult> {
    solve_observed(stack, map, x0, cfg, None, |_, _| {})
}
