//! Numerical certification of the operator and map properties the
//! convergence argument rests on. Each check samples seeded points, records
//! the worst violation of its inequality, and passes when that violation
//! stays within tolerance. Nothing is assumed of the catalog: firm
//! nonexpansiveness, the cutter property, the damped-step contraction, the
//! composition bound, and the per-iteration Fejér inequality are all
//! measured, not derived.
//!
//! Checks are independent: each one derives its own generator from
//! `(seed, check name)` and corrupting one certified property trips its own
//! check without disturbing the others.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::io::Problem;
use crate::linalg;
use crate::monotone::{tau, MonotoneMap, StepParams};
use crate::operators::{FneOperator, OperatorStack};
use crate::oracle;
use crate::sampling;
use crate::solver::{solve_observed, ErrorModel, ScmConfig};
use crate::{Error, Result};

/// Default absolute tolerance: the catalog is exact to machine precision
/// and 1e-10 absorbs accumulation across dimensions up to 64.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Tighter tolerance for identities that hold exactly (idempotence,
/// nonexpansiveness, the convex-combination identity).
pub const EXACT_TOL: f64 = 1e-12;
/// Default sampling radius: Gaussian coordinates scaled by this,
/// exercising both feasible and far-infeasible regions.
pub const SAMPLE_RADIUS: f64 = 10.0;

/// Where and how a check draws its points.
#[derive(Debug, Clone, Copy)]
pub struct SamplePlan {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub radius: f64,
}

impl SamplePlan {
    pub fn new(dim: usize, samples: usize, seed: u64) -> Self {
        Self {
            dim,
            samples,
            seed,
            radius: SAMPLE_RADIUS,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub worst_violation: f64,
    pub pass: bool,
    pub tolerance: f64,
}

impl CheckReport {
    fn new(name: impl Into<String>, samples: usize, worst_violation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            samples,
            worst_violation,
            pass: worst_violation <= tolerance,
            tolerance,
        }
    }
}

/// Firm nonexpansiveness `⟨Tx − Ty, x − y⟩ ≥ ‖Tx − Ty‖²` for an arbitrary
/// map, reported as the worst of `‖Tx−Ty‖² − ⟨Tx−Ty, x−y⟩` clipped at 0.
pub fn check_fne_map<T>(name: &str, t: T, plan: &SamplePlan, tol: f64) -> CheckReport
where
    T: Fn(&[f64]) -> Vec<f64>,
{
    let mut rng = sampling::rng_from_label(plan.seed, name);
    let mut worst = 0.0f64;
    for _ in 0..plan.samples {
        let x = sampling::gaussian_vector(&mut rng, plan.dim, plan.radius);
        let y = sampling::gaussian_vector(&mut rng, plan.dim, plan.radius);
        let diff = linalg::sub(&t(&x), &t(&y));
        let violation = linalg::norm_sq(&diff) - linalg::dot(&diff, &linalg::sub(&x, &y));
        worst = worst.max(violation);
    }
    CheckReport::new(name, plan.samples, worst, tol)
}

/// Nonexpansiveness `‖Tx − Ty‖ ≤ ‖x − y‖`.
pub fn check_nonexpansive_map<T>(name: &str, t: T, plan: &SamplePlan, tol: f64) -> CheckReport
where
    T: Fn(&[f64]) -> Vec<f64>,
{
    let mut rng = sampling::rng_from_label(plan.seed, name);
    let mut worst = 0.0f64;
    for _ in 0..plan.samples {
        let x = sampling::gaussian_vector(&mut rng, plan.dim, plan.radius);
        let y = sampling::gaussian_vector(&mut rng, plan.dim, plan.radius);
        let violation = linalg::dist(&t(&x), &t(&y)) - linalg::dist(&x, &y);
        worst = worst.max(violation);
    }
    CheckReport::new(name, plan.samples, worst, tol)
}

/// Cutter property in its 1-SQNE form `⟨Tx − x, z − x⟩ ≥ ‖Tx − x‖²` for
/// fixed points `z` supplied by `fixed_point_of`, which receives a sample
/// and must return a point with zero residual for the checked map.
pub fn check_cutter_map<T, Z>(
    name: &str,
    t: T,
    fixed_point_of: Z,
    plan: &SamplePlan,
    tol: f64,
) -> CheckReport
where
    T: Fn(&[f64]) -> Vec<f64>,
    Z: Fn(&mut rand_chacha::ChaCha12Rng) -> Vec<f64>,
{
    let mut rng = sampling::rng_from_label(plan.seed, name);
    let mut worst = 0.0f64;
    for _ in 0..plan.samples {
        let x = sampling::gaussian_vector(&mut rng, plan.dim, plan.radius);
        let z = fixed_point_of(&mut rng);
        let step = linalg::sub(&t(&x), &x);
        let violation = linalg::norm_sq(&step) - linalg::dot(&step, &linalg::sub(&z, &x));
        worst = worst.max(violation);
    }
    CheckReport::new(name, plan.samples, worst, tol)
}

/// Idempotence `T(Tx) = Tx`, meaningful for the projection kinds.
pub fn check_idempotent_map<T>(name: &str, t: T, plan: &SamplePlan, tol: f64) -> CheckReport
where
    T: Fn(&[f64]) -> Vec<f64>,
{
    let mut rng = sampling::rng_from_label(plan.seed, name);
    let mut worst = 0.0f64;
    for _ in 0..plan.samples {
        let x = sampling::gaussian_vector(&mut rng, plan.dim, plan.radius);
        let once = t(&x);
        worst = worst.max(linalg::dist(&t(&once), &once));
    }
    CheckReport::new(name, plan.samples, worst, tol)
}

/// Catalog wrapper for [`check_fne_map`].
pub fn check_fne(op: &FneOperator, dim: usize, samples: usize, seed: u64) -> CheckReport {
    check_fne_map(
        &format!("fne:{}", op.name()),
        |x| op.apply(x).expect("dimension fixed by check"),
        &SamplePlan::new(dim, samples, seed),
        DEFAULT_TOL,
    )
}

/// Catalog wrapper for [`check_nonexpansive_map`].
pub fn check_nonexpansive(op: &FneOperator, dim: usize, samples: usize, seed: u64) -> CheckReport {
    check_nonexpansive_map(
        &format!("nonexpansive:{}", op.name()),
        |x| op.apply(x).expect("dimension fixed by check"),
        &SamplePlan::new(dim, samples, seed),
        EXACT_TOL,
    )
}

/// Catalog wrapper for [`check_cutter_map`]. Fixed points come from the
/// operator itself: projections project a fresh sample into their set; the
/// soft-threshold and resolvent kinds fix the origin.
pub fn check_cutter(op: &FneOperator, dim: usize, samples: usize, seed: u64) -> CheckReport {
    debug_assert!(
        op.is_projection()
            || op
                .is_fixed(&vec![0.0; dim], 1e-12)
                .expect("dimension fixed by check")
    );
    check_cutter_map(
        &format!("cutter:{}", op.name()),
        |x| op.apply(x).expect("dimension fixed by check"),
        |rng| {
            if op.is_projection() {
                let w = sampling::gaussian_vector(rng, dim, SAMPLE_RADIUS);
                op.apply(&w).expect("dimension fixed by check")
            } else {
                vec![0.0; dim]
            }
        },
        &SamplePlan::new(dim, samples, seed),
        DEFAULT_TOL,
    )
}

/// Catalog wrapper for [`check_idempotent_map`].
pub fn check_idempotent(op: &FneOperator, dim: usize, samples: usize, seed: u64) -> CheckReport {
    check_idempotent_map(
        &format!("idempotent:{}", op.name()),
        |x| op.apply(x).expect("dimension fixed by check"),
        &SamplePlan::new(dim, samples, seed),
        EXACT_TOL,
    )
}

/// Strong monotonicity `⟨Fx − Fy, x − y⟩ ≥ η ‖x − y‖²` for the map's
/// certified `η`.
pub fn check_strong_monotonicity(
    map: &MonotoneMap,
    dim: usize,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let name = format!("strong_monotonicity:{}", map.kind_name());
    let mut rng = sampling::rng_from_label(seed, &name);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = sampling::gaussian_vector(&mut rng, dim, SAMPLE_RADIUS);
        let y = sampling::gaussian_vector(&mut rng, dim, SAMPLE_RADIUS);
        let fdiff = linalg::sub(
            &map.eval(&x).expect("dimension fixed by check"),
            &map.eval(&y).expect("dimension fixed by check"),
        );
        let xdiff = linalg::sub(&x, &y);
        let violation = map.eta() * linalg::norm_sq(&xdiff) - linalg::dot(&fdiff, &xdiff);
        worst = worst.max(violation);
    }
    CheckReport::new(name, samples, worst, DEFAULT_TOL)
}

/// Lipschitz bound `‖Fx − Fy‖ ≤ κ ‖x − y‖` for the map's certified `κ`.
pub fn check_lipschitz(map: &MonotoneMap, dim: usize, samples: usize, seed: u64) -> CheckReport {
    let name = format!("lipschitz:{}", map.kind_name());
    let mut rng = sampling::rng_from_label(seed, &name);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = sampling::gaussian_vector(&mut rng, dim, SAMPLE_RADIUS);
        let y = sampling::gaussian_vector(&mut rng, dim, SAMPLE_RADIUS);
        let fdist = linalg::dist(
            &map.eval(&x).expect("dimension fixed by check"),
            &map.eval(&y).expect("dimension fixed by check"),
        );
        let violation = fdist - map.kappa() * linalg::dist(&x, &y);
        worst = worst.max(violation);
    }
    CheckReport::new(name, samples, worst, DEFAULT_TOL)
}

/// Contraction of the damped step: `‖U^β x − U^β y‖ ≤ (1 − βτ) ‖x − y‖`
/// with `τ` from the map's certified constants.
pub fn check_contraction(
    map: &MonotoneMap,
    mu: f64,
    beta: f64,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let params = StepParams::new(mu, beta, map)?;
    let rate = 1.0 - beta * tau(mu, map.eta(), map.kappa())?;
    let name = format!("contraction:{}", map.kind_name());
    let mut rng = sampling::rng_from_label(seed, &name);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = sampling::gaussian_vector(&mut rng, dim, SAMPLE_RADIUS);
        let y = sampling::gaussian_vector(&mut rng, dim, SAMPLE_RADIUS);
        let ux = crate::monotone::u_beta_step(map, &params, &x)?;
        let uy = crate::monotone::u_beta_step(map, &params, &y)?;
        let violation = linalg::dist(&ux, &uy) - rate * linalg::dist(&x, &y);
        worst = worst.max(violation);
    }
    Ok(CheckReport::new(name, samples, worst, DEFAULT_TOL))
}

/// The exact algebraic identity
/// `‖λx + (1−λ)y‖² = λ‖x‖² + (1−λ)‖y‖² − λ(1−λ)‖x−y‖²` on random triples.
/// Checked at small dimension and moderate radius where both evaluation
/// routes stay within 1e−12 of each other in double precision.
pub fn check_convex_combination_identity(samples: usize, seed: u64) -> CheckReport {
    let name = "convex_combination_identity";
    let mut rng = sampling::rng_from_label(seed, name);
    let dim = 4;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = sampling::gaussian_vector(&mut rng, dim, 5.0);
        let y = sampling::gaussian_vector(&mut rng, dim, 5.0);
        let lam: f64 = 3.0 * rng.random::<f64>() - 1.0; // identity holds for any real λ
        let lhs = linalg::norm_sq(&linalg::linear_comb(lam, &x, 1.0 - lam, &y));
        let rhs = lam * linalg::norm_sq(&x) + (1.0 - lam) * linalg::norm_sq(&y)
            - lam * (1.0 - lam) * linalg::norm_sq(&linalg::sub(&x, &y));
        worst = worst.max((lhs - rhs).abs());
    }
    CheckReport::new(name, samples, worst, EXACT_TOL)
}

/// Composition bound for one pair `(x, z)` with `z` a common fixed point:
/// `(1/2L) Σ_i ‖S_i x − S_{i−1} x‖² ≤ ‖Tx − x‖` for `L = max(‖x−z‖, 1e−12)`.
pub fn check_composition_bound(
    stack: &OperatorStack,
    x: &[f64],
    z: &[f64],
) -> Result<CheckReport> {
    let z_residual = stack.fixed_point_residual(z)?;
    if z_residual > DEFAULT_TOL {
        return Err(Error::NotFixedPoint(z_residual));
    }
    let violation = composition_violation(stack, x, z)?;
    Ok(CheckReport::new("composition_bound", 1, violation, DEFAULT_TOL))
}

fn composition_violation(stack: &OperatorStack, x: &[f64], z: &[f64]) -> Result<f64> {
    let pass = stack.apply_stack(x, None)?;
    let l = linalg::dist(x, z).max(1e-12);
    let mut sum = 0.0;
    for i in 1..pass.intermediates.len() {
        sum += linalg::norm_sq(&linalg::sub(
            &pass.intermediates[i],
            &pass.intermediates[i - 1],
        ));
    }
    let lhs = sum / (2.0 * l);
    let rhs = linalg::dist(&pass.output, x);
    Ok((lhs - rhs).max(0.0))
}

/// Sampled composition bound: `samples` pairs of a Gaussian `x` and a `z`
/// drawn from the given interior ball of the stack.
pub fn check_composition_bound_sampled(
    stack: &OperatorStack,
    inner_center: &[f64],
    inner_radius: f64,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let name = "composition_bound";
    let center_residual = stack.fixed_point_residual(inner_center)?;
    if center_residual > DEFAULT_TOL {
        return Err(Error::NotFixedPoint(center_residual));
    }
    let mut rng = sampling::rng_from_label(seed, name);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = sampling::gaussian_vector(&mut rng, stack.dim(), SAMPLE_RADIUS);
        let z = sampling::uniform_in_ball(&mut rng, inner_center, inner_radius);
        worst = worst.max(composition_violation(stack, &x, &z)?);
    }
    Ok(CheckReport::new(name, samples, worst, DEFAULT_TOL))
}

/// Fixed set of the composition: `T = T_m ⋯ T_1` fixes a point exactly
/// when every member does. Interior-ball draws (common fixed points by
/// construction) must be fixed by the composition; Gaussian draws the
/// composition happens to fix must carry zero stack residual.
pub fn check_composition_fixed_set(
    stack: &OperatorStack,
    inner_center: &[f64],
    inner_radius: f64,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let name = "composition_fixed_set";
    let center_residual = stack.fixed_point_residual(inner_center)?;
    if center_residual > DEFAULT_TOL {
        return Err(Error::NotFixedPoint(center_residual));
    }
    let mut rng = sampling::rng_from_label(seed, name);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let z = sampling::uniform_in_ball(&mut rng, inner_center, inner_radius);
        worst = worst.max(linalg::dist(&stack.compose(&z)?, &z));
        let x = sampling::gaussian_vector(&mut rng, stack.dim(), SAMPLE_RADIUS);
        if linalg::dist(&stack.compose(&x)?, &x) <= EXACT_TOL {
            worst = worst.max(stack.fixed_point_residual(&x)?);
        }
    }
    Ok(CheckReport::new(name, samples, worst, EXACT_TOL))
}

/// Per-iteration Fejér inequality over a recorded trace: with
/// `w = φ_0 + λ(Tφ_0 − φ_0)` recomputed error-free,
/// `‖w − z‖² ≤ ‖φ_0 − z‖² − λ(1−λ)‖Tφ_0 − φ_0‖²` must hold at every
/// iteration for any common fixed point `z`.
pub fn check_fejer_trace(
    trace_intermediates: &[Vec<Vec<f64>>],
    lambda_values: &[f64],
    stack: &OperatorStack,
    z: &[f64],
) -> Result<CheckReport> {
    let z_residual = stack.fixed_point_residual(z)?;
    if z_residual > DEFAULT_TOL {
        return Err(Error::NotFixedPoint(z_residual));
    }
    if trace_intermediates.len() != lambda_values.len() {
        return Err(Error::DimensionMismatch {
            expected: trace_intermediates.len(),
            got: lambda_values.len(),
        });
    }
    let mut worst = 0.0f64;
    for (inter, &lam) in trace_intermediates.iter().zip(lambda_values) {
        let phi0 = inter
            .first()
            .ok_or_else(|| Error::InvalidProblem("missing intermediates in trace".into()))?;
        worst = worst.max(fejer_violation(stack, phi0, lam, z)?);
    }
    Ok(CheckReport::new(
        "fejer_step",
        trace_intermediates.len(),
        worst,
        DEFAULT_TOL,
    ))
}

fn fejer_violation(stack: &OperatorStack, phi0: &[f64], lam: f64, z: &[f64]) -> Result<f64> {
    let t_phi0 = stack.compose(phi0)?;
    let w = linalg::linear_comb(1.0 - lam, phi0, lam, &t_phi0);
    let lhs = linalg::norm_sq(&linalg::sub(&w, z));
    let rhs = linalg::norm_sq(&linalg::sub(phi0, z))
        - lam * (1.0 - lam) * linalg::norm_sq(&linalg::sub(&t_phi0, phi0));
    Ok((lhs - rhs).max(0.0))
}

/// Number of samples per check in the full suite.
pub const SUITE_SAMPLES: usize = 1000;
/// Iteration budget of the suite's internal error-free run for the Fejér
/// check.
const SUITE_FEJER_ITERS: u64 = 200;
/// Agreement tolerance for the oracle cross-validation check.
const ORACLE_AGREEMENT_TOL: f64 = 1e-9;

/// Certified common fixed point for a stack, if one can be produced:
/// the problem's known solution, the intersection projection of the
/// origin (projection stacks), or the origin itself (resolvent-style
/// stacks fixing zero).
pub fn find_common_fixed_point(
    stack: &OperatorStack,
    known: Option<&[f64]>,
) -> Option<Vec<f64>> {
    if let Some(z) = known {
        if stack.fixed_point_residual(z).ok()? <= DEFAULT_TOL {
            return Some(z.to_vec());
        }
    }
    let origin = vec![0.0; stack.dim()];
    if stack.ops().iter().all(FneOperator::is_projection) {
        if let Ok(p) = oracle::project_intersection(stack, &origin) {
            if stack.fixed_point_residual(&p).ok()? <= DEFAULT_TOL {
                return Some(p);
            }
        }
    }
    if stack.fixed_point_residual(&origin).ok()? <= DEFAULT_TOL {
        return Some(origin);
    }
    None
}

/// Runs every applicable check for a problem: the four operator
/// certificates per stack member, the map certificates and damped-step
/// contraction, the convex-combination identity, and — whenever a common
/// fixed point is available — the composition bound, the Fejér trace of a
/// short error-free run, and the oracle cross-validation. Failures are
/// reported, never thrown.
pub fn run_full_suite(problem: &Problem, cfg: &ScmConfig) -> Vec<CheckReport> {
    let mut reports = Vec::new();
    let dim = problem.stack.dim();
    let seed = cfg.seed;

    for (i, op) in problem.stack.ops().iter().enumerate() {
        let tag = |kind: &str| format!("{kind}:{}[{i}]", op.name());
        reports.push(rename(check_fne(op, dim, SUITE_SAMPLES, seed), tag("fne")));
        reports.push(rename(
            check_nonexpansive(op, dim, SUITE_SAMPLES, seed),
            tag("nonexpansive"),
        ));
        reports.push(rename(
            check_cutter(op, dim, SUITE_SAMPLES, seed),
            tag("cutter"),
        ));
        if op.is_projection() {
            reports.push(rename(
                check_idempotent(op, dim, SUITE_SAMPLES, seed),
                tag("idempotent"),
            ));
        }
    }

    reports.push(check_strong_monotonicity(&problem.f, dim, SUITE_SAMPLES, seed));
    reports.push(check_lipschitz(&problem.f, dim, SUITE_SAMPLES, seed));
    match cfg.resolve_mu(&problem.f) {
        Ok(mu) => {
            let beta = cfg.beta.value(1).unwrap_or(1.0).clamp(f64::MIN_POSITIVE, 1.0);
            match check_contraction(&problem.f, mu, beta, dim, SUITE_SAMPLES, seed) {
                Ok(report) => reports.push(report),
                Err(_) => reports.push(CheckReport::new(
                    format!("contraction:{}", problem.f.kind_name()),
                    0,
                    f64::INFINITY,
                    DEFAULT_TOL,
                )),
            }
        }
        Err(_) => reports.push(CheckReport::new(
            format!("contraction:{}", problem.f.kind_name()),
            0,
            f64::INFINITY,
            DEFAULT_TOL,
        )),
    }

    reports.push(check_convex_combination_identity(SUITE_SAMPLES, seed));

    if let Some(z) = find_common_fixed_point(&problem.stack, problem.known_solution.as_deref()) {
        if let Ok(report) =
            check_composition_bound_sampled(&problem.stack, &z, 0.0, SUITE_SAMPLES / 10, seed)
        {
            reports.push(report);
        }
        if let Ok(report) =
            check_composition_fixed_set(&problem.stack, &z, 0.0, SUITE_SAMPLES / 10, seed)
        {
            reports.push(report);
        }
        reports.push(fejer_suite_check(problem, cfg, &z));
    }

    if let Some(report) = oracle_cross_validation(&problem.stack, seed) {
        reports.push(report);
    }

    reports
}

fn rename(mut report: CheckReport, name: String) -> CheckReport {
    report.name = name;
    report
}

fn fejer_suite_check(problem: &Problem, cfg: &ScmConfig, z: &[f64]) -> CheckReport {
    let mut run_cfg = cfg.clone();
    run_cfg.error = ErrorModel::None; // the inequality is stated error-free
    run_cfg.max_iters = cfg.max_iters.min(SUITE_FEJER_ITERS);
    run_cfg.residual_tol = 0.0;
    let mut worst = 0.0f64;
    let mut iters = 0usize;
    let x0 = vec![0.0; problem.stack.dim()];
    let run = solve_observed(
        &problem.stack,
        &problem.f,
        &x0,
        &run_cfg,
        None,
        |record, inter| {
            if let Ok(v) = fejer_violation(&problem.stack, &inter[0], record.lambda_n, z) {
                worst = worst.max(v);
                iters += 1;
            }
        },
    );
    match run {
        Ok(_) => CheckReport::new("fejer_step", iters, worst, DEFAULT_TOL),
        Err(_) => CheckReport::new("fejer_step", 0, f64::INFINITY, DEFAULT_TOL),
    }
}

/// Cross-validates the two oracle routes. For all-halfspace stacks the KKT
/// enumeration and the cyclic projector must agree on the projection of the
/// origin; for other projection stacks the cyclic projection of the origin
/// must beat every sampled feasible point in distance. `None` when the
/// stack has non-projection members (no exact set oracle applies).
fn oracle_cross_validation(stack: &OperatorStack, seed: u64) -> Option<CheckReport> {
    if !stack.ops().iter().all(FneOperator::is_projection) {
        return None;
    }
    let origin = vec![0.0; stack.dim()];
    let name = "oracle_cross_validation";
    let dyk = match oracle::project_intersection(stack, &origin) {
        Ok(p) => p,
        Err(_) => return Some(CheckReport::new(name, 0, f64::INFINITY, ORACLE_AGREEMENT_TOL)),
    };
    if let Some(poly) = oracle::Polyhedron::from_stack(stack) {
        let kkt = match oracle::project_polyhedron_exact(&poly, &origin) {
            Ok(proj) => match proj.point() {
                Ok(p) => p.to_vec(),
                Err(_) => {
                    return Some(CheckReport::new(name, 0, f64::INFINITY, ORACLE_AGREEMENT_TOL))
                }
            },
            Err(_) => return Some(CheckReport::new(name, 0, f64::INFINITY, ORACLE_AGREEMENT_TOL)),
        };
        let disagreement = linalg::dist(&kkt, &dyk);
        return Some(CheckReport::new(name, 1, disagreement, ORACLE_AGREEMENT_TOL));
    }
    // mixed projection sets: certify optimality against sampled members
    let samples = 100;
    match oracle::sample_feasible(stack, &dyk, 2.0, samples, seed) {
        Ok(points) => {
            let d_star = linalg::norm(&dyk);
            let mut worst = 0.0f64;
            for v in &points {
                worst = worst.max(d_star - linalg::norm(v));
            }
            Some(CheckReport::new(name, samples, worst, ORACLE_AGREEMENT_TOL))
        }
        Err(_) => Some(CheckReport::new(name, 0, f64::INFINITY, ORACLE_AGREEMENT_TOL)),
    }
}
