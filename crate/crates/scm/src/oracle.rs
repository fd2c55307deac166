//! Exact desk-scale reference solvers used as ground truth in tests.
//!
//! Two independent routes are provided. `project_polyhedron_exact`
//! enumerates active sets and solves the equality-constrained
//! least-distance KKT system per subset, which is exact up to one linear
//! solve. `project_intersection` runs Dykstra's cyclic-correction scheme
//! over arbitrary projection-kind stacks; `solve_vip_reference` wraps
//! either projector in the classical projected iteration
//! `x ← P_C(x − γ F(x))`, contractive for `γ = η/κ²`.

use crate::linalg::{self, ensure_dim, ensure_finite, lu_solve, Matrix};
use crate::monotone::MonotoneMap;
use crate::operators::OperatorStack;
use crate::sampling;
use crate::{Error, Result};

/// Enumeration budget for the KKT oracle: at most `2^MAX_HALFSPACES`
/// candidate active sets.
pub const MAX_HALFSPACES: usize = 12;
/// Dimension budget for the KKT oracle.
pub const MAX_DIM: usize = 12;
/// Feasibility slack and multiplier tolerance for candidate acceptance.
const KKT_TOL: f64 = 1e-9;

/// Stopping tolerance of the reference projected iteration.
pub const REFERENCE_STEP_TOL: f64 = 1e-12;
/// Iteration budget of the reference projected iteration.
pub const REFERENCE_MAX_ITERS: u64 = 10_000_000;

/// A polyhedron `{x : ⟨a_i, x⟩ ≤ b_i}`. Nonemptiness is not assumed; the
/// projection reports `Infeasible` when no candidate survives.
#[derive(Debug, Clone)]
pub struct Polyhedron {
    halfspaces: Vec<(Vec<f64>, f64)>,
    dim: usize,
}

impl Polyhedron {
    pub fn new(halfspaces: Vec<(Vec<f64>, f64)>, dim: usize) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(Error::InvalidProblem(
                "polyhedron needs at least one halfspace".into(),
            ));
        }
        for (i, (a, b)) in halfspaces.iter().enumerate() {
            ensure_dim(a, dim)?;
            ensure_finite(a, &format!("halfspace {i} normal"))?;
            if !b.is_finite() {
                return Err(Error::NonFinite(format!("halfspace {i} offset")));
            }
            if linalg::norm_sq(a) <= 0.0 {
                return Err(Error::InvalidProblem(format!(
                    "halfspace {i} has zero normal"
                )));
            }
        }
        Ok(Self { halfspaces, dim })
    }

    /// Extracts the halfspace description of a stack whose members are all
    /// halfspace projections; `None` otherwise.
    pub fn from_stack(stack: &OperatorStack) -> Option<Self> {
        let mut halfspaces = Vec::with_capacity(stack.len());
        for op in stack.ops() {
            halfspaces.push(op.as_halfspace()?);
        }
        Some(Self {
            halfspaces,
            dim: stack.dim(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    pub fn halfspaces(&self) -> &[(Vec<f64>, f64)] {
        &self.halfspaces
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|(a, b)| linalg::dot(a, x) <= b + tol)
    }
}

/// Outcome of the exact polyhedral projection.
#[derive(Debug, Clone)]
pub enum PolyhedralProjection {
    Feasible {
        point: Vec<f64>,
        /// Indices of the halfspaces active at the projection, ascending.
        active_set: Vec<usize>,
        /// KKT multipliers aligned with `active_set`.
        multipliers: Vec<f64>,
        distance: f64,
    },
    Infeasible,
}

impl PolyhedralProjection {
    pub fn point(&self) -> Result<&[f64]> {
        match self {
            Self::Feasible { point, .. } => Ok(point),
            Self::Infeasible => Err(Error::Infeasible),
        }
    }
}

/// Exact projection of `y` onto a polyhedron by enumeration of candidate
/// active sets. For each subset the equality-constrained least-distance KKT
/// system `(A_S A_Sᵀ) λ = A_S y − b_S` is solved directly; a candidate is
/// accepted when it is feasible for every halfspace with multipliers
/// `≥ −1e−9`. Singular subsets (redundant rows) are skipped. Ties are
/// broken by distance, then by lexicographically smallest active set, so
/// the result does not depend on enumeration order.
pub fn project_polyhedron_exact(p: &Polyhedron, y: &[f64]) -> Result<PolyhedralProjection> {
    ensure_dim(y, p.dim)?;
    ensure_finite(y, "projection input")?;
    let m = p.halfspaces.len();
    if m > MAX_HALFSPACES || p.dim > MAX_DIM {
        return Err(Error::BudgetExceeded(format!(
            "active-set enumeration supports m <= {MAX_HALFSPACES}, dim <= {MAX_DIM}; \
             got m = {m}, dim = {}",
            p.dim
        )));
    }

    struct Candidate {
        distance: f64,
        active_set: Vec<usize>,
        multipliers: Vec<f64>,
        point: Vec<f64>,
    }
    let mut best: Option<Candidate> = None;
    for mask in 0u32..(1u32 << m) {
        let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let k = subset.len();
        if k > p.dim {
            continue; // more than dim independent equalities cannot be active
        }
        let candidate = if k == 0 {
            (y.to_vec(), Vec::new())
        } else {
            // Gram matrix A_S A_Sᵀ and right-hand side A_S y − b_S
            let mut gram = Matrix::zeros(k, k);
            let mut rhs = vec![0.0; k];
            for (r, &i) in subset.iter().enumerate() {
                let (ai, bi) = &p.halfspaces[i];
                rhs[r] = linalg::dot(ai, y) - bi;
                for (c, &j) in subset.iter().enumerate() {
                    gram.set(r, c, linalg::dot(ai, &p.halfspaces[j].0));
                }
            }
            let Some(multipliers) = lu_solve(&gram, &rhs) else {
                continue; // redundant active set, skip
            };
            let mut point = y.to_vec();
            for (r, &i) in subset.iter().enumerate() {
                point = linalg::add_scaled(&point, -multipliers[r], &p.halfspaces[i].0);
            }
            (point, multipliers)
        };
        let (point, multipliers) = candidate;
        if multipliers.iter().any(|l| *l < -KKT_TOL) {
            continue;
        }
        if !p.contains(&point, KKT_TOL) {
            continue;
        }
        let distance = linalg::dist(&point, y);
        let replace = match &best {
            None => true,
            Some(b) => {
                distance < b.distance - KKT_TOL
                    || ((distance - b.distance).abs() <= KKT_TOL && subset < b.active_set)
            }
        };
        if replace {
            best = Some(Candidate {
                distance,
                active_set: subset,
                multipliers,
                point,
            });
        }
    }

    Ok(match best {
        Some(b) => PolyhedralProjection::Feasible {
            point: b.point,
            active_set: b.active_set,
            multipliers: b.multipliers,
            distance: b.distance,
        },
        None => PolyhedralProjection::Infeasible,
    })
}

/// Cycle-increment tolerance of the Dykstra projector.
const DYKSTRA_TOL: f64 = 1e-13;
/// Membership residual required of the Dykstra limit.
const DYKSTRA_RESIDUAL_TOL: f64 = 1e-11;
const DYKSTRA_MAX_SWEEPS: u64 = 2_000_000;

/// Projection onto `∩ Fix T_i` for a stack of projection-kind operators,
/// via Dykstra's cyclic scheme with per-set correction terms. Converges to
/// the exact metric projection for closed convex sets with nonempty
/// intersection; iterates until the per-cycle movement falls below 1e−13
/// and the membership residual below 1e−11. A stalled run whose residual
/// stays large is reported as `Infeasible`.
pub fn project_intersection(stack: &OperatorStack, y: &[f64]) -> Result<Vec<f64>> {
    ensure_dim(y, stack.dim())?;
    ensure_finite(y, "projection input")?;
    for op in stack.ops() {
        if !op.is_projection() {
            return Err(Error::Unsupported(format!(
                "intersection projector requires projection-kind operators, got {}",
                op.name()
            )));
        }
    }
    let m = stack.len();
    let dim = stack.dim();
    let mut x = y.to_vec();
    let mut corrections = vec![vec![0.0; dim]; m];
    let mut prev_cycle = x.clone();
    for sweep in 0..DYKSTRA_MAX_SWEEPS {
        for (op, corr) in stack.ops().iter().zip(corrections.iter_mut()) {
            let shifted: Vec<f64> = x.iter().zip(corr.iter()).map(|(a, c)| a + c).collect();
            let projected = op.apply(&shifted)?;
            *corr = linalg::sub(&shifted, &projected);
            x = projected;
        }
        let moved = linalg::dist(&x, &prev_cycle);
        if moved <= DYKSTRA_TOL {
            let residual = stack.fixed_point_residual(&x)?;
            if residual <= DYKSTRA_RESIDUAL_TOL {
                return Ok(x);
            }
            // cyclic scheme stalled away from the sets: empty intersection
            return Err(Error::Infeasible);
        }
        if sweep == DYKSTRA_MAX_SWEEPS - 1 {
            break;
        }
        prev_cycle = x.clone();
    }
    Err(Error::NonConvergence(DYKSTRA_MAX_SWEEPS))
}

/// Reference solver for the variational inequality over `C`: iterates
/// `x ← P_C(x − γ F(x))` with the fixed step `γ = η/κ²` until the update
/// norm falls to 1e−12. The map contracts for that step size, so hitting
/// the 1e7 budget signals an invalid instance.
pub fn solve_vip_reference<P>(map: &MonotoneMap, project: P, x0: &[f64]) -> Result<Vec<f64>>
where
    P: Fn(&[f64]) -> Result<Vec<f64>>,
{
    ensure_finite(x0, "x0")?;
    let gamma = map.auto_mu();
    let mut x = project(x0)?;
    for _ in 0..REFERENCE_MAX_ITERS {
        let fx = map.eval(&x)?;
        let next = project(&linalg::add_scaled(&x, -gamma, &fx))?;
        let moved = linalg::dist(&next, &x);
        x = next;
        if moved <= REFERENCE_STEP_TOL {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence(REFERENCE_MAX_ITERS))
}

/// Empirical optimality residual `max(0, max_v −⟨F(x), v − x⟩)` over a set
/// of feasible sample points; at the exact solution every term is ≤ 0.
pub fn vip_residual(map: &MonotoneMap, x: &[f64], feasible_samples: &[Vec<f64>]) -> Result<f64> {
    if feasible_samples.is_empty() {
        return Err(Error::EmptySampleList);
    }
    let fx = map.eval(x)?;
    let mut worst = 0.0f64;
    for v in feasible_samples {
        ensure_dim(v, x.len())?;
        worst = worst.max(-linalg::dot(&fx, &linalg::sub(v, x)));
    }
    Ok(worst)
}

/// Rejection-samples `count` feasible points from the axis box
/// `around ± half_width`. Feasibility means zero fixed-point residual for
/// every stack member. Errors once `count * 20_000` draws fail.
pub fn sample_feasible(
    stack: &OperatorStack,
    around: &[f64],
    half_width: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    ensure_dim(around, stack.dim())?;
    let mut rng = sampling::rng_from_label(seed, "feasible-box-sampler");
    let budget = count as u64 * 20_000;
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        if tries >= budget {
            return Err(Error::SamplingExhausted(budget));
        }
        tries += 1;
        let v = sampling::uniform_in_box(&mut rng, around, half_width);
        if stack.fixed_point_residual(&v)? == 0.0 {
            out.push(v);
        }
    }
    Ok(out)
}
