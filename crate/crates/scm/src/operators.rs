//! Catalog of firmly nonexpansive operators and their sequential
//! composition. Every member has an exact closed form except the linear
//! resolvent, which costs one pre-factorized solve. For the projection
//! kinds the fixed-point set equals the underlying convex set, so
//! `‖T x − x‖` doubles as an exact membership residual.

use crate::linalg::{self, ensure_dim, ensure_finite, lu_factor, LuFactors, Matrix};
use crate::{Error, Result};

/// Tolerance for the positive-semidefiniteness check on the symmetric part
/// of a resolvent's matrix.
pub const MONOTONE_EIG_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
enum Kind {
    /// Projection onto `{x : ⟨a, x⟩ ≤ b}`.
    Halfspace { a: Vec<f64>, b: f64, norm_sq: f64 },
    /// Projection onto `{x : ⟨a, x⟩ = b}`.
    Hyperplane { a: Vec<f64>, b: f64, norm_sq: f64 },
    /// Projection onto the closed ball `B(center, radius)`.
    Ball { center: Vec<f64>, radius: f64 },
    /// Componentwise clamp onto `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Componentwise soft-thresholding with threshold `t`, the proximal map
    /// of `t ‖·‖₁`; works in any dimension.
    SoftThreshold { t: f64 },
    /// Resolvent `(I + rA)⁻¹` of a monotone linear map, applied through a
    /// cached LU factorization of `I + rA`.
    LinearResolvent {
        a: Matrix,
        r: f64,
        factors: LuFactors,
    },
}

/// A firmly nonexpansive operator from the catalog.
#[derive(Debug, Clone)]
pub struct FneOperator {
    kind: Kind,
}

impl FneOperator {
    pub fn halfspace(a: Vec<f64>, b: f64) -> Result<Self> {
        ensure_finite(&a, "halfspace normal")?;
        if !b.is_finite() {
            return Err(Error::NonFinite("halfspace offset".into()));
        }
        let norm_sq = linalg::norm_sq(&a);
        if norm_sq <= 0.0 {
            return Err(Error::InvalidOperator(
                "halfspace normal must be nonzero".into(),
            ));
        }
        Ok(Self {
            kind: Kind::Halfspace { a, b, norm_sq },
        })
    }

    pub fn hyperplane(a: Vec<f64>, b: f64) -> Result<Self> {
        ensure_finite(&a, "hyperplane normal")?;
        if !b.is_finite() {
            return Err(Error::NonFinite("hyperplane offset".into()));
        }
        let norm_sq = linalg::norm_sq(&a);
        if norm_sq <= 0.0 {
            return Err(Error::InvalidOperator(
                "hyperplane normal must be nonzero".into(),
            ));
        }
        Ok(Self {
            kind: Kind::Hyperplane { a, b, norm_sq },
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        ensure_finite(&center, "ball center")?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidOperator(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            kind: Kind::Ball { center, radius },
        })
    }

    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        ensure_finite(&lo, "box lower bound")?;
        ensure_finite(&hi, "box upper bound")?;
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidOperator(
                "box requires lo <= hi componentwise".into(),
            ));
        }
        Ok(Self {
            kind: Kind::Box { lo, hi },
        })
    }

    pub fn soft_threshold(t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidOperator(format!(
                "soft-threshold parameter must be positive, got {t}"
            )));
        }
        Ok(Self {
            kind: Kind::SoftThreshold { t },
        })
    }

    /// Builds the resolvent `(I + rA)⁻¹`. `A` must be square and monotone:
    /// the smallest eigenvalue of `(A + Aᵀ)/2` may not fall below
    /// `-MONOTONE_EIG_TOL`.
    pub fn linear_resolvent(a: Matrix, r: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidOperator(format!(
                "resolvent matrix must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidOperator(format!(
                "resolvent parameter r must be positive, got {r}"
            )));
        }
        let min_eig = linalg::min_symmetric_eigenvalue(&a)?;
        if min_eig < -MONOTONE_EIG_TOL {
            return Err(Error::InvalidOperator(format!(
                "resolvent matrix is not monotone: min symmetric eigenvalue {min_eig:.3e}"
            )));
        }
        let n = a.rows();
        let mut system = a.clone();
        for i in 0..n {
            for j in 0..n {
                let v = r * system.at(i, j) + if i == j { 1.0 } else { 0.0 };
                system.set(i, j, v);
            }
        }
        let factors = lu_factor(&system).ok_or_else(|| {
            Error::SingularSystem("I + rA singular despite monotone A".into())
        })?;
        Ok(Self {
            kind: Kind::LinearResolvent { a, r, factors },
        })
    }

    /// Ambient dimension, `None` when the operator works in any dimension
    /// (soft-thresholding).
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            Kind::Halfspace { a, .. } | Kind::Hyperplane { a, .. } => Some(a.len()),
            Kind::Ball { center, .. } => Some(center.len()),
            Kind::Box { lo, .. } => Some(lo.len()),
            Kind::SoftThreshold { .. } => None,
            Kind::LinearResolvent { a, .. } => Some(a.rows()),
        }
    }

    /// True for the metric-projection kinds, whose fixed set is the
    /// projected-onto convex set.
    pub fn is_projection(&self) -> bool {
        matches!(
            self.kind,
            Kind::Halfspace { .. } | Kind::Hyperplane { .. } | Kind::Ball { .. } | Kind::Box { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Halfspace { .. } => "halfspace",
            Kind::Hyperplane { .. } => "hyperplane",
            Kind::Ball { .. } => "ball",
            Kind::Box { .. } => "box",
            Kind::SoftThreshold { .. } => "soft_threshold",
            Kind::LinearResolvent { .. } => "linear_resolvent",
        }
    }

    /// Evaluates `T x`. Inputs must be finite; projections of NaN would
    /// silently pass the feasibility branches otherwise.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if let Some(d) = self.dim() {
            ensure_dim(x, d)?;
        }
        ensure_finite(x, "operator input")?;
        Ok(match &self.kind {
            Kind::Halfspace { a, b, norm_sq } => {
                let excess = linalg::dot(a, x) - b;
                if excess <= 0.0 {
                    x.to_vec()
                } else {
                    linalg::add_scaled(x, -excess / norm_sq, a)
                }
            }
            Kind::Hyperplane { a, b, norm_sq } => {
                let excess = linalg::dot(a, x) - b;
                linalg::add_scaled(x, -excess / norm_sq, a)
            }
            Kind::Ball { center, radius } => {
                let offset = linalg::sub(x, center);
                let d = linalg::norm(&offset);
                if d <= *radius {
                    x.to_vec()
                } else {
                    linalg::add_scaled(center, radius / d, &offset)
                }
            }
            Kind::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| v.clamp(*l, *h))
                .collect(),
            Kind::SoftThreshold { t } => x
                .iter()
                .map(|v| v.signum() * (v.abs() - t).max(0.0))
                .collect(),
            Kind::LinearResolvent { factors, .. } => factors.solve(x),
        })
    }

    /// The `(a, b)` data of a halfspace projection, `None` for other kinds.
    /// The polyhedral oracle uses this to recover the constraint system.
    pub fn as_halfspace(&self) -> Option<(Vec<f64>, f64)> {
        match &self.kind {
            Kind::Halfspace { a, b, .. } => Some((a.clone(), *b)),
            _ => None,
        }
    }

    /// The `(A, r)` data of a linear resolvent, `None` for other kinds.
    pub fn as_linear_resolvent(&self) -> Option<(&Matrix, f64)> {
        match &self.kind {
            Kind::LinearResolvent { a, r, .. } => Some((a, *r)),
            _ => None,
        }
    }

    /// `‖T x − x‖`; zero exactly when `x` is a fixed point.
    pub fn fix_residual(&self, x: &[f64]) -> Result<f64> {
        Ok(linalg::dist(&self.apply(x)?, x))
    }

    /// Exact fixed-set membership test at tolerance `tol`.
    pub fn is_fixed(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.fix_residual(x)? <= tol)
    }
}

/// Result of one sequential pass through a stack: the final point and every
/// intermediate `φ_0 .. φ_m` (the input is `φ_0`).
#[derive(Debug, Clone)]
pub struct StackPass {
    pub output: Vec<f64>,
    pub intermediates: Vec<Vec<f64>>,
}

/// An ordered family `T_1, …, T_m` sharing one ambient dimension.
#[derive(Debug, Clone)]
pub struct OperatorStack {
    ops: Vec<FneOperator>,
    dim: usize,
}

impl OperatorStack {
    pub fn new(ops: Vec<FneOperator>, dim: usize) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidOperator(
                "operator stack must contain at least one operator".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::InvalidOperator("ambient dimension must be >= 1".into()));
        }
        for (i, op) in ops.iter().enumerate() {
            if let Some(d) = op.dim() {
                if d != dim {
                    return Err(Error::InvalidOperator(format!(
                        "operator {i} ({}) has dimension {d}, stack expects {dim}",
                        op.name()
                    )));
                }
            }
        }
        Ok(Self { ops, dim })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        false // m >= 1 by construction
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[FneOperator] {
        &self.ops
    }

    /// Sequential pass `φ_i = T_i φ_{i-1} + e_i` (errors zero when absent).
    /// Intermediates are always materialized; the stacks are small and the
    /// composition diagnostics need them.
    pub fn apply_stack(&self, x: &[f64], errors: Option<&[Vec<f64>]>) -> Result<StackPass> {
        ensure_dim(x, self.dim)?;
        if let Some(errs) = errors {
            if errs.len() != self.ops.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.ops.len(),
                    got: errs.len(),
                });
            }
            for e in errs {
                ensure_dim(e, self.dim)?;
            }
        }
        let mut intermediates = Vec::with_capacity(self.ops.len() + 1);
        intermediates.push(x.to_vec());
        let mut current = x.to_vec();
        for (i, op) in self.ops.iter().enumerate() {
            let mut next = op.apply(&current)?;
            if let Some(errs) = errors {
                for (v, e) in next.iter_mut().zip(&errs[i]) {
                    *v += e;
                }
            }
            intermediates.push(next.clone());
            current = next;
        }
        Ok(StackPass {
            output: current,
            intermediates,
        })
    }

    /// Error-free composition `T x = T_m ⋯ T_1 x`.
    pub fn compose(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.apply_stack(x, None)?.output)
    }

    /// `max_i ‖T_i x − x‖`, evaluated error-free. Zero exactly when `x` is a
    /// common fixed point of all members.
    pub fn fixed_point_residual(&self, x: &[f64]) -> Result<f64> {
        ensure_dim(x, self.dim)?;
        let mut worst = 0.0f64;
        for op in &self.ops {
            worst = worst.max(op.fix_residual(x)?);
        }
        Ok(worst)
    }
}
