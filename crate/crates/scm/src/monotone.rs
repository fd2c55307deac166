//! Strongly monotone Lipschitz maps with certified constants `(η, κ)`, the
//! damped step `x − μβ F(x)`, and its contraction factor `τ`.
//!
//! For the affine kind the constants are computed, not declared:
//! `η = λ_min((A + Aᵀ)/2)` and `κ = σ_max(A)`. A user override may restate
//! them but is rejected when it is slacker than the computed values by more
//! than [`CONSTANT_OVERRIDE_TOL`]; overrides tighter than the truth pass
//! construction and are caught by the diagnostics suite instead.

use crate::linalg::{self, ensure_dim, ensure_finite, Matrix};
use crate::{Error, Result};

/// Slack allowed when a user-declared `(η, κ)` understates the computed
/// values.
pub const CONSTANT_OVERRIDE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
enum MapKind {
    /// `F = Id`, selecting the minimal-norm feasible point.
    Identity,
    /// `F = Id − a`, selecting the feasible point closest to `a`.
    ClosestPoint { target: Vec<f64> },
    /// `F(x) = A x + b`.
    Affine { a: Matrix, b: Vec<f64> },
}

/// An `η`-strongly monotone, `κ`-Lipschitz map.
#[derive(Debug, Clone)]
pub struct MonotoneMap {
    kind: MapKind,
    eta: f64,
    kappa: f64,
}

impl MonotoneMap {
    pub fn identity() -> Self {
        Self {
            kind: MapKind::Identity,
            eta: 1.0,
            kappa: 1.0,
        }
    }

    pub fn closest_point(target: Vec<f64>) -> Result<Self> {
        ensure_finite(&target, "closest-point target")?;
        Ok(Self {
            kind: MapKind::ClosestPoint { target },
            eta: 1.0,
            kappa: 1.0,
        })
    }

    /// Affine map with computed constants. Fails when the symmetric part of
    /// `A` is not positive definite (the map would not be strongly
    /// monotone).
    pub fn affine(a: Matrix, b: Vec<f64>) -> Result<Self> {
        let (eta, kappa) = Self::affine_constants(&a, &b)?;
        Ok(Self {
            kind: MapKind::Affine { a, b },
            eta,
            kappa,
        })
    }

    /// Affine map with user-declared constants. Declarations slacker than
    /// the computed values by more than [`CONSTANT_OVERRIDE_TOL`] are
    /// rejected; declarations tighter than the truth construct fine and
    /// fail the runtime certificates.
    pub fn affine_with_constants(a: Matrix, b: Vec<f64>, eta: f64, kappa: f64) -> Result<Self> {
        let (eta_c, kappa_c) = Self::affine_constants(&a, &b)?;
        if !(eta.is_finite() && kappa.is_finite() && eta > 0.0) {
            return Err(Error::InvalidMap(format!(
                "declared constants must be finite with eta > 0, got eta={eta}, kappa={kappa}"
            )));
        }
        if kappa < eta {
            return Err(Error::InvalidMap(format!(
                "declared kappa={kappa} < eta={eta} violates kappa >= eta > 0"
            )));
        }
        if eta < eta_c - CONSTANT_OVERRIDE_TOL {
            return Err(Error::InvalidMap(format!(
                "declared eta={eta} is slacker than computed eta={eta_c:.12} by more than {CONSTANT_OVERRIDE_TOL:e}"
            )));
        }
        if kappa > kappa_c + CONSTANT_OVERRIDE_TOL {
            return Err(Error::InvalidMap(format!(
                "declared kappa={kappa} is slacker than computed kappa={kappa_c:.12} by more than {CONSTANT_OVERRIDE_TOL:e}"
            )));
        }
        Ok(Self {
            kind: MapKind::Affine { a, b },
            eta,
            kappa,
        })
    }

    fn affine_constants(a: &Matrix, b: &[f64]) -> Result<(f64, f64)> {
        if !a.is_square() {
            return Err(Error::InvalidMap(format!(
                "affine matrix must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        ensure_finite(b, "affine offset")?;
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        let eta = linalg::min_symmetric_eigenvalue(a)?;
        if eta <= 0.0 {
            return Err(Error::InvalidMap(format!(
                "affine map is not strongly monotone: min symmetric eigenvalue {eta:.3e}"
            )));
        }
        let kappa = linalg::spectral_norm(a)?;
        Ok((eta, kappa))
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Ambient dimension, `None` for the dimension-generic identity.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            MapKind::Identity => None,
            MapKind::ClosestPoint { target } => Some(target.len()),
            MapKind::Affine { a, .. } => Some(a.rows()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if let Some(d) = self.dim() {
            ensure_dim(x, d)?;
        }
        ensure_finite(x, "map input")?;
        Ok(match &self.kind {
            MapKind::Identity => x.to_vec(),
            MapKind::ClosestPoint { target } => linalg::sub(x, target),
            MapKind::Affine { a, b } => {
                let mut out = a.matvec(x);
                for (o, bi) in out.iter_mut().zip(b) {
                    *o += bi;
                }
                out
            }
        })
    }

    /// The midpoint `η/κ²` of the admissible interval `(0, 2η/κ²)`; the
    /// default when a config says `"auto"`.
    pub fn auto_mu(&self) -> f64 {
        self.eta / (self.kappa * self.kappa)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            MapKind::Identity => "identity",
            MapKind::ClosestPoint { .. } => "closest_point",
            MapKind::Affine { .. } => "affine",
        }
    }
}

/// Contraction factor `τ = 1 − sqrt(1 + μ²κ² − 2μη) ∈ (0, 1]`, valid for
/// `μ ∈ (0, 2η/κ²)` and `κ ≥ η > 0`.
pub fn tau(mu: f64, eta: f64, kappa: f64) -> Result<f64> {
    if !(eta > 0.0 && kappa >= eta) {
        return Err(Error::InvalidConfig(format!(
            "tau requires kappa >= eta > 0, got eta={eta}, kappa={kappa}"
        )));
    }
    let upper = 2.0 * eta / (kappa * kappa);
    if !(mu > 0.0 && mu < upper) {
        return Err(Error::InvalidConfig(format!(
            "mu={mu} outside the admissible interval (0, {upper}) = (0, 2*eta/kappa^2)"
        )));
    }
    let radicand = (1.0 + mu * mu * kappa * kappa - 2.0 * mu * eta).max(0.0);
    Ok(1.0 - radicand.sqrt())
}

/// Step parameters for one damped step; `μ` inside `(0, 2η/κ²)` for the
/// map's constants and `β ∈ (0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct StepParams {
    pub mu: f64,
    pub beta: f64,
}

impl StepParams {
    pub fn new(mu: f64, beta: f64, map: &MonotoneMap) -> Result<Self> {
        tau(mu, map.eta(), map.kappa())?;
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "beta={beta} outside (0, 1]"
            )));
        }
        Ok(Self { mu, beta })
    }
}

/// The damped step `U^β x = x − μβ F(x)`.
pub fn u_beta_step(map: &MonotoneMap, params: &StepParams, x: &[f64]) -> Result<Vec<f64>> {
    let fx = map.eval(x)?;
    Ok(linalg::add_scaled(x, -params.mu * params.beta, &fx))
}
