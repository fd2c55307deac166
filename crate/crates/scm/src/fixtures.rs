//! Seeded random problem generators for tests and benchmarks. Every
//! generated instance carries an inner ball certified to lie inside all of
//! its sets, so nonempty interior is guaranteed by construction and
//! feasible points can be drawn directly from the ball.

use rand::RngExt;

use crate::linalg::{self, Matrix};
use crate::monotone::MonotoneMap;
use crate::operators::{FneOperator, OperatorStack};
use crate::sampling;
use crate::{Error, Result};

/// A random constraint system together with its interior witness.
#[derive(Debug, Clone)]
pub struct StackFixture {
    pub stack: OperatorStack,
    pub inner_center: Vec<f64>,
    pub inner_radius: f64,
}

impl StackFixture {
    /// Uniform draw from the certified interior ball.
    pub fn interior_point<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        sampling::uniform_in_ball(rng, &self.inner_center, self.inner_radius)
    }
}

/// `m` random halfspaces all containing the ball `B(center, radius)`, with
/// the center pushed away from the origin so the minimal-norm problem over
/// the intersection is nontrivial (the origin is infeasible for at least
/// one halfspace).
pub fn random_halfspaces_with_interior(dim: usize, m: usize, seed: u64) -> StackFixture {
    let mut rng = sampling::rng_from_label(seed, "halfspace-fixture");
    let radius = 0.5;
    let shift = 3.0;
    let dir = sampling::unit_vector(&mut rng, dim);
    let center = linalg::scale(shift, &dir);

    let mut ops = Vec::with_capacity(m);
    for i in 0..m {
        let normal = if i == 0 {
            // face the origin: <a, 0> = 0 > b makes 0 infeasible
            linalg::scale(-1.0, &dir)
        } else {
            sampling::unit_vector(&mut rng, dim)
        };
        let margin = 0.1 + 1.9 * rng.random::<f64>();
        let offset = linalg::dot(&normal, &center) + radius + margin;
        ops.push(FneOperator::halfspace(normal, offset).expect("unit normal"));
    }
    let stack = OperatorStack::new(ops, dim).expect("m >= 1");
    debug_assert_eq!(stack.fixed_point_residual(&center).unwrap(), 0.0);
    StackFixture {
        stack,
        inner_center: center,
        inner_radius: radius,
    }
}

/// A mixed stack of halfspaces, balls, and boxes (m total, cycled through
/// the kinds) sharing the interior ball `B(center, 0.5)`.
pub fn random_mixed_stack_with_interior(dim: usize, m: usize, seed: u64) -> StackFixture {
    let mut rng = sampling::rng_from_label(seed, "mixed-fixture");
    let radius = 0.5;
    let center = sampling::gaussian_vector(&mut rng, dim, 1.0);

    let mut ops = Vec::with_capacity(m);
    for i in 0..m {
        let margin = 0.1 + 1.9 * rng.random::<f64>();
        let op = match i % 3 {
            0 => {
                let normal = sampling::unit_vector(&mut rng, dim);
                let offset = linalg::dot(&normal, &center) + radius + margin;
                FneOperator::halfspace(normal, offset).expect("unit normal")
            }
            1 => {
                let drift = sampling::gaussian_vector(&mut rng, dim, 0.5);
                let ball_center = linalg::add_scaled(&center, 1.0, &drift);
                let ball_radius = linalg::norm(&drift) + radius + margin;
                FneOperator::ball(ball_center, ball_radius).expect("positive radius")
            }
            _ => {
                let lo: Vec<f64> = center
                    .iter()
                    .map(|c| c - radius - margin - rng.random::<f64>())
                    .collect();
                let hi: Vec<f64> = center
                    .iter()
                    .map(|c| c + radius + margin + rng.random::<f64>())
                    .collect();
                FneOperator::axis_box(lo, hi).expect("lo <= hi")
            }
        };
        ops.push(op);
    }
    let stack = OperatorStack::new(ops, dim).expect("m >= 1");
    debug_assert_eq!(stack.fixed_point_residual(&center).unwrap(), 0.0);
    StackFixture {
        stack,
        inner_center: center,
        inner_radius: radius,
    }
}

/// A random affine map with strictly positive strong-monotonicity modulus:
/// `A = G + α I` where `G` is Gaussian and `α` lifts the symmetric spectrum
/// above `min_eta`.
pub fn random_affine_map(dim: usize, min_eta: f64, seed: u64) -> Result<MonotoneMap> {
    let mut rng = sampling::rng_from_label(seed, "affine-fixture");
    let mut rows = Vec::with_capacity(dim);
    for _ in 0..dim {
        rows.push(sampling::gaussian_vector(&mut rng, dim, 1.0));
    }
    let g = Matrix::from_rows(rows)?;
    let min_eig = linalg::min_symmetric_eigenvalue(&g)?;
    let alpha = min_eta - min_eig.min(0.0);
    let mut a = g;
    for i in 0..dim {
        a.set(i, i, a.at(i, i) + alpha);
    }
    let b = sampling::gaussian_vector(&mut rng, dim, 1.0);
    let map = MonotoneMap::affine(a, b)?;
    if map.eta() < min_eta * 0.99 {
        return Err(Error::InvalidMap(format!(
            "fixture produced eta {} below the requested {min_eta}",
            map.eta()
        )));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfspace_fixture_contains_ball_and_excludes_origin() {
        for seed in 0..20 {
            let fx = random_halfspaces_with_interior(5, 3, seed);
            let mut rng = sampling::rng_from_label(seed, "probe");
            for _ in 0..50 {
                let v = fx.interior_point(&mut rng);
                assert_eq!(fx.stack.fixed_point_residual(&v).unwrap(), 0.0);
            }
            let origin = vec![0.0; 5];
            assert!(fx.stack.fixed_point_residual(&origin).unwrap() > 0.0);
        }
    }

    #[test]
    fn mixed_fixture_contains_ball() {
        for seed in 0..20 {
            let fx = random_mixed_stack_with_interior(4, 6, seed);
            let mut rng = sampling::rng_from_label(seed, "probe");
            for _ in 0..50 {
                let v = fx.interior_point(&mut rng);
                assert_eq!(fx.stack.fixed_point_residual(&v).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn affine_fixture_meets_requested_modulus() {
        for seed in 0..10 {
            let map = random_affine_map(6, 0.5, seed).unwrap();
            assert!(map.eta() >= 0.49);
            assert!(map.kappa() >= map.eta());
        }
    }

    #[test]
    fn fixtures_are_deterministic() {
        let a = random_halfspaces_with_interior(3, 2, 9);
        let b = random_halfspaces_with_interior(3, 2, 9);
        assert_eq!(a.inner_center, b.inner_center);
        let xa = a.stack.compose(&[5.0, 5.0, 5.0]).unwrap();
        let xb = b.stack.compose(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(xa, xb);
    }
}
