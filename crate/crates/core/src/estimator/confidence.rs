//! Confidence ellipsoids around ridge estimates and the backward radius
//! recursion across steps.

use super::ridge::RidgeState;
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Sub-Gaussian noise parameter `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", format!("{sigma} must be finite and > 0")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Constants entering the radius `theta_t^h(delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusParams {
    pub horizon: usize,
    pub delta: f64,
    pub dim: usize,
    pub sigma: f64,
    pub lambda: f64,
    /// `L`, the feature bound.
    pub feature_bound: f64,
    /// `L_omega`, the weight-norm bound.
    pub weight_bound: f64,
    /// Multiplier `c` on the propagated term `c theta^{h+1} rho^{h+1}`.
    ///
    /// Targets use the pessimistic member of the next set while the truth is
    /// some other member, so the target bias can reach twice the next radius.
    /// [`BIAS_FACTOR`] covers that; `1.0` gives the one-radius variant.
    pub bias_factor: f64,
}

/// Default for [`RadiusParams::bias_factor`].
pub const BIAS_FACTOR: f64 = 2.0;

impl RadiusParams {
    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param("delta", format!("{} not in (0,1)", self.delta)));
        }
        if self.horizon == 0 {
            return Err(Error::param("horizon", "must be >= 1"));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::param("lambda", "must be > 0"));
        }
        if self.sigma < 0.0 || self.weight_bound < 0.0 || self.feature_bound < 0.0 {
            return Err(Error::param("radius", "sigma, L and L_omega must be >= 0"));
        }
        if !(self.bias_factor >= 0.0 && self.bias_factor.is_finite()) {
            return Err(Error::param("bias_factor", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// `theta_t^h = sigma sqrt(2 log(H/delta) + d log(1 + t L^2/lambda))
///            + sqrt(lambda) L_omega + c theta^{h+1} rho^{h+1}`.
///
/// Pass `theta_next = rho_next = 0` for the last step.
pub fn confidence_radius(params: &RadiusParams, t: u64, theta_next: f64, rho_next: f64) -> Result<f64> {
    params.validate()?;
    if theta_next < 0.0 || rho_next < 0.0 {
        return Err(Error::param("radius", "theta_next and rho_next must be >= 0"));
    }
    let p = params;
    let log_term = 2.0 * (p.horizon as f64 / p.delta).ln()
        + p.dim as f64 * (t as f64 * p.feature_bound * p.feature_bound / p.lambda).ln_1p();
    Ok(p.sigma * log_term.sqrt() + p.lambda.sqrt() * p.weight_bound + p.bias_factor * theta_next * rho_next)
}

/// Radii for every step, evaluated from the last step backward.
///
/// `counts[h]` is the sample count of step `h`; `rho[h]` is `rho^h` for the
/// 0-based step `h` (only `rho[1..]` enter, via `theta^{h-1}`).
pub fn radius_schedule(params: &RadiusParams, counts: &[u64], rho: &[f64]) -> Result<Vec<f64>> {
    let horizon = params.horizon;
    if counts.len() != horizon || rho.len() != horizon {
        return Err(Error::DimensionMismatch {
            expected: horizon,
            actual: counts.len().min(rho.len()),
        });
    }
    let mut theta = vec![0.0; horizon];
    let (mut theta_next, mut rho_next) = (0.0, 0.0);
    for h in (0..horizon).rev() {
        theta[h] = confidence_radius(params, counts[h], theta_next, rho_next)?;
        theta_next = theta[h];
        rho_next = rho[h];
    }
    Ok(theta)
}

/// `{ w : ||w - center||_gram <= radius }`.
#[derive(Debug, Clone)]
pub struct ConfidenceSet {
    center: Vector,
    shape: RidgeState,
    radius: f64,
    delta: f64,
}

impl ConfidenceSet {
    pub fn new(state: &RidgeState, radius: f64, delta: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::param("radius", "must be >= 0"));
        }
        Ok(Self {
            center: state.estimate(),
            shape: state.clone(),
            radius,
            delta,
        })
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn shape(&self) -> &RidgeState {
        &self.shape
    }

    /// `||w - center||_gram`.
    pub fn distance(&self, w: &Vector) -> f64 {
        self.shape.gram_norm(&(w - &self.center))
    }

    pub fn contains(&self, w: &Vector) -> bool {
        self.distance(w) <= self.radius
    }

    /// `max_{w in C} phi^T w = phi^T center + radius ||phi||_{gram^{-1}}`.
    pub fn upper(&self, phi: &Vector) -> f64 {
        phi.dot(&self.center) + self.radius * self.shape.inverse_norm(phi)
    }

    /// `min_{w in C} phi^T w`.
    pub fn lower(&self, phi: &Vector) -> f64 {
        phi.dot(&self.center) - self.radius * self.shape.inverse_norm(phi)
    }
}
