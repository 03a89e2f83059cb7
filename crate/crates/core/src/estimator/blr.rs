use rand::Rng;
use rand_distr::StandardNormal;

use super::ridge::RidgeState;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_with_jitter, symmetrize, Matrix, Vector};

/// Gaussian over weight vectors with a cached covariance square root.
#[derive(Debug, Clone)]
pub struct GaussianPosterior {
    mean: Vector,
    covariance: Matrix,
    sqrt_cov: Matrix,
}

impl GaussianPosterior {
    pub fn new(mean: Vector, mut covariance: Matrix) -> Result<Self> {
        if covariance.nrows() != mean.len() || covariance.ncols() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                actual: covariance.nrows(),
            });
        }
        symmetrize(&mut covariance);
        let sqrt_cov = cholesky_with_jitter(&covariance)?.unpack();
        Ok(Self {
            mean,
            covariance,
            sqrt_cov,
        })
    }

    /// Zero-mean isotropic prior `N(0, prior_std^2 I)`.
    pub fn prior(dim: usize, prior_std: f64) -> Result<Self> {
        check_std(prior_std, "prior std")?;
        Self::new(Vector::zeros(dim), Matrix::identity(dim, dim) * prior_std.powi(2))
    }

    /// Posterior from sufficient statistics `X^T X` and `X^T y`.
    pub fn from_statistics(xtx: &Matrix, xty: &Vector, prior_std: f64, noise_std: f64) -> Result<Self> {
        check_std(prior_std, "prior std")?;
        check_std(noise_std, "noise std")?;
        let d = xty.len();
        let noise_var = noise_std * noise_std;
        let mut precision = xtx / noise_var + Matrix::identity(d, d) / (prior_std * prior_std);
        symmetrize(&mut precision);
        let covariance = cholesky_with_jitter(&precision)?.inverse();
        let mean = &covariance * xty / noise_var;
        Self::new(mean, covariance)
    }

    /// Posterior whose precision is `gram / noise_std^2`: mean is the ridge
    /// estimate and the implied prior variance is `noise_std^2 / lambda`.
    pub fn from_ridge(state: &RidgeState, noise_std: f64) -> Result<Self> {
        check_std(noise_std, "noise std")?;
        Self::new(state.estimate(), state.inverse() * (noise_std * noise_std))
    }

    pub fn mean(&self) -> &Vector {
        &self.mean
    }

    pub fn covariance(&self) -> &Matrix {
        &self.covariance
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `w = mean + chol(Cov) z`, `z ~ N(0, I)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        let z = Vector::from_fn(self.dim(), |_, _| rng.sample(StandardNormal));
        &self.mean + &self.sqrt_cov * z
    }

    /// `center + chol(Cov) z`: a draw from the same covariance around another center.
    pub fn sample_around<R: Rng + ?Sized>(&self, center: &Vector, rng: &mut R) -> Vector {
        let z = Vector::from_fn(self.dim(), |_, _| rng.sample(StandardNormal));
        center + &self.sqrt_cov * z
    }

    /// Same covariance, different center.
    pub fn recentered(&self, mean: Vector) -> Self {
        Self {
            mean,
            covariance: self.covariance.clone(),
            sqrt_cov: self.sqrt_cov.clone(),
        }
    }
}

fn check_std(v: f64, what: &'static str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(what, format!("{v} must be finite and > 0")))
    }
}

/// `Cov = (Phi Phi^T / sigma_eps^2 + I / sigma^2)^{-1}`, `mean = Cov Phi y / sigma_eps^2`.
pub fn blr_posterior(
    features: &[Vector],
    targets: &[f64],
    dim: usize,
    prior_std: f64,
    noise_std: f64,
) -> Result<GaussianPosterior> {
    if features.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            actual: targets.len(),
        });
    }
    let mut xtx = Matrix::zeros(dim, dim);
    let mut xty = Vector::zeros(dim);
    for (phi, &y) in features.iter().zip(targets) {
        if phi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: phi.len(),
            });
        }
        xtx.ger(1.0, phi, phi, 1.0);
        xty.axpy(y, phi, 1.0);
    }
    GaussianPosterior::from_statistics(&xtx, &xty, prior_std, noise_std)
}

/// One posterior draw.
pub fn sample_gaussian<R: Rng + ?Sized>(posterior: &GaussianPosterior, rng: &mut R) -> Vector {
    posterior.sample(rng)
}
