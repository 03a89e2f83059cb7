//! Ridge statistics, confidence ellipsoids, the radius recursion, rho
//! quantities and the Gaussian Bayesian-linear-regression posterior.

mod blr;
mod confidence;
mod determinant;
mod rho;
mod ridge;

pub use blr::{blr_posterior, sample_gaussian, GaussianPosterior};
pub use confidence::{confidence_radius, radius_schedule, ConfidenceSet, NoiseModel, RadiusParams, BIAS_FACTOR};
pub use determinant::determinant_lemma_gap;
pub use rho::{bar_rho, rho_empirical, rho_from_outer};
pub use ridge::{RidgeSnapshot, RidgeState};
