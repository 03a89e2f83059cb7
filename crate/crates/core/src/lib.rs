//! Exploration in episodic MDPs whose optimal Q-function is linear in a
//! known feature map.
//!
//! The crate provides exact simulators with oracle planners ([`env`]),
//! ridge/Bayesian-linear-regression estimators with confidence ellipsoids
//! ([`estimator`]), optimistic and posterior-sampling agents ([`agents`]),
//! pseudo-regret accounting and experiment orchestration ([`harness`]), and
//! Monte-Carlo checks of the underlying concentration results ([`verify`]).

pub mod agents;
pub mod env;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod linalg;
pub mod rng;
pub mod verify;

pub use env::{EnvSpec, Environment, EpisodicMdp, FeatureMap, LinearQRealization, Policy};
pub use error::{Error, Result};
pub use estimator::{ConfidenceSet, GaussianPosterior, NoiseModel, RidgeState};
pub use harness::{RegretLedger, RunConfig};
pub use rng::RngStream;
pub use verify::LemmaReport;
