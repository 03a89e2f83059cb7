//! Monte-Carlo and exact checks of the concentration results the agents rely on.

mod confidence;
mod determinant;
mod report;
mod self_normalized;
mod subgaussian;

use std::path::Path;

pub use confidence::{verify_confidence_lemma, ConfidenceParams};
pub use determinant::{verify_determinant_lemma, TrajectorySource};
pub use report::{failure_threshold, LemmaReport};
pub use self_normalized::{self_normalized_terms, verify_self_normalized, SelfNormalizedParams};
pub use subgaussian::{verify_subgaussian_assumption, NoiseSpec};

use crate::env::make_chain_mdp;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Sizes of the suite run by the `verify` command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteParams {
    pub self_normalized_trials: u64,
    pub confidence_trials: u64,
    pub confidence_episodes: usize,
    pub determinant_trials: u64,
    pub subgaussian_samples: u64,
}

impl SuiteParams {
    pub fn full() -> Self {
        Self {
            self_normalized_trials: 2000,
            confidence_trials: 1000,
            confidence_episodes: 200,
            determinant_trials: 1000,
            subgaussian_samples: 1_000_000,
        }
    }

    pub fn quick() -> Self {
        Self {
            self_normalized_trials: 200,
            confidence_trials: 50,
            confidence_episodes: 100,
            determinant_trials: 50,
            subgaussian_samples: 20_000,
        }
    }
}

/// All four checks with fixed problem settings; one stream per check.
pub fn run_suite(params: SuiteParams, seed: u64) -> Result<Vec<LemmaReport>> {
    let self_normalized = verify_self_normalized(
        SelfNormalizedParams {
            dim: 3,
            horizon: 500,
            sigma: 1.0,
            lambda: 1.0,
            delta: 0.05,
            trials: params.self_normalized_trials,
        },
        &RngStream::named(seed, "verify/self_normalized"),
    )?;
    let chain = make_chain_mdp(4, 3, 0.1, 0.1)?;
    let confidence = verify_confidence_lemma(
        &chain,
        ConfidenceParams {
            delta: 0.1,
            lambda: 1.0,
            episodes: params.confidence_episodes,
            trials: params.confidence_trials,
            bias_factor: crate::estimator::BIAS_FACTOR,
        },
        &RngStream::named(seed, "verify/confidence"),
    )?;
    let determinant = verify_determinant_lemma(
        &TrajectorySource::Random { dim: 4, length: 1000 },
        1.0,
        params.determinant_trials,
        &RngStream::named(seed, "verify/determinant"),
    )?;
    let b = 0.1;
    let subgaussian = verify_subgaussian_assumption(
        NoiseSpec::Uniform { bound: b },
        b,
        &[-3.0, -1.0, -0.1, 0.1, 1.0, 3.0],
        params.subgaussian_samples,
        &RngStream::named(seed, "verify/subgaussian"),
    )?;
    Ok(vec![self_normalized, confidence, determinant, subgaussian])
}

/// Writes the reports as a pretty JSON array.
pub fn write_reports(reports: &[LemmaReport], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let text = serde_json::to_string_pretty(reports).expect("reports serialize");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes_and_is_reproducible() {
        let a = run_suite(SuiteParams::quick(), 9).unwrap();
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|r| r.passed), "{a:#?}");
        let b = run_suite(SuiteParams::quick(), 9).unwrap();
        assert_eq!(a, b);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/report.json");
        write_reports(&a, &path).unwrap();
        let back: Vec<LemmaReport> = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(back, a);
    }
}
