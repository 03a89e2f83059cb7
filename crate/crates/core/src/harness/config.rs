//! TOML configuration documents. Every field is optional; the defaults are
//! listed on each field and in `configs/` at the repository root.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agents::PsrlTargets;
use crate::env::EnvSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Linucb,
    Linpsrl,
    Bdqn,
    EpsilonGreedy,
    Boltzmann,
    Uniform,
    Oracle,
    /// Maze environments only.
    HypothesisPsrl,
}

impl AgentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Linucb => "linucb",
            AgentKind::Linpsrl => "linpsrl",
            AgentKind::Bdqn => "bdqn",
            AgentKind::EpsilonGreedy => "epsilon_greedy",
            AgentKind::Boltzmann => "boltzmann",
            AgentKind::Uniform => "uniform",
            AgentKind::Oracle => "oracle",
            AgentKind::HypothesisPsrl => "hypothesis_psrl",
        }
    }
}

/// Agent kind and hyperparameters. Keys irrelevant to `kind` are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentSpec {
    /// Default `linucb`.
    pub kind: AgentKind,
    /// Exploration rate for `epsilon_greedy`. Default 0.1.
    pub epsilon: f64,
    /// Softmax temperature for `boltzmann`. Default 1.0.
    pub temperature: f64,
    /// Fixed `rho` for `linucb`/`linpsrl` instead of the empirical plug-in. Default unset.
    pub rho: Option<f64>,
    /// Regression targets for `linpsrl`: `sampled` or `pessimistic`. Default `sampled`.
    pub targets: PsrlTargets,
    /// `T^T` for `bdqn`; unset periods are derived from it. Default 10.
    pub target_period: u64,
    /// `T^S` for `bdqn`. Default `target_period / 10` (at least 1).
    pub sample_period: Option<u64>,
    /// `T^BT` for `bdqn`. Default `10 * target_period`.
    pub rebuild_period: Option<u64>,
    /// `B` for `bdqn`. Default `10 * target_period`.
    pub batch_size: Option<usize>,
    /// Replay capacity for `bdqn`. Default 100000.
    pub buffer_capacity: usize,
    /// Prior standard deviation for `bdqn`. Default 0.001.
    pub prior_std: f64,
    /// Likelihood standard deviation for `bdqn`. Default 1.0.
    pub noise_std: f64,
    /// Hypothesis count for `hypothesis_psrl`. Default 8.
    pub hypotheses: usize,
}

impl Default for AgentSpec {
    fn default() -> Self {
        Self {
            kind: AgentKind::Linucb,
            epsilon: 0.1,
            temperature: 1.0,
            rho: None,
            targets: PsrlTargets::Sampled,
            target_period: 10,
            sample_period: None,
            rebuild_period: None,
            batch_size: None,
            buffer_capacity: 100_000,
            prior_std: 0.001,
            noise_std: 1.0,
            hypotheses: 8,
        }
    }
}

/// A single experiment: one environment, one agent, several seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub env: EnvSpec,
    pub agent: AgentSpec,
    /// Episodes per run `T`. Default 1000.
    pub episodes: usize,
    /// One run per seed. Default `[0]`.
    pub seeds: Vec<u64>,
    /// Confidence level. Default 0.1.
    pub delta: f64,
    /// Ridge regularizer, and prior variance for `linpsrl`. Default 1.0.
    pub lambda: f64,
    /// Noise scale; unset uses the environment's sub-Gaussian constant. Default unset.
    pub sigma: Option<f64>,
    /// Output directory; unset writes nothing. Default unset.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            env: EnvSpec::default(),
            agent: AgentSpec::default(),
            episodes: 1000,
            seeds: vec![0],
            delta: 0.1,
            lambda: 1.0,
            sigma: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::Config("episodes must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config("delta must lie in (0, 1)".into()));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config("lambda must be finite and > 0".into()));
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config("sigma must be finite and > 0".into()));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical TOML rendering, excluding `output`.
    pub fn hash(&self) -> String {
        let canonical = RunConfig {
            output: None,
            ..self.clone()
        };
        let text = toml::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Every agent in `agents` over the seeds of `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Shared settings; `base.agent` is ignored.
    pub base: RunConfig,
    /// Default: linucb, linpsrl, epsilon_greedy.
    pub agents: Vec<AgentSpec>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let kinds = [AgentKind::Linucb, AgentKind::Linpsrl, AgentKind::EpsilonGreedy];
        Self {
            base: RunConfig::default(),
            agents: kinds
                .into_iter()
                .map(|kind| AgentSpec {
                    kind,
                    ..AgentSpec::default()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorKind {
    /// Always the environment in `run.env`.
    Fixed,
    /// Random tabular MDPs.
    Random,
}

/// Distribution over environments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorSpec {
    /// Default `random`.
    pub kind: PriorKind,
    /// Default 5.
    pub n_states: usize,
    /// Default 2.
    pub n_actions: usize,
    /// Default 3.
    pub horizon: usize,
    /// Default 0.1.
    pub noise_bound: f64,
    /// Seed of the environment draws. Default 0.
    pub seed: u64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self {
            kind: PriorKind::Random,
            n_states: 5,
            n_actions: 2,
            horizon: 3,
            noise_bound: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BayesConfig {
    /// Agent and run settings; `run.env` is used only by the `fixed` prior.
    pub run: RunConfig,
    pub prior: PriorSpec,
    /// Prior draws `M`; draw `m` runs with `run.seeds[m % len]`. Default 20.
    pub draws: usize,
}

impl Default for BayesConfig {
    fn default() -> Self {
        Self {
            run: RunConfig {
                episodes: 200,
                ..RunConfig::default()
            },
            prior: PriorSpec::default(),
            draws: 20,
        }
    }
}

/// Reads and parses a TOML document.
pub fn load_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_all_defaults() {
        let run: RunConfig = toml::from_str("").unwrap();
        assert_eq!(run, RunConfig::default());
        let sweep: SweepConfig = toml::from_str("").unwrap();
        assert_eq!(sweep, SweepConfig::default());
        let bayes: BayesConfig = toml::from_str("").unwrap();
        assert_eq!(bayes, BayesConfig::default());
    }

    #[test]
    fn parses_nested_tables() {
        let text = r#"
episodes = 50
seeds = [1, 2, 3]

[env]
kind = "maze"

[agent]
kind = "epsilon_greedy"
epsilon = 0.2
"#;
        let run: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(run.episodes, 50);
        assert_eq!(run.seeds, vec![1, 2, 3]);
        assert_eq!(run.agent.kind, AgentKind::EpsilonGreedy);
        assert_eq!(run.agent.epsilon, 0.2);
        run.validate().unwrap();
    }

    #[test]
    fn validation_and_unknown_keys() {
        assert!(toml::from_str::<RunConfig>("episodez = 3").is_err());
        let bad = RunConfig {
            seeds: vec![],
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            episodes: 0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn hash_ignores_output_only() {
        let a = RunConfig::default();
        let b = RunConfig {
            output: Some("x".into()),
            ..a.clone()
        };
        let c = RunConfig {
            episodes: 7,
            ..a.clone()
        };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
