use serde::{Deserialize, Serialize};

use super::builders::{make_chain_mdp, make_maze_mdp, make_random_mdp, Environment};
use crate::error::Result;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Chain,
    Maze,
    Random,
}

/// Human-readable environment description.
///
/// Unused keys are ignored by kinds that do not need them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvSpec {
    pub kind: EnvKind,
    /// Chain length, or number of states for `random`.
    pub n: usize,
    /// Episode length `H` (ignored by `maze`, which uses the shortest path).
    #[serde(alias = "H")]
    pub horizon: usize,
    #[serde(alias = "slipProb")]
    pub slip_prob: f64,
    /// Maze rows using `S`, `G`, `#`, `.`.
    pub grid: Vec<String>,
    /// Uniform reward-noise half width `b`.
    pub noise_bound: f64,
    /// Actions for `random`.
    pub n_actions: usize,
    /// Generator seed for `random`.
    pub seed: u64,
}

impl Default for EnvSpec {
    fn default() -> Self {
        Self {
            kind: EnvKind::Chain,
            n: 5,
            horizon: 4,
            slip_prob: 0.1,
            grid: vec!["S...".into(), "....".into(), "....".into(), "...G".into()],
            noise_bound: 0.1,
            n_actions: 2,
            seed: 0,
        }
    }
}

impl EnvSpec {
    pub fn build(&self) -> Result<Environment> {
        match self.kind {
            EnvKind::Chain => make_chain_mdp(self.n, self.horizon, self.slip_prob, self.noise_bound),
            EnvKind::Maze => make_maze_mdp(&self.grid, self.noise_bound).map(|(env, _)| env),
            EnvKind::Random => {
                let mut rng = RngStream::named(self.seed, "env-generator");
                make_random_mdp(self.n, self.n_actions, self.horizon, self.noise_bound, &mut rng)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_and_aliases() {
        let spec: EnvSpec = toml::from_str("kind = \"chain\"\nn = 8\nH = 7\nslipProb = 0.0\n").unwrap();
        assert_eq!(spec.n, 8);
        assert_eq!(spec.horizon, 7);
        assert_eq!(spec.slip_prob, 0.0);
        let text = toml::to_string(&spec).unwrap();
        let back: EnvSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.build().unwrap().mdp.horizon(), 7);
    }

    #[test]
    fn maze_spec_builds() {
        let spec = EnvSpec {
            kind: EnvKind::Maze,
            ..Default::default()
        };
        let env = spec.build().unwrap();
        assert_eq!(env.mdp.horizon(), 6);
    }

    #[test]
    fn random_spec_is_seeded() {
        let spec = EnvSpec {
            kind: EnvKind::Random,
            n: 3,
            horizon: 2,
            ..Default::default()
        };
        let a = spec.build().unwrap();
        let b = spec.build().unwrap();
        assert_eq!(a.optimal, b.optimal);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<EnvSpec>("kind = \"chain\"\nbogus = 1\n").is_err());
    }
}
