use crate::estimator::BIAS_FACTOR;
use crate::env::{Environment, Policy};
use crate::error::Result;
use crate::linalg::argmax;
use crate::rng::RngStream;

use super::linear::{PessimisticRegression, PessimisticRegressionConfig};
use super::{Agent, Transition};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinUcbConfig {
    pub lambda: f64,
    pub delta: f64,
    pub sigma: f64,
    pub rho_override: Option<f64>,
}

/// Optimistic agent: acts on the upper confidence bound of each step's set.
#[derive(Debug, Clone)]
pub struct LinUcbAgent {
    core: PessimisticRegression,
    buffer: Vec<Transition>,
    episode: u64,
}

impl LinUcbAgent {
    pub fn new(env: &Environment, config: LinUcbConfig) -> Result<Self> {
        let core = PessimisticRegression::new(
            env,
            PessimisticRegressionConfig {
                lambda: config.lambda,
                delta: config.delta,
                sigma: config.sigma,
                rho_override: config.rho_override,
                bias_factor: BIAS_FACTOR,
            },
        )?;
        Ok(Self {
            core,
            buffer: Vec::new(),
            episode: 0,
        })
    }

    pub fn regression(&self) -> &PessimisticRegression {
        &self.core
    }

    pub fn regression_mut(&mut self) -> &mut PessimisticRegression {
        &mut self.core
    }

    pub fn episode(&self) -> u64 {
        self.episode
    }

    /// Upper confidence scores `phi^T w_hat + theta ||phi||_{gram^{-1}}` per action.
    pub fn ucb_scores(&self, state: usize, step: usize) -> Vec<f64> {
        self.core.upper_scores(state, step)
    }

    fn optimistic_policy(&self) -> Policy {
        let f = self.core.features();
        let actions: Vec<Vec<usize>> = (0..f.horizon())
            .map(|h| (0..f.n_states()).map(|x| linucb_action(self, x, h)).collect())
            .collect();
        Policy::deterministic(f.n_actions(), &actions)
    }
}

/// `argmax_a` of the upper confidence score, ties to the lowest index.
pub fn linucb_action(agent: &LinUcbAgent, state: usize, step: usize) -> usize {
    argmax(&agent.ucb_scores(state, step))
}

impl Agent for LinUcbAgent {
    fn name(&self) -> &'static str {
        "linucb"
    }

    fn begin_episode(&mut self, _rng: &mut RngStream) {
        self.buffer.clear();
    }

    fn act(&mut self, state: usize, step: usize, _rng: &mut RngStream) -> usize {
        linucb_action(self, state, step)
    }

    fn observe(&mut self, transition: &Transition, _rng: &mut RngStream) {
        self.buffer.push(*transition);
    }

    fn end_episode(&mut self) {
        let batch = std::mem::take(&mut self.buffer);
        self.core
            .commit_episode(&batch)
            .expect("ridge update on validated features");
        self.episode += 1;
    }

    fn episode_policy(&self) -> Policy {
        self.optimistic_policy()
    }

    fn greedy_policy(&self) -> Policy {
        let f = self.core.features();
        let actions: Vec<Vec<usize>> = (0..f.horizon())
            .map(|h| (0..f.n_states()).map(|x| self.core.greedy_action(x, h)).collect())
            .collect();
        Policy::deterministic(f.n_actions(), &actions)
    }
}
