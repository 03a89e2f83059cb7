use crate::env::{Policy, StateFeatures};
use crate::error::{Error, Result};
use crate::estimator::GaussianPosterior;
use crate::linalg::{argmax, Matrix, Vector};
use crate::rng::RngStream;

use super::replay::ReplayBuffer;
use super::{Agent, Transition};

/// Periods are in environment steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdqnConfig {
    /// Thompson draw period `T^S`.
    pub sample_period: u64,
    /// Posterior rebuild period `T^BT`.
    pub rebuild_period: u64,
    /// Target (feature network) sync period `T^T`.
    pub target_period: u64,
    /// Replay samples per rebuild `B`.
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Prior standard deviation `sigma`.
    pub prior_std: f64,
    /// Likelihood standard deviation `sigma_eps`.
    pub noise_std: f64,
    pub gamma: f64,
}

impl BdqnConfig {
    /// Periods derived from `T^T` with `T^S = T^T/10`, `T^BT = 10 T^T`, `B = 10 T^T`.
    pub fn scaled(target_period: u64) -> Self {
        Self {
            sample_period: (target_period / 10).max(1),
            rebuild_period: 10 * target_period,
            target_period,
            batch_size: 10 * target_period as usize,
            buffer_capacity: 100_000,
            prior_std: 0.001,
            noise_std: 1.0,
            gamma: 1.0,
        }
    }
}

/// Bayesian linear regression over fixed state features with one weight
/// vector per action, Thompson sampling and a replay/target schedule.
#[derive(Debug, Clone)]
pub struct BdqnLiteAgent {
    config: BdqnConfig,
    features: StateFeatures,
    n_actions: usize,
    horizon: usize,
    n_states: usize,
    posteriors: Vec<GaussianPosterior>,
    sampled: Vec<Vector>,
    target: Vec<Vector>,
    buffer: ReplayBuffer<Transition>,
    steps: u64,
    rebuilds: u64,
    draws: u64,
    target_syncs: u64,
}

impl BdqnLiteAgent {
    pub fn new(features: StateFeatures, n_states: usize, n_actions: usize, horizon: usize, config: BdqnConfig) -> Result<Self> {
        for (name, p) in [
            ("sample_period", config.sample_period),
            ("rebuild_period", config.rebuild_period),
            ("target_period", config.target_period),
        ] {
            if p == 0 {
                return Err(Error::param(name, "must be > 0"));
            }
        }
        if config.batch_size == 0 {
            return Err(Error::param("batch_size", "must be > 0"));
        }
        if n_actions == 0 {
            return Err(Error::param("n_actions", "must be > 0"));
        }
        if !(config.noise_std > 0.0 && config.noise_std.is_finite()) {
            return Err(Error::param("noise_std", "must be finite and > 0"));
        }
        if !(0.0..=1.0).contains(&config.gamma) {
            return Err(Error::param("gamma", "must lie in [0, 1]"));
        }
        let dim = features.dim();
        let prior = GaussianPosterior::prior(dim, config.prior_std)?;
        Ok(Self {
            buffer: ReplayBuffer::new(config.buffer_capacity)?,
            config,
            features,
            n_actions,
            horizon,
            n_states,
            posteriors: vec![prior; n_actions],
            sampled: vec![Vector::zeros(dim); n_actions],
            target: vec![Vector::zeros(dim); n_actions],
            steps: 0,
            rebuilds: 0,
            draws: 0,
            target_syncs: 0,
        })
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn target_syncs(&self) -> u64 {
        self.target_syncs
    }

    pub fn buffer(&self) -> &ReplayBuffer<Transition> {
        &self.buffer
    }

    pub fn posteriors(&self) -> &[GaussianPosterior] {
        &self.posteriors
    }

    pub fn posteriors_mut(&mut self) -> &mut [GaussianPosterior] {
        &mut self.posteriors
    }

    pub fn sampled_weights(&self) -> &[Vector] {
        &self.sampled
    }

    pub fn target_weights(&self) -> &[Vector] {
        &self.target
    }

    pub fn config(&self) -> &BdqnConfig {
        &self.config
    }

    fn scores(weights: &[Vector], phi: &Vector) -> Vec<f64> {
        weights.iter().map(|w| w.dot(phi)).collect()
    }

    /// `r` on terminal steps, else `r + gamma * w_target[a_hat]^T phi(x')` with
    /// `a_hat` greedy under the sampled weights.
    pub fn td_target(&self, t: &Transition) -> f64 {
        if t.terminal || t.step + 1 >= self.horizon {
            return t.reward;
        }
        let phi = self.features.eval(t.next_state, t.step + 1);
        let a_hat = argmax(&Self::scores(&self.sampled, phi));
        t.reward + self.config.gamma * self.target[a_hat].dot(phi)
    }

    /// Rebuilds every action's posterior from `B` uniform replay samples and
    /// resets the target weights to the new means.
    pub fn rebuild_posterior(&mut self, rng: &mut RngStream) -> Result<()> {
        let dim = self.features.dim();
        let batch = self.buffer.sample(self.config.batch_size, rng);
        let mut xtx = vec![Matrix::zeros(dim, dim); self.n_actions];
        let mut xty = vec![Vector::zeros(dim); self.n_actions];
        for t in &batch {
            let y = self.td_target(t);
            let phi = self.features.eval(t.state, t.step);
            xtx[t.action].ger(1.0, phi, phi, 1.0);
            xty[t.action].axpy(y, phi, 1.0);
        }
        for a in 0..self.n_actions {
            self.posteriors[a] =
                GaussianPosterior::from_statistics(&xtx[a], &xty[a], self.config.prior_std, self.config.noise_std)?;
            self.target[a] = self.posteriors[a].mean().clone();
        }
        self.rebuilds += 1;
        Ok(())
    }

    /// Draws `w_a ~ N(w_target[a], Cov_a)` for every action.
    pub fn draw_weights(&mut self, rng: &mut RngStream) {
        for a in 0..self.n_actions {
            self.sampled[a] = self.posteriors[a].sample_around(&self.target[a], rng);
        }
        self.draws += 1;
    }

    /// Feature-network sync. Features are fixed, so only the event is counted.
    fn sync_target_features(&mut self) {
        self.target_syncs += 1;
    }

    fn policy_for(&self, weights: &[Vector]) -> Policy {
        let actions: Vec<Vec<usize>> = (0..self.horizon)
            .map(|h| {
                (0..self.n_states)
                    .map(|x| argmax(&Self::scores(weights, self.features.eval(x, h))))
                    .collect()
            })
            .collect();
        Policy::deterministic(self.n_actions, &actions)
    }
}

/// Stores the transition, advances the step counter and fires whatever
/// schedule events fall on it.
pub fn bdqn_step(agent: &mut BdqnLiteAgent, transition: &Transition, rng: &mut RngStream) -> Result<()> {
    agent.buffer.push(*transition);
    agent.steps += 1;
    let t = agent.steps;
    if t.is_multiple_of(agent.config.target_period) {
        agent.sync_target_features();
    }
    if t.is_multiple_of(agent.config.rebuild_period) {
        agent.rebuild_posterior(rng)?;
    }
    if t.is_multiple_of(agent.config.sample_period) {
        agent.draw_weights(rng);
    }
    Ok(())
}

impl Agent for BdqnLiteAgent {
    fn name(&self) -> &'static str {
        "bdqn"
    }

    fn begin_episode(&mut self, _rng: &mut RngStream) {}

    fn act(&mut self, state: usize, step: usize, _rng: &mut RngStream) -> usize {
        argmax(&Self::scores(&self.sampled, self.features.eval(state, step)))
    }

    fn observe(&mut self, transition: &Transition, rng: &mut RngStream) {
        bdqn_step(self, transition, rng).expect("posterior covariance is positive definite");
    }

    fn end_episode(&mut self) {}

    fn episode_policy(&self) -> Policy {
        self.policy_for(&self.sampled)
    }

    fn greedy_policy(&self) -> Policy {
        self.policy_for(&self.target)
    }
}
