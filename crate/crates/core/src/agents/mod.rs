//! Decision-making strategies.
//!
//! Every agent follows the same episode protocol, driven by the harness:
//! [`Agent::begin_episode`], then [`Agent::episode_policy`] is read for exact
//! evaluation, then `act`/`observe` for each step, then [`Agent::end_episode`].

mod baselines;
mod bdqn;
mod hypothesis;
mod linear;
mod linpsrl;
mod linucb;
mod replay;

pub use baselines::{
    boltzmann_action, boltzmann_probs, epsilon_greedy_action, BoltzmannAgent, EpsilonGreedyAgent, OracleAgent,
    UniformAgent, ValueEstimates,
};
pub use bdqn::{bdqn_step, BdqnConfig, BdqnLiteAgent};
pub use hypothesis::{hypothesis_psrl_episode, HypothesisSetPsrl};
pub use linear::{PessimisticRegression, PessimisticRegressionConfig};
pub use linpsrl::{linpsrl_begin_episode, LinPsrlAgent, LinPsrlConfig, PsrlTargets};
pub use linucb::{linucb_action, LinUcbAgent, LinUcbConfig};
pub use replay::ReplayBuffer;

use crate::env::Policy;
use crate::rng::RngStream;

/// One environment step `(x, a, r, x', h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
    /// 0-based step index.
    pub step: usize,
    /// Set on the last step of the episode.
    pub terminal: bool,
}

pub trait Agent: Send {
    fn name(&self) -> &'static str;

    fn begin_episode(&mut self, rng: &mut RngStream);

    fn act(&mut self, state: usize, step: usize, rng: &mut RngStream) -> usize;

    fn observe(&mut self, transition: &Transition, rng: &mut RngStream);

    fn end_episode(&mut self);

    /// The behaviour policy of the current episode (for exact evaluation).
    fn episode_policy(&self) -> Policy;

    /// Exploitation map: greedy on the agent's current point estimates.
    fn greedy_policy(&self) -> Policy {
        self.episode_policy()
    }
}
