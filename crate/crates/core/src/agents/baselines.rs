use rand::Rng;

use crate::env::{Environment, Policy};
use crate::error::{Error, Result};
use crate::linalg::argmax;
use crate::rng::RngStream;

use super::{Agent, Transition};

/// With probability `1 - epsilon` the argmax (lowest index on ties), else uniform.
pub fn epsilon_greedy_action<R: Rng + ?Sized>(q: &[f64], epsilon: f64, rng: &mut R) -> usize {
    debug_assert!((0.0..=1.0).contains(&epsilon));
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        rng.random_range(0..q.len())
    } else {
        argmax(q)
    }
}

/// Softmax probabilities `exp((q - max q) / temperature)`, normalized.
pub fn boltzmann_probs(q: &[f64], temperature: f64) -> Vec<f64> {
    let top = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = q.iter().map(|v| ((v - top) / temperature).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// Samples from `softmax(q / temperature)`.
pub fn boltzmann_action<R: Rng + ?Sized>(q: &[f64], temperature: f64, rng: &mut R) -> usize {
    debug_assert!(temperature > 0.0);
    let probs = boltzmann_probs(q, temperature);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    probs.len() - 1
}

/// Tabular action values with sample-average (1/n) step sizes and one-step
/// bootstrapped targets `r + gamma max_a Q_{h+1}(x', a)`.
#[derive(Debug, Clone)]
pub struct ValueEstimates {
    n_states: usize,
    n_actions: usize,
    horizon: usize,
    gamma: f64,
    q: Vec<f64>,
    visits: Vec<u64>,
}

impl ValueEstimates {
    pub fn new(n_states: usize, n_actions: usize, horizon: usize, gamma: f64, init: f64) -> Self {
        let len = horizon * n_states * n_actions;
        Self {
            n_states,
            n_actions,
            horizon,
            gamma,
            q: vec![init; len],
            visits: vec![0; len],
        }
    }

    fn index(&self, state: usize, action: usize, step: usize) -> usize {
        (step * self.n_states + state) * self.n_actions + action
    }

    pub fn row(&self, state: usize, step: usize) -> &[f64] {
        let start = self.index(state, 0, step);
        &self.q[start..start + self.n_actions]
    }

    pub fn visits(&self, state: usize, action: usize, step: usize) -> u64 {
        self.visits[self.index(state, action, step)]
    }

    pub fn update(&mut self, t: &Transition) {
        let boot = if t.terminal || t.step + 1 >= self.horizon {
            0.0
        } else {
            self.row(t.next_state, t.step + 1)
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let target = t.reward + self.gamma * boot;
        let i = self.index(t.state, t.action, t.step);
        self.visits[i] += 1;
        self.q[i] += (target - self.q[i]) / self.visits[i] as f64;
    }

    pub fn greedy_policy(&self) -> Policy {
        let actions: Vec<Vec<usize>> = (0..self.horizon)
            .map(|h| (0..self.n_states).map(|x| argmax(self.row(x, h))).collect())
            .collect();
        Policy::deterministic(self.n_actions, &actions)
    }
}

/// Epsilon-greedy on learned tabular values.
#[derive(Debug, Clone)]
pub struct EpsilonGreedyAgent {
    epsilon: f64,
    values: ValueEstimates,
}

impl EpsilonGreedyAgent {
    pub fn new(env: &Environment, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::param("epsilon", "must lie in [0, 1]"));
        }
        let m = &env.mdp;
        Ok(Self {
            epsilon,
            values: ValueEstimates::new(m.n_states(), m.n_actions(), m.horizon(), m.gamma(), 0.0),
        })
    }

    pub fn values(&self) -> &ValueEstimates {
        &self.values
    }
}

impl Agent for EpsilonGreedyAgent {
    fn name(&self) -> &'static str {
        "epsilon_greedy"
    }

    fn begin_episode(&mut self, _rng: &mut RngStream) {}

    fn act(&mut self, state: usize, step: usize, rng: &mut RngStream) -> usize {
        epsilon_greedy_action(self.values.row(state, step), self.epsilon, rng)
    }

    fn observe(&mut self, transition: &Transition, _rng: &mut RngStream) {
        self.values.update(transition);
    }

    fn end_episode(&mut self) {}

    fn episode_policy(&self) -> Policy {
        let v = &self.values;
        let eps = self.epsilon;
        Policy::from_fn(v.horizon, v.n_states, v.n_actions, |h, x| {
            let mut p = vec![eps / v.n_actions as f64; v.n_actions];
            p[argmax(v.row(x, h))] += 1.0 - eps;
            p
        })
    }

    fn greedy_policy(&self) -> Policy {
        self.values.greedy_policy()
    }
}

/// Boltzmann exploration on learned tabular values.
#[derive(Debug, Clone)]
pub struct BoltzmannAgent {
    temperature: f64,
    values: ValueEstimates,
}

impl BoltzmannAgent {
    pub fn new(env: &Environment, temperature: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::param("temperature", "must be finite and > 0"));
        }
        let m = &env.mdp;
        Ok(Self {
            temperature,
            values: ValueEstimates::new(m.n_states(), m.n_actions(), m.horizon(), m.gamma(), 0.0),
        })
    }
}

impl Agent for BoltzmannAgent {
    fn name(&self) -> &'static str {
        "boltzmann"
    }

    fn begin_episode(&mut self, _rng: &mut RngStream) {}

    fn act(&mut self, state: usize, step: usize, rng: &mut RngStream) -> usize {
        boltzmann_action(self.values.row(state, step), self.temperature, rng)
    }

    fn observe(&mut self, transition: &Transition, _rng: &mut RngStream) {
        self.values.update(transition);
    }

    fn end_episode(&mut self) {}

    fn episode_policy(&self) -> Policy {
        let v = &self.values;
        Policy::from_fn(v.horizon, v.n_states, v.n_actions, |h, x| {
            boltzmann_probs(v.row(x, h), self.temperature)
        })
    }

    fn greedy_policy(&self) -> Policy {
        self.values.greedy_policy()
    }
}

/// Uniformly random actions; never learns.
#[derive(Debug, Clone)]
pub struct UniformAgent {
    n_states: usize,
    n_actions: usize,
    horizon: usize,
}

impl UniformAgent {
    pub fn new(env: &Environment) -> Self {
        Self {
            n_states: env.mdp.n_states(),
            n_actions: env.mdp.n_actions(),
            horizon: env.mdp.horizon(),
        }
    }
}

impl Agent for UniformAgent {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn begin_episode(&mut self, _rng: &mut RngStream) {}

    fn act(&mut self, _state: usize, _step: usize, rng: &mut RngStream) -> usize {
        rng.random_range(0..self.n_actions)
    }

    fn observe(&mut self, _transition: &Transition, _rng: &mut RngStream) {}

    fn end_episode(&mut self) {}

    fn episode_policy(&self) -> Policy {
        Policy::uniform(self.horizon, self.n_states, self.n_actions)
    }
}

/// Follows the optimal policy computed by the simulator.
#[derive(Debug, Clone)]
pub struct OracleAgent {
    policy: Policy,
    actions: Vec<Vec<usize>>,
}

impl OracleAgent {
    pub fn new(env: &Environment) -> Self {
        let actions: Vec<Vec<usize>> = (0..env.mdp.horizon())
            .map(|h| {
                (0..env.mdp.n_states())
                    .map(|x| env.optimal.greedy_action(x, h))
                    .collect()
            })
            .collect();
        Self {
            policy: Policy::deterministic(env.mdp.n_actions(), &actions),
            actions,
        }
    }
}

impl Agent for OracleAgent {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn begin_episode(&mut self, _rng: &mut RngStream) {}

    fn act(&mut self, state: usize, step: usize, _rng: &mut RngStream) -> usize {
        self.actions[step][state]
    }

    fn observe(&mut self, _transition: &Transition, _rng: &mut RngStream) {}

    fn end_episode(&mut self) {}

    fn episode_policy(&self) -> Policy {
        self.policy.clone()
    }
}
