use rand::Rng;

use crate::error::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-12;

/// Zero-mean additive reward noise, uniform on `[-bound, bound]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardNoise {
    pub bound: f64,
}

impl RewardNoise {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.bound == 0.0 {
            0.0
        } else {
            rng.random_range(-self.bound..=self.bound)
        }
    }
}

/// Finite episodic MDP with time-indexed dynamics.
///
/// Tables are indexed by `(step, state, action)`; `step` runs over `0..horizon`.
#[derive(Debug, Clone)]
pub struct EpisodicMdp {
    n_states: usize,
    n_actions: usize,
    horizon: usize,
    gamma: f64,
    transitions: Vec<f64>,
    reward_mean: Vec<f64>,
    noise: RewardNoise,
    initial: Vec<f64>,
}

impl EpisodicMdp {
    /// Builds and validates an MDP.
    ///
    /// `transitions` has length `H*S*A*S` (next state fastest), `reward_mean`
    /// has length `H*S*A`, `initial` has length `S`.
    pub fn new(
        n_states: usize,
        n_actions: usize,
        horizon: usize,
        gamma: f64,
        transitions: Vec<f64>,
        reward_mean: Vec<f64>,
        noise: RewardNoise,
        initial: Vec<f64>,
    ) -> Result<Self> {
        if n_states == 0 || n_actions == 0 || horizon == 0 {
            return Err(Error::Environment(
                "nStates, nActions and H must be >= 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::param("gamma", format!("{gamma} not in [0,1]")));
        }
        if !(noise.bound >= 0.0 && noise.bound.is_finite()) {
            return Err(Error::param("noise_bound", "must be finite and >= 0"));
        }
        let sa = horizon * n_states * n_actions;
        if transitions.len() != sa * n_states {
            return Err(Error::DimensionMismatch {
                expected: sa * n_states,
                actual: transitions.len(),
            });
        }
        if reward_mean.len() != sa {
            return Err(Error::DimensionMismatch {
                expected: sa,
                actual: reward_mean.len(),
            });
        }
        if initial.len() != n_states {
            return Err(Error::DimensionMismatch {
                expected: n_states,
                actual: initial.len(),
            });
        }
        for (i, row) in transitions.chunks(n_states).enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::Environment(format!(
                    "transition row {i} is not a probability vector (sum {sum})"
                )));
            }
        }
        let init_sum: f64 = initial.iter().sum();
        if initial.iter().any(|&p| p < 0.0) || (init_sum - 1.0).abs() > ROW_TOLERANCE {
            return Err(Error::Environment(
                "initial distribution is not a probability vector".into(),
            ));
        }
        if reward_mean.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite("reward mean"));
        }
        Ok(Self {
            n_states,
            n_actions,
            horizon,
            gamma,
            transitions,
            reward_mean,
            noise,
            initial,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn noise(&self) -> RewardNoise {
        self.noise
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    #[inline]
    fn sa(&self, state: usize, action: usize, step: usize) -> usize {
        (step * self.n_states + state) * self.n_actions + action
    }

    /// Next-state distribution for `(state, action, step)`.
    #[inline]
    pub fn transition(&self, state: usize, action: usize, step: usize) -> &[f64] {
        let i = self.sa(state, action, step) * self.n_states;
        &self.transitions[i..i + self.n_states]
    }

    #[inline]
    pub fn reward_mean(&self, state: usize, action: usize, step: usize) -> f64 {
        self.reward_mean[self.sa(state, action, step)]
    }

    /// True when every transition row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.transitions
            .chunks(self.n_states)
            .all(|row| row.contains(&1.0))
    }

    pub(crate) fn scale_rewards(&mut self, factor: f64) {
        for r in &mut self.reward_mean {
            *r *= factor;
        }
    }

    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_categorical(&self.initial, rng)
    }

    /// Samples `(reward, next_state)`.
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: usize,
        action: usize,
        step: usize,
        rng: &mut R,
    ) -> (f64, usize) {
        let next = sample_categorical(self.transition(state, action, step), rng);
        let reward = self.reward_mean(state, action, step) + self.noise.sample(rng);
        (reward, next)
    }
}

/// Inverse-CDF draw; point masses consume no randomness.
pub fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    if let Some(i) = probs.iter().position(|&p| p == 1.0) {
        return i;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Markov policy: an action distribution for every `(step, state)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    n_states: usize,
    n_actions: usize,
    probs: Vec<f64>,
}

impl Policy {
    /// Deterministic policy from an action table indexed `[step][state]`.
    pub fn deterministic(n_actions: usize, actions: &[Vec<usize>]) -> Self {
        let n_states = actions.first().map_or(0, Vec::len);
        let mut probs = vec![0.0; actions.len() * n_states * n_actions];
        for (h, row) in actions.iter().enumerate() {
            for (x, &a) in row.iter().enumerate() {
                probs[(h * n_states + x) * n_actions + a] = 1.0;
            }
        }
        Self {
            n_states,
            n_actions,
            probs,
        }
    }

    /// Builds a policy by evaluating `f(step, state) -> distribution`.
    pub fn from_fn<F>(horizon: usize, n_states: usize, n_actions: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> Vec<f64>,
    {
        let mut probs = Vec::with_capacity(horizon * n_states * n_actions);
        for h in 0..horizon {
            for x in 0..n_states {
                let dist = f(h, x);
                debug_assert_eq!(dist.len(), n_actions);
                probs.extend(dist);
            }
        }
        Self {
            n_states,
            n_actions,
            probs,
        }
    }

    /// Uniform over actions everywhere.
    pub fn uniform(horizon: usize, n_states: usize, n_actions: usize) -> Self {
        let p = 1.0 / n_actions as f64;
        Self::from_fn(horizon, n_states, n_actions, |_, _| vec![p; n_actions])
    }

    #[inline]
    pub fn probs(&self, step: usize, state: usize) -> &[f64] {
        let i = (step * self.n_states + state) * self.n_actions;
        &self.probs[i..i + self.n_actions]
    }

    pub fn horizon(&self) -> usize {
        if self.n_states == 0 {
            0
        } else {
            self.probs.len() / (self.n_states * self.n_actions)
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn two_state() -> EpisodicMdp {
        EpisodicMdp::new(
            2,
            1,
            1,
            1.0,
            vec![0.5, 0.5, 0.0, 1.0],
            vec![0.2, 0.4],
            RewardNoise { bound: 0.0 },
            vec![1.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_rows() {
        let r = EpisodicMdp::new(
            2,
            1,
            1,
            1.0,
            vec![0.5, 0.6, 0.0, 1.0],
            vec![0.0, 0.0],
            RewardNoise { bound: 0.0 },
            vec![1.0, 0.0],
        );
        assert!(matches!(r, Err(Error::Environment(_))));
    }

    #[test]
    fn step_is_seeded() {
        let m = two_state();
        let mut a = RngStream::named(1, "env");
        let mut b = RngStream::named(1, "env");
        for _ in 0..20 {
            assert_eq!(m.step(0, 0, 0, &mut a), m.step(0, 0, 0, &mut b));
        }
    }

    #[test]
    fn deterministic_policy_roundtrip() {
        let p = Policy::deterministic(3, &[vec![2, 0], vec![1, 1]]);
        assert_eq!(p.horizon(), 2);
        assert_eq!(p.probs(0, 0), &[0.0, 0.0, 1.0]);
        assert_eq!(p.probs(1, 1), &[0.0, 1.0, 0.0]);
    }
}
