use std::collections::BTreeMap;

use crate::env::{Environment, FeatureMap};
use crate::error::{Error, Result};
use crate::estimator::{radius_schedule, rho_from_outer, ConfidenceSet, RadiusParams, RidgeState};
use crate::linalg::{argmax, Matrix, Vector};

use super::Transition;

/// Settings for [`PessimisticRegression`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PessimisticRegressionConfig {
    pub lambda: f64,
    pub delta: f64,
    pub sigma: f64,
    /// Fixed `rho` for every step instead of the empirical plug-in.
    pub rho_override: Option<f64>,
    /// See [`RadiusParams::bias_factor`].
    pub bias_factor: f64,
}

/// Visits and summed rewards of one `(x, a, x')` triple.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    count: u64,
    reward: f64,
}

/// Per-step ridge regressions on observable targets
/// `r + gamma max_a [phi^T w_hat - theta ||phi||_{gram^{-1}}]` built from the
/// most pessimistic member of the next step's confidence set.
///
/// After every episode all targets are recomputed from the current sets,
/// backward in `h`. Data are kept as `(x, a, x')` tallies so the cost of a
/// refresh does not grow with the number of episodes.
///
/// This is the estimation core shared by LinUCB and LinPSRL.
#[derive(Debug, Clone)]
pub struct PessimisticRegression {
    features: FeatureMap,
    gamma: f64,
    params: RadiusParams,
    rho_override: Option<f64>,
    ridges: Vec<RidgeState>,
    tallies: Vec<BTreeMap<(usize, usize, usize), Tally>>,
    /// `sum phi(x, pi*(x)) phi(x, pi*(x))^T` over observed states, per step.
    optimal_outer: Vec<Matrix>,
    optimal_actions: Vec<Vec<usize>>,
    sets: Vec<ConfidenceSet>,
    radii: Vec<f64>,
    rhos: Vec<f64>,
}

impl PessimisticRegression {
    pub fn new(env: &Environment, config: PessimisticRegressionConfig) -> Result<Self> {
        if let Some(r) = config.rho_override {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::param("rho", "override must be finite and >= 0"));
            }
        }
        let features = env.features.clone();
        let horizon = env.mdp.horizon();
        let dim = features.dim();
        let params = RadiusParams {
            horizon,
            delta: config.delta,
            dim,
            sigma: config.sigma,
            lambda: config.lambda,
            feature_bound: features.norm_bound(),
            weight_bound: env.realization.weight_bound(),
            bias_factor: config.bias_factor,
        };
        let ridges = (0..horizon)
            .map(|_| RidgeState::new(dim, config.lambda))
            .collect::<Result<Vec<_>>>()?;
        let optimal_actions = (0..horizon)
            .map(|h| {
                (0..env.mdp.n_states())
                    .map(|x| env.optimal.greedy_action(x, h))
                    .collect()
            })
            .collect();
        let mut this = Self {
            features,
            gamma: env.mdp.gamma(),
            params,
            rho_override: config.rho_override,
            ridges,
            tallies: vec![BTreeMap::new(); horizon],
            optimal_outer: vec![Matrix::zeros(dim, dim); horizon],
            optimal_actions,
            sets: Vec::new(),
            radii: Vec::new(),
            rhos: Vec::new(),
        };
        this.refresh()?;
        Ok(this)
    }

    /// Recomputes rho, the radii, and then targets, estimates and sets from
    /// the last step backward.
    pub fn refresh(&mut self) -> Result<()> {
        let horizon = self.params.horizon;
        self.rhos = (0..horizon)
            .map(|h| match self.rho_override {
                Some(r) => r,
                None => rho_from_outer(&self.ridges[h], &self.optimal_outer[h]),
            })
            .collect();
        let counts: Vec<u64> = self.ridges.iter().map(RidgeState::count).collect();
        self.radii = radius_schedule(&self.params, &counts, &self.rhos)?;
        let mut sets: Vec<Option<ConfidenceSet>> = vec![None; horizon];
        for h in (0..horizon).rev() {
            let moment = match sets.get(h + 1).and_then(Option::as_ref) {
                Some(next_set) => self.target_moment(h, |next| self.lower_value(next_set, next, h + 1)),
                None => self.target_moment(h, |_| 0.0),
            };
            self.ridges[h].set_moment(moment)?;
            sets[h] = Some(ConfidenceSet::new(&self.ridges[h], self.radii[h], self.params.delta)?);
        }
        self.sets = sets.into_iter().map(|s| s.expect("every step was filled")).collect();
        Ok(())
    }

    /// `sum_i phi_i (r_i + gamma next_value(x'_i))` over the data of step `h`,
    /// calling `next_value` once per distinct next state. The bootstrap is
    /// dropped on the last step.
    pub fn target_moment<F: FnMut(usize) -> f64>(&self, h: usize, mut next_value: F) -> Vector {
        let last = h + 1 >= self.params.horizon;
        let mut cache: BTreeMap<usize, f64> = BTreeMap::new();
        let mut moment = Vector::zeros(self.params.dim);
        for (&(x, a, next), tally) in &self.tallies[h] {
            let boot = if last {
                0.0
            } else {
                *cache.entry(next).or_insert_with(|| next_value(next))
            };
            let target_sum = tally.reward + tally.count as f64 * self.gamma * boot;
            moment.axpy(target_sum, self.features.eval(x, a, h), 1.0);
        }
        moment
    }

    fn lower_value(&self, set: &ConfidenceSet, state: usize, step: usize) -> f64 {
        (0..self.features.n_actions())
            .map(|a| set.lower(self.features.eval(state, a, step)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_a [phi^T w_hat - theta ||phi||_{gram^{-1}}]` at `next_step`; 0 past the horizon.
    pub fn pessimistic_next_value(&self, next_state: usize, next_step: usize) -> f64 {
        if next_step >= self.params.horizon {
            return 0.0;
        }
        self.lower_value(&self.sets[next_step], next_state, next_step)
    }

    /// `r` on the last step, else `r + gamma * pessimistic_next_value`.
    pub fn build_target(&self, transition: &Transition) -> f64 {
        if transition.terminal || transition.step + 1 >= self.params.horizon {
            transition.reward
        } else {
            transition.reward
                + self.gamma * self.pessimistic_next_value(transition.next_state, transition.step + 1)
        }
    }

    /// Adds an episode's transitions and refreshes every step.
    pub fn commit_episode(&mut self, transitions: &[Transition]) -> Result<()> {
        for t in transitions {
            if t.step >= self.params.horizon {
                return Err(Error::param("step", format!("{} beyond the horizon", t.step)));
            }
            if !t.reward.is_finite() {
                return Err(Error::NonFinite("reward"));
            }
            let phi = self.features.eval(t.state, t.action, t.step);
            self.ridges[t.step].update(phi, 0.0)?;
            let tally = self.tallies[t.step]
                .entry((t.state, t.action, t.next_state))
                .or_default();
            tally.count += 1;
            tally.reward += t.reward;
            let star = self.optimal_actions[t.step][t.state];
            let phi_star = self.features.eval(t.state, star, t.step);
            self.optimal_outer[t.step].ger(1.0, phi_star, phi_star, 1.0);
        }
        self.refresh()
    }

    pub fn upper_scores(&self, state: usize, step: usize) -> Vec<f64> {
        (0..self.features.n_actions())
            .map(|a| self.sets[step].upper(self.features.eval(state, a, step)))
            .collect()
    }

    pub fn mean_scores(&self, state: usize, step: usize) -> Vec<f64> {
        let w = self.sets[step].center();
        (0..self.features.n_actions())
            .map(|a| self.features.eval(state, a, step).dot(w))
            .collect()
    }

    pub fn greedy_action(&self, state: usize, step: usize) -> usize {
        argmax(&self.mean_scores(state, step))
    }

    pub fn sets(&self) -> &[ConfidenceSet] {
        &self.sets
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    pub fn ridge(&self, step: usize) -> &RidgeState {
        &self.ridges[step]
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn params(&self) -> &RadiusParams {
        &self.params
    }

    /// Overwrites the radius of one step (tests and hand-set instances).
    pub fn set_radius(&mut self, step: usize, theta: f64) -> Result<()> {
        self.radii[step] = theta;
        self.sets[step] = ConfidenceSet::new(&self.ridges[step], theta, self.params.delta)?;
        Ok(())
    }

    /// Replaces one step's statistics (tests and hand-set instances).
    pub fn set_ridge(&mut self, step: usize, state: RidgeState) -> Result<()> {
        self.ridges[step] = state;
        let theta = self.radii[step];
        self.sets[step] = ConfidenceSet::new(&self.ridges[step], theta, self.params.delta)?;
        Ok(())
    }
}
