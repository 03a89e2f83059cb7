//! Exact finite-horizon dynamic programming.

use super::mdp::{EpisodicMdp, Policy};
use crate::linalg::argmax;

/// Optimal action values `Q*_h(x, a)` and state values `V*_h(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTables {
    n_states: usize,
    n_actions: usize,
    horizon: usize,
    q: Vec<f64>,
    v: Vec<f64>,
}

impl QTables {
    #[inline]
    pub fn q(&self, state: usize, action: usize, step: usize) -> f64 {
        self.q[(step * self.n_states + state) * self.n_actions + action]
    }

    #[inline]
    pub fn q_row(&self, state: usize, step: usize) -> &[f64] {
        let i = (step * self.n_states + state) * self.n_actions;
        &self.q[i..i + self.n_actions]
    }

    /// `V*_h(x)`; `step == horizon` returns 0.
    #[inline]
    pub fn v(&self, state: usize, step: usize) -> f64 {
        if step >= self.horizon {
            0.0
        } else {
            self.v[step * self.n_states + state]
        }
    }

    /// Optimal action with lowest-index tie breaking.
    pub fn greedy_action(&self, state: usize, step: usize) -> usize {
        argmax(self.q_row(state, step))
    }

    /// Greedy (optimal) deterministic policy.
    pub fn greedy_policy(&self) -> Policy {
        let table: Vec<Vec<usize>> = (0..self.horizon)
            .map(|h| (0..self.n_states).map(|x| self.greedy_action(x, h)).collect())
            .collect();
        Policy::deterministic(self.n_actions, &table)
    }

    /// `sum_x P0(x) V*_1(x)`.
    pub fn start_value(&self, mdp: &EpisodicMdp) -> f64 {
        mdp.initial()
            .iter()
            .enumerate()
            .map(|(x, p)| p * self.v(x, 0))
            .sum()
    }

    pub fn max_start_value(&self) -> f64 {
        (0..self.n_states)
            .map(|x| self.v(x, 0))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

fn continuation(mdp: &EpisodicMdp, state: usize, action: usize, step: usize, next_v: &[f64]) -> f64 {
    if step + 1 >= mdp.horizon() {
        return 0.0;
    }
    mdp.transition(state, action, step)
        .iter()
        .zip(next_v)
        .map(|(p, v)| p * v)
        .sum()
}

/// Backward induction from the last step to the first.
pub fn optimal_q(mdp: &EpisodicMdp) -> QTables {
    let (s, a, horizon) = (mdp.n_states(), mdp.n_actions(), mdp.horizon());
    let mut q = vec![0.0; horizon * s * a];
    let mut v = vec![0.0; horizon * s];
    let mut next_v = vec![0.0; s];
    for h in (0..horizon).rev() {
        for x in 0..s {
            let mut best = f64::NEG_INFINITY;
            for act in 0..a {
                let value = mdp.reward_mean(x, act, h)
                    + mdp.gamma() * continuation(mdp, x, act, h, &next_v);
                q[(h * s + x) * a + act] = value;
                best = best.max(value);
            }
            v[h * s + x] = best;
        }
        next_v.copy_from_slice(&v[h * s..(h + 1) * s]);
    }
    QTables {
        n_states: s,
        n_actions: a,
        horizon,
        q,
        v,
    }
}

/// One Bellman optimality backup applied to `tables`.
pub fn bellman_backup(mdp: &EpisodicMdp, tables: &QTables) -> QTables {
    let (s, a, horizon) = (mdp.n_states(), mdp.n_actions(), mdp.horizon());
    let mut q = vec![0.0; horizon * s * a];
    let mut v = vec![0.0; horizon * s];
    for h in 0..horizon {
        let next_v: Vec<f64> = (0..s).map(|y| tables.v(y, h + 1)).collect();
        for x in 0..s {
            let mut best = f64::NEG_INFINITY;
            for act in 0..a {
                let value = mdp.reward_mean(x, act, h)
                    + mdp.gamma() * continuation(mdp, x, act, h, &next_v);
                q[(h * s + x) * a + act] = value;
                best = best.max(value);
            }
            v[h * s + x] = best;
        }
    }
    QTables {
        n_states: s,
        n_actions: a,
        horizon,
        q,
        v,
    }
}

/// Per-state values `V^pi_h(x)` for every step, flattened `[step][state]`.
pub fn policy_state_values(mdp: &EpisodicMdp, policy: &Policy) -> Vec<f64> {
    let (s, horizon) = (mdp.n_states(), mdp.horizon());
    let mut v = vec![0.0; horizon * s];
    let mut next_v = vec![0.0; s];
    for h in (0..horizon).rev() {
        for x in 0..s {
            let mut value = 0.0;
            for (act, &p) in policy.probs(h, x).iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                value += p
                    * (mdp.reward_mean(x, act, h)
                        + mdp.gamma() * continuation(mdp, x, act, h, &next_v));
            }
            v[h * s + x] = value;
        }
        next_v.copy_from_slice(&v[h * s..(h + 1) * s]);
    }
    v
}

/// Exact expected (discounted) return of `policy` from the initial distribution.
pub fn policy_value(mdp: &EpisodicMdp, policy: &Policy) -> f64 {
    let v = policy_state_values(mdp, policy);
    mdp.initial()
        .iter()
        .zip(&v[..mdp.n_states()])
        .map(|(p, v)| p * v)
        .sum()
}

/// `reachable[h][x]`: state `x` has positive probability at step `h` under some policy.
pub fn reachable_states(mdp: &EpisodicMdp) -> Vec<Vec<bool>> {
    let s = mdp.n_states();
    let mut out = Vec::with_capacity(mdp.horizon());
    let mut current: Vec<bool> = mdp.initial().iter().map(|&p| p > 0.0).collect();
    for h in 0..mdp.horizon() {
        let mut next = vec![false; s];
        for x in (0..s).filter(|&x| current[x]) {
            for a in 0..mdp.n_actions() {
                for (y, &p) in mdp.transition(x, a, h).iter().enumerate() {
                    if p > 0.0 {
                        next[y] = true;
                    }
                }
            }
        }
        out.push(current);
        current = next;
    }
    out
}
