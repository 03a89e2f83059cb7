use nalgebra::SVD;

use super::features::FeatureMap;
use super::mdp::EpisodicMdp;
use super::planner::{reachable_states, QTables};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Realization tolerance on reachable `(x, a, h)`.
pub const REALIZATION_TOLERANCE: f64 = 1e-9;

/// Exact per-step weights with `Q*_h(x, a) = phi(x, a, h)^T w*_h`.
#[derive(Debug, Clone)]
pub struct LinearQRealization {
    weights: Vec<Vector>,
    weight_bound: f64,
}

impl LinearQRealization {
    /// Least-squares fit of `Q*` on the reachable pairs of every step,
    /// failing when the residual exceeds [`REALIZATION_TOLERANCE`].
    pub fn solve(mdp: &EpisodicMdp, features: &FeatureMap, tables: &QTables) -> Result<Self> {
        let reach = reachable_states(mdp);
        let (s, a, d) = (mdp.n_states(), mdp.n_actions(), features.dim());
        let mut weights = Vec::with_capacity(mdp.horizon());
        for (h, reach_h) in reach.iter().enumerate() {
            let rows: Vec<(usize, usize)> = (0..s)
                .filter(|&x| reach_h[x])
                .flat_map(|x| (0..a).map(move |act| (x, act)))
                .collect();
            let mut phi = Matrix::zeros(rows.len(), d);
            let mut q = Vector::zeros(rows.len());
            for (i, &(x, act)) in rows.iter().enumerate() {
                phi.set_row(i, &features.eval(x, act, h).transpose());
                q[i] = tables.q(x, act, h);
            }
            let svd = SVD::new(phi.clone(), true, true);
            let w = svd
                .solve(&q, 1e-12)
                .map_err(|e| Error::Environment(format!("realization solve failed: {e}")))?;
            let residual = (&phi * &w - &q).amax();
            if residual > REALIZATION_TOLERANCE {
                return Err(Error::Environment(format!(
                    "Q* is not linear in the features at step {h} (residual {residual:e})"
                )));
            }
            weights.push(w);
        }
        let weight_bound = weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
        Ok(Self {
            weights,
            weight_bound,
        })
    }

    pub fn weights(&self, step: usize) -> &Vector {
        &self.weights[step]
    }

    pub fn all_weights(&self) -> &[Vector] {
        &self.weights
    }

    /// `L_omega = max_h ||w*_h||_2`.
    pub fn weight_bound(&self) -> f64 {
        self.weight_bound
    }

    /// `phi(x, a, h)^T w*_h`.
    pub fn q(&self, features: &FeatureMap, state: usize, action: usize, step: usize) -> f64 {
        features.eval(state, action, step).dot(&self.weights[step])
    }
}
