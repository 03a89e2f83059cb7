use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Per-step map `(state, action, step) -> R^d` over finite spaces.
///
/// All vectors are materialized at construction; `norm_bound` is the `L`
/// with `||phi phi^T||_2^2 <= L` for every tabulated triple.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    dim: usize,
    horizon: usize,
    n_states: usize,
    n_actions: usize,
    norm_bound: f64,
    table: Vec<Vector>,
}

impl FeatureMap {
    /// Indicator features with `d = nStates * nActions`, shared across steps.
    ///
    /// Layout is action-major: `phi(x, a)` is the unit vector at `a * nStates + x`.
    pub fn tabular_one_hot(n_states: usize, n_actions: usize, horizon: usize) -> Result<Self> {
        if n_states == 0 || n_actions == 0 || horizon == 0 {
            return Err(Error::param(
                "tabular_one_hot",
                "nStates, nActions and H must be >= 1",
            ));
        }
        let dim = n_states * n_actions;
        Self::from_fn(n_states, n_actions, horizon, dim, |x, a, _| {
            let mut v = Vector::zeros(dim);
            v[a * n_states + x] = 1.0;
            v
        })
    }

    /// Tabulates an arbitrary map; `L` is set to the tightest bound observed.
    pub fn from_fn<F>(
        n_states: usize,
        n_actions: usize,
        horizon: usize,
        dim: usize,
        mut f: F,
    ) -> Result<Self>
    where
        F: FnMut(usize, usize, usize) -> Vector,
    {
        if dim == 0 {
            return Err(Error::param("dim", "feature dimension must be >= 1"));
        }
        let mut table = Vec::with_capacity(horizon * n_states * n_actions);
        let mut norm_bound = 0.0f64;
        for h in 0..horizon {
            for x in 0..n_states {
                for a in 0..n_actions {
                    let v = f(x, a, h);
                    if v.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            actual: v.len(),
                        });
                    }
                    if !v.iter().all(|c| c.is_finite()) {
                        return Err(Error::NonFinite("feature map"));
                    }
                    norm_bound = norm_bound.max(v.norm_squared().powi(2));
                    table.push(v);
                }
            }
        }
        Ok(Self {
            dim,
            horizon,
            n_states,
            n_actions,
            norm_bound: norm_bound.max(f64::MIN_POSITIVE),
            table,
        })
    }

    #[inline]
    pub fn eval(&self, state: usize, action: usize, step: usize) -> &Vector {
        &self.table[(step * self.n_states + state) * self.n_actions + action]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// `L`: bound on the squared spectral norm of `phi phi^T`.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }
}

/// State-only features `(state, step) -> R^d`, used by per-action linear heads.
#[derive(Debug, Clone)]
pub struct StateFeatures {
    dim: usize,
    n_states: usize,
    table: Vec<Vector>,
}

impl StateFeatures {
    /// One-hot over `(step, state)`; `d = nStates * H`.
    pub fn tabular_one_hot(n_states: usize, horizon: usize) -> Result<Self> {
        if n_states == 0 || horizon == 0 {
            return Err(Error::param("state features", "nStates and H must be >= 1"));
        }
        let dim = n_states * horizon;
        let table = (0..horizon)
            .flat_map(|h| {
                (0..n_states).map(move |x| {
                    let mut v = Vector::zeros(dim);
                    v[h * n_states + x] = 1.0;
                    v
                })
            })
            .collect();
        Ok(Self {
            dim,
            n_states,
            table,
        })
    }

    #[inline]
    pub fn eval(&self, state: usize, step: usize) -> &Vector {
        &self.table[step * self.n_states + state]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}
