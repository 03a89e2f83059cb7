use nalgebra::{Cholesky, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_finite, Matrix, Vector};

/// Regularized sufficient statistics `gram = lambda I + sum phi phi^T`,
/// `moment = sum target * phi`.
///
/// A Cholesky factor of `gram` is kept current with rank-one updates, so
/// solves and weighted norms never refactor from scratch.
#[derive(Debug, Clone)]
pub struct RidgeState {
    lambda: f64,
    gram: Matrix,
    moment: Vector,
    count: u64,
    factor: Cholesky<f64, Dyn>,
}

impl RidgeState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be >= 1"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{lambda} must be finite and > 0")));
        }
        let gram = Matrix::identity(dim, dim) * lambda;
        let factor = Cholesky::new(gram.clone()).ok_or(Error::Cholesky { attempts: 0 })?;
        Ok(Self {
            lambda,
            gram,
            moment: Vector::zeros(dim),
            count: 0,
            factor,
        })
    }

    /// Adds one `(phi, target)` observation.
    pub fn update(&mut self, phi: &Vector, target: f64) -> Result<()> {
        if phi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: phi.len(),
            });
        }
        check_finite(phi.as_slice(), "ridge feature")?;
        if !target.is_finite() {
            return Err(Error::NonFinite("ridge target"));
        }
        self.gram.ger(1.0, phi, phi, 1.0);
        self.moment.axpy(target, phi, 1.0);
        self.count += 1;
        self.factor.rank_one_update(phi, 1.0);
        Ok(())
    }

    /// Replaces `moment` (targets recomputed for the same features).
    pub fn set_moment(&mut self, moment: Vector) -> Result<()> {
        if moment.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: moment.len(),
            });
        }
        check_finite(moment.as_slice(), "ridge moment")?;
        self.moment = moment;
        Ok(())
    }

    /// `w_hat = gram^{-1} moment`.
    pub fn estimate(&self) -> Vector {
        self.factor.solve(&self.moment)
    }

    /// `(||v||_gram, ||v||_{gram^{-1}})`.
    pub fn weighted_norms(&self, v: &Vector) -> (f64, f64) {
        (self.gram_norm(v), self.inverse_norm(v))
    }

    pub fn gram_norm(&self, v: &Vector) -> f64 {
        v.dot(&(&self.gram * v)).max(0.0).sqrt()
    }

    /// `||v||_{gram^{-1}} = ||L^{-1} v||_2`.
    pub fn inverse_norm(&self, v: &Vector) -> f64 {
        let y = self
            .factor
            .l_dirty()
            .solve_lower_triangular(v)
            .expect("cholesky factor has a nonzero diagonal");
        y.norm()
    }

    pub fn inverse(&self) -> Matrix {
        self.factor.inverse()
    }

    /// `log det(gram)` from the Cholesky diagonal.
    pub fn log_det(&self) -> f64 {
        let l = self.factor.l_dirty();
        2.0 * (0..self.dim()).map(|i| l[(i, i)].ln()).sum::<f64>()
    }

    pub fn dim(&self) -> usize {
        self.moment.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn moment(&self) -> &Vector {
        &self.moment
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Recomputes the Cholesky factor from `gram`.
    pub fn refactor(&mut self) -> Result<()> {
        self.factor = Cholesky::new(self.gram.clone()).ok_or(Error::Cholesky { attempts: 0 })?;
        Ok(())
    }

    pub fn snapshot(&self) -> RidgeSnapshot {
        RidgeSnapshot {
            version: RidgeSnapshot::VERSION,
            dim: self.dim(),
            lambda: self.lambda,
            count: self.count,
            gram: self.gram.transpose().as_slice().to_vec(),
            moment: self.moment.as_slice().to_vec(),
        }
    }

    pub fn from_snapshot(snap: &RidgeSnapshot) -> Result<Self> {
        if snap.version != RidgeSnapshot::VERSION {
            return Err(Error::Config(format!(
                "unsupported ridge snapshot version {}",
                snap.version
            )));
        }
        let d = snap.dim;
        if snap.gram.len() != d * d || snap.moment.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d * d + d,
                actual: snap.gram.len() + snap.moment.len(),
            });
        }
        let gram = Matrix::from_row_slice(d, d, &snap.gram);
        let factor = Cholesky::new(gram.clone()).ok_or(Error::Cholesky { attempts: 0 })?;
        Ok(Self {
            lambda: snap.lambda,
            gram,
            moment: Vector::from_column_slice(&snap.moment),
            count: snap.count,
            factor,
        })
    }
}

/// Versioned, portable text form of a [`RidgeState`] (row-major gram).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeSnapshot {
    pub version: u32,
    pub dim: usize,
    pub lambda: f64,
    pub count: u64,
    pub gram: Vec<f64>,
    pub moment: Vec<f64>,
}

impl RidgeSnapshot {
    pub const VERSION: u32 = 1;

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("ridge snapshot: {e}")))
    }
}
