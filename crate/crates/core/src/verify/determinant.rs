use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::json;

use super::report::LemmaReport;
use crate::error::{Error, Result};
use crate::estimator::determinant_lemma_gap;
use crate::linalg::Vector;
use crate::rng::RngStream;

/// Where the feature sequences come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectorySource {
    /// Independent directions with norms uniform in `[0, 1]`.
    Random { dim: usize, length: usize },
    /// The same sequence in every trial.
    Fixed(Vec<Vector>),
}

impl TrajectorySource {
    fn dim(&self) -> usize {
        match self {
            TrajectorySource::Random { dim, .. } => *dim,
            TrajectorySource::Fixed(seq) => seq.first().map_or(1, |v| v.len()),
        }
    }

    fn draw(&self, rng: &mut RngStream) -> Vec<Vector> {
        match self {
            TrajectorySource::Random { dim, length } => (0..*length)
                .map(|_| {
                    let z = Vector::from_fn(*dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                    let n = z.norm().max(f64::MIN_POSITIVE);
                    z * (rng.random::<f64>() / n)
                })
                .collect(),
            TrajectorySource::Fixed(seq) => seq.clone(),
        }
    }
}

/// Exact check of `sum log(1 + ||phi_t||^2_{gram_{t-1}^{-1}}) <= d log(lambda + T L^2 / d)`
/// with `L = 1`. Any violation fails the report.
pub fn verify_determinant_lemma(source: &TrajectorySource, lambda: f64, trials: u64, rng: &RngStream) -> Result<LemmaReport> {
    if lambda < 1.0 {
        return Err(Error::param("lambda", "the bound needs lambda >= 1"));
    }
    let dim = source.dim();
    let gaps = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seq = source.draw(&mut rng.substream(i));
            if seq.iter().any(|v| v.norm() > 1.0 + 1e-12) {
                return Err(Error::param("trajectory", "feature norms must be <= 1"));
            }
            let (lhs, rhs) = determinant_lemma_gap(&seq, lambda, dim, 1.0)?;
            Ok(rhs - lhs)
        })
        .collect::<Result<Vec<f64>>>()?;
    let failures = gaps.iter().filter(|&&g| g < 0.0).count() as u64;
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(LemmaReport::new(
        "determinant",
        trials,
        failures,
        0.0,
        json!({ "dim": dim, "lambda": lambda, "min_gap": min_gap, "seed": rng.seed() }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trajectory() {
        let r = verify_determinant_lemma(&TrajectorySource::Fixed(vec![]), 1.0, 3, &RngStream::named(0, "det")).unwrap();
        assert!(r.passed);
        assert_eq!(r.details["min_gap"], 0.0);
    }

    #[test]
    fn repeated_feature() {
        let e = Vector::from_vec(vec![1.0, 0.0]);
        let seq = vec![e; 5000];
        let r = verify_determinant_lemma(&TrajectorySource::Fixed(seq), 1.0, 1, &RngStream::named(0, "det")).unwrap();
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn random_trajectories() {
        let source = TrajectorySource::Random { dim: 4, length: 200 };
        let r = verify_determinant_lemma(&source, 1.0, 100, &RngStream::named(1, "det")).unwrap();
        assert_eq!(r.failures, 0);
        assert!(verify_determinant_lemma(&source, 0.5, 1, &RngStream::named(1, "det")).is_err());
        let long = TrajectorySource::Fixed(vec![Vector::from_vec(vec![2.0])]);
        assert!(verify_determinant_lemma(&long, 1.0, 1, &RngStream::named(1, "det")).is_err());
    }
}
