use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::json;

use super::report::LemmaReport;
use crate::error::{Error, Result};
use crate::estimator::RidgeState;
use crate::linalg::Vector;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfNormalizedParams {
    pub dim: usize,
    /// Checked at this fixed time `T`.
    pub horizon: usize,
    pub sigma: f64,
    pub lambda: f64,
    pub delta: f64,
    pub trials: u64,
}

/// `(||S||^2_{gram^{-1}}, 2 sigma^2 log(det(gram)^{1/2} det(lambda I)^{-1/2} / delta))`
/// for `S = sum phi_t eta_t` and `gram = lambda I + sum phi_t phi_t^T`.
pub fn self_normalized_terms(features: &[Vector], noise: &[f64], dim: usize, sigma: f64, lambda: f64, delta: f64) -> Result<(f64, f64)> {
    if features.len() != noise.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            actual: noise.len(),
        });
    }
    let mut state = RidgeState::new(dim, lambda)?;
    for (phi, &eta) in features.iter().zip(noise) {
        state.update(phi, eta)?;
    }
    Ok(terms(&state, sigma, delta))
}

fn terms(state: &RidgeState, sigma: f64, delta: f64) -> (f64, f64) {
    let lhs = state.inverse_norm(state.moment()).powi(2);
    let log_ratio = 0.5 * (state.log_det() - state.dim() as f64 * state.lambda().ln());
    let rhs = 2.0 * sigma * sigma * (log_ratio - delta.ln());
    (lhs, rhs)
}

/// Unit feature that leans towards the running sum: an adapted, bounded process.
fn adapted_feature(rng: &mut RngStream, sum: &Vector) -> Vector {
    let dim = sum.len();
    let z = Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let v = z + sum / (1.0 + sum.norm());
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        Vector::from_element(dim, 1.0 / (dim as f64).sqrt())
    }
}

/// Each trial draws adapted unit features and Rademacher noise of scale
/// `sigma`, then checks the self-normalized bound at the fixed time `T`.
pub fn verify_self_normalized(params: SelfNormalizedParams, rng: &RngStream) -> Result<LemmaReport> {
    let p = params;
    if p.dim == 0 || p.trials == 0 {
        return Err(Error::param("self_normalized", "dim and trials must be > 0"));
    }
    if !(p.delta > 0.0 && p.delta < 1.0) || !(p.lambda > 0.0) || p.sigma < 0.0 {
        return Err(Error::param("self_normalized", "need delta in (0,1), lambda > 0, sigma >= 0"));
    }
    let outcomes = (0..p.trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.substream(i);
            let mut state = RidgeState::new(p.dim, p.lambda)?;
            for _ in 0..p.horizon {
                let phi = adapted_feature(&mut r, state.moment());
                let eta = if r.random::<bool>() { p.sigma } else { -p.sigma };
                state.update(&phi, eta)?;
            }
            let (lhs, rhs) = terms(&state, p.sigma, p.delta);
            Ok((lhs > rhs, lhs / rhs.max(f64::MIN_POSITIVE)))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = outcomes.iter().filter(|o| o.0).count() as u64;
    let worst = outcomes.iter().map(|o| o.1).fold(0.0, f64::max);
    Ok(LemmaReport::new(
        "self_normalized",
        p.trials,
        failures,
        p.delta,
        json!({
            "dim": p.dim,
            "horizon": p.horizon,
            "sigma": p.sigma,
            "lambda": p.lambda,
            "max_lhs_over_rhs": worst,
            "seed": rng.seed(),
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(sigma: f64, trials: u64) -> SelfNormalizedParams {
        SelfNormalizedParams {
            dim: 3,
            horizon: 100,
            sigma,
            lambda: 1.0,
            delta: 0.05,
            trials,
        }
    }

    #[test]
    fn noiseless_never_fails() {
        let r = verify_self_normalized(params(0.0, 50), &RngStream::named(0, "sn")).unwrap();
        assert_eq!(r.failures, 0);
        assert!(r.passed);
    }

    #[test]
    fn scalar_closed_form() {
        let (sigma, lambda, delta) = (0.7, 2.0, 0.1);
        for eta in [sigma, -sigma] {
            let (lhs, rhs) =
                self_normalized_terms(&[Vector::from_vec(vec![1.0])], &[eta], 1, sigma, lambda, delta).unwrap();
            assert!((lhs - sigma * sigma / (lambda + 1.0)).abs() < 1e-15);
            let expected = sigma * sigma * (((lambda + 1.0) / lambda).ln() + 2.0 * (1.0 / delta).ln());
            assert!((rhs - expected).abs() < 1e-14);
            assert!(lhs <= rhs);
        }
    }

    #[test]
    fn reproducible_and_covering() {
        let rng = RngStream::named(4, "sn");
        let a = verify_self_normalized(params(1.0, 200), &rng).unwrap();
        let b = verify_self_normalized(params(1.0, 200), &rng).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
    }

    #[test]
    fn bad_parameters() {
        let rng = RngStream::named(0, "sn");
        let mut p = params(1.0, 10);
        p.delta = 1.0;
        assert!(verify_self_normalized(p, &rng).is_err());
        assert!(self_normalized_terms(&[], &[1.0], 1, 1.0, 1.0, 0.1).is_err());
    }
}
