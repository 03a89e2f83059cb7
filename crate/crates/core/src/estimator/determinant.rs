use super::ridge::RidgeState;
use crate::error::Result;
use crate::linalg::Vector;

/// Both sides of the log-determinant potential bound:
/// `lhs = sum_t log(1 + ||phi_t||^2_{gram_{t-1}^{-1}})`, `rhs = d log(lambda + T L^2 / d)`.
pub fn determinant_lemma_gap(features: &[Vector], lambda: f64, dim: usize, feature_bound: f64) -> Result<(f64, f64)> {
    let mut state = RidgeState::new(dim, lambda)?;
    let mut lhs = 0.0;
    for phi in features {
        lhs += state.inverse_norm(phi).powi(2).ln_1p();
        state.update(phi, 0.0)?;
    }
    let t = features.len() as f64;
    let d = dim as f64;
    let rhs = d * (lambda + t * feature_bound * feature_bound / d).ln();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;

    #[test]
    fn empty_sequence() {
        let (l, r) = determinant_lemma_gap(&[], 1.0, 4, 1.0).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(r, 0.0);
        let (l, r) = determinant_lemma_gap(&[], 2.5, 3, 1.0).unwrap();
        assert_eq!(l, 0.0);
        assert!((r - 3.0 * 2.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn repeated_feature_grows_logarithmically() {
        let phi = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        let seq: Vec<Vector> = std::iter::repeat_n(phi, 1000).collect();
        let (lhs, rhs) = determinant_lemma_gap(&seq, 1.0, 3, 1.0).unwrap();
        // telescopes to log(1 + T) for lambda = 1
        assert!((lhs - 1001f64.ln()).abs() < 1e-9);
        assert!(lhs <= rhs);
    }

    #[test]
    fn lhs_equals_log_det_ratio() {
        let mut rng = RngStream::named(3, "det");
        let feats: Vec<Vector> = (0..50)
            .map(|_| Vector::from_fn(4, |_, _| rng.random_range(-0.5..0.5)))
            .collect();
        let (lhs, rhs) = determinant_lemma_gap(&feats, 1.0, 4, 1.0).unwrap();
        let mut s = RidgeState::new(4, 1.0).unwrap();
        for f in &feats {
            s.update(f, 0.0).unwrap();
        }
        assert!((lhs - (s.log_det() - 4.0 * 1f64.ln())).abs() < 1e-9);
        assert!(lhs <= rhs);
    }
}
