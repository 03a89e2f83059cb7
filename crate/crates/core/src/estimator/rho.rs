use super::ridge::RidgeState;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// `sqrt(sum_i ||phi_i||^2_{gram^{-1}})` over optimal-action features.
pub fn rho_empirical(state: &RidgeState, optimal_features: &[Vector]) -> f64 {
    optimal_features
        .iter()
        .map(|phi| state.inverse_norm(phi).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Same quantity from the accumulated outer products `G = sum_i phi_i phi_i^T`:
/// `rho^2 = tr(gram^{-1} G)`.
pub fn rho_from_outer(state: &RidgeState, outer: &Matrix) -> f64 {
    let inv = state.inverse();
    inv.component_mul(outer).sum().max(0.0).sqrt()
}

/// Combination of per-step bounds
/// `sum_{i=1}^{H} gamma^{2(H-i)} (1 + sum_{j=2}^{i} gamma^{j-1} prod_{k=1}^{j-1} rho^{H-(i-k)+1})^2`.
///
/// `rhos` lists `rho^2, ..., rho^{H+1}` (length `H`); by convention the last
/// entry is `rho^{H+1} = 0` and never enters the sum.
pub fn bar_rho(rhos: &[f64], gamma: f64, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::param("horizon", "must be >= 1"));
    }
    if rhos.len() != horizon {
        return Err(Error::DimensionMismatch {
            expected: horizon,
            actual: rhos.len(),
        });
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::param("gamma", "must lie in [0,1]"));
    }
    if rhos.iter().any(|&r| !(r >= 0.0)) {
        return Err(Error::param("rho", "values must be >= 0"));
    }
    // rho^m lives at rhos[m - 2]
    let rho = |m: usize| rhos[m - 2];
    let mut total = 0.0;
    for i in 1..=horizon {
        let mut inner = 1.0;
        for j in 2..=i {
            let prod: f64 = (1..j).map(|k| rho(horizon - (i - k) + 1)).product();
            inner += gamma.powi(j as i32 - 1) * prod;
        }
        total += gamma.powi(2 * (horizon - i) as i32) * inner * inner;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn rho_closed_forms() {
        let s = RidgeState::new(2, 2.0).unwrap();
        assert_eq!(rho_empirical(&s, &[]), 0.0);
        let e1 = Vector::from_vec(vec![1.0, 0.0]);
        assert!((rho_empirical(&s, &[e1]) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rho_matches_dense_oracle_and_outer_form() {
        let mut rng = RngStream::named(8, "rho");
        let mut s = RidgeState::new(3, 1.0).unwrap();
        for _ in 0..15 {
            let phi = Vector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            s.update(&phi, 0.0).unwrap();
        }
        let feats: Vec<Vector> = (0..7)
            .map(|_| Vector::from_fn(3, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let inv = s.gram().clone().try_inverse().unwrap();
        let oracle: f64 = feats.iter().map(|f| f.dot(&(&inv * f))).sum::<f64>().sqrt();
        assert!((rho_empirical(&s, &feats) - oracle).abs() < 1e-12);
        let outer = feats.iter().fold(Matrix::zeros(3, 3), |acc, f| acc + f * f.transpose());
        assert!((rho_from_outer(&s, &outer) - oracle).abs() < 1e-12);
    }

    #[test]
    fn more_data_never_increases_rho_terms() {
        let mut s = RidgeState::new(2, 1.0).unwrap();
        let f = Vector::from_vec(vec![0.6, 0.8]);
        let before = rho_empirical(&s, std::slice::from_ref(&f));
        s.update(&Vector::from_vec(vec![1.0, 1.0]), 0.0).unwrap();
        assert!(rho_empirical(&s, std::slice::from_ref(&f)) <= before);
    }

    #[test]
    fn bar_rho_hand_values() {
        assert_eq!(bar_rho(&[0.0], 0.7, 1).unwrap(), 1.0);
        assert_eq!(bar_rho(&[1.0, 1.0], 1.0, 2).unwrap(), 5.0);
        assert_eq!(bar_rho(&[3.0, 2.0, 0.0], 0.0, 3).unwrap(), 1.0);
        assert!(bar_rho(&[1.0], 1.0, 2).is_err());
    }

    /// Term-by-term transcription of the expanded display for H = 3.
    #[test]
    fn bar_rho_expanded_h3() {
        let (r2, r3, g): (f64, f64, f64) = (0.8, 1.7, 0.9);
        let expected = g.powi(4) + g.powi(2) * (1.0 + g * r3).powi(2)
            + (1.0 + g * r2 + g * g * r2 * r3).powi(2);
        let got = bar_rho(&[r2, r3, 0.0], g, 3).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn bar_rho_monotone_in_each_rho(
            rhos in proptest::collection::vec(0.0f64..3.0, 1..6),
            gamma in 0.0f64..=1.0,
            which in 0usize..6,
            bump in 0.0f64..1.0,
        ) {
            let h = rhos.len();
            let base = bar_rho(&rhos, gamma, h).unwrap();
            let mut up = rhos.clone();
            up[which % h] += bump;
            prop_assert!(bar_rho(&up, gamma, h).unwrap() >= base);
        }
    }
}
