use super::ledger::RegretLedger;
use crate::error::{Error, Result};

pub const MIN_EPISODES: usize = 100;

/// Fit of `cumulative(t) ~ c t^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sublinearity {
    Fit { alpha: f64, r_squared: f64, log_c: f64 },
    /// Cumulative regret is zero over the fitting window.
    ZeroRegret,
}

impl Sublinearity {
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Sublinearity::Fit { alpha, .. } => Some(alpha),
            Sublinearity::ZeroRegret => None,
        }
    }

    pub fn r_squared(&self) -> Option<f64> {
        match *self {
            Sublinearity::Fit { r_squared, .. } => Some(r_squared),
            Sublinearity::ZeroRegret => None,
        }
    }
}

/// Least squares of `ln cumulative(t)` on `ln t` over the second half of the
/// run (`t` from `ceil(T/2)` to `T`, 1-based). Points with zero cumulative
/// regret are skipped.
pub fn sublinearity_diagnostic(ledger: &RegretLedger) -> Result<Sublinearity> {
    let n = ledger.len();
    if n < MIN_EPISODES {
        return Err(Error::param(
            "ledger",
            format!("needs at least {MIN_EPISODES} episodes, got {n}"),
        ));
    }
    let points: Vec<(f64, f64)> = (n.div_ceil(2)..=n)
        .filter_map(|t| {
            let c = ledger.cumulative()[t - 1];
            (c > 0.0).then(|| ((t as f64).ln(), c.ln()))
        })
        .collect();
    if points.len() < 2 {
        return Ok(Sublinearity::ZeroRegret);
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let alpha = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(Sublinearity::Fit {
        alpha,
        r_squared,
        log_c: my - alpha * mx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt_regret_gives_half() {
        let r: Vec<f64> = (1..=10_000).map(|t| 1.0 / (t as f64).sqrt()).collect();
        let fit = sublinearity_diagnostic(&RegretLedger::from_regrets(&r)).unwrap();
        assert!((fit.alpha().unwrap() - 0.5).abs() <= 0.01, "{fit:?}");
        assert!(fit.r_squared().unwrap() > 0.99);
    }

    #[test]
    fn constant_regret_is_linear() {
        let fit = sublinearity_diagnostic(&RegretLedger::from_regrets(&[0.3; 500])).unwrap();
        assert!((fit.alpha().unwrap() - 1.0).abs() <= 0.01);
    }

    #[test]
    fn exact_power_law() {
        let cum: Vec<f64> = (0..=400).map(|t| 2.0 * (t as f64).powf(0.7)).collect();
        let r: Vec<f64> = cum.windows(2).map(|w| w[1] - w[0]).collect();
        let fit = sublinearity_diagnostic(&RegretLedger::from_regrets(&r)).unwrap();
        match fit {
            Sublinearity::Fit { alpha, r_squared, log_c } => {
                assert!((alpha - 0.7).abs() < 1e-9);
                assert!((r_squared - 1.0).abs() < 1e-12);
                assert!((log_c - 2f64.ln()).abs() < 1e-8);
            }
            Sublinearity::ZeroRegret => panic!("expected a fit"),
        }
    }

    #[test]
    fn zero_regret_and_short_ledgers() {
        let fit = sublinearity_diagnostic(&RegretLedger::from_regrets(&[0.0; 200])).unwrap();
        assert_eq!(fit, Sublinearity::ZeroRegret);
        assert_eq!(fit.alpha(), None);
        assert!(sublinearity_diagnostic(&RegretLedger::from_regrets(&[0.1; 99])).is_err());
    }
}
