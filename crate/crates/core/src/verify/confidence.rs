use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::report::LemmaReport;
use crate::agents::{PessimisticRegression, PessimisticRegressionConfig, Transition};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceParams {
    pub delta: f64,
    pub lambda: f64,
    /// Episodes of data per trial.
    pub episodes: usize,
    pub trials: u64,
    /// See [`crate::estimator::RadiusParams::bias_factor`].
    pub bias_factor: f64,
}

/// Per-trial outcome: the largest `||w_hat - w*||_gram / theta` over steps.
fn trial(env: &Environment, p: &ConfidenceParams, rng: &RngStream, index: u64) -> Result<f64> {
    let base = rng.substream(index);
    let mut env_rng = base.child("env");
    let mut behaviour = base.child("behaviour");
    let mut reg = PessimisticRegression::new(
        env,
        PessimisticRegressionConfig {
            lambda: p.lambda,
            delta: p.delta,
            sigma: env.sub_gaussian_sigma(),
            rho_override: None,
            bias_factor: p.bias_factor,
        },
    )?;
    let mdp = &env.mdp;
    let horizon = mdp.horizon();
    let mut batch = Vec::with_capacity(horizon);
    for _ in 0..p.episodes {
        batch.clear();
        let mut x = mdp.sample_initial(&mut env_rng);
        for h in 0..horizon {
            let a = behaviour.random_range(0..mdp.n_actions());
            let (r, next) = mdp.step(x, a, h, &mut env_rng);
            batch.push(Transition {
                state: x,
                action: a,
                reward: r,
                next_state: next,
                step: h,
                terminal: h + 1 == horizon,
            });
            x = next;
        }
        reg.commit_episode(&batch)?;
    }
    Ok((0..horizon)
        .map(|h| {
            let set = &reg.sets()[h];
            let d = set.distance(env.realization.weights(h));
            if set.radius() > 0.0 {
                d / set.radius()
            } else if d > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max))
}

/// Collects data with uniformly random actions, regresses on pessimistic
/// targets and checks `||w_hat^h - w*^h||_gram <= theta^h` for all steps
/// simultaneously after the last episode.
pub fn verify_confidence_lemma(env: &Environment, params: ConfidenceParams, rng: &RngStream) -> Result<LemmaReport> {
    if params.trials == 0 {
        return Err(Error::param("trials", "must be > 0"));
    }
    let ratios = (0..params.trials)
        .into_par_iter()
        .map(|i| trial(env, &params, rng, i))
        .collect::<Result<Vec<f64>>>()?;
    let failures = ratios.iter().filter(|&&r| r > 1.0).count() as u64;
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    Ok(LemmaReport::new(
        "confidence",
        params.trials,
        failures,
        params.delta,
        json!({
            "horizon": env.mdp.horizon(),
            "dim": env.features.dim(),
            "episodes": params.episodes,
            "lambda": params.lambda,
            "bias_factor": params.bias_factor,
            "sigma": env.sub_gaussian_sigma(),
            "max_distance_over_radius": worst,
            "seed": rng.seed(),
        }),
    ))
}
