use rayon::prelude::*;

use super::config::{BayesConfig, PriorKind, PriorSpec};
use super::experiment::{run_single, AgentContext};
use crate::env::{make_random_mdp, Environment};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Mean cumulative regret over prior draws.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesEstimate {
    pub mean: f64,
    /// Sample standard deviation over draws divided by `sqrt(M)`.
    pub std_error: f64,
    /// Cumulative regret `Reg_T` of each draw.
    pub per_draw: Vec<f64>,
}

/// Environment for prior draw `m`.
pub fn sample_environment(prior: &PriorSpec, fixed: &crate::env::EnvSpec, m: usize) -> Result<Environment> {
    match prior.kind {
        PriorKind::Fixed => fixed.build(),
        PriorKind::Random => {
            let mut rng = RngStream::named(prior.seed, "prior").substream(m as u64);
            make_random_mdp(
                prior.n_states,
                prior.n_actions,
                prior.horizon,
                prior.noise_bound,
                &mut rng,
            )
        }
    }
}

/// Runs one experiment per prior draw and summarizes `Reg_T` across draws.
pub fn estimate_bayes_regret(config: &BayesConfig) -> Result<BayesEstimate> {
    config.run.validate()?;
    if config.draws < 2 {
        return Err(Error::Config("bayes needs at least 2 draws".into()));
    }
    let run = &config.run;
    let per_draw = (0..config.draws)
        .into_par_iter()
        .map(|m| {
            let env = sample_environment(&config.prior, &run.env, m)?;
            let seed = run.seeds[m % run.seeds.len()];
            let ledger = run_single(&env, &run.agent, AgentContext::from_run(run, seed), run.episodes)?;
            Ok(ledger.total())
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = per_draw.len() as f64;
    let mean = per_draw.iter().sum::<f64>() / m;
    let var = per_draw.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(BayesEstimate {
        mean,
        std_error: (var / m).sqrt(),
        per_draw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{AgentKind, AgentSpec, RunConfig};
    use crate::harness::experiment::run_experiment;

    fn config(kind: AgentKind, prior: PriorKind, draws: usize, seeds: Vec<u64>, prior_seed: u64) -> BayesConfig {
        BayesConfig {
            run: RunConfig {
                agent: AgentSpec {
                    kind,
                    ..AgentSpec::default()
                },
                episodes: 60,
                seeds,
                ..RunConfig::default()
            },
            prior: PriorSpec {
                kind: prior,
                seed: prior_seed,
                ..PriorSpec::default()
            },
            draws,
        }
    }

    #[test]
    fn identical_draws_have_zero_error() {
        let est = estimate_bayes_regret(&config(AgentKind::Linucb, PriorKind::Fixed, 2, vec![3], 0)).unwrap();
        assert_eq!(est.per_draw[0], est.per_draw[1]);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn degenerate_prior_matches_single_runs() {
        let cfg = config(AgentKind::Linpsrl, PriorKind::Fixed, 4, vec![1, 2], 0);
        let est = estimate_bayes_regret(&cfg).unwrap();
        let runs = run_experiment(&cfg.run).unwrap();
        let totals: Vec<f64> = runs.iter().map(|r| r.ledger.total()).collect();
        assert_eq!(est.per_draw, vec![totals[0], totals[1], totals[0], totals[1]]);
        assert!((est.mean - (totals[0] + totals[1]) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn random_prior_estimate_is_consistent() {
        let a = estimate_bayes_regret(&config(AgentKind::Linpsrl, PriorKind::Random, 20, (0..20).collect(), 0)).unwrap();
        let b = estimate_bayes_regret(&config(AgentKind::Linpsrl, PriorKind::Random, 20, (100..120).collect(), 0))
            .unwrap();
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.mean - b.mean).abs() <= 2.0 * se, "{} vs {} (se {se})", a.mean, b.mean);
        assert!(a.std_error > 0.0);
    }

    #[test]
    fn needs_two_draws() {
        assert!(estimate_bayes_regret(&config(AgentKind::Oracle, PriorKind::Fixed, 1, vec![0], 0)).is_err());
    }
}
