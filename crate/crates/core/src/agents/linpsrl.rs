use serde::{Deserialize, Serialize};

use crate::env::{Environment, FeatureMap, Policy};
use crate::error::{Error, Result};
use crate::estimator::{GaussianPosterior, BIAS_FACTOR};
use crate::linalg::{argmax, Vector};
use crate::rng::RngStream;

use super::linear::{PessimisticRegression, PessimisticRegressionConfig};
use super::{Agent, Transition};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinPsrlConfig {
    /// Prior variance: weights start as `N(0, prior_variance * I)`.
    pub prior_variance: f64,
    /// Likelihood standard deviation.
    pub sigma: f64,
    /// Confidence level of the sets used to build pessimistic targets.
    pub delta: f64,
    pub rho_override: Option<f64>,
    pub targets: PsrlTargets,
}

/// Bootstrap used in the regression targets of steps before the last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsrlTargets {
    /// `r + gamma max_a phi(x', a)^T w_sampled^{h+1}`, drawn backward from the
    /// last step at the start of each episode.
    #[default]
    Sampled,
    /// The pessimistic targets shared with LinUCB.
    Pessimistic,
}

/// Posterior sampling: one weight draw per step at the start of each episode,
/// then greedy on the draw for the whole episode.
#[derive(Debug, Clone)]
pub struct LinPsrlAgent {
    core: PessimisticRegression,
    sigma: f64,
    targets: PsrlTargets,
    posteriors: Vec<GaussianPosterior>,
    sampled: Vec<Vector>,
    buffer: Vec<Transition>,
    episode: u64,
    draws: u64,
}

impl LinPsrlAgent {
    pub fn new(env: &Environment, config: LinPsrlConfig) -> Result<Self> {
        if !(config.prior_variance > 0.0 && config.prior_variance.is_finite()) {
            return Err(Error::param("prior_variance", "must be finite and > 0"));
        }
        if !(config.sigma > 0.0 && config.sigma.is_finite()) {
            return Err(Error::param("sigma", "must be finite and > 0"));
        }
        // Gaussian prior N(0, v I) with noise variance s^2 is ridge with lambda = s^2 / v.
        let lambda = config.sigma * config.sigma / config.prior_variance;
        let core = PessimisticRegression::new(
            env,
            PessimisticRegressionConfig {
                lambda,
                delta: config.delta,
                sigma: config.sigma,
                rho_override: config.rho_override,
                bias_factor: BIAS_FACTOR,
            },
        )?;
        let mut agent = Self {
            core,
            sigma: config.sigma,
            targets: config.targets,
            posteriors: Vec::new(),
            sampled: Vec::new(),
            buffer: Vec::new(),
            episode: 0,
            draws: 0,
        };
        agent.refresh_posteriors()?;
        agent.sampled = agent.posteriors.iter().map(|p| p.mean().clone()).collect();
        Ok(agent)
    }

    fn refresh_posteriors(&mut self) -> Result<()> {
        self.posteriors = match self.targets {
            PsrlTargets::Pessimistic => (0..self.core.params().horizon)
                .map(|h| GaussianPosterior::from_ridge(self.core.ridge(h), self.sigma))
                .collect::<Result<Vec<_>>>()?,
            PsrlTargets::Sampled => self.backward(|post, _| post.mean().clone())?.0,
        };
        Ok(())
    }

    /// Posteriors from the last step backward, bootstrapping each step on the
    /// weights `pick` takes from the posterior after it.
    fn backward<F>(&self, mut pick: F) -> Result<(Vec<GaussianPosterior>, Vec<Vector>)>
    where
        F: FnMut(&GaussianPosterior, usize) -> Vector,
    {
        let horizon = self.core.params().horizon;
        let f = self.core.features();
        let mut posts = Vec::with_capacity(horizon);
        let mut weights: Vec<Vector> = Vec::with_capacity(horizon);
        for h in (0..horizon).rev() {
            let moment = match weights.last() {
                Some(w) => self.core.target_moment(h, |x| max_value(f, x, h + 1, w)),
                None => self.core.target_moment(h, |_| 0.0),
            };
            let mut ridge = self.core.ridge(h).clone();
            ridge.set_moment(moment)?;
            let post = GaussianPosterior::from_ridge(&ridge, self.sigma)?;
            weights.push(pick(&post, h));
            posts.push(post);
        }
        posts.reverse();
        weights.reverse();
        Ok((posts, weights))
    }

    pub fn targets(&self) -> PsrlTargets {
        self.targets
    }

    pub fn posteriors(&self) -> &[GaussianPosterior] {
        &self.posteriors
    }

    pub fn posteriors_mut(&mut self) -> &mut [GaussianPosterior] {
        &mut self.posteriors
    }

    pub fn sampled_weights(&self) -> &[Vector] {
        &self.sampled
    }

    pub fn regression(&self) -> &PessimisticRegression {
        &self.core
    }

    /// Number of episodes whose weights have been drawn.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn episode(&self) -> u64 {
        self.episode
    }

    fn policy_for(&self, weights: &[Vector]) -> Policy {
        let f = self.core.features();
        let actions: Vec<Vec<usize>> = (0..f.horizon())
            .map(|h| {
                (0..f.n_states())
                    .map(|x| {
                        let q: Vec<f64> = (0..f.n_actions())
                            .map(|a| f.eval(x, a, h).dot(&weights[h]))
                            .collect();
                        argmax(&q)
                    })
                    .collect()
            })
            .collect();
        Policy::deterministic(f.n_actions(), &actions)
    }
}

fn max_value(f: &FeatureMap, x: usize, h: usize, w: &Vector) -> f64 {
    (0..f.n_actions())
        .map(|a| f.eval(x, a, h).dot(w))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Draws one weight vector per step. With sampled targets the draws go from
/// the last step backward, each posterior conditioned on the draw after it.
pub fn linpsrl_begin_episode(agent: &mut LinPsrlAgent, rng: &mut RngStream) -> Vec<Vector> {
    match agent.targets {
        PsrlTargets::Pessimistic => {
            agent.sampled = agent.posteriors.iter().map(|p| p.sample(rng)).collect();
        }
        PsrlTargets::Sampled => {
            let (posts, sampled) = agent
                .backward(|post, _| post.sample(rng))
                .expect("posterior covariance is positive definite");
            agent.posteriors = posts;
            agent.sampled = sampled;
        }
    }
    agent.draws += 1;
    agent.sampled.clone()
}

impl Agent for LinPsrlAgent {
    fn name(&self) -> &'static str {
        "linpsrl"
    }

    fn begin_episode(&mut self, rng: &mut RngStream) {
        self.buffer.clear();
        linpsrl_begin_episode(self, rng);
    }

    fn act(&mut self, state: usize, step: usize, _rng: &mut RngStream) -> usize {
        let f = self.core.features();
        let q: Vec<f64> = (0..f.n_actions())
            .map(|a| f.eval(state, a, step).dot(&self.sampled[step]))
            .collect();
        argmax(&q)
    }

    fn observe(&mut self, transition: &Transition, _rng: &mut RngStream) {
        self.buffer.push(*transition);
    }

    fn end_episode(&mut self) {
        let batch = std::mem::take(&mut self.buffer);
        self.core
            .commit_episode(&batch)
            .expect("ridge update on validated features");
        self.refresh_posteriors()
            .expect("posterior covariance is positive definite");
        self.episode += 1;
    }

    fn episode_policy(&self) -> Policy {
        self.policy_for(&self.sampled)
    }

    fn greedy_policy(&self) -> Policy {
        let means: Vec<Vector> = match self.targets {
            PsrlTargets::Pessimistic => self.posteriors.iter().map(|p| p.mean().clone()).collect(),
            PsrlTargets::Sampled => {
                self.backward(|post, _| post.mean().clone())
                    .expect("posterior covariance is positive definite")
                    .1
            }
        };
        self.policy_for(&means)
    }
}
