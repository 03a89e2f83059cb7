use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{AgentKind, AgentSpec, RunConfig, SweepConfig};
use super::ledger::{emit_outputs, RegretLedger, RunMetadata};
use crate::agents::{
    Agent, BdqnConfig, BdqnLiteAgent, BoltzmannAgent, EpsilonGreedyAgent, HypothesisSetPsrl, LinPsrlAgent,
    LinPsrlConfig, LinUcbAgent, LinUcbConfig, OracleAgent, Transition, UniformAgent,
};
use crate::env::{policy_value, Environment, StateFeatures};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Settings shared by agents that need noise and confidence parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentContext {
    pub delta: f64,
    pub lambda: f64,
    /// `None` uses the environment's sub-Gaussian constant.
    pub sigma: Option<f64>,
    pub seed: u64,
}

impl AgentContext {
    pub fn from_run(run: &RunConfig, seed: u64) -> Self {
        Self {
            delta: run.delta,
            lambda: run.lambda,
            sigma: run.sigma,
            seed,
        }
    }
}

/// Builds the agent described by `spec` for `env`.
pub fn build_agent(spec: &AgentSpec, env: &Environment, ctx: AgentContext) -> Result<Box<dyn Agent>> {
    let sigma = ctx.sigma.unwrap_or_else(|| env.sub_gaussian_sigma()).max(1e-12);
    let mdp = &env.mdp;
    Ok(match spec.kind {
        AgentKind::Linucb => Box::new(LinUcbAgent::new(
            env,
            LinUcbConfig {
                lambda: ctx.lambda,
                delta: ctx.delta,
                sigma,
                rho_override: spec.rho,
            },
        )?),
        AgentKind::Linpsrl => Box::new(LinPsrlAgent::new(
            env,
            LinPsrlConfig {
                prior_variance: ctx.lambda,
                sigma,
                delta: ctx.delta,
                rho_override: spec.rho,
                targets: spec.targets,
            },
        )?),
        AgentKind::Bdqn => {
            let scaled = BdqnConfig::scaled(spec.target_period);
            let config = BdqnConfig {
                sample_period: spec.sample_period.unwrap_or(scaled.sample_period),
                rebuild_period: spec.rebuild_period.unwrap_or(scaled.rebuild_period),
                target_period: spec.target_period,
                batch_size: spec.batch_size.unwrap_or(scaled.batch_size),
                buffer_capacity: spec.buffer_capacity,
                prior_std: spec.prior_std,
                noise_std: spec.noise_std,
                gamma: mdp.gamma(),
            };
            let features = StateFeatures::tabular_one_hot(mdp.n_states(), mdp.horizon())?;
            Box::new(BdqnLiteAgent::new(
                features,
                mdp.n_states(),
                mdp.n_actions(),
                mdp.horizon(),
                config,
            )?)
        }
        AgentKind::EpsilonGreedy => Box::new(EpsilonGreedyAgent::new(env, spec.epsilon)?),
        AgentKind::Boltzmann => Box::new(BoltzmannAgent::new(env, spec.temperature)?),
        AgentKind::Uniform => Box::new(UniformAgent::new(env)),
        AgentKind::Oracle => Box::new(OracleAgent::new(env)),
        AgentKind::HypothesisPsrl => {
            let layout = env
                .maze
                .as_ref()
                .ok_or_else(|| Error::Config("hypothesis_psrl needs a maze environment".into()))?;
            let mut rng = RngStream::named(ctx.seed, "hypotheses");
            Box::new(HypothesisSetPsrl::for_maze(env, layout, spec.hypotheses, &mut rng)?)
        }
    })
}

/// Per-run random streams: the environment and the agent never share one.
#[derive(Debug, Clone)]
pub struct RunStreams {
    pub env: RngStream,
    pub agent: RngStream,
}

impl RunStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            env: RngStream::named(seed, "env"),
            agent: RngStream::named(seed, "agent"),
        }
    }
}

/// What happened in one episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOutcome {
    /// Exact value of the policy announced at episode start.
    pub policy_value: f64,
    /// Realized (noisy) return.
    pub realized_return: f64,
    pub steps: usize,
}

/// Plays one episode: announce policy, act, step, observe, update.
pub fn play_episode(env: &Environment, agent: &mut dyn Agent, streams: &mut RunStreams) -> EpisodeOutcome {
    let mdp = &env.mdp;
    agent.begin_episode(&mut streams.agent);
    let value = policy_value(mdp, &agent.episode_policy());
    let horizon = mdp.horizon();
    let mut x = mdp.sample_initial(&mut streams.env);
    let mut total = 0.0;
    for h in 0..horizon {
        let a = agent.act(x, h, &mut streams.agent);
        let (r, next) = mdp.step(x, a, h, &mut streams.env);
        total += r;
        agent.observe(
            &Transition {
                state: x,
                action: a,
                reward: r,
                next_state: next,
                step: h,
                terminal: h + 1 == horizon,
            },
            &mut streams.agent,
        );
        x = next;
    }
    agent.end_episode();
    EpisodeOutcome {
        policy_value: value,
        realized_return: total,
        steps: horizon,
    }
}

/// One seeded run of `episodes` episodes.
pub fn run_single(env: &Environment, spec: &AgentSpec, ctx: AgentContext, episodes: usize) -> Result<RegretLedger> {
    let mut agent = build_agent(spec, env, ctx)?;
    let mut streams = RunStreams::new(ctx.seed);
    let v_star = env.optimal_value();
    let mut ledger = RegretLedger::new();
    for _ in 0..episodes {
        let started = Instant::now();
        let outcome = play_episode(env, agent.as_mut(), &mut streams);
        ledger.push(v_star - outcome.policy_value, started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(ledger)
}

/// Result of one seed of [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRun {
    pub seed: u64,
    pub ledger: RegretLedger,
}

/// Runs every seed (in parallel) and writes outputs when `config.output` is set.
pub fn run_experiment(config: &RunConfig) -> Result<Vec<SeedRun>> {
    config.validate()?;
    let env = config.env.build()?;
    let runs = config
        .seeds
        .par_iter()
        .map(|&seed| {
            run_single(&env, &config.agent, AgentContext::from_run(config, seed), config.episodes)
                .map(|ledger| SeedRun { seed, ledger })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(dir) = &config.output {
        write_runs(config, &runs, dir)?;
    }
    Ok(runs)
}

/// One agent of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub agent: AgentSpec,
    pub runs: Vec<SeedRun>,
}

/// Runs every agent of the sweep over the base seeds. Output files of all
/// agents share `base.output`; file names carry the agent kind, so two
/// entries with the same kind overwrite each other.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepEntry>> {
    if config.agents.is_empty() {
        return Err(Error::Config("sweep needs at least one agent".into()));
    }
    config
        .agents
        .iter()
        .map(|agent| {
            let run = RunConfig {
                agent: agent.clone(),
                ..config.base.clone()
            };
            run_experiment(&run).map(|runs| SweepEntry {
                agent: agent.clone(),
                runs,
            })
        })
        .collect()
}

pub fn write_runs(config: &RunConfig, runs: &[SeedRun], dir: &Path) -> Result<()> {
    let hash = config.hash();
    for run in runs {
        let meta = RunMetadata {
            config_hash: hash.clone(),
            seed: run.seed,
            agent: config.agent.kind.as_str().into(),
            episodes: run.ledger.len(),
            total_regret: run.ledger.total(),
            library_version: env!("CARGO_PKG_VERSION").into(),
        };
        let stem = format!("{}_seed{}", config.agent.kind.as_str(), run.seed);
        emit_outputs(&run.ledger, dir, &stem, &meta)?;
    }
    Ok(())
}

/// When to stop [`episodes_until`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// An episode's realized return exceeds one half (goal reached in a
    /// sparse 0/1-reward maze).
    Success,
    /// After an episode the agent's greedy policy is optimal.
    GreedyOptimal,
}

/// Episodes (1-based) until `rule` first holds; `None` if it never does
/// within `max_episodes`.
pub fn episodes_until(
    env: &Environment,
    agent: &mut dyn Agent,
    seed: u64,
    max_episodes: usize,
    rule: StopRule,
) -> Option<usize> {
    let mut streams = RunStreams::new(seed);
    let v_star = env.optimal_value();
    for episode in 1..=max_episodes {
        let outcome = play_episode(env, agent, &mut streams);
        let done = match rule {
            StopRule::Success => outcome.realized_return > 0.5,
            StopRule::GreedyOptimal => policy_value(&env.mdp, &agent.greedy_policy()) >= v_star - 1e-9,
        };
        if done {
            return Some(episode);
        }
    }
    None
}
