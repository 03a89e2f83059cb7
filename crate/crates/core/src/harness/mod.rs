//! Seeded experiments, pseudo-regret accounting and output files.

mod bayes;
mod config;
mod diagnostic;
mod experiment;
mod ledger;

pub use bayes::{estimate_bayes_regret, sample_environment, BayesEstimate};
pub use config::{load_toml, AgentKind, AgentSpec, BayesConfig, PriorKind, PriorSpec, RunConfig, SweepConfig};
pub use diagnostic::{sublinearity_diagnostic, Sublinearity, MIN_EPISODES};
pub use experiment::{
    build_agent, episodes_until, play_episode, run_experiment, run_single, run_sweep, write_runs, AgentContext,
    EpisodeOutcome, RunStreams, SeedRun, StopRule, SweepEntry,
};
pub use ledger::{emit_outputs, read_ledger, write_ledger, OutputFiles, RegretLedger, RunMetadata, LEDGER_HEADER};
