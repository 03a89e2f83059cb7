use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use linrel::harness::{
    estimate_bayes_regret, load_toml, run_experiment, run_sweep, BayesConfig, RunConfig, SeedRun, SweepConfig,
};
use linrel::verify::{run_suite, write_reports, SuiteParams};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "linrel", version, about = "Exploration agents for episodic MDPs with linear Q*")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output` in the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every agent of a sweep config over its seeds.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte-Carlo checks of the concentration bounds.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file.
        #[arg(long, default_value = "verify_report.json")]
        output: PathBuf,
        /// Smaller trial counts.
        #[arg(long)]
        quick: bool,
    },
    /// Regret averaged over prior draws of the environment.
    Bayes { config: PathBuf },
}

/// Failure reported as one JSON line on stderr.
struct Failure {
    kind: String,
    message: String,
}

impl From<linrel::Error> for Failure {
    fn from(e: linrel::Error) -> Self {
        Failure {
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

fn seed_summary(runs: &[SeedRun]) -> Vec<Value> {
    runs.iter()
        .map(|r| json!({ "seed": r.seed, "episodes": r.ledger.len(), "total_regret": r.ledger.total() }))
        .collect()
}

fn mean_total(runs: &[SeedRun]) -> f64 {
    runs.iter().map(|r| r.ledger.total()).sum::<f64>() / runs.len() as f64
}

fn execute(command: Command) -> Result<Value, Failure> {
    match command {
        Command::Run { config, output } => {
            let mut cfg: RunConfig = load_toml(&config)?;
            if output.is_some() {
                cfg.output = output;
            }
            let runs = run_experiment(&cfg)?;
            Ok(json!({
                "command": "run",
                "agent": cfg.agent.kind.as_str(),
                "config_hash": cfg.hash(),
                "mean_total_regret": mean_total(&runs),
                "runs": seed_summary(&runs),
            }))
        }
        Command::Sweep { config, output } => {
            let mut cfg: SweepConfig = load_toml(&config)?;
            if output.is_some() {
                cfg.base.output = output;
            }
            let entries = run_sweep(&cfg)?;
            let agents: Vec<Value> = entries
                .iter()
                .map(|e| {
                    json!({
                        "agent": e.agent.kind.as_str(),
                        "mean_total_regret": mean_total(&e.runs),
                        "runs": seed_summary(&e.runs),
                    })
                })
                .collect();
            Ok(json!({ "command": "sweep", "agents": agents }))
        }
        Command::Verify { seed, output, quick } => {
            let params = if quick { SuiteParams::quick() } else { SuiteParams::full() };
            let reports = run_suite(params, seed)?;
            for r in &reports {
                println!("{}", r.summary_line());
            }
            write_reports(&reports, &output)?;
            let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.lemma.as_str()).collect();
            if !failed.is_empty() {
                return Err(Failure {
                    kind: "verification_failed".into(),
                    message: format!("failed: {}", failed.join(", ")),
                });
            }
            Ok(json!({ "command": "verify", "report": output, "passed": reports.len() }))
        }
        Command::Bayes { config } => {
            let cfg: BayesConfig = load_toml(&config)?;
            let est = estimate_bayes_regret(&cfg)?;
            Ok(json!({
                "command": "bayes",
                "agent": cfg.run.agent.kind.as_str(),
                "draws": est.per_draw.len(),
                "mean": est.mean,
                "std_error": est.std_error,
                "per_draw": est.per_draw,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            eprintln!("{}", json!({ "error": "usage", "message": message.trim() }));
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::FAILURE
        }
    }
}
