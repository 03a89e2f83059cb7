//! Calibration sweeps behind the settings used in `tests/acceptance.rs`.
//!
//! ```text
//! cargo run --release -p linrel --example pilots -- regret
//! cargo run --release -p linrel --example pilots -- maze
//! cargo run --release -p linrel --example pilots -- bdqn
//! ```
//!
//! Results are summarized in `docs/pilots.md`.

use linrel::env::{EnvKind, EnvSpec};
use linrel::harness::*;
use rayon::prelude::*;

fn ctx(seed: u64) -> AgentContext {
    AgentContext {
        delta: 0.1,
        lambda: 1.0,
        sigma: None,
        seed,
    }
}

fn median(v: &mut [usize]) -> f64 {
    v.sort_unstable();
    (v[(v.len() - 1) / 2] + v[v.len() / 2]) as f64 / 2.0
}

/// Sublinearity exponent per seed on the 5-state chain, for several radius scales.
fn regret() {
    for noise in [0.0, 0.1] {
        let env = EnvSpec {
            n: 5,
            horizon: 4,
            slip_prob: 0.1,
            noise_bound: noise,
            ..EnvSpec::default()
        }
        .build()
        .unwrap();
        let mut specs = vec![];
        for rho in [None, Some(0.5), Some(1.0), Some(1.5)] {
            specs.push((format!("linucb rho={rho:?}"), AgentSpec { kind: AgentKind::Linucb, rho, ..AgentSpec::default() }));
        }
        specs.push(("linpsrl".into(), AgentSpec { kind: AgentKind::Linpsrl, ..AgentSpec::default() }));
        specs.push((
            "epsilon_greedy".into(),
            AgentSpec { kind: AgentKind::EpsilonGreedy, epsilon: 0.1, ..AgentSpec::default() },
        ));
        for (name, spec) in specs {
            let alphas: Vec<String> = (0..5u64)
                .into_par_iter()
                .map(|seed| {
                    let ledger = run_single(&env, &spec, ctx(seed), 10_000).unwrap();
                    let fit = sublinearity_diagnostic(&ledger).unwrap();
                    format!("{:.3}", fit.alpha().unwrap_or(f64::NAN))
                })
                .collect();
            println!("noise {noise} {name}: alpha [{}]", alphas.join(" "));
        }
    }
}

/// Episodes to first goal on the open 5x5 maze.
fn maze() {
    let env = EnvSpec {
        kind: EnvKind::Maze,
        grid: ["S....", ".....", ".....", "...G.", "....."].map(String::from).to_vec(),
        noise_bound: 0.0,
        ..EnvSpec::default()
    }
    .build()
    .unwrap();
    let cap = 3000;
    for (name, spec) in [
        ("psrl K=16", AgentSpec { kind: AgentKind::HypothesisPsrl, hypotheses: 16, ..AgentSpec::default() }),
        ("epsilon 0.2", AgentSpec { kind: AgentKind::EpsilonGreedy, epsilon: 0.2, ..AgentSpec::default() }),
    ] {
        let mut v: Vec<usize> = (0..200u64)
            .into_par_iter()
            .map(|seed| {
                let mut agent = build_agent(&spec, &env, ctx(seed)).unwrap();
                episodes_until(&env, agent.as_mut(), seed, cap, StopRule::Success).unwrap_or(cap + 1)
            })
            .collect();
        let censored = v.iter().filter(|&&n| n > cap).count();
        let m = median(&mut v);
        println!("{name}: median {m} max {} censored {censored}/200", v[199]);
    }
}

/// Episodes until the greedy policy is optimal on the 8-state chain, over a grid of BDQN settings.
fn bdqn() {
    let cap = 3000;
    for slip in [0.0, 0.1] {
        let env = EnvSpec {
            n: 8,
            horizon: 7,
            slip_prob: slip,
            noise_bound: 0.1,
            ..EnvSpec::default()
        }
        .build()
        .unwrap();
        let mut specs = vec![(
            "epsilon 0.1".to_string(),
            AgentSpec { kind: AgentKind::EpsilonGreedy, epsilon: 0.1, ..AgentSpec::default() },
        )];
        for target_period in [10, 50, 100] {
            for prior_std in [0.001, 0.1, 1.0, 3.0] {
                specs.push((
                    format!("bdqn T={target_period} prior={prior_std}"),
                    AgentSpec {
                        kind: AgentKind::Bdqn,
                        target_period,
                        sample_period: Some(7),
                        batch_size: Some(1000),
                        prior_std,
                        ..AgentSpec::default()
                    },
                ));
            }
        }
        for (name, spec) in specs {
            let mut v: Vec<usize> = (0..20u64)
                .into_par_iter()
                .map(|seed| {
                    let mut agent = build_agent(&spec, &env, ctx(seed)).unwrap();
                    episodes_until(&env, agent.as_mut(), seed, cap, StopRule::GreedyOptimal).unwrap_or(cap + 1)
                })
                .collect();
            let censored = v.iter().filter(|&&n| n > cap).count();
            println!("slip {slip} {name}: median {} censored {censored}/20", median(&mut v));
        }
    }
}

fn main() {
    match std::env::args().nth(1).as_deref() {
        Some("regret") => regret(),
        Some("maze") => maze(),
        Some("bdqn") => bdqn(),
        _ => {
            eprintln!("usage: pilots <regret|maze|bdqn>");
            std::process::exit(2);
        }
    }
}
