use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::LemmaReport;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Bounded noise laws with a declared sub-Gaussian constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NoiseSpec {
    Zero,
    /// `+-bound` with equal probability.
    Rademacher { bound: f64 },
    /// Uniform on `[-bound, bound]`.
    Uniform { bound: f64 },
}

impl NoiseSpec {
    fn sample(&self, rng: &mut RngStream) -> f64 {
        match *self {
            NoiseSpec::Zero => 0.0,
            NoiseSpec::Rademacher { bound } => {
                if rng.random::<bool>() {
                    bound
                } else {
                    -bound
                }
            }
            NoiseSpec::Uniform { bound } => {
                if bound == 0.0 {
                    0.0
                } else {
                    rng.random_range(-bound..=bound)
                }
            }
        }
    }
}

const CHUNK: u64 = 10_000;

/// For each `a` in the grid (the scalar `alpha^T phi`), estimates
/// `E exp(a nu / sigma - a^2 / 2)` from `samples` draws and fails the grid
/// point if the estimate exceeds `1 + 5 SE`.
pub fn verify_subgaussian_assumption(noise: NoiseSpec, sigma: f64, grid: &[f64], samples: u64, rng: &RngStream) -> Result<LemmaReport> {
    if !(sigma > 0.0) || samples < 2 || grid.is_empty() {
        return Err(Error::param("subgaussian", "need sigma > 0, samples >= 2 and a grid"));
    }
    let mut points = Vec::new();
    let mut failures = 0;
    for (g, &a) in grid.iter().enumerate() {
        let base = rng.substream(g as u64);
        let chunks = samples.div_ceil(CHUNK);
        let partial: Vec<(f64, f64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut r = base.child(&format!("chunk{c}"));
                let n = CHUNK.min(samples - c * CHUNK);
                let mut s = (0.0, 0.0);
                for _ in 0..n {
                    let v = (a * noise.sample(&mut r) / sigma - a * a / 2.0).exp();
                    s.0 += v;
                    s.1 += v * v;
                }
                s
            })
            .collect();
        let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
        let n = samples as f64;
        let mean = sum / n;
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        let se = (var / n).sqrt();
        let ok = mean <= 1.0 + 5.0 * se;
        if !ok {
            failures += 1;
        }
        points.push(json!({ "alpha": a, "mean": mean, "std_error": se, "ok": ok }));
    }
    Ok(LemmaReport::new(
        "subgaussian",
        grid.len() as u64,
        failures,
        0.0,
        json!({ "noise": noise, "sigma": sigma, "samples": samples, "grid": points, "seed": rng.seed() }),
    ))
}
