use serde::{Deserialize, Serialize};

/// Outcome of a Monte-Carlo or exact check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub trials: u64,
    pub failures: u64,
    /// Nominal failure probability; 0 for exact inequalities.
    pub delta: f64,
    pub passed: bool,
    /// Largest allowed failure count.
    pub threshold: f64,
    pub details: serde_json::Value,
}

/// `delta N + 3 sqrt(delta (1 - delta) N)`.
pub fn failure_threshold(trials: u64, delta: f64) -> f64 {
    let n = trials as f64;
    delta * n + 3.0 * (delta * (1.0 - delta) * n).sqrt()
}

impl LemmaReport {
    pub fn new(lemma: &str, trials: u64, failures: u64, delta: f64, details: serde_json::Value) -> Self {
        let threshold = failure_threshold(trials, delta);
        Self {
            lemma: lemma.to_owned(),
            trials,
            failures,
            delta,
            passed: failures as f64 <= threshold,
            threshold,
            details,
        }
    }

    /// `lemma pass|fail failures/trials (threshold t)`.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {} {}/{} (threshold {:.2})",
            self.lemma,
            if self.passed { "pass" } else { "fail" },
            self.failures,
            self.trials,
            self.threshold
        )
    }
}
