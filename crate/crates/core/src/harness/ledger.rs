use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LEDGER_HEADER: [&str; 4] = ["episode", "regret", "cumulative_regret", "wall_time_ms"];

/// Per-episode pseudo-regret `V*(start) - V^{pi_t}(start)` and its running sum.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegretLedger {
    per_episode: Vec<f64>,
    cumulative: Vec<f64>,
    wall_time_ms: Vec<f64>,
}

impl RegretLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, regret: f64, wall_time_ms: f64) {
        let prev = self.cumulative.last().copied().unwrap_or(0.0);
        self.per_episode.push(regret);
        self.cumulative.push(prev + regret);
        self.wall_time_ms.push(wall_time_ms);
    }

    pub fn from_regrets(regrets: &[f64]) -> Self {
        let mut ledger = Self::new();
        for &r in regrets {
            ledger.push(r, 0.0);
        }
        ledger
    }

    pub fn len(&self) -> usize {
        self.per_episode.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_episode.is_empty()
    }

    pub fn per_episode(&self) -> &[f64] {
        &self.per_episode
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn wall_time_ms(&self) -> &[f64] {
        &self.wall_time_ms
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Episode-wise mean of equally long ledgers; wall times are summed.
    pub fn mean_of(ledgers: &[RegretLedger]) -> Result<Self> {
        let first = ledgers
            .first()
            .ok_or_else(|| Error::param("ledgers", "need at least one"))?;
        let n = first.len();
        if let Some(bad) = ledgers.iter().find(|l| l.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        let k = ledgers.len() as f64;
        let mut out = Self::new();
        for t in 0..n {
            let r = ledgers.iter().map(|l| l.per_episode[t]).sum::<f64>() / k;
            let w = ledgers.iter().map(|l| l.wall_time_ms[t]).sum::<f64>();
            out.push(r, w);
        }
        Ok(out)
    }
}

/// Metadata written next to every ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config_hash: String,
    pub seed: u64,
    pub agent: String,
    pub episodes: usize,
    pub total_regret: f64,
    pub library_version: String,
}

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub ledger: PathBuf,
    pub metadata: PathBuf,
}

/// Writes `<dir>/<stem>.csv` (one row per episode) and `<dir>/<stem>.json`.
pub fn emit_outputs(ledger: &RegretLedger, dir: &Path, stem: &str, metadata: &RunMetadata) -> Result<OutputFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let meta_path = dir.join(format!("{stem}.json"));
    write_ledger(ledger, &csv_path)?;
    let text = serde_json::to_string_pretty(metadata).expect("metadata serializes");
    std::fs::write(&meta_path, text + "\n").map_err(|e| Error::io(&meta_path, e))?;
    Ok(OutputFiles {
        ledger: csv_path,
        metadata: meta_path,
    })
}

pub fn write_ledger(ledger: &RegretLedger, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let fail = |e: csv::Error| Error::Format {
        path: path.to_owned(),
        reason: e.to_string(),
    };
    w.write_record(LEDGER_HEADER).map_err(fail)?;
    for t in 0..ledger.len() {
        w.write_record([
            (t + 1).to_string(),
            ledger.per_episode[t].to_string(),
            ledger.cumulative[t].to_string(),
            ledger.wall_time_ms[t].to_string(),
        ])
        .map_err(fail)?;
    }
    let mut inner = w.into_inner().map_err(|e| Error::Format {
        path: path.to_owned(),
        reason: e.to_string(),
    })?;
    inner.flush().map_err(|e| Error::io(path, e))
}

/// Parses a file written by [`write_ledger`].
pub fn read_ledger(path: &Path) -> Result<RegretLedger> {
    let format = |reason: String| Error::Format {
        path: path.to_owned(),
        reason,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| format(e.to_string()))?;
    let header = reader.headers().map_err(|e| format(e.to_string()))?.clone();
    if header.iter().ne(LEDGER_HEADER) {
        return Err(format(format!("unexpected header {header:?}")));
    }
    let mut ledger = RegretLedger::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format(e.to_string()))?;
        let field = |k: usize| -> Result<f64> {
            record
                .get(k)
                .ok_or_else(|| format(format!("row {} has {} fields", i + 1, record.len())))?
                .parse::<f64>()
                .map_err(|e| format(format!("row {}: {e}", i + 1)))
        };
        if field(0)? != (i + 1) as f64 {
            return Err(format(format!("row {} is out of order", i + 1)));
        }
        ledger.per_episode.push(field(1)?);
        ledger.cumulative.push(field(2)?);
        ledger.wall_time_ms.push(field(3)?);
    }
    Ok(ledger)
}
