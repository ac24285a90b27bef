//! Factor pairs on disk: `B.csv`, `C.csv` and a `header.json` carrying the
//! run metadata.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::io::{read_csv, write_csv};

use super::{FactorPair, KktReport, StopReason};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorHeader {
    pub rank: usize,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub final_objective: f64,
    pub objective_trace: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kkt: Option<KktReport>,
}

impl FactorHeader {
    pub fn new(f: &FactorPair, kkt: Option<&KktReport>) -> Self {
        FactorHeader {
            rank: f.rank,
            iterations: f.iterations,
            stop_reason: f.stop_reason,
            final_objective: f.final_objective(),
            objective_trace: f.objective_trace.clone(),
            kkt: kkt.cloned(),
        }
    }
}

/// Writes `B.csv`, `C.csv` and `header.json` into `dir` (created if absent).
pub fn save_factors(dir: impl AsRef<Path>, f: &FactorPair, kkt: Option<&KktReport>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_csv(dir.join("B.csv"), &f.b)?;
    write_csv(dir.join("C.csv"), &f.c)?;
    let header = serde_json::to_string_pretty(&FactorHeader::new(f, kkt)).expect("serializable");
    let p = dir.join("header.json");
    fs::write(&p, header + "\n").map_err(|e| Error::io(&p, e))
}

/// Reads a factor pair written by [`save_factors`].
pub fn load_factors(dir: impl AsRef<Path>) -> Result<(FactorPair, FactorHeader)> {
    let dir = dir.as_ref();
    let b = read_csv(dir.join("B.csv"))?;
    let c = read_csv(dir.join("C.csv"))?;
    let p = dir.join("header.json");
    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    let header: FactorHeader = serde_json::from_str(&text).map_err(|e| Error::parse(&p, e.to_string()))?;
    if b.cols() != header.rank || c.rows() != header.rank {
        return Err(Error::parse(&p, format!("rank {} does not match factor shapes", header.rank)));
    }
    let pair = FactorPair {
        b,
        c,
        rank: header.rank,
        objective_trace: header.objective_trace.clone(),
        iterations: header.iterations,
        stop_reason: header.stop_reason,
    };
    Ok((pair, header))
}
