//! Sequence basic properties: length, longest hydrophobic run and a
//! composition-entropy low-complexity index, plus two threshold heuristics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seq::{residue_index, Sequence, UNKNOWN_INDEX};
use crate::wire::round_decimals;

/// Residues counted as hydrophobic when measuring runs. `X` breaks a run.
pub const HYDROPHOBIC_RESIDUES: &[u8] = b"ACFILMVW";

/// `hydrophobic_run_max` at or above this marks a sequence membrane-like
/// (roughly one transmembrane helix).
pub const MEMBRANE_RUN_THRESHOLD: usize = 18;

/// `low_complexity_index_0to1` at or above this marks a sequence low-complexity.
pub const LOW_COMPLEXITY_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropsError {
    #[error("sequence '{0}' has no canonical residues; composition is undefined")]
    UndefinedComposition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Heuristics {
    pub looks_membrane_like: bool,
    pub looks_low_complexity_like: bool,
}

/// Wire object of the `seq_basic_props` tool. The index is stored already
/// rounded to four decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicProps {
    pub length: usize,
    pub hydrophobic_run_max: usize,
    pub low_complexity_index_0to1: f64,
    pub heuristics: Heuristics,
}

fn is_hydrophobic(residue: u8) -> bool {
    HYDROPHOBIC_RESIDUES.contains(&residue)
}

/// Length of the longest contiguous stretch of hydrophobic residues.
pub fn max_hydrophobic_run(seq: &Sequence) -> usize {
    let mut best = 0;
    let mut run = 0;
    for &r in seq.as_bytes() {
        if is_hydrophobic(r) {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// `1 - H / log2(20)` where `H` is the base-2 Shannon entropy of the global
/// residue composition. `X` is excluded from the counts.
pub fn low_complexity_index(seq: &Sequence) -> Result<f64, PropsError> {
    let mut counts = [0usize; 20];
    for &r in seq.as_bytes() {
        let idx = residue_index(r).expect("validated residue");
        if idx != UNKNOWN_INDEX {
            counts[idx] += 1;
        }
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(PropsError::UndefinedComposition(seq.id().to_string()));
    }
    let total = total as f64;
    let entropy: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    let index = 1.0 - entropy / 20f64.log2();
    Ok(index.clamp(0.0, 1.0))
}

pub fn compute_basic_props(seq: &Sequence) -> Result<BasicProps, PropsError> {
    let run = max_hydrophobic_run(seq);
    let index = low_complexity_index(seq)?;
    Ok(BasicProps {
        length: seq.len(),
        hydrophobic_run_max: run,
        low_complexity_index_0to1: round_decimals(index, 4),
        heuristics: Heuristics {
            looks_membrane_like: run >= MEMBRANE_RUN_THRESHOLD,
            looks_low_complexity_like: index >= LOW_COMPLEXITY_THRESHOLD,
        },
    })
}
