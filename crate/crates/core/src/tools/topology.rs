//! Transmembrane topology stand-in: sliding-window Kyte-Doolittle hydropathy
//! rendered in the TMbed-style three-line prediction block.
//!
//! State letters: `H` strong membrane signal, `h` weak membrane signal, `.`
//! non-membrane. Window sums are taken in integer tenths of the hydropathy
//! scale, so a window's mean does not depend on summation order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seq::{residue_index, Sequence};

/// Kyte-Doolittle hydropathy in tenths, alphabet order (ACDEFGHIKLMNPQRSTVWY).
const KD_TENTHS: [i32; 20] = [
    18, 25, -35, -35, 28, -4, -32, 45, -39, 38, 19, -35, -16, -35, -45, -8, -7, 42, -9, -13,
];

/// Kyte-Doolittle value of a residue letter; `X` scores 0.
pub fn hydropathy(residue: u8) -> f64 {
    match residue_index(residue) {
        Some(i) if i < 20 => KD_TENTHS[i] as f64 / 10.0,
        _ => 0.0,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("window size {0} must be odd and at least 5")]
    InvalidWindow(usize),
    #[error("window size {window} exceeds twice the sequence length {length}")]
    DegenerateWindow { window: usize, length: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopologyParams {
    pub window: usize,
    pub strong_threshold: f64,
    pub weak_threshold: f64,
    /// Membrane segments ('H'/'h' runs) shorter than this become '.'.
    pub min_run: usize,
    /// 'H' count at which `has_tm_signal_heuristic` turns true.
    pub heuristic_min_hits: usize,
}

impl Default for TopologyParams {
    fn default() -> Self {
        TopologyParams {
            window: 19,
            strong_threshold: 1.6,
            weak_threshold: 0.9,
            min_run: 7,
            heuristic_min_hits: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyPrediction {
    /// `>id`, the sequence, and the per-residue state line, joined by newlines.
    pub raw_pred: String,
    pub tm_signal_letter_hits: usize,
    pub has_tm_signal_heuristic: bool,
}

impl TopologyPrediction {
    pub fn state_line(&self) -> &str {
        self.raw_pred.rsplit('\n').next().unwrap_or("")
    }
}

/// Wire envelope: `{"prediction": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyResponse {
    pub prediction: TopologyPrediction,
}

/// Per-residue states before assembly into the text block.
pub fn predict_states(seq: &Sequence, params: &TopologyParams) -> Result<Vec<u8>, TopologyError> {
    let w = params.window;
    if w < 5 || w.is_multiple_of(2) {
        return Err(TopologyError::InvalidWindow(w));
    }
    let n = seq.len();
    if w > 2 * n {
        return Err(TopologyError::DegenerateWindow { window: w, length: n });
    }
    let half = w / 2;
    let tenths: Vec<i32> = seq
        .as_bytes()
        .iter()
        .map(|&r| match residue_index(r) {
            Some(i) if i < 20 => KD_TENTHS[i],
            _ => 0,
        })
        .collect();
    let mut prefix = vec![0i64; n + 1];
    for (i, &v) in tenths.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v as i64;
    }

    let mut states: Vec<u8> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let mean = (prefix[hi] - prefix[lo]) as f64 / (hi - lo) as f64 / 10.0;
            if mean >= params.strong_threshold {
                b'H'
            } else if mean >= params.weak_threshold {
                b'h'
            } else {
                b'.'
            }
        })
        .collect();

    let mut i = 0;
    while i < n {
        if states[i] == b'.' {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && states[i] != b'.' {
            i += 1;
        }
        if i - start < params.min_run {
            states[start..i].fill(b'.');
        }
    }
    Ok(states)
}

pub fn predict_topology(seq: &Sequence, params: &TopologyParams) -> Result<TopologyPrediction, TopologyError> {
    let states = predict_states(seq, params)?;
    let hits = states.iter().filter(|&&s| s == b'H').count();
    let state_line = String::from_utf8(states).expect("ascii states");
    Ok(TopologyPrediction {
        raw_pred: format!(">{}\n{}\n{}", seq.id(), seq.residues(), state_line),
        tm_signal_letter_hits: hits,
        has_tm_signal_heuristic: hits >= params.heuristic_min_hits,
    })
}
