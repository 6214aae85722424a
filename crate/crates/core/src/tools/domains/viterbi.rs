//! Local Viterbi scoring of one sequence against one profile.
//!
//! Paths enter any match state with probability `1 / M`, leave from any match
//! state for free, and may start and stop anywhere in the sequence; residues
//! outside the path are explained by the null model. Scores are log2 odds
//! against the background frequencies, built from the stored negative-log
//! values without ever forming raw probability products.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::hmm::{ProfileHmm, DD, DM, II, IM, MD, MI, MM};
use crate::seq::{Sequence, UNKNOWN_INDEX};

/// Best local path through a profile, coordinates 1-based inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViterbiHit {
    pub bits: f64,
    pub hmm_from: usize,
    pub hmm_to: usize,
    pub ali_from: usize,
    pub ali_to: usize,
}

/// Per-model log2-odds tables derived from a [`ProfileHmm`].
#[derive(Debug, Clone)]
pub struct ScoreTables {
    pub(crate) len: usize,
    /// `msc[k][a]`, k = 0-based node, a = alphabet index (X included).
    pub(crate) msc: Vec<[f64; 21]>,
    pub(crate) isc: Vec<[f64; 21]>,
    /// `tsc[k]` = transitions out of node k (0 = begin), in bits.
    pub(crate) tsc: Vec<[f64; 7]>,
    pub(crate) entry: f64,
}

impl ScoreTables {
    pub fn new(hmm: &ProfileHmm) -> Self {
        let bg_nll: Vec<f64> = hmm.background.iter().map(|p| -p.ln()).collect();
        let odds = |row: &[f64; 20]| {
            let mut out = [0.0; 21];
            for a in 0..20 {
                // log2(p / bg) = (bg_nll - p_nll) / ln 2
                out[a] = if row[a].is_infinite() {
                    f64::NEG_INFINITY
                } else {
                    (bg_nll[a] - row[a]) / LN_2
                };
            }
            out[UNKNOWN_INDEX] = 0.0;
            out
        };
        let bits = |row: &[f64; 7]| {
            let mut out = [0.0; 7];
            for (o, &v) in out.iter_mut().zip(row) {
                *o = if v.is_infinite() { f64::NEG_INFINITY } else { -v / LN_2 };
            }
            out
        };
        ScoreTables {
            len: hmm.model_length,
            msc: hmm.match_emissions.iter().map(odds).collect(),
            isc: hmm.insert_emissions.iter().map(odds).collect(),
            tsc: hmm.transitions.iter().map(bits).collect(),
            entry: -(hmm.model_length as f64).log2(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    score: f64,
    ali_from: u32,
    hmm_from: u32,
}

impl Cell {
    const NONE: Cell = Cell {
        score: f64::NEG_INFINITY,
        ali_from: u32::MAX,
        hmm_from: u32::MAX,
    };

    #[inline]
    fn add(self, delta: f64) -> Cell {
        Cell {
            score: self.score + delta,
            ..self
        }
    }

    #[inline]
    fn better_than(&self, o: &Cell) -> bool {
        self.score > o.score || (self.score == o.score && (self.ali_from, self.hmm_from) < (o.ali_from, o.hmm_from))
    }
}

#[inline]
fn pick(a: Cell, b: Cell) -> Cell {
    if b.better_than(&a) {
        b
    } else {
        a
    }
}

/// Best-scoring local path, or `None` when no path scores above zero bits.
pub fn viterbi_score(hmm: &ProfileHmm, seq: &Sequence) -> Option<ViterbiHit> {
    viterbi_with_tables(&ScoreTables::new(hmm), &seq.indices())
}

pub fn viterbi_with_tables(t: &ScoreTables, x: &[usize]) -> Option<ViterbiHit> {
    let m = t.len;
    // index k in 0..m is node k+1
    let mut m_prev = vec![Cell::NONE; m];
    let mut i_prev = vec![Cell::NONE; m];
    let mut d_prev = vec![Cell::NONE; m];
    let mut m_cur = vec![Cell::NONE; m];
    let mut i_cur = vec![Cell::NONE; m];
    let mut d_cur = vec![Cell::NONE; m];

    // (cell, ali_to, hmm_to)
    let mut best: Option<(Cell, u32, u32)> = None;

    for (i, &a) in x.iter().enumerate() {
        let pos = (i + 1) as u32;
        for k in 0..m {
            let node = (k + 1) as u32;
            let start = Cell {
                score: t.entry,
                ali_from: pos,
                hmm_from: node,
            };
            let mut from = start;
            if k > 0 {
                let tp = &t.tsc[k]; // out of node k (1-based) == index k
                from = pick(from, m_prev[k - 1].add(tp[MM]));
                from = pick(from, i_prev[k - 1].add(tp[IM]));
                from = pick(from, d_prev[k - 1].add(tp[DM]));
            }
            m_cur[k] = from.add(t.msc[k][a]);

            i_cur[k] = if k + 1 < m {
                let tp = &t.tsc[k + 1];
                pick(m_prev[k].add(tp[MI]), i_prev[k].add(tp[II])).add(t.isc[k][a])
            } else {
                Cell::NONE
            };

            d_cur[k] = if k > 0 {
                let tp = &t.tsc[k];
                pick(m_cur[k - 1].add(tp[MD]), d_cur[k - 1].add(tp[DD]))
            } else {
                Cell::NONE
            };

            let c = m_cur[k];
            if c.score > 0.0 && c.score.is_finite() {
                let replace = match &best {
                    None => true,
                    Some((b, at, ht)) => {
                        c.better_than(b)
                            || (c.score == b.score
                                && (c.ali_from, c.hmm_from) == (b.ali_from, b.hmm_from)
                                && (pos, node) < (*at, *ht))
                    }
                };
                if replace {
                    best = Some((c, pos, node));
                }
            }
        }
        std::mem::swap(&mut m_prev, &mut m_cur);
        std::mem::swap(&mut i_prev, &mut i_cur);
        std::mem::swap(&mut d_prev, &mut d_cur);
    }

    best.map(|(c, ali_to, hmm_to)| ViterbiHit {
        bits: c.score,
        hmm_from: c.hmm_from as usize,
        hmm_to: hmm_to as usize,
        ali_from: c.ali_from as usize,
        ali_to: ali_to as usize,
    })
}
