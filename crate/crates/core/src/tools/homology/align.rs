//! Smith-Waterman local alignment with affine gaps (Gotoh recurrences).
//!
//! Only two DP rows are kept. Each cell carries the start coordinates and the
//! identity / column counts of the alignment it represents, so no traceback
//! matrix is needed. Among equal-scoring alignments ending in the same cell the
//! one with the smallest `(query_start, target_start)` wins; among optimal
//! alignments overall the same rule applies, then the smallest end.

use serde::{Deserialize, Serialize};

use super::matrix::SubstitutionMatrix;
use crate::seq::{Sequence, UNKNOWN_INDEX};

/// Gap of length `L` costs `open + extend * L` (BLAST convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapPenalties {
    pub open: i32,
    pub extend: i32,
}

impl Default for GapPenalties {
    fn default() -> Self {
        GapPenalties { open: 11, extend: 1 }
    }
}

impl GapPenalties {
    pub fn cost(&self, len: usize) -> i32 {
        self.open + self.extend * len as i32
    }
}

#[derive(Debug, Clone)]
pub struct Scoring {
    pub matrix: SubstitutionMatrix,
    pub gaps: GapPenalties,
}

impl Default for Scoring {
    fn default() -> Self {
        Scoring {
            matrix: SubstitutionMatrix::blosum62(),
            gaps: GapPenalties::default(),
        }
    }
}

/// One optimal local alignment. Coordinates are 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub score: i32,
    pub query_start: usize,
    pub query_end: usize,
    pub target_start: usize,
    pub target_end: usize,
    pub identities: usize,
    /// Alignment columns, gap columns included.
    pub aligned_length: usize,
}

impl Alignment {
    pub fn percent_identity(&self) -> f64 {
        100.0 * self.identities as f64 / self.aligned_length as f64
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    score: i32,
    qs: u32,
    ts: u32,
    ident: u32,
    cols: u32,
}

const NEG: i32 = i32::MIN / 4;

impl Cell {
    const NONE: Cell = Cell {
        score: NEG,
        qs: u32::MAX,
        ts: u32::MAX,
        ident: 0,
        cols: 0,
    };

    #[inline]
    fn better_than(&self, other: &Cell) -> bool {
        self.score > other.score || (self.score == other.score && (self.qs, self.ts) < (other.qs, other.ts))
    }

    #[inline]
    fn step(self, delta: i32, ident: bool) -> Cell {
        Cell {
            score: self.score + delta,
            ident: self.ident + ident as u32,
            cols: self.cols + 1,
            ..self
        }
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

/// Optimal local alignment of `query` against `target`; `None` when no
/// positive-scoring alignment exists.
pub fn smith_waterman(query: &Sequence, target: &Sequence, scoring: &Scoring) -> Option<Alignment> {
    let q = query.indices();
    let t = target.indices();
    align_indices(&q, &t, scoring)
}

pub(crate) fn align_indices(q: &[usize], t: &[usize], scoring: &Scoring) -> Option<Alignment> {
    let n = t.len();
    let open_ext = scoring.gaps.open + scoring.gaps.extend;
    let ext = scoring.gaps.extend;

    // h_prev/h_cur: best alignment ending at (i, j) in any state.
    // f_col: best ending with a gap in the target (consumes query residues).
    let mut h_prev = vec![Cell::NONE; n + 1];
    let mut h_cur = vec![Cell::NONE; n + 1];
    let mut f_col = vec![Cell::NONE; n + 1];

    let mut best: Option<(Cell, u32, u32)> = None;

    for (i, &qa) in q.iter().enumerate() {
        let i1 = (i + 1) as u32;
        let mut e = Cell::NONE;
        h_cur[0] = Cell::NONE;
        for (j, &tb) in t.iter().enumerate() {
            let jj = j + 1;
            let j1 = jj as u32;

            let fresh = Cell {
                score: 0,
                qs: i1,
                ts: j1,
                ident: 0,
                cols: 0,
            };
            let same = qa == tb && qa != UNKNOWN_INDEX;
            let m = pick(fresh, h_prev[jj - 1]).step(scoring.matrix.score(qa, tb), same);

            e = pick(e.step(-ext, false), h_cur[jj - 1].step(-open_ext, false));
            f_col[jj] = pick(f_col[jj].step(-ext, false), h_prev[jj].step(-open_ext, false));

            let h = pick(pick(m, e), f_col[jj]);
            h_cur[jj] = h;

            if h.score > 0 {
                let replace = match &best {
                    None => true,
                    Some((b, _, _)) => h.better_than(b),
                };
                if replace {
                    best = Some((h, i1, j1));
                }
            }
        }
        std::mem::swap(&mut h_prev, &mut h_cur);
    }

    best.map(|(c, qe, te)| Alignment {
        score: c.score,
        query_start: c.qs as usize,
        query_end: qe as usize,
        target_start: c.ts as usize,
        target_end: te as usize,
        identities: c.ident as usize,
        aligned_length: c.cols as usize,
    })
}
