//! BLOSUM62 substitution scores.

use crate::seq::{residue_index, UNKNOWN_INDEX};

// Rows and columns in the published ARNDCQEGHILKMFPSTWYV order.
const ORDER: &[u8; 20] = b"ARNDCQEGHILKMFPSTWYV";

#[rustfmt::skip]
const BLOSUM62_PUBLISHED: [[i8; 20]; 20] = [
    [ 4, -1, -2, -2,  0, -1, -1,  0, -2, -1, -1, -1, -1, -2, -1,  1,  0, -3, -2,  0],
    [-1,  5,  0, -2, -3,  1,  0, -2,  0, -3, -2,  2, -1, -3, -2, -1, -1, -3, -2, -3],
    [-2,  0,  6,  1, -3,  0,  0,  0,  1, -3, -3,  0, -2, -3, -2,  1,  0, -4, -2, -3],
    [-2, -2,  1,  6, -3,  0,  2, -1, -1, -3, -4, -1, -3, -3, -1,  0, -1, -4, -3, -3],
    [ 0, -3, -3, -3,  9, -3, -4, -3, -3, -1, -1, -3, -1, -2, -3, -1, -1, -2, -2, -1],
    [-1,  1,  0,  0, -3,  5,  2, -2,  0, -3, -2,  1,  0, -3, -1,  0, -1, -2, -1, -2],
    [-1,  0,  0,  2, -4,  2,  5, -2,  0, -3, -3,  1, -2, -3, -1,  0, -1, -3, -2, -2],
    [ 0, -2,  0, -1, -3, -2, -2,  6, -2, -4, -4, -2, -3, -3, -2,  0, -2, -2, -3, -3],
    [-2,  0,  1, -1, -3,  0,  0, -2,  8, -3, -3, -1, -2, -1, -2, -1, -2, -2,  2, -3],
    [-1, -3, -3, -3, -1, -3, -3, -4, -3,  4,  2, -3,  1,  0, -3, -2, -1, -3, -1,  3],
    [-1, -2, -3, -4, -1, -2, -3, -4, -3,  2,  4, -2,  2,  0, -3, -2, -1, -2, -1,  1],
    [-1,  2,  0, -1, -3,  1,  1, -2, -1, -3, -2,  5, -1, -3, -1,  0, -1, -3, -2, -2],
    [-1, -1, -2, -3, -1,  0, -2, -3, -2,  1,  2, -1,  5,  0, -2, -1, -1, -1, -1,  1],
    [-2, -3, -3, -3, -2, -3, -3, -3, -1,  0,  0, -3,  0,  6, -4, -2, -2,  1,  3, -1],
    [-1, -2, -2, -1, -3, -1, -1, -2, -2, -3, -3, -1, -2, -4,  7, -1, -1, -4, -3, -2],
    [ 1, -1,  1,  0, -1,  0,  0,  0, -1, -2, -2,  0, -1, -2, -1,  4,  1, -3, -2, -2],
    [ 0, -1,  0, -1, -1, -1, -1, -2, -2, -1, -1, -1, -1, -2, -1,  1,  5, -2, -2,  0],
    [-3, -3, -4, -4, -2, -2, -3, -2, -2, -3, -2, -3, -1,  1, -4, -3, -2, 11,  2, -3],
    [-2, -2, -2, -3, -2, -1, -2, -3,  2, -1, -1, -2, -1,  3, -3, -2, -2,  2,  7, -1],
    [ 0, -3, -3, -3, -1, -2, -2, -3, -3,  3,  1, -2,  1, -1, -2, -2,  0, -3, -1,  4],
];

/// A 21×21 score table indexed by crate alphabet indices (20 residues + X).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionMatrix {
    scores: [[i32; 21]; 21],
}

impl SubstitutionMatrix {
    /// BLOSUM62 with `X` scoring 0 against everything.
    pub fn blosum62() -> Self {
        let mut scores = [[0i32; 21]; 21];
        for (r, &ra) in ORDER.iter().enumerate() {
            for (c, &cb) in ORDER.iter().enumerate() {
                let i = residue_index(ra).unwrap();
                let j = residue_index(cb).unwrap();
                scores[i][j] = BLOSUM62_PUBLISHED[r][c] as i32;
            }
        }
        debug_assert!(scores[UNKNOWN_INDEX].iter().all(|&s| s == 0));
        SubstitutionMatrix { scores }
    }

    #[inline]
    pub fn score(&self, a: usize, b: usize) -> i32 {
        self.scores[a][b]
    }

    /// Score by residue letters.
    pub fn score_residues(&self, a: u8, b: u8) -> i32 {
        self.score(
            residue_index(a).expect("valid residue"),
            residue_index(b).expect("valid residue"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_known_entries() {
        let m = SubstitutionMatrix::blosum62();
        for a in 0..21 {
            for b in 0..21 {
                assert_eq!(m.score(a, b), m.score(b, a));
            }
        }
        assert_eq!(m.score_residues(b'W', b'W'), 11);
        assert_eq!(m.score_residues(b'C', b'C'), 9);
        assert_eq!(m.score_residues(b'A', b'T'), 0);
        assert_eq!(m.score_residues(b'I', b'V'), 3);
        assert_eq!(m.score_residues(b'X', b'W'), 0);
    }
}
