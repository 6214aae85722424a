use std::collections::HashMap;

use super::store::ReferenceEntry;
use super::HomologyError;
use crate::seq::UNKNOWN_INDEX;

pub const DEFAULT_K: usize = 5;

/// Position of one k-mer occurrence inside the reference store.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub entry: u32,
    pub offset: u32,
}

/// Exact k-mer inverted index over an annotated reference store.
///
/// Immutable once built; searches only take `&self`.
#[derive(Debug, Clone)]
pub struct ReferenceIndex {
    k: usize,
    entries: Vec<ReferenceEntry>,
    encoded: Vec<Vec<usize>>,
    postings: HashMap<u64, Vec<Posting>>,
    by_accession: HashMap<String, usize>,
    total_residues: usize,
    warnings: Vec<String>,
}

/// Pack k alphabet indices into a base-20 integer. `None` if the window holds `X`.
pub(crate) fn encode_kmer(window: &[usize]) -> Option<u64> {
    let mut code = 0u64;
    for &r in window {
        if r == UNKNOWN_INDEX {
            return None;
        }
        code = code * 20 + r as u64;
    }
    Some(code)
}

/// Index every length-`k` window of every entry. Entries shorter than `k`
/// contribute no postings and leave a warning. Postings for a k-mer are
/// ordered by (entry ordinal, offset).
pub fn build_index(entries: Vec<ReferenceEntry>, k: usize) -> Result<ReferenceIndex, HomologyError> {
    if !(3..=7).contains(&k) {
        return Err(HomologyError::InvalidKmerSize(k));
    }
    let mut by_accession = HashMap::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        if by_accession.insert(e.accession.clone(), i).is_some() {
            return Err(HomologyError::DuplicateAccession(e.accession.clone()));
        }
    }

    let mut postings: HashMap<u64, Vec<Posting>> = HashMap::new();
    let mut warnings = Vec::new();
    let mut encoded = Vec::with_capacity(entries.len());
    let mut total_residues = 0;

    for (ordinal, entry) in entries.iter().enumerate() {
        let idx = entry.sequence.indices();
        total_residues += idx.len();
        if idx.len() < k {
            let msg = format!(
                "entry {} has length {} < k={k}; indexed with zero k-mers",
                entry.accession,
                idx.len()
            );
            log::warn!("{msg}");
            warnings.push(msg);
        } else {
            for (offset, window) in idx.windows(k).enumerate() {
                if let Some(code) = encode_kmer(window) {
                    postings.entry(code).or_default().push(Posting {
                        entry: ordinal as u32,
                        offset: offset as u32,
                    });
                }
            }
        }
        encoded.push(idx);
    }

    Ok(ReferenceIndex {
        k,
        entries,
        encoded,
        postings,
        by_accession,
        total_residues,
        warnings,
    })
}

impl ReferenceIndex {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[ReferenceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Residues summed over every entry: the database size used for E-values.
    pub fn total_residues(&self) -> usize {
        self.total_residues
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn postings(&self, kmer: &str) -> &[Posting] {
        let idx: Option<Vec<usize>> = kmer.bytes().map(crate::seq::residue_index).collect();
        idx.filter(|v| v.len() == self.k)
            .and_then(|v| encode_kmer(&v))
            .and_then(|code| self.postings.get(&code))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Number of distinct k-mers with at least one posting.
    pub fn distinct_kmers(&self) -> usize {
        self.postings.len()
    }

    pub(crate) fn postings_by_code(&self, code: u64) -> &[Posting] {
        self.postings.get(&code).map(Vec::as_slice).unwrap_or(&[])
    }

    pub(crate) fn encoded(&self, ordinal: usize) -> &[usize] {
        &self.encoded[ordinal]
    }

    pub fn entry(&self, accession: &str) -> Option<&ReferenceEntry> {
        self.by_accession.get(accession).map(|&i| &self.entries[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::validate_sequence;
    use crate::tools::homology::store::AnnotationRecord;

    fn entry(acc: &str, s: &str) -> ReferenceEntry {
        ReferenceEntry {
            accession: acc.into(),
            sequence: validate_sequence(acc, s).unwrap(),
            annotation: AnnotationRecord::named(acc, "test"),
        }
    }

    #[test]
    fn sliding_window_postings() {
        let idx = build_index(vec![entry("A", "MLKEFK")], 3).unwrap();
        assert_eq!(idx.distinct_kmers(), 4);
        for (off, kmer) in ["MLK", "LKE", "KEF", "EFK"].iter().enumerate() {
            assert_eq!(
                idx.postings(kmer),
                &[Posting {
                    entry: 0,
                    offset: off as u32
                }]
            );
        }
    }

    #[test]
    fn identical_entries_double_postings() {
        let idx = build_index(vec![entry("A", "MLKEFK"), entry("B", "MLKEFK")], 3).unwrap();
        assert_eq!(idx.distinct_kmers(), 4);
        assert_eq!(
            idx.postings("KEF"),
            &[Posting { entry: 0, offset: 2 }, Posting { entry: 1, offset: 2 }]
        );
    }

    #[test]
    fn short_entry_is_indexed_with_warning() {
        let idx = build_index(vec![entry("A", "ML"), entry("B", "MLK")], 3).unwrap();
        assert_eq!(idx.postings("MLK"), &[Posting { entry: 1, offset: 0 }]);
        assert_eq!(idx.warnings().len(), 1);
        assert_eq!(idx.len(), 2);
        assert_eq!(idx.total_residues(), 5);
    }

    #[test]
    fn rejects_bad_k_and_duplicates() {
        assert!(matches!(
            build_index(vec![entry("A", "MLK")], 2),
            Err(HomologyError::InvalidKmerSize(2))
        ));
        assert!(matches!(
            build_index(vec![entry("A", "MLK"), entry("A", "MLK")], 3),
            Err(HomologyError::DuplicateAccession(_))
        ));
    }

    #[test]
    fn x_windows_are_skipped() {
        let idx = build_index(vec![entry("A", "MLXEFK")], 3).unwrap();
        assert_eq!(idx.distinct_kmers(), 1);
        assert_eq!(idx.postings("EFK").len(), 1);
    }
}
