//! Homology best-hit search against an annotated reference store.
//!
//! A k-mer inverted index preselects entries with several shared k-mers on
//! nearby diagonals; each candidate gets a full Smith-Waterman alignment
//! (BLOSUM62, affine gaps) and a Karlin-Altschul E-value. The winning entry's
//! curated annotation becomes the evidence object returned to the agent.

pub mod align;
pub mod index;
pub mod matrix;
pub mod search;
pub mod store;

use thiserror::Error;

pub use align::{smith_waterman, Alignment, GapPenalties, Scoring};
pub use index::{build_index, Posting, ReferenceIndex, DEFAULT_K};
pub use matrix::SubstitutionMatrix;
pub use search::{
    bit_score, evalue, make_evidence, prefilter, search_best_hit, AnnotationLookup, BestHit, EvidenceRecord,
    SearchParams,
};
pub use store::{join_store, load_store, render_store, AnnotationRecord, ReferenceEntry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("reference index is empty")]
    EmptyIndex,
    #[error("k-mer size {0} outside 3..=7")]
    InvalidKmerSize(usize),
    #[error("duplicate accession '{0}' in reference store")]
    DuplicateAccession(String),
    #[error("no annotation for accession '{0}'")]
    MissingAnnotation(String),
    #[error("annotation file line {line}: {message}")]
    AnnotationSyntax { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Sequence(#[from] crate::seq::SeqError),
}
