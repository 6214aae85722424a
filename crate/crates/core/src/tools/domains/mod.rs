//! Profile-HMM domain scan: HMMER3 text subset, local Viterbi in log-odds
//! space, E-values and non-overlapping domain selection.

pub mod hmm;
pub mod scan;
pub mod viterbi;

use thiserror::Error;

pub use hmm::{parse_hmm_library, write_hmm_library, ProfileHmm};
pub use scan::{domain_evalue, scan, select_domains, DomainHit, DomainScanResult, ScanParams};
pub use viterbi::{viterbi_score, ViterbiHit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("profile '{record}' is malformed: {reason}")]
    MalformedProfile { record: String, reason: String },
    #[error("profile '{record}' is truncated: LENG {expected} but {found} node rows")]
    TruncatedProfile {
        record: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("profile '{record}' is missing its '//' terminator")]
    Unterminated { record: String },
    #[error("profile library is empty")]
    EmptyLibrary,
}
