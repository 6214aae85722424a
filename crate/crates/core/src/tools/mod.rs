//! The four evidence tools. Each is a pure function of a [`Sequence`] (plus
//! an immutable store for homology and domains) returning its wire object.
//!
//! [`Sequence`]: crate::seq::Sequence

pub mod domains;
pub mod homology;
pub mod props;
pub mod topology;

pub const SEQ_BASIC_PROPS: &str = "seq_basic_props";
pub const MMSEQS2_BESTHIT: &str = "mmseqs2_besthit_uniprot";
pub const PFAM_HMMSCAN: &str = "pfam_hmmscan";
pub const TMBED_PREDICT: &str = "tmbed_predict";
pub const PYTHON_EVAL: &str = "python_eval";

/// Wire names of the four evidence tools, in the order evidence blocks are
/// laid out for up-front retrieval.
pub const EVIDENCE_TOOLS: [&str; 4] = [SEQ_BASIC_PROPS, MMSEQS2_BESTHIT, PFAM_HMMSCAN, TMBED_PREDICT];
