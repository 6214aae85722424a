//! Runtime for tool-augmented protein function reasoning.
//!
//! * [`seq`]: amino-acid sequences and FASTA.
//! * [`tools`]: the evidence tools (basic properties, homology best hit,
//!   profile-HMM domain scan, hydropathy topology).
//! * [`executor`]: tool registry, argument resolution and audited dispatch.
//! * [`agent`]: chat backends, the three inference paradigms and traces.
//! * [`eval`]: ROUGE recall metrics, benchmark files and reports.

pub mod agent;
pub mod eval;
pub mod executor;
pub mod seq;
pub mod tools;
pub mod wire;
