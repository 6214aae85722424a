//! Recall-based evaluation: tokenization and ROUGE-1 / ROUGE-L recall,
//! benchmark files, per-task reports, and reasoning-trace synthesis prompts.

pub mod bench;
pub mod report;
pub mod rouge;
pub mod synth;

pub use bench::{load_benchmark, parse_benchmark, BenchmarkError, QaCase};
pub use report::{evaluate_run, render_table, AlignmentError, EvalReport, ScoredCase, TaskScore};
pub use rouge::{lcs_len, rouge1_recall, rouge_l_recall, tokenize, RougeError};
pub use synth::{synth_r1_prompt, SynthRecord, SYNTH_TEMPLATE};
