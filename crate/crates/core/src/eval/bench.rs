//! Benchmark files: one JSON object per line with `case_id`, `task`,
//! `question`, `sequence` and `reference_answer`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rouge::tokenize;
use crate::seq::{validate_sequence, SeqError, Sequence};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaCase {
    pub case_id: String,
    pub task: String,
    pub question: String,
    /// Validated; its id is the case id.
    pub sequence: Sequence,
    pub reference_answer: String,
}

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("case '{case_id}': {source}")]
    InvalidSequence {
        case_id: String,
        #[source]
        source: SeqError,
    },
    #[error("line {line}: duplicate case_id '{case_id}'")]
    DuplicateCase { line: usize, case_id: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCase {
    case_id: String,
    task: String,
    question: String,
    sequence: String,
    reference_answer: String,
}

pub fn parse_benchmark(text: &str) -> Result<Vec<QaCase>, BenchmarkError> {
    let mut cases: Vec<QaCase> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawCase = serde_json::from_str(line).map_err(|e| BenchmarkError::Schema {
            line: line_no,
            message: e.to_string(),
        })?;
        if tokenize(&raw.reference_answer).is_empty() {
            return Err(BenchmarkError::Schema {
                line: line_no,
                message: "reference_answer has no tokens".into(),
            });
        }
        if cases.iter().any(|c| c.case_id == raw.case_id) {
            return Err(BenchmarkError::DuplicateCase {
                line: line_no,
                case_id: raw.case_id,
            });
        }
        let id = raw.case_id.split_whitespace().collect::<Vec<_>>().join("_");
        let sequence =
            validate_sequence(if id.is_empty() { "case" } else { &id }, &raw.sequence).map_err(|source| {
                BenchmarkError::InvalidSequence {
                    case_id: raw.case_id.clone(),
                    source,
                }
            })?;
        cases.push(QaCase {
            case_id: raw.case_id,
            task: raw.task,
            question: raw.question,
            sequence,
            reference_answer: raw.reference_answer,
        });
    }
    Ok(cases)
}

pub fn load_benchmark(path: &Path) -> Result<Vec<QaCase>, BenchmarkError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchmarkError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_benchmark(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"case_id": "c1", "task": "general_function", "question": "What does it do?", "sequence": "MLKEFK", "reference_answer": "A channel."}
{"case_id": "c2", "task": "description", "question": "Describe.", "sequence": "mlk", "reference_answer": "Small."}
"#;

    #[test]
    fn two_cases_in_order() {
        let cases = parse_benchmark(GOOD).unwrap();
        assert_eq!(
            cases.iter().map(|c| c.case_id.as_str()).collect::<Vec<_>>(),
            ["c1", "c2"]
        );
        assert_eq!(cases[1].sequence.residues(), "MLK");
    }

    #[test]
    fn missing_field_names_the_line() {
        let text = format!(
            "{}\n{}",
            GOOD.lines().next().unwrap(),
            r#"{"case_id": "c2", "task": "t", "question": "q", "sequence": "MLK"}"#
        );
        let e = parse_benchmark(&text).unwrap_err();
        assert!(matches!(&e, BenchmarkError::Schema { line: 2, message } if message.contains("reference_answer")));
    }

    #[test]
    fn invalid_sequence_names_the_case() {
        let text = r#"{"case_id": "bad1", "task": "t", "question": "q", "sequence": "MXB", "reference_answer": "r"}"#;
        let e = parse_benchmark(text).unwrap_err();
        assert!(matches!(&e, BenchmarkError::InvalidSequence { case_id, .. } if case_id == "bad1"));
    }

    #[test]
    fn empty_file_and_other_errors() {
        assert!(parse_benchmark("").unwrap().is_empty());
        let dup = format!("{}\n{}", GOOD.lines().next().unwrap(), GOOD.lines().next().unwrap());
        assert!(matches!(
            parse_benchmark(&dup),
            Err(BenchmarkError::DuplicateCase { line: 2, .. })
        ));
        let empty_ref = r#"{"case_id": "x", "task": "t", "question": "q", "sequence": "M", "reference_answer": " - "}"#;
        assert!(matches!(
            parse_benchmark(empty_ref),
            Err(BenchmarkError::Schema { line: 1, .. })
        ));
    }
}
