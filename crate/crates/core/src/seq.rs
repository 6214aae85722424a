//! Amino-acid sequence model and FASTA ingestion.
//!
//! The alphabet is the 20 canonical residues plus `X` for unknown. Ambiguity
//! codes (`B`, `Z`, `U`, `O`, ...) are rejected rather than remapped, so every
//! downstream table (hydropathy, substitution matrix, profile emissions) only
//! ever sees residues it has an entry for.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canonical residues in the order used by every per-residue table in the crate.
pub const AMINO_ALPHABET: &[u8; 20] = b"ACDEFGHIKLMNPQRSTVWY";

/// Index reserved for the unknown residue `X`.
pub const UNKNOWN_INDEX: usize = 20;

const INVALID: u8 = 0xff;

const RESIDUE_INDEX: [u8; 256] = {
    let mut table = [INVALID; 256];
    let mut i = 0;
    while i < AMINO_ALPHABET.len() {
        table[AMINO_ALPHABET[i] as usize] = i as u8;
        i += 1;
    }
    table[b'X' as usize] = UNKNOWN_INDEX as u8;
    table
};

/// Alphabet index of an uppercase residue byte: 0..20 for canonical residues,
/// [`UNKNOWN_INDEX`] for `X`, `None` for anything else.
#[inline]
pub fn residue_index(residue: u8) -> Option<usize> {
    match RESIDUE_INDEX[residue as usize] {
        INVALID => None,
        idx => Some(idx as usize),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("empty input")]
    EmptyInput,
    #[error("sequence '{id}' is empty")]
    EmptySequence { id: String },
    #[error("invalid residue '{character}' at line {line}, column {column}")]
    InvalidResidue {
        character: char,
        line: usize,
        column: usize,
    },
    #[error("invalid sequence id '{0}': must be nonempty and contain no whitespace")]
    InvalidId(String),
    #[error("FASTA header at line {line} is empty")]
    EmptyHeader { line: usize },
    #[error("sequence data at line {line} appears before any '>' header")]
    MissingHeader { line: usize },
}

/// A validated amino-acid sequence with a stable identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSequence")]
pub struct Sequence {
    id: String,
    residues: String,
}

#[derive(Deserialize)]
struct RawSequence {
    id: String,
    residues: String,
}

impl TryFrom<RawSequence> for Sequence {
    type Error = SeqError;

    fn try_from(raw: RawSequence) -> Result<Self, Self::Error> {
        validate_sequence(&raw.id, &raw.residues)
    }
}

impl Sequence {
    pub fn id(&self) -> &str {
        &self.id
    }

    /// Residues as an uppercase ASCII string.
    pub fn residues(&self) -> &str {
        &self.residues
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.residues.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    /// Always false for a constructed sequence; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// Alphabet indices of every residue (see [`residue_index`]).
    pub fn indices(&self) -> Vec<usize> {
        self.as_bytes()
            .iter()
            .map(|&b| residue_index(b).expect("validated residue"))
            .collect()
    }

    /// Same residues under a different id.
    pub fn with_id(&self, id: &str) -> Result<Sequence, SeqError> {
        check_id(id)?;
        Ok(Sequence {
            id: id.to_string(),
            residues: self.residues.clone(),
        })
    }

    /// Residues in reverse order, same id.
    pub fn reversed(&self) -> Sequence {
        Sequence {
            id: self.id.clone(),
            residues: self.residues.chars().rev().collect(),
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.residues)
    }
}

fn check_id(id: &str) -> Result<(), SeqError> {
    if id.is_empty() || id.chars().any(char::is_whitespace) {
        return Err(SeqError::InvalidId(id.to_string()));
    }
    Ok(())
}

/// Build a [`Sequence`] from free text: whitespace is stripped and lowercase
/// letters are folded to uppercase.
pub fn validate_sequence(id: &str, raw: &str) -> Result<Sequence, SeqError> {
    check_id(id)?;
    let mut residues = String::with_capacity(raw.len());
    for (column, ch) in raw.chars().enumerate() {
        if ch.is_whitespace() {
            continue;
        }
        let up = ch.to_ascii_uppercase();
        if !up.is_ascii() || residue_index(up as u8).is_none() {
            return Err(SeqError::InvalidResidue {
                character: ch,
                line: 1,
                column: column + 1,
            });
        }
        residues.push(up);
    }
    if residues.is_empty() {
        return Err(SeqError::EmptySequence { id: id.to_string() });
    }
    Ok(Sequence {
        id: id.to_string(),
        residues,
    })
}

/// One FASTA entry. The record id (and [`Sequence::id`]) is the header token
/// up to the first whitespace; the rest of the header is the description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub header: String,
    pub sequence: Sequence,
}

impl FastaRecord {
    pub fn id(&self) -> &str {
        self.sequence.id()
    }

    pub fn description(&self) -> &str {
        self.header
            .split_once(char::is_whitespace)
            .map(|(_, rest)| rest.trim())
            .unwrap_or("")
    }
}

/// Parse FASTA text into records, preserving order. Accepts LF and CRLF.
pub fn parse_fasta(text: &str) -> Result<Vec<FastaRecord>, SeqError> {
    if text.trim().is_empty() {
        return Err(SeqError::EmptyInput);
    }

    struct Pending {
        header: String,
        line: usize,
        residues: String,
    }

    fn finish(p: Pending) -> Result<FastaRecord, SeqError> {
        let id = p.header.split_whitespace().next().unwrap_or_default();
        if p.residues.is_empty() {
            return Err(SeqError::EmptySequence { id: id.to_string() });
        }
        debug_assert!(!id.is_empty(), "header checked at line {}", p.line);
        Ok(FastaRecord {
            sequence: Sequence {
                id: id.to_string(),
                residues: p.residues,
            },
            header: p.header,
        })
    }

    let mut records = Vec::new();
    let mut current: Option<Pending> = None;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if let Some(header) = line.strip_prefix('>') {
            if let Some(p) = current.take() {
                records.push(finish(p)?);
            }
            let header = header.trim();
            if header.is_empty() {
                return Err(SeqError::EmptyHeader { line: lineno });
            }
            current = Some(Pending {
                header: header.to_string(),
                line: lineno,
                residues: String::new(),
            });
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let Some(p) = current.as_mut() else {
            return Err(SeqError::MissingHeader { line: lineno });
        };
        for (col, ch) in line.chars().enumerate() {
            if ch.is_whitespace() {
                continue;
            }
            let up = ch.to_ascii_uppercase();
            if !up.is_ascii() || residue_index(up as u8).is_none() {
                return Err(SeqError::InvalidResidue {
                    character: ch,
                    line: lineno,
                    column: col + 1,
                });
            }
            p.residues.push(up);
        }
    }
    if let Some(p) = current.take() {
        records.push(finish(p)?);
    }
    Ok(records)
}

/// Render records as FASTA with sequence lines wrapped at `width` residues.
pub fn write_fasta(records: &[FastaRecord], width: usize) -> String {
    let width = width.max(1);
    let mut out = String::new();
    for rec in records {
        out.push('>');
        out.push_str(&rec.header);
        out.push('\n');
        for chunk in rec.sequence.as_bytes().chunks(width) {
            out.push_str(std::str::from_utf8(chunk).expect("ascii residues"));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concatenates_sequence_lines() {
        let recs = parse_fasta(">q\nMLK\nEFK").unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].id(), "q");
        assert_eq!(recs[0].sequence.residues(), "MLKEFK");
        assert_eq!(recs[0].sequence.len(), 6);
    }

    #[test]
    fn preserves_record_order() {
        let recs = parse_fasta(">a\nML\n>b\nKE").unwrap();
        let ids: Vec<_> = recs.iter().map(|r| r.id()).collect();
        assert_eq!(ids, ["a", "b"]);
    }

    #[test]
    fn rejects_digit_residue() {
        let err = parse_fasta(">q\nML1K").unwrap_err();
        assert_eq!(
            err,
            SeqError::InvalidResidue {
                character: '1',
                line: 2,
                column: 3
            }
        );
    }

    #[test]
    fn empty_input_and_empty_body() {
        assert_eq!(parse_fasta("").unwrap_err(), SeqError::EmptyInput);
        assert_eq!(parse_fasta("  \n").unwrap_err(), SeqError::EmptyInput);
        assert!(matches!(
            parse_fasta(">a\n>b\nMK").unwrap_err(),
            SeqError::EmptySequence { id } if id == "a"
        ));
        assert!(matches!(
            parse_fasta(">\nMK").unwrap_err(),
            SeqError::EmptyHeader { line: 1 }
        ));
    }

    #[test]
    fn crlf_and_description() {
        let recs = parse_fasta(">sp|Q4L656 MscL channel\r\nmlk\r\nefk\r\n").unwrap();
        assert_eq!(recs[0].id(), "sp|Q4L656");
        assert_eq!(recs[0].description(), "MscL channel");
        assert_eq!(recs[0].sequence.residues(), "MLKEFK");
    }

    #[test]
    fn validate_folds_case_and_strips_whitespace() {
        assert_eq!(validate_sequence("query", "mlk").unwrap().residues(), "MLK");
        assert_eq!(validate_sequence("query", " M L K ").unwrap().residues(), "MLK");
        assert!(matches!(
            validate_sequence("query", "MXB").unwrap_err(),
            SeqError::InvalidResidue { character: 'B', .. }
        ));
        assert!(matches!(
            validate_sequence("query", "  ").unwrap_err(),
            SeqError::EmptySequence { .. }
        ));
        assert!(validate_sequence("has space", "MLK").is_err());
    }

    #[test]
    fn serde_goes_through_validation() {
        let s: Sequence = serde_json::from_str(r#"{"id":"q","residues":"mlk"}"#).unwrap();
        assert_eq!(s.residues(), "MLK");
        assert!(serde_json::from_str::<Sequence>(r#"{"id":"q","residues":"MZK"}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn record() -> impl Strategy<Value = (String, String)> {
            ("[A-Za-z0-9_]{1,12}", "[ACDEFGHIKLMNPQRSTVWYX]{1,200}")
        }

        proptest! {
            #[test]
            fn fasta_round_trip(recs in prop::collection::vec(record(), 1..8), width in 1usize..80) {
                let text: String = recs
                    .iter()
                    .map(|(id, s)| format!(">{id} some description\n{s}\n"))
                    .collect();
                let parsed = parse_fasta(&text).unwrap();
                let again = parse_fasta(&write_fasta(&parsed, width)).unwrap();
                prop_assert_eq!(parsed, again);
            }

            #[test]
            fn length_counts_alphabet_chars(raw in "[ACDEFGHIKLMNPQRSTVWYXacdefghiklmnpqrstvwyx \t\n]{0,300}") {
                let expected = raw.chars().filter(|c| !c.is_whitespace()).count();
                match validate_sequence("q", &raw) {
                    Ok(s) => prop_assert_eq!(s.len(), expected),
                    Err(SeqError::EmptySequence { .. }) => prop_assert_eq!(expected, 0),
                    Err(e) => prop_assert!(false, "unexpected error {e}"),
                }
            }
        }
    }
}
