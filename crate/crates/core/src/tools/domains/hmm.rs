//! Reader and writer for the subset of the HMMER3 ASCII profile format used
//! by the domain scanner: NAME, ACC, DESC, LENG header keys, an optional
//! COMPO line, the node-0 insert and transition lines, then one
//! match / insert / transition triple per node, terminated by `//`.
//!
//! All stored values are negative natural-log probabilities; `*` is an
//! impossible event (probability 0).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::DomainError;

pub const ALPHABET_SIZE: usize = 20;

/// Transition columns, in file order.
pub const MM: usize = 0;
pub const MI: usize = 1;
pub const MD: usize = 2;
pub const IM: usize = 3;
pub const II: usize = 4;
pub const DM: usize = 5;
pub const DD: usize = 6;

/// Allowed deviation of an emission row's total probability from 1. Values in
/// the text format carry five decimals, which bounds the row error near 5e-6.
pub const EMISSION_SUM_TOLERANCE: f64 = 1e-4;

pub type Emissions = [f64; ALPHABET_SIZE];
pub type Transitions = [f64; 7];

/// A profile HMM. `match_emissions[k - 1]`, `insert_emissions[k - 1]` and
/// `transitions[k]` belong to node `k`; `transitions[0]` is the begin node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileHmm {
    pub name: String,
    pub accession: String,
    pub description: String,
    pub model_length: usize,
    pub match_emissions: Vec<Emissions>,
    pub insert_emissions: Vec<Emissions>,
    pub transitions: Vec<Transitions>,
    /// Null-model residue frequencies (node-0 insert emissions).
    pub background: Emissions,
    /// Optional model composition line, kept for round-tripping.
    pub compo: Option<Emissions>,
}

fn row_sum(row: &Emissions) -> f64 {
    row.iter().map(|&nll| (-nll).exp()).sum()
}

impl ProfileHmm {
    /// Check shape and value invariants.
    pub fn validate(&self) -> Result<(), DomainError> {
        let malformed = |reason: String| DomainError::MalformedProfile {
            record: self.name.clone(),
            reason,
        };
        if self.model_length == 0 {
            return Err(malformed("LENG must be at least 1".into()));
        }
        if self.match_emissions.len() != self.model_length
            || self.insert_emissions.len() != self.model_length
            || self.transitions.len() != self.model_length + 1
        {
            return Err(DomainError::TruncatedProfile {
                record: self.name.clone(),
                expected: self.model_length,
                found: self.match_emissions.len(),
            });
        }
        let all_rows = self.match_emissions.iter().chain(self.insert_emissions.iter());
        for (i, row) in all_rows.enumerate() {
            if row.iter().any(|&v| v.is_nan() || v < 0.0) {
                return Err(malformed(format!("negative or NaN value in emission row {}", i + 1)));
            }
            let s = row_sum(row);
            if (s - 1.0).abs() > EMISSION_SUM_TOLERANCE {
                return Err(malformed(format!("emission row {} sums to {s}", i + 1)));
            }
        }
        if self.transitions.iter().flatten().any(|&v| v.is_nan() || v < 0.0) {
            return Err(malformed("negative or NaN transition value".into()));
        }
        let bg: f64 = self.background.iter().sum();
        if self.background.iter().any(|&p| p <= 0.0) || (bg - 1.0).abs() > EMISSION_SUM_TOLERANCE {
            return Err(malformed(format!("background frequencies sum to {bg}")));
        }
        Ok(())
    }
}

fn parse_value(tok: &str, line: usize) -> Result<f64, DomainError> {
    if tok == "*" {
        return Ok(f64::INFINITY);
    }
    tok.parse::<f64>().map_err(|_| DomainError::Parse {
        line,
        message: format!("non-numeric field '{tok}'"),
    })
}

fn parse_row<const N: usize>(toks: &[&str], line: usize) -> Result<[f64; N], DomainError> {
    if toks.len() < N {
        return Err(DomainError::Parse {
            line,
            message: format!("expected {N} values, found {}", toks.len()),
        });
    }
    let mut out = [0.0; N];
    for (slot, tok) in out.iter_mut().zip(toks) {
        *slot = parse_value(tok, line)?;
    }
    Ok(out)
}

#[derive(Default)]
struct Builder {
    start_line: usize,
    name: Option<String>,
    accession: String,
    description: String,
    leng: Option<usize>,
    in_body: bool,
    header_rows_seen: usize,
    compo: Option<Emissions>,
    insert0: Option<Emissions>,
    transitions: Vec<Transitions>,
    matches: Vec<Emissions>,
    inserts: Vec<Emissions>,
    // 0: expect match line, 1: insert line, 2: transition line
    node_phase: u8,
}

impl Builder {
    fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("<unnamed record at line {}>", self.start_line))
    }

    fn finish(self) -> Result<ProfileHmm, DomainError> {
        let record = self.label();
        let leng = self.leng.ok_or_else(|| DomainError::MalformedProfile {
            record: record.clone(),
            reason: "missing LENG".into(),
        })?;
        let name = self.name.ok_or_else(|| DomainError::MalformedProfile {
            record: record.clone(),
            reason: "missing NAME".into(),
        })?;
        let insert0 = self.insert0.ok_or_else(|| DomainError::TruncatedProfile {
            record: record.clone(),
            expected: leng,
            found: 0,
        })?;
        if self.matches.len() != leng || self.inserts.len() != leng || self.transitions.len() != leng + 1 {
            return Err(DomainError::TruncatedProfile {
                record,
                expected: leng,
                found: self.matches.len(),
            });
        }
        let mut background = [0.0; ALPHABET_SIZE];
        for (b, &nll) in background.iter_mut().zip(insert0.iter()) {
            *b = (-nll).exp();
        }
        let hmm = ProfileHmm {
            name,
            accession: self.accession,
            description: self.description,
            model_length: leng,
            match_emissions: self.matches,
            insert_emissions: self.inserts,
            transitions: self.transitions,
            background,
            compo: self.compo,
        };
        hmm.validate()?;
        Ok(hmm)
    }
}

/// Parse zero or more profile records.
pub fn parse_hmm_library(text: &str) -> Result<Vec<ProfileHmm>, DomainError> {
    let mut out = Vec::new();
    let mut cur: Option<Builder> = None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }

        if toks[0].starts_with("HMMER3") {
            if let Some(b) = cur.take() {
                return Err(DomainError::Unterminated { record: b.label() });
            }
            cur = Some(Builder {
                start_line: lineno,
                ..Default::default()
            });
            continue;
        }

        let Some(b) = cur.as_mut() else {
            return Err(DomainError::Parse {
                line: lineno,
                message: "content outside of an HMMER3 record".into(),
            });
        };

        if toks[0] == "//" {
            out.push(cur.take().unwrap().finish()?);
            continue;
        }

        if !b.in_body {
            match toks[0] {
                "NAME" => b.name = toks.get(1).map(|s| s.to_string()),
                "ACC" => b.accession = toks.get(1).map(|s| s.to_string()).unwrap_or_default(),
                "DESC" => b.description = line.trim_start().strip_prefix("DESC").unwrap_or("").trim().to_string(),
                "LENG" => {
                    let v = toks.get(1).ok_or_else(|| DomainError::Parse {
                        line: lineno,
                        message: "LENG without a value".into(),
                    })?;
                    b.leng = Some(v.parse().map_err(|_| DomainError::Parse {
                        line: lineno,
                        message: format!("non-numeric LENG '{v}'"),
                    })?);
                }
                "HMM" => {
                    if b.leng.is_none() {
                        return Err(DomainError::MalformedProfile {
                            record: b.label(),
                            reason: "missing LENG".into(),
                        });
                    }
                    b.in_body = true;
                }
                // other header keys (ALPH, STATS, CKSUM, ...) are not needed
                _ => {}
            }
            continue;
        }

        // Body. First line after "HMM" is the transition column header.
        if b.header_rows_seen == 0 {
            b.header_rows_seen = 1;
            if toks[0].contains("->") {
                continue;
            }
        }
        if toks[0] == "COMPO" {
            b.compo = Some(parse_row::<ALPHABET_SIZE>(&toks[1..], lineno)?);
            continue;
        }
        if b.insert0.is_none() {
            b.insert0 = Some(parse_row::<ALPHABET_SIZE>(&toks, lineno)?);
            continue;
        }
        if b.transitions.is_empty() {
            b.transitions.push(parse_row::<7>(&toks, lineno)?);
            continue;
        }
        match b.node_phase {
            0 => {
                let node: usize = toks[0].parse().map_err(|_| DomainError::Parse {
                    line: lineno,
                    message: format!("expected node index, found '{}'", toks[0]),
                })?;
                if node != b.matches.len() + 1 {
                    return Err(DomainError::Parse {
                        line: lineno,
                        message: format!("node {node} out of sequence"),
                    });
                }
                b.matches.push(parse_row::<ALPHABET_SIZE>(&toks[1..], lineno)?);
                b.node_phase = 1;
            }
            1 => {
                b.inserts.push(parse_row::<ALPHABET_SIZE>(&toks, lineno)?);
                b.node_phase = 2;
            }
            _ => {
                b.transitions.push(parse_row::<7>(&toks, lineno)?);
                b.node_phase = 0;
            }
        }
    }

    if let Some(b) = cur {
        return Err(DomainError::Unterminated { record: b.label() });
    }
    Ok(out)
}

fn push_values(out: &mut String, values: &[f64]) {
    for &v in values {
        if v.is_infinite() {
            out.push_str("        *");
        } else {
            let _ = write!(out, " {v:>8.5}");
        }
    }
}

/// Render profiles in the same text subset `parse_hmm_library` reads.
pub fn write_hmm_library(models: &[ProfileHmm]) -> String {
    let mut out = String::new();
    for m in models {
        out.push_str("HMMER3/f [protagent subset]\n");
        let _ = writeln!(out, "NAME  {}", m.name);
        if !m.accession.is_empty() {
            let _ = writeln!(out, "ACC   {}", m.accession);
        }
        if !m.description.is_empty() {
            let _ = writeln!(out, "DESC  {}", m.description);
        }
        let _ = writeln!(out, "LENG  {}", m.model_length);
        out.push_str("ALPH  amino\n");
        out.push_str("HMM     ");
        for c in crate::seq::AMINO_ALPHABET {
            let _ = write!(out, " {:>8}", *c as char);
        }
        out.push('\n');
        out.push_str("         ");
        for h in ["m->m", "m->i", "m->d", "i->m", "i->i", "d->m", "d->d"] {
            let _ = write!(out, " {h:>8}");
        }
        out.push('\n');
        if let Some(c) = &m.compo {
            out.push_str("  COMPO");
            push_values(&mut out, c);
            out.push('\n');
        }
        let insert0: Vec<f64> = m.background.iter().map(|p| -p.ln()).collect();
        out.push_str("       ");
        push_values(&mut out, &insert0);
        out.push('\n');
        out.push_str("       ");
        push_values(&mut out, &m.transitions[0]);
        out.push('\n');
        for k in 0..m.model_length {
            let _ = write!(out, "{:>7}", k + 1);
            push_values(&mut out, &m.match_emissions[k]);
            out.push('\n');
            out.push_str("       ");
            push_values(&mut out, &m.insert_emissions[k]);
            out.push('\n');
            out.push_str("       ");
            push_values(&mut out, &m.transitions[k + 1]);
            out.push('\n');
        }
        out.push_str("//\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn uniform_row() -> String {
        let v = -(1.0f64 / 20.0).ln();
        std::iter::repeat_n(format!("{v:.5}"), 20).collect::<Vec<_>>().join(" ")
    }

    fn minimal(leng_line: &str, nodes: usize, terminate: bool) -> String {
        let u = uniform_row();
        let mut s = format!("HMMER3/f [test]\nNAME  tiny\nACC   PF00001.1\nDESC  A tiny family\n{leng_line}ALPH  amino\nHMM  A C D\n  m->m m->i m->d i->m i->i d->m d->d\n  {u}\n  0.1 2.3 * 0.5 0.9 0 *\n");
        for k in 1..=nodes {
            s.push_str(&format!(
                "  {k} {u} {k} a - - -\n  {u}\n  0.1 2.3 3.0 0.5 0.9 0.2 1.7\n"
            ));
        }
        if terminate {
            s.push_str("//\n");
        }
        s
    }

    #[test]
    fn parses_minimal_record() {
        let lib = parse_hmm_library(&minimal("LENG  1\n", 1, true)).unwrap();
        assert_eq!(lib.len(), 1);
        let m = &lib[0];
        assert_eq!(m.name, "tiny");
        assert_eq!(m.accession, "PF00001.1");
        assert_eq!(m.description, "A tiny family");
        assert_eq!(m.model_length, 1);
        assert_eq!(m.transitions.len(), 2);
        assert!(m.transitions[0][MD].is_infinite());
        assert!((m.background.iter().sum::<f64>() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn empty_text_is_empty_library() {
        assert!(parse_hmm_library("").unwrap().is_empty());
        assert!(parse_hmm_library("\n\n").unwrap().is_empty());
    }

    #[test]
    fn missing_terminator_names_record() {
        let err = parse_hmm_library(&minimal("LENG  1\n", 1, false)).unwrap_err();
        assert_eq!(err, DomainError::Unterminated { record: "tiny".into() });
    }

    #[test]
    fn missing_leng_is_malformed() {
        let err = parse_hmm_library(&minimal("", 1, true)).unwrap_err();
        assert!(matches!(err, DomainError::MalformedProfile { ref reason, .. } if reason == "missing LENG"));
    }

    #[test]
    fn row_count_mismatch_is_truncated() {
        let err = parse_hmm_library(&minimal("LENG  3\n", 2, true)).unwrap_err();
        assert_eq!(
            err,
            DomainError::TruncatedProfile {
                record: "tiny".into(),
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn non_numeric_field_reports_line() {
        let text = minimal("LENG  1\n", 1, true).replacen("0.1 2.3 *", "0.1 abc *", 1);
        let err = parse_hmm_library(&text).unwrap_err();
        assert!(matches!(err, DomainError::Parse { line: 10, .. }), "{err:?}");
    }

    #[test]
    fn unnormalized_row_rejected() {
        let text = minimal("LENG  1\n", 1, true).replacen("  1 2.99573", "  1 0.00000", 1);
        assert!(matches!(
            parse_hmm_library(&text).unwrap_err(),
            DomainError::MalformedProfile { .. }
        ));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let lib = parse_hmm_library(&minimal("LENG  2\n", 2, true)).unwrap();
        let again = parse_hmm_library(&write_hmm_library(&lib)).unwrap();
        assert_eq!(lib, again);
    }
}
