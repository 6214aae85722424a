use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use super::hmm::ProfileHmm;
use super::viterbi::{viterbi_with_tables, ScoreTables};
use super::DomainError;
use crate::seq::Sequence;
use crate::wire::{round_decimals, round_significant};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    /// Hits with E-value above this are not reported.
    pub report_evalue: f64,
    /// Hits at or below this E-value are eligible for `selected_domains`.
    pub select_evalue: f64,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams {
            report_evalue: 1.0,
            select_evalue: 0.01,
        }
    }
}

fn ser_evalue<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_significant(*x, 2))
}

fn ser_score<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_decimals(*x, 1))
}

fn ser_coverage<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_decimals(*x, 4))
}

/// One reported domain hit. Values are held at full precision; on the wire
/// `evalue` keeps two significant digits, `score` one decimal and
/// `coverage_query` four decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainHit {
    pub pfam_id: String,
    pub pfam_acc: String,
    pub query: String,
    #[serde(serialize_with = "ser_evalue")]
    pub evalue: f64,
    #[serde(serialize_with = "ser_score")]
    pub score: f64,
    pub hmm_from: usize,
    pub hmm_to: usize,
    pub ali_from: usize,
    pub ali_to: usize,
    #[serde(serialize_with = "ser_coverage")]
    pub coverage_query: f64,
    pub desc: String,
}

impl DomainHit {
    pub fn overlaps(&self, other: &DomainHit) -> bool {
        self.ali_from <= other.ali_to && other.ali_from <= self.ali_to
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainScanResult {
    pub hits: Vec<DomainHit>,
    pub selected_domains: Vec<DomainHit>,
}

/// Report order: ascending E-value, then higher score, then accession.
pub fn hit_order(a: &DomainHit, b: &DomainHit) -> Ordering {
    a.evalue
        .total_cmp(&b.evalue)
        .then_with(|| b.score.total_cmp(&a.score))
        .then_with(|| a.pfam_acc.cmp(&b.pfam_acc))
}

/// E-value of a Viterbi score: `n_models * max(1, L / 100) * 2^-bits`.
pub fn domain_evalue(bits: f64, n_models: usize, seq_len: usize) -> f64 {
    let length_factor = (seq_len as f64 / 100.0).max(1.0);
    n_models as f64 * length_factor * (-bits).exp2()
}

/// Greedy selection in E-value order: keep each hit at or below
/// `select_evalue` that does not overlap an already kept hit.
pub fn select_domains(hits: &[DomainHit], select_evalue: f64) -> Vec<DomainHit> {
    let mut ordered: Vec<&DomainHit> = hits.iter().collect();
    ordered.sort_by(|a, b| hit_order(a, b));
    let mut chosen: Vec<DomainHit> = Vec::new();
    for h in ordered {
        if h.evalue > select_evalue {
            break;
        }
        if chosen.iter().all(|c| !c.overlaps(h)) {
            chosen.push(h.clone());
        }
    }
    chosen
}

/// Score `seq` against every profile and assemble the report.
pub fn scan(library: &[ProfileHmm], seq: &Sequence, params: &ScanParams) -> Result<DomainScanResult, DomainError> {
    if library.is_empty() {
        return Err(DomainError::EmptyLibrary);
    }
    let x = seq.indices();
    let n = library.len();
    let mut hits: Vec<DomainHit> = library
        .par_iter()
        .filter_map(|hmm| {
            let v = viterbi_with_tables(&ScoreTables::new(hmm), &x)?;
            let evalue = domain_evalue(v.bits, n, x.len());
            (evalue <= params.report_evalue).then(|| DomainHit {
                pfam_id: hmm.name.clone(),
                pfam_acc: hmm.accession.clone(),
                query: seq.id().to_string(),
                evalue,
                score: v.bits,
                hmm_from: v.hmm_from,
                hmm_to: v.hmm_to,
                ali_from: v.ali_from,
                ali_to: v.ali_to,
                coverage_query: (v.ali_to - v.ali_from + 1) as f64 / x.len() as f64,
                desc: hmm.description.clone(),
            })
        })
        .collect();
    hits.sort_by(hit_order);
    let selected_domains = select_domains(&hits, params.select_evalue);
    Ok(DomainScanResult { hits, selected_domains })
}
