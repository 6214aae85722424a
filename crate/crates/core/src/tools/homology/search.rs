use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use super::align::{align_indices, Alignment, Scoring};
use super::index::{encode_kmer, ReferenceIndex};
use super::store::AnnotationRecord;
use super::HomologyError;
use crate::seq::Sequence;
use crate::wire::{round_decimals, round_significant};

/// Gapped BLOSUM62 (11/1) Karlin-Altschul parameters.
pub const KA_LAMBDA: f64 = 0.267;
pub const KA_K: f64 = 0.041;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Minimum fraction identity (0..=1) a hit must reach.
    pub min_seq_id: f64,
    /// Shared k-mers required on nearby diagonals for an entry to be aligned.
    pub kmer_hits: usize,
    /// Maximum diagonal spread between k-mer hits counted together.
    pub diagonal_band: i64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            min_seq_id: 0.3,
            kmer_hits: 2,
            diagonal_band: 16,
        }
    }
}

fn ser_1dp<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_decimals(*x, 1))
}

fn ser_4sig<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_significant(*x, 4))
}

/// Best database hit. Held at full precision; the wire form rounds `pident`
/// and `bits` to one decimal and `evalue` to four significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestHit {
    pub query: String,
    pub target: String,
    #[serde(serialize_with = "ser_1dp")]
    pub pident: f64,
    pub alnlen: usize,
    #[serde(serialize_with = "ser_4sig")]
    pub evalue: f64,
    #[serde(serialize_with = "ser_1dp")]
    pub bits: f64,
}

/// Bit score from a raw alignment score.
pub fn bit_score(raw: i32) -> f64 {
    (KA_LAMBDA * raw as f64 - KA_K.ln()) / std::f64::consts::LN_2
}

/// `m * n * 2^-bits` for query length `m` and database size `n`.
pub fn evalue(bits: f64, query_len: usize, db_residues: usize) -> f64 {
    query_len as f64 * db_residues as f64 * (-bits).exp2()
}

/// Entries sharing at least `kmer_hits` query k-mers whose diagonals lie within
/// `diagonal_band` of each other. Returned in entry-ordinal order.
pub fn prefilter(index: &ReferenceIndex, query: &[usize], params: &SearchParams) -> Vec<usize> {
    let k = index.k();
    if query.len() < k {
        return Vec::new();
    }
    let mut diagonals: BTreeMap<u32, Vec<i64>> = BTreeMap::new();
    for (qoff, window) in query.windows(k).enumerate() {
        let Some(code) = encode_kmer(window) else {
            continue;
        };
        for p in index.postings_by_code(code) {
            diagonals
                .entry(p.entry)
                .or_default()
                .push(p.offset as i64 - qoff as i64);
        }
    }
    let need = params.kmer_hits.max(1);
    diagonals
        .into_iter()
        .filter_map(|(entry, mut diags)| {
            if diags.len() < need {
                return None;
            }
            diags.sort_unstable();
            let mut lo = 0;
            for hi in 0..diags.len() {
                while diags[hi] - diags[lo] > params.diagonal_band {
                    lo += 1;
                }
                if hi - lo + 1 >= need {
                    return Some(entry as usize);
                }
            }
            None
        })
        .collect()
}

struct Scored {
    ordinal: usize,
    aln: Alignment,
    bits: f64,
    evalue: f64,
}

fn rank(a: &Scored, b: &Scored, index: &ReferenceIndex) -> Ordering {
    a.evalue
        .total_cmp(&b.evalue)
        .then_with(|| b.bits.total_cmp(&a.bits))
        .then_with(|| {
            index.entries()[a.ordinal]
                .accession
                .cmp(&index.entries()[b.ordinal].accession)
        })
}

/// Best hit for `query`: prefilter, align every candidate, drop hits under
/// `min_seq_id`, then rank by lowest E-value, highest bits, smallest accession.
///
/// Candidate alignment runs on the current rayon pool; the result does not
/// depend on the pool size.
pub fn search_best_hit(
    index: &ReferenceIndex,
    query: &Sequence,
    params: &SearchParams,
) -> Result<Option<BestHit>, HomologyError> {
    if index.is_empty() {
        return Err(HomologyError::EmptyIndex);
    }
    let scoring = Scoring::default();
    let q = query.indices();
    let candidates = prefilter(index, &q, params);
    let db = index.total_residues();

    let scored: Vec<Scored> = candidates
        .par_iter()
        .filter_map(|&ordinal| {
            let aln = align_indices(&q, index.encoded(ordinal), &scoring)?;
            let bits = bit_score(aln.score);
            Some(Scored {
                ordinal,
                aln,
                bits,
                evalue: evalue(bits, q.len(), db),
            })
        })
        .collect();

    let best = scored
        .into_iter()
        .filter(|s| s.aln.percent_identity() >= params.min_seq_id * 100.0)
        .min_by(|a, b| rank(a, b, index));

    Ok(best.map(|s| BestHit {
        query: query.id().to_string(),
        target: index.entries()[s.ordinal].accession.clone(),
        pident: s.aln.percent_identity(),
        alnlen: s.aln.aligned_length,
        evalue: s.evalue,
        bits: s.bits,
    }))
}

/// Read access to annotations by accession.
pub trait AnnotationLookup {
    fn annotation(&self, accession: &str) -> Option<&AnnotationRecord>;
}

impl AnnotationLookup for ReferenceIndex {
    fn annotation(&self, accession: &str) -> Option<&AnnotationRecord> {
        self.entry(accession).map(|e| &e.annotation)
    }
}

impl AnnotationLookup for HashMap<String, AnnotationRecord> {
    fn annotation(&self, accession: &str) -> Option<&AnnotationRecord> {
        self.get(accession)
    }
}

/// Wire object of the `mmseqs2_besthit_uniprot` tool. Both members are
/// `null` when nothing passed the filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub best_hit: Option<BestHit>,
    pub uniprot_annotation: Option<AnnotationRecord>,
}

impl EvidenceRecord {
    pub fn no_hit() -> Self {
        EvidenceRecord {
            best_hit: None,
            uniprot_annotation: None,
        }
    }
}

pub fn make_evidence(hit: BestHit, store: &impl AnnotationLookup) -> Result<EvidenceRecord, HomologyError> {
    let annotation = store
        .annotation(&hit.target)
        .cloned()
        .ok_or_else(|| HomologyError::MissingAnnotation(hit.target.clone()))?;
    Ok(EvidenceRecord {
        best_hit: Some(hit),
        uniprot_annotation: Some(annotation),
    })
}
