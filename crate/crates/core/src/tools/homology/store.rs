//! Annotated reference store: a FASTA file plus a JSON-lines annotation file
//! sharing accessions.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HomologyError;
use crate::seq::{parse_fasta, Sequence};

/// Curated annotation for one reference entry. Every list is always present
/// on the wire, possibly empty. GO and subcellular-location lines are stored
/// pre-rendered and emitted verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub accessions: Vec<String>,
    #[serde(default)]
    pub protein_name: String,
    #[serde(default)]
    pub function: Vec<String>,
    #[serde(default)]
    pub catalytic_activity: Vec<String>,
    #[serde(default)]
    pub ec: Vec<String>,
    #[serde(default)]
    pub cofactor: Vec<String>,
    #[serde(default)]
    pub subcellular_location: Vec<String>,
    #[serde(default)]
    pub go: Vec<String>,
}

impl AnnotationRecord {
    /// A record carrying only an accession and a name.
    pub fn named(accession: &str, protein_name: &str) -> Self {
        AnnotationRecord {
            accessions: vec![accession.to_string()],
            protein_name: protein_name.to_string(),
            function: Vec::new(),
            catalytic_activity: Vec::new(),
            ec: Vec::new(),
            cofactor: Vec::new(),
            subcellular_location: Vec::new(),
            go: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceEntry {
    pub accession: String,
    pub sequence: Sequence,
    pub annotation: AnnotationRecord,
}

/// One line of the annotation file: the primary accession plus the record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnotationLine {
    pub accession: String,
    #[serde(default)]
    pub accessions: Vec<String>,
    #[serde(default)]
    pub protein_name: String,
    #[serde(default)]
    pub function: Vec<String>,
    #[serde(default)]
    pub catalytic_activity: Vec<String>,
    #[serde(default)]
    pub ec: Vec<String>,
    #[serde(default)]
    pub cofactor: Vec<String>,
    #[serde(default)]
    pub subcellular_location: Vec<String>,
    #[serde(default)]
    pub go: Vec<String>,
}

impl AnnotationLine {
    pub fn from_record(accession: &str, r: &AnnotationRecord) -> Self {
        AnnotationLine {
            accession: accession.to_string(),
            accessions: r.accessions.clone(),
            protein_name: r.protein_name.clone(),
            function: r.function.clone(),
            catalytic_activity: r.catalytic_activity.clone(),
            ec: r.ec.clone(),
            cofactor: r.cofactor.clone(),
            subcellular_location: r.subcellular_location.clone(),
            go: r.go.clone(),
        }
    }

    fn into_record(self) -> (String, AnnotationRecord) {
        let accessions = if self.accessions.is_empty() {
            vec![self.accession.clone()]
        } else {
            self.accessions
        };
        (
            self.accession,
            AnnotationRecord {
                accessions,
                protein_name: self.protein_name,
                function: self.function,
                catalytic_activity: self.catalytic_activity,
                ec: self.ec,
                cofactor: self.cofactor,
                subcellular_location: self.subcellular_location,
                go: self.go,
            },
        )
    }
}

/// Accession carried by a FASTA id: `sp|Q4L656|MSCL_STAA8` yields `Q4L656`,
/// a bare id is returned unchanged.
pub fn accession_from_id(id: &str) -> &str {
    let mut parts = id.split('|');
    match (parts.next(), parts.next()) {
        (Some(db), Some(acc)) if !acc.is_empty() && matches!(db, "sp" | "tr") => acc,
        _ => id,
    }
}

pub fn parse_annotations(text: &str) -> Result<HashMap<String, AnnotationRecord>, HomologyError> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: AnnotationLine = serde_json::from_str(line).map_err(|e| HomologyError::AnnotationSyntax {
            line: i + 1,
            message: e.to_string(),
        })?;
        let (acc, rec) = parsed.into_record();
        if out.insert(acc.clone(), rec).is_some() {
            return Err(HomologyError::DuplicateAccession(acc));
        }
    }
    Ok(out)
}

/// Join FASTA records with their annotations. Every sequence must have an
/// annotation; annotations without a sequence are ignored with a warning.
pub fn join_store(fasta_text: &str, annotations_text: &str) -> Result<Vec<ReferenceEntry>, HomologyError> {
    let records = if fasta_text.trim().is_empty() {
        Vec::new()
    } else {
        parse_fasta(fasta_text)?
    };
    let mut annotations = parse_annotations(annotations_text)?;
    let mut entries = Vec::with_capacity(records.len());
    for rec in records {
        let acc = accession_from_id(rec.id()).to_string();
        let annotation = annotations
            .remove(&acc)
            .ok_or_else(|| HomologyError::MissingAnnotation(acc.clone()))?;
        let sequence = rec.sequence.with_id(&acc)?;
        entries.push(ReferenceEntry {
            accession: acc,
            sequence,
            annotation,
        });
    }
    if !annotations.is_empty() {
        let mut extra: Vec<_> = annotations.into_keys().collect();
        extra.sort();
        log::warn!("{} annotation(s) without a sequence: {}", extra.len(), extra.join(", "));
    }
    Ok(entries)
}

pub fn load_store(fasta: &Path, annotations: &Path) -> Result<Vec<ReferenceEntry>, HomologyError> {
    let read = |p: &Path| {
        fs::read_to_string(p).map_err(|e| HomologyError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        })
    };
    join_store(&read(fasta)?, &read(annotations)?)
}

/// Render entries back to (FASTA, annotation JSON-lines) text.
pub fn render_store(entries: &[ReferenceEntry]) -> (String, String) {
    let records: Vec<_> = entries
        .iter()
        .map(|e| crate::seq::FastaRecord {
            header: format!("{} {}", e.accession, e.annotation.protein_name)
                .trim()
                .to_string(),
            sequence: e.sequence.clone(),
        })
        .collect();
    let fasta = crate::seq::write_fasta(&records, 60);
    let mut ann = String::new();
    for e in entries {
        let line = AnnotationLine::from_record(&e.accession, &e.annotation);
        ann.push_str(&serde_json::to_string(&line).expect("annotation serializes"));
        ann.push('\n');
    }
    (fasta, ann)
}
