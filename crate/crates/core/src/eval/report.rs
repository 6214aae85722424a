//! Per-case scoring, per-task aggregation and the report table.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bench::QaCase;
use super::rouge::{rouge1_recall_tokens, rouge_l_recall_tokens, tokenize};
use crate::agent::{Paradigm, SessionResult, StopReason};

/// Task tags with a fixed column and its short header, in table order.
pub const TASK_COLUMNS: [(&str, &str); 4] = [
    ("general_function", "Func."),
    ("catalytic_activity", "Cat."),
    ("domain_motif", "Dom."),
    ("description", "Desc."),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCase {
    pub case_id: String,
    pub task: String,
    /// Extracted answer; empty when none was found.
    pub prediction: String,
    pub rouge1_recall: f64,
    #[serde(rename = "rougeL_recall")]
    pub rouge_l_recall: f64,
    pub stop_reason: StopReason,
    pub tool_calls_made: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub task: String,
    pub cases: usize,
    pub rouge1_recall: f64,
    #[serde(rename = "rougeL_recall")]
    pub rouge_l_recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub paradigm: Option<Paradigm>,
    pub case_count: usize,
    /// Cases without an extracted answer (scored 0).
    pub failure_count: usize,
    pub backend_errors: usize,
    /// In table column order.
    pub tasks: Vec<TaskScore>,
    /// Unweighted mean over tasks.
    pub overall_rouge1_recall: f64,
    #[serde(rename = "overall_rougeL_recall")]
    pub overall_rouge_l_recall: f64,
    pub cases: Vec<ScoredCase>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignmentError {
    #[error("{cases} cases but {results} results")]
    CountMismatch { cases: usize, results: usize },
    #[error("result for unknown case '{0}'")]
    UnknownCase(String),
    #[error("result without a case_id")]
    MissingCaseId,
    #[error("more than one result for case '{0}'")]
    DuplicateResult(String),
}

/// Order for task columns: the four fixed tags first, then others by name.
fn task_rank(task: &str) -> (usize, &str) {
    let fixed = TASK_COLUMNS.iter().position(|(t, _)| *t == task);
    (fixed.unwrap_or(TASK_COLUMNS.len()), task)
}

pub fn score_case(case: &QaCase, result: &SessionResult) -> ScoredCase {
    let prediction = result.final_answer.clone().unwrap_or_default();
    let reference = tokenize(&case.reference_answer);
    let predicted = tokenize(&prediction);
    // References are checked to be non-empty when the benchmark is loaded.
    let (r1, rl) = if result.final_answer.is_some() {
        (
            rouge1_recall_tokens(&reference, &predicted).unwrap_or(0.0),
            rouge_l_recall_tokens(&reference, &predicted).unwrap_or(0.0),
        )
    } else {
        (0.0, 0.0)
    };
    ScoredCase {
        case_id: case.case_id.clone(),
        task: case.task.clone(),
        prediction,
        rouge1_recall: r1,
        rouge_l_recall: rl,
        stop_reason: result.stop_reason,
        tool_calls_made: result.tool_calls_made,
    }
}

/// Pair results with cases by `case_id` and aggregate.
pub fn evaluate_run(cases: &[QaCase], results: &[SessionResult]) -> Result<EvalReport, AlignmentError> {
    if cases.len() != results.len() {
        return Err(AlignmentError::CountMismatch {
            cases: cases.len(),
            results: results.len(),
        });
    }
    let mut by_id: HashMap<&str, &SessionResult> = HashMap::new();
    for r in results {
        let id = r.case_id.as_deref().ok_or(AlignmentError::MissingCaseId)?;
        if !cases.iter().any(|c| c.case_id == id) {
            return Err(AlignmentError::UnknownCase(id.to_string()));
        }
        if by_id.insert(id, r).is_some() {
            return Err(AlignmentError::DuplicateResult(id.to_string()));
        }
    }
    let scored: Vec<ScoredCase> = cases
        .par_iter()
        .map(|c| score_case(c, by_id[c.case_id.as_str()]))
        .collect();

    let mut groups: BTreeMap<(usize, &str), Vec<&ScoredCase>> = BTreeMap::new();
    for s in &scored {
        groups.entry(task_rank(&s.task)).or_default().push(s);
    }
    let tasks: Vec<TaskScore> = groups
        .into_iter()
        .map(|((_, task), members)| {
            let n = members.len() as f64;
            TaskScore {
                task: task.to_string(),
                cases: members.len(),
                rouge1_recall: members.iter().map(|s| s.rouge1_recall).sum::<f64>() / n,
                rouge_l_recall: members.iter().map(|s| s.rouge_l_recall).sum::<f64>() / n,
            }
        })
        .collect();
    let mean = |f: fn(&TaskScore) -> f64| {
        if tasks.is_empty() {
            0.0
        } else {
            tasks.iter().map(f).sum::<f64>() / tasks.len() as f64
        }
    };
    let paradigm = results
        .first()
        .map(|r| r.paradigm)
        .filter(|p| results.iter().all(|r| r.paradigm == *p));
    Ok(EvalReport {
        paradigm,
        case_count: scored.len(),
        failure_count: results.iter().filter(|r| r.final_answer.is_none()).count(),
        backend_errors: results
            .iter()
            .filter(|r| r.stop_reason == StopReason::BackendError)
            .count(),
        overall_rouge1_recall: mean(|t| t.rouge1_recall),
        overall_rouge_l_recall: mean(|t| t.rouge_l_recall),
        tasks,
        cases: scored,
    })
}

fn column_header(task: &str) -> &str {
    TASK_COLUMNS.iter().find(|(t, _)| *t == task).map_or(task, |(_, h)| h)
}

fn cell(r1: f64, rl: f64) -> String {
    format!("{:.2} / {:.2}", r1 * 100.0, rl * 100.0)
}

/// Plain-text table: one column per task plus `Avg.`, cells
/// `ROUGE-1 / ROUGE-L` recall in percent.
pub fn render_table(report: &EvalReport) -> String {
    let label = report.paradigm.map_or("mixed", Paradigm::as_str);
    let mut headers = vec!["Paradigm".to_string()];
    let mut row = vec![label.to_string()];
    for t in &report.tasks {
        headers.push(column_header(&t.task).to_string());
        row.push(cell(t.rouge1_recall, t.rouge_l_recall));
    }
    headers.push("Avg.".into());
    row.push(cell(report.overall_rouge1_recall, report.overall_rouge_l_recall));

    let widths: Vec<usize> = headers.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join(" | ")
            .trim_end()
            .to_string()
    };
    let rule = widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-");
    format!(
        "ROUGE-1 / ROUGE-L recall (%)\n{}\n{}\n{}\ncases: {}  failures (no answer): {}  backend errors: {}\n",
        line(&headers),
        rule,
        line(&row),
        report.case_count,
        report.failure_count,
        report.backend_errors
    )
}
