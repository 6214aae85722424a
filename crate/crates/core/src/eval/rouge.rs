//! Recall-oriented ROUGE over lowercase alphanumeric tokens.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RougeError {
    #[error("reference has no tokens")]
    EmptyReference,
}

/// Lowercase, then split on every maximal run of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn counts(tokens: &[String]) -> HashMap<&str, usize> {
    let mut m = HashMap::new();
    for t in tokens {
        *m.entry(t.as_str()).or_insert(0) += 1;
    }
    m
}

/// Clipped unigram recall of already tokenized sequences.
pub fn rouge1_recall_tokens(reference: &[String], prediction: &[String]) -> Result<f64, RougeError> {
    if reference.is_empty() {
        return Err(RougeError::EmptyReference);
    }
    let pred = counts(prediction);
    let overlap: usize = counts(reference)
        .into_iter()
        .map(|(tok, n)| n.min(pred.get(tok).copied().unwrap_or(0)))
        .sum();
    Ok(overlap as f64 / reference.len() as f64)
}

/// Length of the longest common subsequence, two-row dynamic programming.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// LCS(R, P) / |R| over token sequences.
pub fn rouge_l_recall_tokens(reference: &[String], prediction: &[String]) -> Result<f64, RougeError> {
    if reference.is_empty() {
        return Err(RougeError::EmptyReference);
    }
    Ok(lcs_len(reference, prediction) as f64 / reference.len() as f64)
}

pub fn rouge1_recall(reference: &str, prediction: &str) -> Result<f64, RougeError> {
    rouge1_recall_tokens(&tokenize(reference), &tokenize(prediction))
}

pub fn rouge_l_recall(reference: &str, prediction: &str) -> Result<f64, RougeError> {
    rouge_l_recall_tokens(&tokenize(reference), &tokenize(prediction))
}
