//! Sentence-level BLEU and ROUGE-L over logical-form strings.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

/// Smoothing numerator used in place of a zero n-gram match count.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("reference is empty")]
    EmptyReference,
    #[error("no pairs to score")]
    EmptyCorpus,
}

/// Splits on whitespace after padding `(`, `)`, `,`, `.` and `"` so each
/// becomes its own token.
pub fn tokenize(s: &str) -> Vec<String> {
    let mut padded = String::with_capacity(s.len() * 2);
    for c in s.chars() {
        if matches!(c, '(' | ')' | ',' | '.' | '"') {
            padded.push(' ');
            padded.push(c);
            padded.push(' ');
        } else {
            padded.push(c);
        }
    }
    padded.split_whitespace().map(str::to_string).collect()
}

fn ngrams(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram precision as (matches, candidate n-gram count).
pub fn modified_precision(candidate: &[String], reference: &[String], n: usize) -> (usize, usize) {
    let cand = ngrams(candidate, n);
    let refs = ngrams(reference, n);
    let total = cand.values().sum();
    let matched = cand.iter().map(|(g, &c)| c.min(refs.get(g).copied().unwrap_or(0))).sum();
    (matched, total)
}

/// Sentence BLEU of `candidate` against `reference` with n-grams up to
/// `max_n`. Orders for which the candidate has no n-grams are left out of
/// the geometric mean; an order with zero matches contributes
/// `EPSILON / count`.
pub fn bleu(candidate: &str, reference: &str, max_n: usize) -> Result<f64, MetricError> {
    bleu_tokens(&tokenize(candidate), &tokenize(reference), max_n)
}

pub fn bleu_tokens(candidate: &[String], reference: &[String], max_n: usize) -> Result<f64, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    let mut orders = 0;
    for n in 1..=max_n.max(1) {
        let (matched, total) = modified_precision(candidate, reference, n);
        if total == 0 {
            continue;
        }
        let p = if matched == 0 { EPSILON / total as f64 } else { matched as f64 / total as f64 };
        log_sum += p.ln();
        orders += 1;
    }
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let bp = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    Ok((bp * (log_sum / orders as f64).exp()).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RougeL {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0; b.len() + 1];
    let mut cur = vec![0; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn rouge_l(candidate: &str, reference: &str) -> Result<RougeL, MetricError> {
    let (c, r) = (tokenize(candidate), tokenize(reference));
    if r.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    if c.is_empty() {
        return Ok(RougeL { precision: 0.0, recall: 0.0, f1: 0.0 });
    }
    let l = lcs_len(&c, &r) as f64;
    let precision = l / c.len() as f64;
    let recall = l / r.len() as f64;
    let f1 = if l == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Ok(RougeL { precision, recall, f1 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredPair {
    pub candidate: Vec<String>,
    pub reference: Vec<String>,
    pub bleu: f64,
    pub rouge_l_f1: f64,
}

pub fn score_pair(candidate: &str, reference: &str) -> Result<ScoredPair, MetricError> {
    Ok(ScoredPair {
        candidate: tokenize(candidate),
        reference: tokenize(reference),
        bleu: bleu(candidate, reference, 4)?,
        rouge_l_f1: rouge_l(candidate, reference)?.f1,
    })
}

/// Mean sentence BLEU over `(candidate, reference)` pairs.
pub fn corpus_agreement<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut sum = 0.0;
    for (c, r) in pairs {
        sum += bleu(c.as_ref(), r.as_ref(), 4)?;
    }
    Ok(sum / pairs.len() as f64)
}
