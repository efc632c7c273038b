//! Okapi BM25 over the paragraphs of a single document.

use std::collections::HashMap;

use thiserror::Error;

use crate::corpus::{tokenize, InterventionCondition};

pub const DEFAULT_K1: f64 = 1.2;
pub const DEFAULT_B: f64 = 0.75;

#[derive(Debug, Error, PartialEq)]
pub enum RelevanceError {
    #[error("cannot index zero paragraphs")]
    Empty,
    #[error("invalid BM25 parameters k1={k1}, b={b}")]
    InvalidParams { k1: f64, b: f64 },
    #[error("paragraph index {index} out of range ({len} paragraphs)")]
    OutOfRange { index: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self {
            k1: DEFAULT_K1,
            b: DEFAULT_B,
        }
    }
}

impl Bm25Params {
    pub fn validate(self) -> Result<Self, RelevanceError> {
        if self.k1.is_finite() && self.k1 >= 0.0 && (0.0..=1.0).contains(&self.b) {
            Ok(self)
        } else {
            Err(RelevanceError::InvalidParams {
                k1: self.k1,
                b: self.b,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct Bm25Index {
    term_freqs: Vec<HashMap<String, u32>>,
    doc_freqs: HashMap<String, u32>,
    lengths: Vec<usize>,
    avg_len: f64,
    params: Bm25Params,
}

/// Indexes `paragraphs` with the given parameters.
pub fn build_index<S: AsRef<str>>(
    paragraphs: &[S],
    params: Bm25Params,
) -> Result<Bm25Index, RelevanceError> {
    let params = params.validate()?;
    if paragraphs.is_empty() {
        return Err(RelevanceError::Empty);
    }
    let mut term_freqs = Vec::with_capacity(paragraphs.len());
    let mut doc_freqs: HashMap<String, u32> = HashMap::new();
    let mut lengths = Vec::with_capacity(paragraphs.len());
    for p in paragraphs {
        let tokens = tokenize(p.as_ref());
        lengths.push(tokens.len());
        let mut tf: HashMap<String, u32> = HashMap::new();
        for t in tokens {
            *tf.entry(t).or_default() += 1;
        }
        for t in tf.keys() {
            *doc_freqs.entry(t.clone()).or_default() += 1;
        }
        term_freqs.push(tf);
    }
    let avg_len = lengths.iter().sum::<usize>() as f64 / lengths.len() as f64;
    Ok(Bm25Index {
        term_freqs,
        doc_freqs,
        lengths,
        avg_len,
        params,
    })
}

impl Bm25Index {
    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn avg_len(&self) -> f64 {
        self.avg_len
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn doc_freq(&self, term: &str) -> u32 {
        self.doc_freqs.get(term).copied().unwrap_or(0)
    }

    pub fn term_freq(&self, paragraph: usize, term: &str) -> u32 {
        self.term_freqs
            .get(paragraph)
            .and_then(|tf| tf.get(term).copied())
            .unwrap_or(0)
    }

    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`, never negative.
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.len() as f64;
        let df = self.doc_freq(term) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// BM25 score of one paragraph. Repeated query tokens count once per
    /// occurrence.
    pub fn score(&self, query: &[String], paragraph: usize) -> Result<f64, RelevanceError> {
        if paragraph >= self.len() {
            return Err(RelevanceError::OutOfRange {
                index: paragraph,
                len: self.len(),
            });
        }
        if self.avg_len == 0.0 {
            return Ok(0.0);
        }
        let Bm25Params { k1, b } = self.params;
        let norm = 1.0 - b + b * self.lengths[paragraph] as f64 / self.avg_len;
        let mut total = 0.0;
        for term in query {
            let tf = self.term_freq(paragraph, term) as f64;
            if tf == 0.0 {
                continue;
            }
            total += self.idf(term) * tf * (k1 + 1.0) / (tf + k1 * norm);
        }
        Ok(total)
    }

    /// Index of the highest-scoring paragraph for the pair's tokens;
    /// the earliest paragraph wins ties.
    pub fn most_relevant_paragraph(&self, ic: &InterventionCondition) -> usize {
        let query = ic.query_tokens();
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let s = self.score(&query, i).expect("index in range");
            if s > best_score {
                best = i;
                best_score = s;
            }
        }
        best
    }
}
