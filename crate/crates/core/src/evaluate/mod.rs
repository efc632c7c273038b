//! Reliability metrics over caption annotations: no-viewpoint rates,
//! confusion matrices against document viewpoints, annotation spread and
//! chi-square comparisons between extraction methods.

mod chi2;
mod report;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{regroup, Viewpoint, ViewpointClass, ViewpointLabel};

pub use chi2::{chi_square, chi_square_sf, gamma_q, ln_gamma, ChiSquareResult};
pub use report::{
    build_report, method_comparison_tables, render_text, ChiSquareEntry, ComparisonTable,
    MethodReport, ReliabilityReport,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot read annotations {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed annotation at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("degenerate contingency table: {0}")]
    DegenerateTable(String),
    #[error("no annotations for method '{0}'")]
    UnknownMethod(String),
}

/// One participant's label for one caption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub doc_id: String,
    pub method: String,
    pub annotator_id: String,
    pub label: ViewpointLabel,
    /// The document's own viewpoint; never `no_viewpoint`.
    pub doc_truth: Viewpoint,
}

impl AnnotationRecord {
    pub fn class(&self) -> ViewpointClass {
        regroup(self.label)
    }
}

/// Parses annotation JSONL. Blank lines are skipped.
pub fn parse_annotations(reader: impl BufRead) -> Result<Vec<AnnotationRecord>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| EvalError::Io {
            path: String::new(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: AnnotationRecord =
            serde_json::from_str(&line).map_err(|e| EvalError::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_annotations(path: impl AsRef<Path>) -> Result<Vec<AnnotationRecord>, EvalError> {
    let path = path.as_ref();
    let io_err = |source| EvalError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    parse_annotations(BufReader::new(file)).map_err(|e| match e {
        EvalError::Io { source, .. } => io_err(source),
        other => other,
    })
}

/// Records of one method, sorted by (doc_id, annotator_id).
pub fn records_for<'a>(records: &'a [AnnotationRecord], method: &str) -> Vec<&'a AnnotationRecord> {
    let mut out: Vec<&AnnotationRecord> = records.iter().filter(|r| r.method == method).collect();
    out.sort_by(|a, b| (&a.doc_id, &a.annotator_id).cmp(&(&b.doc_id, &b.annotator_id)));
    out
}

pub fn percent(count: u64, total: u64) -> Option<f64> {
    (total > 0).then(|| 100.0 * count as f64 / total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub count: u64,
    pub total: u64,
    pub percent: Option<f64>,
}

impl RateRow {
    fn new(count: u64, total: u64) -> Self {
        Self {
            count,
            total,
            percent: percent(count, total),
        }
    }
}

/// Captions annotated as presenting no viewpoint, by document viewpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoViewpointTable {
    pub method: String,
    /// Rows in `Viewpoint` order.
    pub rows: [RateRow; 3],
    pub total: RateRow,
}

pub fn no_viewpoint_table(records: &[AnnotationRecord], method: &str) -> NoViewpointTable {
    let mut counts = [0u64; 3];
    let mut totals = [0u64; 3];
    for r in records_for(records, method) {
        let k = r.doc_truth.index();
        totals[k] += 1;
        if r.class() == ViewpointClass::NoViewpoint {
            counts[k] += 1;
        }
    }
    let rows = [0, 1, 2].map(|k| RateRow::new(counts[k], totals[k]));
    NoViewpointTable {
        method: method.to_string(),
        rows,
        total: RateRow::new(counts.iter().sum(), totals.iter().sum()),
    }
}

/// Document viewpoint (rows) against annotated viewpoint (columns), with
/// `no_viewpoint` annotations left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub method: String,
    pub counts: [[u64; 3]; 3],
    /// Row percentages; `None` for rows without any viewpoint-bearing annotation.
    pub row_percent: [[Option<f64>; 3]; 3],
    pub accurate: u64,
    pub viewpoint_bearing: u64,
    pub total_annotations: u64,
    /// `accurate / viewpoint_bearing` in percent.
    pub accuracy_viewpoint_bearing: Option<f64>,
    /// `accurate / total_annotations` in percent.
    pub accuracy_overall: Option<f64>,
}

impl ConfusionMatrix {
    pub fn row_total(&self, truth: Viewpoint) -> u64 {
        self.counts[truth.index()].iter().sum()
    }
}

pub fn confusion(records: &[AnnotationRecord], method: &str) -> ConfusionMatrix {
    let mut counts = [[0u64; 3]; 3];
    let mut total = 0;
    for r in records_for(records, method) {
        total += 1;
        if let Some(v) = r.class().viewpoint() {
            counts[r.doc_truth.index()][v.index()] += 1;
        }
    }
    let row_percent = counts.map(|row| {
        let sum: u64 = row.iter().sum();
        row.map(|c| percent(c, sum))
    });
    let accurate = (0..3).map(|k| counts[k][k]).sum();
    let bearing = counts.iter().flatten().sum();
    ConfusionMatrix {
        method: method.to_string(),
        counts,
        row_percent,
        accurate,
        viewpoint_bearing: bearing,
        total_annotations: total,
        accuracy_viewpoint_bearing: percent(accurate, bearing),
        accuracy_overall: percent(accurate, total),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetSpread {
    pub method: String,
    pub doc_id: String,
    pub annotations: usize,
    pub std_dev: f64,
    /// Fewer than two viewpoint-bearing annotations; `std_dev` is 0.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertSummary {
    /// Mean over snippets of the population standard deviation.
    pub mean_std_dev: Option<f64>,
    pub snippets: Vec<SnippetSpread>,
}

impl LikertSummary {
    pub fn flagged(&self) -> impl Iterator<Item = &SnippetSpread> {
        self.snippets.iter().filter(|s| s.flagged)
    }
}

/// Population standard deviation of each snippet's 1-5 scale labels
/// (`no_viewpoint` excluded), averaged over snippets. A snippet is one
/// (method, doc_id) pair.
pub fn likert_std<'a>(records: impl IntoIterator<Item = &'a AnnotationRecord>) -> LikertSummary {
    let mut sorted: Vec<&AnnotationRecord> = records.into_iter().collect();
    sorted.sort_by(|a, b| {
        (&a.method, &a.doc_id, &a.annotator_id).cmp(&(&b.method, &b.doc_id, &b.annotator_id))
    });
    let mut groups: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
    for r in sorted {
        let entry = groups.entry((&r.method, &r.doc_id)).or_default();
        if let Some(p) = r.label.likert() {
            entry.push(p as f64);
        }
    }
    let snippets: Vec<SnippetSpread> = groups
        .into_iter()
        .map(|((method, doc_id), points)| {
            let flagged = points.len() < 2;
            SnippetSpread {
                method: method.to_string(),
                doc_id: doc_id.to_string(),
                annotations: points.len(),
                std_dev: if flagged {
                    0.0
                } else {
                    population_std(&points)
                },
                flagged,
            }
        })
        .collect();
    let mean = (!snippets.is_empty())
        .then(|| snippets.iter().map(|s| s.std_dev).sum::<f64>() / snippets.len() as f64);
    LikertSummary {
        mean_std_dev: mean,
        snippets,
    }
}

// Welford's single-pass update.
fn population_std(xs: &[f64]) -> f64 {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    (m2 / xs.len() as f64).sqrt()
}
