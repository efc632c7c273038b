use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    chi_square, confusion, likert_std, no_viewpoint_table, records_for, AnnotationRecord,
    ChiSquareResult, ConfusionMatrix, EvalError, LikertSummary, NoViewpointTable,
};
use crate::corpus::{Viewpoint, ViewpointClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub no_viewpoint: NoViewpointTable,
    pub confusion: ConfusionMatrix,
    pub likert: LikertSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareEntry {
    pub label: String,
    pub methods: [String; 2],
    /// Document viewpoint the comparison is restricted to; `None` for the
    /// overall accuracy comparison.
    pub truth: Option<Viewpoint>,
    pub columns: Vec<String>,
    pub table: Vec<Vec<u64>>,
    pub result: Option<ChiSquareResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub methods: Vec<MethodReport>,
    pub yates: bool,
    pub chi_square: Vec<ChiSquareEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub label: String,
    pub truth: Option<Viewpoint>,
    pub columns: Vec<String>,
    pub table: Vec<Vec<u64>>,
}

/// Contingency tables comparing two methods: for each document viewpoint,
/// methods x annotated class (empty columns dropped), plus methods x
/// {accurate, not accurate} over all annotations.
pub fn method_comparison_tables(
    records: &[AnnotationRecord],
    a: &str,
    b: &str,
) -> Vec<ComparisonTable> {
    let methods = [a, b];
    let mut out = Vec::new();
    for truth in Viewpoint::ALL {
        let mut table = vec![vec![0u64; ViewpointClass::ALL.len()]; 2];
        for (row, m) in methods.iter().enumerate() {
            for r in records_for(records, m) {
                if r.doc_truth == truth {
                    let col = ViewpointClass::ALL
                        .iter()
                        .position(|&c| c == r.class())
                        .expect("closed set");
                    table[row][col] += 1;
                }
            }
        }
        let keep: Vec<usize> = (0..ViewpointClass::ALL.len())
            .filter(|&c| table.iter().any(|row| row[c] > 0))
            .collect();
        let columns = keep
            .iter()
            .map(|&c| ViewpointClass::ALL[c].as_str().to_string())
            .collect();
        let table = table
            .into_iter()
            .map(|row| keep.iter().map(|&c| row[c]).collect())
            .collect();
        out.push(ComparisonTable {
            label: format!("{a} vs {b}, {truth} documents"),
            truth: Some(truth),
            columns,
            table,
        });
    }
    let accuracy: Vec<Vec<u64>> = methods
        .iter()
        .map(|m| {
            let recs = records_for(records, m);
            let hit = recs
                .iter()
                .filter(|r| r.class() == ViewpointClass::from(r.doc_truth))
                .count() as u64;
            vec![hit, recs.len() as u64 - hit]
        })
        .collect();
    out.push(ComparisonTable {
        label: format!("{a} vs {b}, accuracy"),
        truth: None,
        columns: vec!["accurate".into(), "not_accurate".into()],
        table: accuracy,
    });
    out
}

pub fn build_report(
    records: &[AnnotationRecord],
    methods: &[String],
    pairs: &[(String, String)],
    yates: bool,
) -> Result<ReliabilityReport, EvalError> {
    let known = |m: &str| -> Result<(), EvalError> {
        if records.iter().any(|r| r.method == m) {
            Ok(())
        } else {
            Err(EvalError::UnknownMethod(m.to_string()))
        }
    };
    let mut reports = Vec::new();
    for m in methods {
        known(m)?;
        reports.push(MethodReport {
            method: m.clone(),
            no_viewpoint: no_viewpoint_table(records, m),
            confusion: confusion(records, m),
            likert: likert_std(records.iter().filter(|r| &r.method == m)),
        });
    }
    let mut entries = Vec::new();
    for (a, b) in pairs {
        known(a)?;
        known(b)?;
        for ComparisonTable {
            label,
            truth,
            columns,
            table,
        } in method_comparison_tables(records, a, b)
        {
            let (result, error) = match chi_square(&table, yates) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            entries.push(ChiSquareEntry {
                label,
                methods: [a.clone(), b.clone()],
                truth,
                columns,
                table,
                result,
                error,
            });
        }
    }
    Ok(ReliabilityReport {
        methods: reports,
        yates,
        chi_square: entries,
    })
}

fn cell(count: u64, pct: Option<f64>) -> String {
    match pct {
        Some(p) => format!("{count} ({p:.2}%)"),
        None => format!("{count} (n/a)"),
    }
}

fn title_case(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|h| h.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

/// Human-readable tables, one block per method, then the chi-square tests.
pub fn render_text(report: &ReliabilityReport) -> String {
    let mut out = String::new();
    for m in &report.methods {
        let _ = writeln!(out, "== Method: {}", m.method);
        let _ = writeln!(out);
        let _ = writeln!(out, "Captions annotated as presenting no viewpoint");
        let _ = writeln!(out, "{:<16}{:<20}# Annotated", "", "No viewpoint");
        for v in Viewpoint::ALL {
            let r = m.no_viewpoint.rows[v.index()];
            let _ = writeln!(
                out,
                "{:<16}{:<20}{}",
                title_case(v.as_str()),
                cell(r.count, r.percent),
                r.total
            );
        }
        let t = m.no_viewpoint.total;
        let _ = writeln!(
            out,
            "{:<16}{:<20}{}",
            "Total",
            cell(t.count, t.percent),
            t.total
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "Document viewpoint vs annotated viewpoint");
        let _ = write!(out, "{:<16}", "");
        for v in Viewpoint::ALL {
            let _ = write!(
                out,
                "{:<24}",
                format!("Annotated {}", title_case(v.as_str()))
            );
        }
        out.truncate(out.trim_end_matches(' ').len());
        out.push('\n');
        for v in Viewpoint::ALL {
            let _ = write!(out, "{:<16}", title_case(v.as_str()));
            for c in Viewpoint::ALL {
                let _ = write!(
                    out,
                    "{:<24}",
                    cell(
                        m.confusion.counts[v.index()][c.index()],
                        m.confusion.row_percent[v.index()][c.index()]
                    )
                );
            }
            out.truncate(out.trim_end_matches(' ').len());
            out.push('\n');
        }
        let fmt_pct = |p: Option<f64>| p.map_or("n/a".to_string(), |p| format!("{p:.2}%"));
        let _ = writeln!(
            out,
            "Accuracy: {}/{} viewpoint-bearing ({}), {}/{} overall ({})",
            m.confusion.accurate,
            m.confusion.viewpoint_bearing,
            fmt_pct(m.confusion.accuracy_viewpoint_bearing),
            m.confusion.accurate,
            m.confusion.total_annotations,
            fmt_pct(m.confusion.accuracy_overall),
        );
        let flagged = m.likert.flagged().count();
        let _ = writeln!(
            out,
            "Mean per-snippet std dev: {} over {} snippets ({} flagged)",
            m.likert
                .mean_std_dev
                .map_or("n/a".to_string(), |s| format!("{s:.3}")),
            m.likert.snippets.len(),
            flagged
        );
        let _ = writeln!(out);
    }
    if !report.chi_square.is_empty() {
        let _ = writeln!(
            out,
            "== Chi-square tests of independence{}",
            if report.yates {
                " (Yates corrected)"
            } else {
                ""
            }
        );
        let width = report
            .chi_square
            .iter()
            .map(|e| e.label.len())
            .max()
            .unwrap_or(0)
            + 2;
        for e in &report.chi_square {
            match (&e.result, &e.error) {
                (Some(r), _) => {
                    let _ = writeln!(
                        out,
                        "{:<width$}chi2={:.4} df={} p={:.3e}",
                        e.label, r.statistic, r.degrees_of_freedom, r.p_value
                    );
                }
                (None, Some(err)) => {
                    let _ = writeln!(out, "{:<width$}{err}", e.label);
                }
                (None, None) => {}
            }
        }
    }
    out
}
