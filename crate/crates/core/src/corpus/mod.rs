//! Document model, JSONL ingestion, segmentation and label taxonomy.

mod label;
mod segment;
mod tokenize;

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use label::{regroup, Viewpoint, ViewpointClass, ViewpointLabel};
pub use segment::{segment_sentences, sentence_spans, Sentence, ABBREVIATIONS};
pub use tokenize::{token_count, tokenize};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unknown label '{token}'{}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    UnknownLabel { token: String, line: Option<usize> },
    #[error("duplicate document id '{id}' at line {line}")]
    DuplicateId { id: String, line: usize },
    #[error("invalid document '{id}': {message}")]
    InvalidDocument { id: String, message: String },
    #[error("invalid intervention-condition pair: {0}")]
    InvalidPair(String),
}

/// The treatment and ailment a query is about. Stored as given; compared
/// case-insensitively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterventionCondition {
    pub intervention: String,
    pub condition: String,
}

impl InterventionCondition {
    pub fn new(
        intervention: impl Into<String>,
        condition: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        let intervention = intervention.into();
        let condition = condition.into();
        if intervention.trim().is_empty() {
            return Err(CorpusError::InvalidPair("empty intervention".into()));
        }
        if condition.trim().is_empty() {
            return Err(CorpusError::InvalidPair("empty condition".into()));
        }
        Ok(Self {
            intervention,
            condition,
        })
    }

    pub fn intervention_tokens(&self) -> Vec<String> {
        tokenize(&self.intervention)
    }

    pub fn condition_tokens(&self) -> Vec<String> {
        tokenize(&self.condition)
    }

    /// Intervention tokens followed by condition tokens.
    pub fn query_tokens(&self) -> Vec<String> {
        let mut q = self.intervention_tokens();
        q.extend(self.condition_tokens());
        q
    }

    /// Stable identifier used to key SERP ordering, e.g. `roselle--hypertension`.
    pub fn query_id(&self) -> String {
        format!(
            "{}--{}",
            self.intervention_tokens().join("-"),
            self.condition_tokens().join("-")
        )
    }

    pub fn matches(&self, other: &InterventionCondition) -> bool {
        self.intervention.trim().to_lowercase() == other.intervention.trim().to_lowercase()
            && self.condition.trim().to_lowercase() == other.condition.trim().to_lowercase()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub url: Option<String>,
    pub paragraphs: Vec<String>,
    pub ic: InterventionCondition,
    pub label: Option<ViewpointLabel>,
}

impl Document {
    /// Builds a document, dropping whitespace-only paragraphs. Fails when
    /// no paragraph has content.
    pub fn new(
        id: impl Into<String>,
        title: impl Into<String>,
        url: Option<String>,
        paragraphs: Vec<String>,
        ic: InterventionCondition,
        label: Option<ViewpointLabel>,
    ) -> Result<Self, CorpusError> {
        let id = id.into();
        let paragraphs: Vec<String> = paragraphs
            .into_iter()
            .filter(|p| !p.trim().is_empty())
            .collect();
        if paragraphs.is_empty() {
            return Err(CorpusError::InvalidDocument {
                id,
                message: "no nonempty paragraph".into(),
            });
        }
        Ok(Self {
            id,
            title: title.into(),
            url,
            paragraphs,
            ic,
            label,
        })
    }

    /// Paragraphs joined by blank lines.
    pub fn text(&self) -> String {
        self.paragraphs.join("\n\n")
    }

    pub fn sentences(&self) -> Vec<Sentence> {
        segment_sentences(self)
    }
}

/// Splits raw text into paragraphs on one or more blank lines.
pub fn split_paragraphs(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push(current.join("\n").trim().to_string());
                current.clear();
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        out.push(current.join("\n").trim().to_string());
    }
    out
}

/// One line of the corpus JSONL file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentRecord {
    pub id: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paragraphs: Option<Vec<String>>,
    pub intervention: String,
    pub condition: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl DocumentRecord {
    pub fn from_document(doc: &Document) -> Self {
        Self {
            id: doc.id.clone(),
            title: doc.title.clone(),
            url: doc.url.clone(),
            text: None,
            paragraphs: Some(doc.paragraphs.clone()),
            intervention: doc.ic.intervention.clone(),
            condition: doc.ic.condition.clone(),
            label: doc.label.map(|l| l.as_str().to_string()),
        }
    }

    fn into_document(self, line: usize) -> Result<Document, CorpusError> {
        let label =
            match self.label.as_deref() {
                None => None,
                Some(token) => Some(token.parse::<ViewpointLabel>().map_err(|_| {
                    CorpusError::UnknownLabel {
                        token: token.to_string(),
                        line: Some(line),
                    }
                })?),
            };
        let paragraphs = match (self.paragraphs, self.text) {
            (Some(p), None) => p,
            (None, Some(t)) => split_paragraphs(&t),
            (Some(_), Some(_)) => {
                return Err(CorpusError::Malformed {
                    line,
                    message: "both `text` and `paragraphs` given".into(),
                })
            }
            (None, None) => {
                return Err(CorpusError::Malformed {
                    line,
                    message: "one of `text` or `paragraphs` is required".into(),
                })
            }
        };
        let ic = InterventionCondition::new(self.intervention, self.condition).map_err(|e| {
            CorpusError::Malformed {
                line,
                message: e.to_string(),
            }
        })?;
        Document::new(self.id, self.title, self.url, paragraphs, ic, label).map_err(|e| {
            CorpusError::Malformed {
                line,
                message: e.to_string(),
            }
        })
    }
}

/// Reads a JSONL corpus, one document per line. Blank lines are skipped.
pub fn ingest_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_corpus(BufReader::new(file)).map_err(|e| match e {
        CorpusError::Io { source, .. } => CorpusError::Io {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn parse_corpus(reader: impl BufRead) -> Result<Vec<Document>, CorpusError> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: String::new(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DocumentRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
        let doc = record.into_document(line_no)?;
        if !seen.insert(doc.id.clone()) {
            return Err(CorpusError::DuplicateId {
                id: doc.id,
                line: line_no,
            });
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Writes documents as JSONL using the `paragraphs` form.
pub fn write_corpus(mut writer: impl Write, docs: &[Document]) -> std::io::Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut writer, &DocumentRecord::from_document(doc))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<Vec<Document>, CorpusError> {
        parse_corpus(s.as_bytes())
    }

    #[test]
    fn maps_fields_directly() {
        let docs = parse(r#"{"id":"d1","title":"T","paragraphs":["a","b"],"intervention":"roselle","condition":"hypertension"}"#).unwrap();
        assert_eq!(docs.len(), 1);
        let d = &docs[0];
        assert_eq!(d.paragraphs, vec!["a", "b"]);
        assert_eq!(d.ic.intervention, "roselle");
        assert_eq!(d.label, None);
    }

    #[test]
    fn reads_potentially_effective_label() {
        let docs = parse(r#"{"id":"d1","title":"T","text":"x","intervention":"a","condition":"b","label":"potentially_effective"}"#).unwrap();
        assert_eq!(docs[0].label, Some(ViewpointLabel::PotentiallyEffective));
    }

    #[test]
    fn unknown_label_names_token_and_line() {
        let input = concat!(
            r#"{"id":"d1","title":"T","text":"x","intervention":"a","condition":"b"}"#,
            "\n",
            r#"{"id":"d2","title":"T","text":"x","intervention":"a","condition":"b"}"#,
            "\n",
            r#"{"id":"d3","title":"T","text":"x","intervention":"a","condition":"b","label":"maybe"}"#,
        );
        let err = parse(input).unwrap_err();
        assert_eq!(err.to_string(), "unknown label 'maybe' at line 3");
    }

    #[test]
    fn malformed_line_is_reported() {
        let err = parse("{\"id\":\"d1\"}\nnot json").unwrap_err();
        assert!(err.to_string().starts_with("malformed line 1"), "{err}");
        let err = parse("\nnot json").unwrap_err();
        assert!(err.to_string().starts_with("malformed line 2"), "{err}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let line = r#"{"id":"d1","title":"T","text":"x","intervention":"a","condition":"b"}"#;
        let err = parse(&format!("{line}\n{line}")).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn empty_terms_rejected() {
        let err =
            parse(r#"{"id":"d1","title":"T","text":"x","intervention":"  ","condition":"b"}"#)
                .unwrap_err();
        assert!(err.to_string().contains("empty intervention"));
    }

    #[test]
    fn text_is_split_on_blank_lines() {
        assert_eq!(
            split_paragraphs("one\nstill one\n\n\n  \ntwo\n\nthree"),
            vec!["one\nstill one", "two", "three"]
        );
    }

    #[test]
    fn ic_matching_ignores_case() {
        let a = InterventionCondition::new("Roselle", "Hypertension").unwrap();
        let b = InterventionCondition::new("roselle", "hypertension ").unwrap();
        assert!(a.matches(&b));
        assert_eq!(a.intervention, "Roselle");
        assert_eq!(a.query_id(), "roselle--hypertension");
    }

    fn arb_doc() -> impl Strategy<Value = Document> {
        (
            "[a-z0-9]{1,8}",
            "[A-Za-z ]{0,20}",
            proptest::option::of("https://[a-z]{1,10}\\.org"),
            proptest::collection::vec("[A-Za-z][A-Za-z .,!?]{0,40}", 1..5),
            proptest::option::of(proptest::sample::select(ViewpointLabel::ALL.to_vec())),
        )
            .prop_map(|(id, title, url, paras, label)| {
                Document::new(
                    id,
                    title,
                    url,
                    paras,
                    InterventionCondition::new("roselle", "high blood pressure").unwrap(),
                    label,
                )
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn ingest_serialize_round_trip(docs in proptest::collection::vec(arb_doc(), 1..6)) {
            let mut uniq = Vec::new();
            let mut seen = HashSet::new();
            for d in docs {
                if seen.insert(d.id.clone()) {
                    uniq.push(d);
                }
            }
            let mut buf = Vec::new();
            write_corpus(&mut buf, &uniq).unwrap();
            let back = parse_corpus(buf.as_slice()).unwrap();
            prop_assert_eq!(back, uniq);
        }
    }
}
