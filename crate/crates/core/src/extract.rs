//! Erasure-based snippet selection.
//!
//! The contribution of sentence `i` to the predicted viewpoint `v*` is
//! `M_v*(d) - M_v*(d without sentence i)`. The snippet is the sentence
//! with the largest contribution, cropped to the caption budget.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, InterventionCondition, Sentence, Viewpoint};
use crate::preprocess::{
    join_sentences, preprocess, PreprocessError, PreprocessOptions, Stage, SubDocument,
};
use crate::viewpoint::{classify, ClassifyError, ViewpointClassifier};

pub const DEFAULT_CROP_LIMIT: usize = 160;
const ELLIPSIS: &str = "...";

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("{}{}{source}", doc_id.as_ref().map(|d| format!("document '{d}': ")).unwrap_or_default(), sentence.map(|i| format!("sentence {i}: ")).unwrap_or_default())]
    Classify {
        doc_id: Option<String>,
        /// Index of the erased sentence, when the failing call was an erasure.
        sentence: Option<usize>,
        #[source]
        source: ClassifyError,
    },
    #[error("document '{doc_id}': {source}")]
    Preprocess {
        doc_id: String,
        #[source]
        source: PreprocessError,
    },
    #[error("no sentences to extract from")]
    Empty,
}

impl ExtractError {
    pub fn classify_error(&self) -> Option<&ClassifyError> {
        match self {
            ExtractError::Classify { source, .. } => Some(source),
            _ => None,
        }
    }

    fn with_doc(self, id: &str) -> Self {
        match self {
            ExtractError::Classify {
                sentence, source, ..
            } => ExtractError::Classify {
                doc_id: Some(id.to_string()),
                sentence,
                source,
            },
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceContribution {
    pub sentence: Sentence,
    pub value: f64,
}

/// Stage metadata carried into the snippet output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub stage: Stage,
    pub paragraphs: Vec<usize>,
    pub windows: usize,
    pub dropped_windows: usize,
    pub fallback: bool,
}

impl From<&SubDocument> for Provenance {
    fn from(sub: &SubDocument) -> Self {
        Self {
            stage: sub.stage,
            paragraphs: sub.paragraphs.clone(),
            windows: sub.windows,
            dropped_windows: sub.dropped_windows,
            fallback: sub.fallback,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetResult {
    pub doc_id: String,
    pub predicted_viewpoint: Viewpoint,
    pub selected_sentence: Sentence,
    pub snippet_text: String,
    pub contributions: Vec<SentenceContribution>,
    pub provenance: Provenance,
}

/// A result's title and snippet as shown on a results page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caption {
    pub title: String,
    pub snippet_text: String,
    pub url: Option<String>,
}

impl Caption {
    pub fn new(doc: &Document, snippet_text: impl Into<String>) -> Self {
        Self {
            title: doc.title.clone(),
            snippet_text: snippet_text.into(),
            url: doc.url.clone(),
        }
    }
}

impl SnippetResult {
    pub fn caption(&self, doc: &Document) -> Caption {
        Caption::new(doc, self.snippet_text.clone())
    }

    pub fn selected_contribution(&self) -> f64 {
        self.contributions
            .iter()
            .find(|c| c.sentence.doc_index == self.selected_sentence.doc_index)
            .map_or(0.0, |c| c.value)
    }

    pub fn to_record(&self) -> SnippetRecord {
        SnippetRecord {
            doc_id: self.doc_id.clone(),
            viewpoint: self.predicted_viewpoint,
            snippet: self.snippet_text.clone(),
            sentence_index: self.selected_sentence.doc_index,
            contribution: self.selected_contribution(),
            fallback: self.provenance.fallback,
            contributions: self
                .contributions
                .iter()
                .map(|c| IndexedValue {
                    index: c.sentence.doc_index,
                    value: c.value,
                })
                .collect(),
        }
    }
}

/// One line of the snippet JSONL output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetRecord {
    pub doc_id: String,
    pub viewpoint: Viewpoint,
    pub snippet: String,
    pub sentence_index: usize,
    pub contribution: f64,
    pub fallback: bool,
    pub contributions: Vec<IndexedValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexedValue {
    pub index: usize,
    pub value: f64,
}

/// Text of `sentences` with the sentence at position `skip` left out.
pub fn erased_text(sentences: &[Sentence], skip: usize) -> String {
    join_sentences(
        sentences
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, s)| s),
    )
}

/// Predicted viewpoint of `d2` and each sentence's erasure contribution to
/// it. Makes `1 + n` classifier calls for `n > 1` sentences; a lone sentence
/// gets contribution 1 after a single call.
pub fn contributions<C: ViewpointClassifier + ?Sized>(
    model: &C,
    d2: &SubDocument,
    ic: &InterventionCondition,
) -> Result<(Viewpoint, Vec<SentenceContribution>), ExtractError> {
    let sentences = &d2.sentences;
    if sentences.is_empty() {
        return Err(ExtractError::Empty);
    }
    let full = classify(model, &d2.text(), ic).map_err(|source| ExtractError::Classify {
        doc_id: None,
        sentence: None,
        source,
    })?;
    let predicted = full.predicted();
    if sentences.len() == 1 {
        return Ok((
            predicted,
            vec![SentenceContribution {
                sentence: sentences[0].clone(),
                value: 1.0,
            }],
        ));
    }
    let base = full.score(predicted);
    let values: Vec<Result<f64, ExtractError>> = (0..sentences.len())
        .into_par_iter()
        .map(|i| {
            classify(model, &erased_text(sentences, i), ic)
                .map(|d| base - d.score(predicted))
                .map_err(|source| ExtractError::Classify {
                    doc_id: None,
                    sentence: Some(i),
                    source,
                })
        })
        .collect();
    // first failing sentence, independent of scheduling
    let values = values.into_iter().collect::<Result<Vec<f64>, _>>()?;
    Ok((
        predicted,
        sentences
            .iter()
            .cloned()
            .zip(values)
            .map(|(sentence, value)| SentenceContribution { sentence, value })
            .collect(),
    ))
}

/// The sentence with the largest contribution; the lowest `doc_index`
/// wins ties.
pub fn select_snippet(contribs: &[SentenceContribution]) -> Option<&Sentence> {
    let mut best: Option<&SentenceContribution> = None;
    for c in contribs {
        best = match best {
            None => Some(c),
            Some(b)
                if c.value > b.value
                    || (c.value == b.value && c.sentence.doc_index < b.sentence.doc_index) =>
            {
                Some(c)
            }
            keep => keep,
        };
    }
    best.map(|c| &c.sentence)
}

/// Shortens `text` to at most `limit` characters. Longer texts are cut at
/// the last word boundary that leaves room for a trailing `...`; a first
/// word too long to fit is cut mid-word.
pub fn crop(text: &str, limit: usize) -> String {
    let limit = limit.max(ELLIPSIS.len() + 1);
    if text.chars().count() <= limit {
        return text.to_string();
    }
    let budget = limit - ELLIPSIS.len();
    let cut = text
        .char_indices()
        .nth(budget)
        .map_or(text.len(), |(i, _)| i);
    let head = &text[..cut];
    let next_is_space = text[cut..].starts_with(char::is_whitespace);
    let kept = if next_is_space {
        head.trim_end()
    } else {
        match head.rfind(char::is_whitespace) {
            Some(i) => head[..i].trim_end(),
            None => "",
        }
    };
    if kept.is_empty() {
        format!("{head}{ELLIPSIS}")
    } else {
        format!("{kept}{ELLIPSIS}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    pub preprocess: PreprocessOptions,
    pub crop_limit: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            preprocess: PreprocessOptions::default(),
            crop_limit: DEFAULT_CROP_LIMIT,
        }
    }
}

/// Full pipeline for one document: preprocess, erasure, selection, crop.
pub fn extract_snippet<C: ViewpointClassifier + ?Sized>(
    model: &C,
    doc: &Document,
    ic: &InterventionCondition,
    opts: &ExtractOptions,
) -> Result<SnippetResult, ExtractError> {
    let sub = preprocess(doc, ic, &opts.preprocess).map_err(|source| ExtractError::Preprocess {
        doc_id: doc.id.clone(),
        source,
    })?;
    let (predicted, contribs) = contributions(model, &sub, ic).map_err(|e| e.with_doc(&doc.id))?;
    let selected = select_snippet(&contribs)
        .ok_or(ExtractError::Empty)?
        .clone();
    Ok(SnippetResult {
        doc_id: doc.id.clone(),
        predicted_viewpoint: predicted,
        snippet_text: crop(&selected.text, opts.crop_limit),
        selected_sentence: selected,
        contributions: contribs,
        provenance: Provenance::from(&sub),
    })
}

/// Extracts every document against its own pair, in parallel. Output order
/// follows input order.
pub fn extract_batch<C: ViewpointClassifier + ?Sized>(
    model: &C,
    docs: &[Document],
    opts: &ExtractOptions,
) -> Vec<Result<SnippetResult, ExtractError>> {
    docs.par_iter()
        .map(|d| extract_snippet(model, d, &d.ic, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::viewpoint::toy::{CountingClassifier, KeywordClassifier, UniformClassifier};
    use proptest::prelude::*;

    fn ic() -> InterventionCondition {
        InterventionCondition::new("x", "y").unwrap()
    }

    fn sub(texts: &[&str]) -> SubDocument {
        SubDocument {
            source_id: "d".into(),
            sentences: texts
                .iter()
                .enumerate()
                .map(|(i, t)| Sentence {
                    text: t.to_string(),
                    doc_index: i,
                    paragraph: 0,
                    char_span: (0, t.len()),
                })
                .collect(),
            paragraphs: vec![0],
            stage: Stage::DDoublePrime,
            windows: 1,
            dropped_windows: 0,
            fallback: false,
        }
    }

    fn contrib(values: &[f64]) -> Vec<SentenceContribution> {
        sub(&vec!["s"; values.len()])
            .sentences
            .into_iter()
            .zip(values)
            .map(|(sentence, &value)| SentenceContribution { sentence, value })
            .collect()
    }

    #[test]
    fn constant_classifier_gives_zero_contributions() {
        let (v, c) = contributions(&UniformClassifier, &sub(&["A.", "B.", "C."]), &ic()).unwrap();
        assert_eq!(v, Viewpoint::Effective);
        assert!(c.iter().all(|c| c.value == 0.0));
    }

    #[test]
    fn keyword_fixture_matches_hand_computation() {
        let (v, c) = contributions(
            &KeywordClassifier::default(),
            &sub(&["good good.", "bad.", "unclear."]),
            &ic(),
        )
        .unwrap();
        assert_eq!(v, Viewpoint::Effective);
        let want = [3.0 / 7.0 - 1.0 / 5.0, 3.0 / 7.0 - 0.5, 3.0 / 7.0 - 0.5];
        for (got, want) in c.iter().zip(want) {
            assert!((got.value - want).abs() < 1e-12, "{} vs {want}", got.value);
        }
        assert_eq!(select_snippet(&c).unwrap().doc_index, 0);
    }

    #[test]
    fn makes_one_plus_n_calls() {
        let counting = CountingClassifier::new(KeywordClassifier::default());
        contributions(&counting, &sub(&["good.", "bad.", "x.", "y."]), &ic()).unwrap();
        assert_eq!(counting.calls(), 5);

        let counting = CountingClassifier::new(KeywordClassifier::default());
        let (_, c) = contributions(&counting, &sub(&["only one."]), &ic()).unwrap();
        assert_eq!(counting.calls(), 1);
        assert_eq!(c[0].value, 1.0);
    }

    #[test]
    fn empty_subdocument_is_an_error() {
        assert!(matches!(
            contributions(&UniformClassifier, &sub(&[]), &ic()),
            Err(ExtractError::Empty)
        ));
    }

    #[test]
    fn erasure_rejoins_with_single_spaces() {
        let s = sub(&["One.", "Two  words.", "Three."]).sentences;
        assert_eq!(erased_text(&s, 0), "Two  words. Three.");
        assert_eq!(erased_text(&s, 1), "One. Three.");
    }

    #[test]
    fn selection_tie_breaks() {
        let c = contrib(&[0.2286, -0.0714, -0.0714]);
        assert_eq!(select_snippet(&c).unwrap().doc_index, 0);
        let c = contrib(&[0.0, 0.0, 0.0]);
        assert_eq!(select_snippet(&c).unwrap().doc_index, 0);
        let c = contrib(&[-0.3]);
        assert_eq!(select_snippet(&c).unwrap().doc_index, 0);
        let c = contrib(&[0.1, 0.4, 0.4]);
        assert_eq!(select_snippet(&c).unwrap().doc_index, 1);
        assert!(select_snippet(&[]).is_none());
    }

    #[test]
    fn scaling_scores_changes_nothing() {
        let s = sub(&["good good.", "bad unclear.", "unclear.", "good."]);
        let (v1, c1) = contributions(&KeywordClassifier::default(), &s, &ic()).unwrap();
        for scale in [0.001, 3.7, 1e6] {
            let (v2, c2) = contributions(&KeywordClassifier::with_scale(scale), &s, &ic()).unwrap();
            assert_eq!(v1, v2);
            for (a, b) in c1.iter().zip(&c2) {
                assert!((a.value - b.value).abs() < 1e-12);
            }
            assert_eq!(select_snippet(&c1), select_snippet(&c2));
        }
    }

    #[test]
    fn crop_keeps_short_text() {
        let s = "a".repeat(80);
        assert_eq!(crop(&s, 160), s);
    }

    #[test]
    fn crop_cuts_at_word_boundary() {
        let s = "word ".repeat(40);
        let out = crop(s.trim_end(), 160);
        assert!(out.chars().count() <= 160);
        assert!(out.ends_with("word..."));
        assert_eq!(out, format!("{}...", vec!["word"; 31].join(" ")));
    }

    #[test]
    fn crop_hard_cuts_single_token() {
        let s = "x".repeat(300);
        assert_eq!(crop(&s, 160), format!("{}...", "x".repeat(157)));
    }

    #[test]
    fn crop_counts_characters_not_bytes() {
        let s = "é".repeat(200);
        let out = crop(&s, 160);
        assert_eq!(out.chars().count(), 160);
    }

    #[test]
    fn crop_uses_exact_fit_when_next_char_is_space() {
        let first = "a".repeat(157);
        let s = format!("{first} tail words here");
        assert_eq!(crop(&s, 160), format!("{first}..."));
    }

    proptest! {
        #[test]
        fn crop_respects_limit(s in "\\PC{0,400}", limit in 4usize..200) {
            let out = crop(&s, limit);
            prop_assert!(out.chars().count() <= limit);
            prop_assert_eq!(crop(&out, limit), out);
        }
    }
}
