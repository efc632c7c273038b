//! Classifier input preparation: the paragraph filter (d′) followed by the
//! term-window filter (d″).

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{token_count, tokenize, Document, InterventionCondition, Sentence};
use crate::relevance::{build_index, Bm25Index, Bm25Params, RelevanceError};

pub const DEFAULT_WINDOW_WORDS: usize = 510;

/// How many trailing paragraphs the paragraph filter always keeps.
const TRAILING_PARAGRAPHS: usize = 3;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error(transparent)]
    Relevance(#[from] RelevanceError),
    #[error("document '{0}': no window mentions both the intervention and the condition")]
    NoMatchingWindow(String),
    #[error("window size must be at least 1 word")]
    ZeroWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    DPrime,
    DDoublePrime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubDocument {
    pub source_id: String,
    pub sentences: Vec<Sentence>,
    /// Source paragraph indices that survived the paragraph filter.
    pub paragraphs: Vec<usize>,
    pub stage: Stage,
    pub windows: usize,
    pub dropped_windows: usize,
    /// Set when every window was dropped and d′ was used instead.
    pub fallback: bool,
}

impl SubDocument {
    /// Sentences joined by single spaces; the text handed to classifiers.
    pub fn text(&self) -> String {
        join_sentences(self.sentences.iter())
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

pub(crate) fn join_sentences<'a>(sentences: impl Iterator<Item = &'a Sentence>) -> String {
    let mut out = String::new();
    for s in sentences {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&s.text);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessOptions {
    pub bm25: Bm25Params,
    pub window_words: usize,
    pub allow_fallback: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            bm25: Bm25Params::default(),
            window_words: DEFAULT_WINDOW_WORDS,
            allow_fallback: true,
        }
    }
}

/// Paragraph indices kept for a document of `n` paragraphs: the first,
/// the last three and `best`, in document order.
pub fn select_paragraphs(n: usize, best: usize) -> Vec<usize> {
    let mut set = BTreeSet::new();
    if n == 0 {
        return Vec::new();
    }
    set.insert(0);
    set.extend(n.saturating_sub(TRAILING_PARAGRAPHS)..n);
    if best < n {
        set.insert(best);
    }
    set.into_iter().collect()
}

/// Builds d′ from the first paragraph, the last three, and the paragraph
/// the index ranks most relevant to the document's pair.
pub fn paragraph_filter(doc: &Document, index: &Bm25Index) -> SubDocument {
    paragraph_filter_for(doc, index, &doc.ic)
}

fn paragraph_filter_for(
    doc: &Document,
    index: &Bm25Index,
    ic: &InterventionCondition,
) -> SubDocument {
    let best = index.most_relevant_paragraph(ic);
    let keep = select_paragraphs(doc.paragraphs.len(), best);
    let sentences = doc
        .sentences()
        .into_iter()
        .filter(|s| keep.binary_search(&s.paragraph).is_ok())
        .collect();
    SubDocument {
        source_id: doc.id.clone(),
        sentences,
        paragraphs: keep,
        stage: Stage::DPrime,
        windows: 0,
        dropped_windows: 0,
        fallback: false,
    }
}

/// Partitions sentences greedily into consecutive windows of at most
/// `window_words` tokens. A sentence longer than the limit gets a window
/// of its own. Returns half-open sentence ranges.
pub fn partition_windows(sentences: &[Sentence], window_words: usize) -> Vec<(usize, usize)> {
    let mut windows = Vec::new();
    let mut start = 0;
    let mut filled = 0;
    for (i, s) in sentences.iter().enumerate() {
        let n = token_count(&s.text);
        if i > start && filled + n > window_words {
            windows.push((start, i));
            start = i;
            filled = 0;
        }
        filled += n;
    }
    if start < sentences.len() {
        windows.push((start, sentences.len()));
    }
    windows
}

/// True when every token of the intervention and every token of the
/// condition occurs somewhere in the window.
pub fn window_mentions_pair(window: &[Sentence], ic: &InterventionCondition) -> bool {
    let tokens: HashSet<String> = window.iter().flat_map(|s| tokenize(&s.text)).collect();
    ic.intervention_tokens().iter().all(|t| tokens.contains(t))
        && ic.condition_tokens().iter().all(|t| tokens.contains(t))
}

/// Builds d″ by dropping the windows of d′ that do not mention both terms.
/// May return an empty sub-document; `preprocess` handles the fallback.
pub fn window_filter(
    d_prime: &SubDocument,
    ic: &InterventionCondition,
    window_words: usize,
) -> SubDocument {
    let windows = partition_windows(&d_prime.sentences, window_words.max(1));
    let mut sentences = Vec::new();
    let mut dropped = 0;
    for &(a, b) in &windows {
        let window = &d_prime.sentences[a..b];
        if window_mentions_pair(window, ic) {
            sentences.extend_from_slice(window);
        } else {
            dropped += 1;
        }
    }
    SubDocument {
        source_id: d_prime.source_id.clone(),
        sentences,
        paragraphs: d_prime.paragraphs.clone(),
        stage: Stage::DDoublePrime,
        windows: windows.len(),
        dropped_windows: dropped,
        fallback: false,
    }
}

/// Runs both filters. When every window is dropped, returns d′ with the
/// fallback flag set, or an error if fallback is disabled.
pub fn preprocess(
    doc: &Document,
    ic: &InterventionCondition,
    opts: &PreprocessOptions,
) -> Result<SubDocument, PreprocessError> {
    if opts.window_words == 0 {
        return Err(PreprocessError::ZeroWindow);
    }
    let index = build_index(&doc.paragraphs, opts.bm25)?;
    let d_prime = paragraph_filter_for(doc, &index, ic);
    let d_double = window_filter(&d_prime, ic, opts.window_words);
    if !d_double.is_empty() {
        return Ok(d_double);
    }
    if !opts.allow_fallback {
        return Err(PreprocessError::NoMatchingWindow(doc.id.clone()));
    }
    log::debug!("document '{}': all windows dropped, using d'", doc.id);
    Ok(SubDocument {
        windows: d_double.windows,
        dropped_windows: d_double.dropped_windows,
        fallback: true,
        ..d_prime
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ic() -> InterventionCondition {
        InterventionCondition::new("roselle", "hypertension").unwrap()
    }

    fn doc(paragraphs: &[&str]) -> Document {
        Document::new(
            "d",
            "t",
            None,
            paragraphs.iter().map(|s| s.to_string()).collect(),
            ic(),
            None,
        )
        .unwrap()
    }

    fn sentence(text: String, i: usize) -> Sentence {
        Sentence {
            char_span: (0, text.len()),
            text,
            doc_index: i,
            paragraph: 0,
        }
    }

    fn words(n: usize, w: &str) -> String {
        vec![w; n].join(" ")
    }

    #[test]
    fn ten_paragraphs_keep_first_last_three_and_best() {
        assert_eq!(select_paragraphs(10, 4), vec![0, 4, 7, 8, 9]);
    }

    #[test]
    fn small_documents_keep_everything() {
        assert_eq!(select_paragraphs(3, 1), vec![0, 1, 2]);
        assert_eq!(select_paragraphs(4, 2), vec![0, 1, 2, 3]);
        assert_eq!(select_paragraphs(1, 0), vec![0]);
    }

    #[test]
    fn best_inside_tail_is_deduplicated() {
        assert_eq!(select_paragraphs(6, 5), vec![0, 3, 4, 5]);
    }

    #[test]
    fn paragraph_filter_uses_bm25_best() {
        let mut ps: Vec<String> = (0..10)
            .map(|i| format!("Filler text number {i}."))
            .collect();
        ps[4] = "Roselle tea lowered hypertension in the trial.".into();
        let d = Document::new("d", "t", None, ps, ic(), None).unwrap();
        let idx = build_index(&d.paragraphs, Bm25Params::default()).unwrap();
        let dp = paragraph_filter(&d, &idx);
        assert_eq!(dp.paragraphs, vec![0, 4, 7, 8, 9]);
        assert_eq!(dp.sentences.len(), 5);
        assert_eq!(dp.stage, Stage::DPrime);
    }

    #[test]
    fn greedy_windows_never_exceed_limit() {
        let ss: Vec<Sentence> = (0..3).map(|i| sentence(words(300, "w"), i)).collect();
        assert_eq!(partition_windows(&ss, 510), vec![(0, 1), (1, 2), (2, 3)]);
        let ss: Vec<Sentence> = [200, 300, 11, 600, 5]
            .iter()
            .enumerate()
            .map(|(i, &n)| sentence(words(n, "w"), i))
            .collect();
        assert_eq!(
            partition_windows(&ss, 510),
            vec![(0, 2), (2, 3), (3, 4), (4, 5)]
        );
    }

    #[test]
    fn single_window_is_identity() {
        let d = doc(&["Roselle tea was studied for hypertension. It helped a little."]);
        let idx = build_index(&d.paragraphs, Bm25Params::default()).unwrap();
        let dp = paragraph_filter(&d, &idx);
        let dd = window_filter(&dp, &ic(), 510);
        assert_eq!(dd.sentences, dp.sentences);
        assert_eq!((dd.windows, dd.dropped_windows), (1, 0));
    }

    #[test]
    fn window_without_condition_is_dropped() {
        let first = format!("Roselle and hypertension. {}.", words(505, "x"));
        let second = format!("Roselle is a plant. {}.", words(20, "y"));
        let d = doc(&[&first, &second]);
        let idx = build_index(&d.paragraphs, Bm25Params::default()).unwrap();
        let dp = paragraph_filter(&d, &idx);
        let dd = window_filter(&dp, &ic(), 510);
        assert_eq!(dd.windows, 2);
        assert_eq!(dd.dropped_windows, 1);
        assert!(dd.sentences.iter().all(|s| s.paragraph == 0));
    }

    #[test]
    fn multi_word_terms_need_every_token() {
        let pair = InterventionCondition::new("vitamin D", "High Blood Pressure").unwrap();
        let s = |t: &str| vec![sentence(t.to_string(), 0)];
        assert!(window_mentions_pair(
            &s("Pressure was high; blood tests and vitamin d."),
            &pair
        ));
        assert!(!window_mentions_pair(
            &s("Vitamin D and blood pressure."),
            &pair
        ));
    }

    #[test]
    fn falls_back_to_d_prime_when_all_windows_drop() {
        let d = doc(&["Tea is nice. It mentions hypertension only."]);
        let out = preprocess(&d, &ic(), &PreprocessOptions::default()).unwrap();
        assert!(out.fallback);
        assert_eq!(out.stage, Stage::DPrime);
        assert_eq!(out.sentences.len(), 2);
        assert_eq!(out.dropped_windows, 1);

        let strict = PreprocessOptions {
            allow_fallback: false,
            ..Default::default()
        };
        assert!(matches!(
            preprocess(&d, &ic(), &strict),
            Err(PreprocessError::NoMatchingWindow(_))
        ));
    }

    #[test]
    fn one_paragraph_with_both_terms_passes_through() {
        let d = doc(&["Roselle lowers hypertension. Studies agree."]);
        let out = preprocess(&d, &ic(), &PreprocessOptions::default()).unwrap();
        assert!(!out.fallback);
        assert_eq!(out.stage, Stage::DDoublePrime);
        assert_eq!(out.sentences, d.sentences());
    }

    #[test]
    fn zero_window_rejected() {
        let d = doc(&["Roselle lowers hypertension."]);
        let opts = PreprocessOptions {
            window_words: 0,
            ..Default::default()
        };
        assert!(matches!(
            preprocess(&d, &ic(), &opts),
            Err(PreprocessError::ZeroWindow)
        ));
    }
}
