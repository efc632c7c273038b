//! Rule-based sentence boundary detection.
//!
//! A boundary follows `.`, `?` or `!` (plus any closing quotes or
//! brackets) when the next non-whitespace character is an uppercase
//! letter or a digit. A period closing a known abbreviation or a single
//! letter initial never ends a sentence. Paragraph ends always do.

use serde::{Deserialize, Serialize};

use super::Document;

/// Lowercased abbreviations, without their final period.
pub const ABBREVIATIONS: &[&str] = &[
    "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "vs", "e.g", "i.e", "cf", "al", "fig",
    "figs", "no", "nos", "vol", "approx", "dept", "inc", "ltd", "co", "corp", "jan", "feb", "mar",
    "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "mg", "ml", "resp", "ref",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    /// 0-based position in the document's sentence sequence.
    pub doc_index: usize,
    /// Index of the owning paragraph.
    pub paragraph: usize,
    /// Byte offsets `[start, end)` into the owning paragraph.
    pub char_span: (usize, usize),
}

/// Splits every paragraph of `doc` into sentences, numbered across the
/// whole document.
pub fn segment_sentences(doc: &Document) -> Vec<Sentence> {
    let mut out = Vec::new();
    for (p, para) in doc.paragraphs.iter().enumerate() {
        for (start, end) in sentence_spans(para) {
            out.push(Sentence {
                text: para[start..end].to_string(),
                doc_index: out.len(),
                paragraph: p,
                char_span: (start, end),
            });
        }
    }
    out
}

/// Byte spans of the sentences in one paragraph. Spans exclude the
/// whitespace between sentences, so the gaps between consecutive spans
/// are whitespace only.
pub fn sentence_spans(para: &str) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = para.char_indices().collect();
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if start.is_none() {
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            start = Some(pos);
        }
        if matches!(c, '.' | '?' | '!') {
            // absorb runs like "?!" or "..." and closing quotes/brackets
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j].1, '.' | '?' | '!') {
                j += 1;
            }
            while j < chars.len() && is_closer(chars[j].1) {
                j += 1;
            }
            let end = chars.get(j).map_or(para.len(), |&(p, _)| p);
            let mut k = j;
            while k < chars.len() && chars[k].1.is_whitespace() {
                k += 1;
            }
            let followed_by_space = k > j;
            let next_starts_sentence = chars
                .get(k)
                .is_some_and(|&(_, n)| n.is_uppercase() || n.is_ascii_digit());
            let s = start.expect("sentence start set above");
            if followed_by_space
                && next_starts_sentence
                && !(c == '.' && j == i + 1 && ends_with_abbreviation(&para[s..pos]))
            {
                spans.push((s, end));
                start = None;
                i = k;
                continue;
            }
            i = j;
            continue;
        }
        i += 1;
    }
    if let Some(s) = start {
        let end = para.trim_end().len();
        if end > s {
            spans.push((s, end));
        }
    }
    spans
}

fn is_closer(c: char) -> bool {
    matches!(
        c,
        '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}' | '\u{bb}'
    )
}

/// Whether the word right before a period is an abbreviation or a
/// single-letter initial.
fn ends_with_abbreviation(before_period: &str) -> bool {
    let word = before_period
        .rsplit(|c: char| c.is_whitespace() || c == '(' || c == '[' || c == '"')
        .next()
        .unwrap_or("");
    if word.is_empty() {
        return false;
    }
    let mut letters = word.chars();
    if let (Some(first), None) = (letters.next(), letters.next()) {
        if first.is_alphabetic() {
            return true;
        }
    }
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}
