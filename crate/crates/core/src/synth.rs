//! Seeded generators for synthetic corpora and annotation sets.
//!
//! Everything here is deterministic for a given seed. The generators back
//! the test suites and the `synth` CLI subcommand.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Document, InterventionCondition, Viewpoint, ViewpointClass, ViewpointLabel};
use crate::evaluate::AnnotationRecord;

/// Marker vocabularies, one family per viewpoint in `Viewpoint` order.
pub const MARKER_FAMILIES: [&[&str]; 3] = [
    &[
        "effective",
        "improved",
        "reduced",
        "beneficial",
        "significant",
        "helped",
    ],
    &[
        "unclear",
        "insufficient",
        "inconclusive",
        "mixed",
        "uncertain",
        "limited",
    ],
    &[
        "ineffective",
        "failed",
        "worsened",
        "useless",
        "harmful",
        "negligible",
    ],
];

/// Neutral words. None of them is an abbreviation or a single letter, so
/// the sentence splitter sees only real boundaries.
pub const FILLER: &[&str] = &[
    "the",
    "study",
    "patients",
    "trial",
    "results",
    "were",
    "of",
    "and",
    "in",
    "treatment",
    "group",
    "weeks",
    "reported",
    "with",
    "dose",
    "participants",
    "outcome",
    "daily",
    "measured",
    "after",
    "clinical",
    "review",
    "data",
    "control",
    "randomized",
    "follow",
    "baseline",
];

/// Intervention-condition pairs used by the fixture corpora.
pub const PAIRS: [(&str, &str); 7] = [
    ("roselle", "hypertension"),
    ("acupuncture", "asthma"),
    ("melatonin", "insomnia"),
    ("zinc", "common cold"),
    ("ginger", "nausea"),
    ("probiotics", "eczema"),
    ("omega 3", "depression"),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn words(rng: &mut impl Rng, pool: &[&str], n: usize) -> Vec<String> {
    (0..n)
        .map(|_| pool.choose(rng).expect("nonempty pool").to_string())
        .collect()
}

fn sentence_from(mut words: Vec<String>) -> String {
    if let Some(first) = words.first_mut() {
        let mut c = first.chars();
        if let Some(h) = c.next() {
            *first = h.to_uppercase().chain(c).collect();
        }
    }
    let mut s = words.join(" ");
    s.push('.');
    s
}

/// `per_class` short texts per viewpoint, each mixing filler with two to
/// four words of that viewpoint's marker family.
pub fn separable_corpus(per_class: usize, seed: u64) -> Vec<(String, Viewpoint)> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(per_class * 3);
    for _ in 0..per_class {
        for v in Viewpoint::ALL {
            let n = rng.random_range(8..16);
            let mut w = words(&mut rng, FILLER, n);
            let markers = rng.random_range(2..5);
            for _ in 0..markers {
                let m = MARKER_FAMILIES[v.index()].choose(&mut rng).unwrap();
                let at = rng.random_range(0..=w.len());
                w.insert(at, m.to_string());
            }
            out.push((sentence_from(w), v));
        }
    }
    out
}

/// A random sentence that may mention the pair's terms and markers.
fn random_sentence(rng: &mut impl Rng, ic: &InterventionCondition, max_words: usize) -> String {
    let n = rng.random_range(3..=max_words.max(3));
    let mut w = words(rng, FILLER, n);
    if rng.random_bool(0.35) {
        let at = rng.random_range(0..=w.len());
        w.insert(at, ic.intervention.to_lowercase());
    }
    if rng.random_bool(0.35) {
        let at = rng.random_range(0..=w.len());
        w.insert(at, ic.condition.to_lowercase());
    }
    if rng.random_bool(0.5) {
        let fam = MARKER_FAMILIES.choose(rng).unwrap();
        let at = rng.random_range(0..=w.len());
        w.insert(at, fam.choose(rng).unwrap().to_string());
    }
    sentence_from(w)
}

/// Shape knobs for `random_document`.
#[derive(Debug, Clone, Copy)]
pub struct DocShape {
    pub max_paragraphs: usize,
    pub max_sentences_per_paragraph: usize,
    pub max_words_per_sentence: usize,
}

impl Default for DocShape {
    fn default() -> Self {
        Self {
            max_paragraphs: 10,
            max_sentences_per_paragraph: 4,
            max_words_per_sentence: 20,
        }
    }
}

pub fn random_document(
    rng: &mut impl Rng,
    id: impl Into<String>,
    ic: &InterventionCondition,
    shape: DocShape,
) -> Document {
    let paragraphs = rng.random_range(1..=shape.max_paragraphs.max(1));
    let paras: Vec<String> = (0..paragraphs)
        .map(|_| {
            let n = rng.random_range(1..=shape.max_sentences_per_paragraph.max(1));
            (0..n)
                .map(|_| random_sentence(rng, ic, shape.max_words_per_sentence))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let label = ViewpointLabel::ALL[rng.random_range(0..5)];
    Document::new(
        id,
        "Synthetic article",
        None,
        paras,
        ic.clone(),
        Some(label),
    )
    .expect("generated paragraphs are nonempty")
}

/// `n` documents cycling through `PAIRS`, with titles and URLs.
pub fn fixture_corpus(n: usize, seed: u64) -> Vec<Document> {
    let mut rng = rng(seed);
    (0..n)
        .map(|i| {
            let (a, b) = PAIRS[i % PAIRS.len()];
            let ic = InterventionCondition::new(a, b).expect("static pair");
            let mut doc =
                random_document(&mut rng, format!("doc-{i:03}"), &ic, DocShape::default());
            doc.title = format!("Does {a} help with {b}? Article {}", i / PAIRS.len() + 1);
            doc.url = Some(format!("https://example.org/{}/{i}", ic.query_id()));
            doc
        })
        .collect()
}

/// Annotation counts for the documents sharing one ground-truth viewpoint:
/// how many annotations fell in each grouped class.
#[derive(Debug, Clone, Copy)]
pub struct TruthCounts {
    pub truth: Viewpoint,
    pub effective: usize,
    pub inconclusive: usize,
    pub ineffective: usize,
    pub no_viewpoint: usize,
    pub documents: usize,
}

/// Expands per-truth counts into individual records. Annotations are spread
/// round-robin over `documents` snippets; definite and "potentially"
/// labels alternate so regrouping is exercised.
pub fn annotations_from_counts(method: &str, groups: &[TruthCounts]) -> Vec<AnnotationRecord> {
    let mut out = Vec::new();
    for g in groups {
        let mut labels = Vec::new();
        for (class, n) in [
            (ViewpointClass::Effective, g.effective),
            (ViewpointClass::Inconclusive, g.inconclusive),
            (ViewpointClass::Ineffective, g.ineffective),
            (ViewpointClass::NoViewpoint, g.no_viewpoint),
        ] {
            for i in 0..n {
                let label = match (class, i % 2) {
                    (ViewpointClass::Effective, 1) => ViewpointLabel::PotentiallyEffective,
                    (ViewpointClass::Ineffective, 1) => ViewpointLabel::PotentiallyIneffective,
                    (c, _) => c.into(),
                };
                labels.push(label);
            }
        }
        let docs = g.documents.max(1);
        for (i, label) in labels.into_iter().enumerate() {
            out.push(AnnotationRecord {
                doc_id: format!("{}-{:02}", g.truth, i % docs),
                method: method.to_string(),
                annotator_id: format!("a{:04}", i / docs),
                label,
                doc_truth: g.truth,
            });
        }
    }
    out
}

/// Annotation counts from a 42-snippet, 10-annotator study of three
/// extraction methods: (method, per-truth counts). Rows list effective,
/// inconclusive, ineffective and no-viewpoint annotations.
pub fn reference_counts() -> Vec<(&'static str, [TruthCounts; 3])> {
    let g = |truth, e, i, n, nv, documents| TruthCounts {
        truth,
        effective: e,
        inconclusive: i,
        ineffective: n,
        no_viewpoint: nv,
        documents,
    };
    use Viewpoint::*;
    vec![
        (
            "query_based",
            [
                g(Effective, 65, 22, 8, 55, 15),
                g(Inconclusive, 55, 29, 10, 26, 12),
                g(Ineffective, 41, 11, 61, 37, 15),
            ],
        ),
        (
            "manual",
            [
                g(Effective, 122, 5, 5, 18, 15),
                g(Inconclusive, 4, 71, 30, 15, 12),
                g(Ineffective, 2, 6, 137, 5, 15),
            ],
        ),
        (
            "framework",
            [
                g(Effective, 110, 19, 2, 19, 15),
                g(Inconclusive, 19, 46, 24, 31, 12),
                g(Ineffective, 7, 14, 96, 33, 15),
            ],
        ),
    ]
}

/// Random annotations: `snippets` snippets with `per_snippet` labels each.
pub fn random_annotations(
    seed: u64,
    method: &str,
    snippets: usize,
    per_snippet: usize,
) -> Vec<AnnotationRecord> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(snippets * per_snippet);
    for s in 0..snippets {
        let truth = *Viewpoint::ALL.choose(&mut rng).unwrap();
        for a in 0..per_snippet {
            out.push(AnnotationRecord {
                doc_id: format!("s{s:03}"),
                method: method.to_string(),
                annotator_id: format!("w{a:02}"),
                label: *ViewpointLabel::ALL.choose(&mut rng).unwrap(),
                doc_truth: truth,
            });
        }
    }
    out
}
