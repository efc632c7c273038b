//! Independent re-computations checked against the library.

use rand::Rng;
use viewsnip_core::corpus::{InterventionCondition, Sentence};
use viewsnip_core::evaluate::{chi_square, likert_std, AnnotationRecord};
use viewsnip_core::extract::contributions;
use viewsnip_core::preprocess::{Stage, SubDocument};
use viewsnip_core::synth;
use viewsnip_core::viewpoint::toy::CountingClassifier;
use viewsnip_core::viewpoint::{train_baseline, TrainParams, ViewpointClassifier};

fn random_sub(rng: &mut impl Rng, n: usize, ic: &InterventionCondition) -> SubDocument {
    let doc = synth::random_document(
        rng,
        "r",
        ic,
        synth::DocShape {
            max_paragraphs: 4,
            max_sentences_per_paragraph: 4,
            max_words_per_sentence: 15,
        },
    );
    let sentences: Vec<Sentence> = doc.sentences().into_iter().take(n).collect();
    SubDocument {
        source_id: doc.id,
        sentences,
        paragraphs: vec![0],
        stage: Stage::DDoublePrime,
        windows: 1,
        dropped_windows: 0,
        fallback: false,
    }
}

/// Rebuilds every leave-one-out text from the raw sentence strings.
fn brute_force(
    model: &dyn ViewpointClassifier,
    texts: &[String],
    ic: &InterventionCondition,
) -> Vec<f64> {
    let full = model.classify(&texts.join(" "), ic).unwrap();
    let v = full.predicted();
    if texts.len() == 1 {
        return vec![1.0];
    }
    (0..texts.len())
        .map(|i| {
            let mut rest = Vec::new();
            for (j, t) in texts.iter().enumerate() {
                if j != i {
                    rest.push(t.as_str());
                }
            }
            full.score(v) - model.classify(&rest.join(" "), ic).unwrap().score(v)
        })
        .collect()
}

#[test]
fn erasure_matches_brute_force_on_twelve_sentences() {
    let ic = InterventionCondition::new("roselle", "hypertension").unwrap();
    let model =
        train_baseline(&synth::separable_corpus(30, 2), &TrainParams::default(), 2).unwrap();
    let mut rng = synth::rng(12);
    let mut checked = 0;
    while checked < 20 {
        let sub = random_sub(&mut rng, 12, &ic);
        if sub.sentences.len() < 2 {
            continue;
        }
        let counting = CountingClassifier::new(&model);
        let (_, got) = contributions(&counting, &sub, &ic).unwrap();
        assert_eq!(counting.calls(), 1 + sub.sentences.len());
        let texts: Vec<String> = sub.sentences.iter().map(|s| s.text.clone()).collect();
        let want = brute_force(&model, &texts, &ic);
        let got: Vec<u64> = got.iter().map(|c| c.value.to_bits()).collect();
        let want: Vec<u64> = want.iter().map(|v| v.to_bits()).collect();
        assert_eq!(got, want);
        checked += 1;
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

#[test]
fn chi_square_p_value_matches_numeric_integration() {
    let r = chi_square(&[vec![30, 10], vec![10, 30]], false).unwrap();
    // df = 1 density; the tail beyond 400 is below 1e-80
    let pdf = |x: f64| (-x / 2.0).exp() / (2.0 * std::f64::consts::PI * x).sqrt();
    let oracle = simpson(pdf, 20.0, 400.0, 400_000);
    assert!(
        (r.p_value - oracle).abs() < 1e-8,
        "{} vs {oracle}",
        r.p_value
    );
    assert!((r.p_value - 7.74e-6).abs() < 0.01e-6);

    // df = 4 on a 3x3 table
    let r = chi_square(&[vec![12, 5, 9], vec![4, 14, 6], vec![7, 8, 15]], false).unwrap();
    let pdf4 = |x: f64| x * (-x / 2.0).exp() / 4.0;
    let oracle = simpson(pdf4, r.statistic, r.statistic + 400.0, 400_000);
    assert_eq!(r.degrees_of_freedom, 4);
    assert!((r.p_value - oracle).abs() < 1e-10);
}

fn two_pass_mean_std(records: &[AnnotationRecord]) -> f64 {
    let mut keys: Vec<(&str, &str)> = records
        .iter()
        .map(|r| (r.method.as_str(), r.doc_id.as_str()))
        .collect();
    keys.sort();
    keys.dedup();
    let mut total = 0.0;
    for (m, d) in &keys {
        let xs: Vec<f64> = records
            .iter()
            .filter(|r| r.method == *m && r.doc_id == *d)
            .filter_map(|r| r.label.likert())
            .map(f64::from)
            .collect();
        if xs.len() < 2 {
            continue;
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        total += var.sqrt();
    }
    total / keys.len() as f64
}

#[test]
fn likert_mean_matches_two_pass_oracle() {
    for seed in 0..5 {
        let recs = synth::random_annotations(seed, "m", 42, 10);
        let got = likert_std(&recs).mean_std_dev.unwrap();
        let want = two_pass_mean_std(&recs);
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}
