//! Rendered results page against a checked-in golden file.
//!
//! Regenerate with `UPDATE_GOLDEN=1 cargo test --test serp_golden` and
//! review the diff.

use std::path::Path;

use viewsnip_core::corpus::InterventionCondition;
use viewsnip_core::extract::Caption;
use viewsnip_core::serpgen::{
    display_query, permutation, render, SerpPage, DEFAULT_QUERY_TEMPLATE,
};

fn captions() -> Vec<Caption> {
    let rows = [
        ("Roselle tea and blood pressure", "Drinking roselle tea daily lowered systolic pressure in adults with mild hypertension.", Some("https://example.org/roselle-tea")),
        ("Hibiscus: what the evidence says", "Trials are small & short, so the effect of roselle on hypertension remains unclear.", Some("https://example.org/hibiscus?src=a&b=1")),
        ("Herbal remedies for hypertension", "Roselle extract failed to reduce blood pressure compared with placebo.", None),
        ("Ask the pharmacist", "Patients asking about \"natural\" options should know <roselle> interacts with some drugs...", Some("https://example.org/ask")),
    ];
    rows.iter()
        .map(|(t, s, u)| Caption {
            title: t.to_string(),
            snippet_text: s.to_string(),
            url: u.map(str::to_string),
        })
        .collect()
}

fn page(method: &str) -> SerpPage {
    let ic = InterventionCondition::new("roselle", "hypertension").unwrap();
    SerpPage::new(
        display_query(DEFAULT_QUERY_TEMPLATE, &ic),
        ic.query_id(),
        &captions(),
        42,
        method,
    )
}

#[test]
fn page_matches_golden_file() {
    let html = render(&page("framework")).unwrap();
    let path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/roselle--hypertension.html");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &html).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(html, want);
}

#[test]
fn order_is_shared_across_methods() {
    let a = page("framework");
    for m in ["query_based", "manual", "anything"] {
        let b = page(m);
        assert_eq!(a.captions, b.captions);
        let strip = |h: String| h.replace(&format!("content=\"{m}\""), "content=\"framework\"");
        assert_eq!(strip(render(&b).unwrap()), render(&a).unwrap());
    }
    assert_eq!(
        permutation(4, "roselle--hypertension", 42),
        permutation(4, "roselle--hypertension", 42)
    );
}

#[test]
fn links_cannot_be_followed() {
    let html = render(&page("framework")).unwrap();
    assert!(!html.contains("href"));
    assert!(!html.contains("<script"));
    assert_eq!(html.matches("aria-disabled=\"true\"").count(), 4);
    assert!(html.contains("&lt;roselle&gt;"));
}
