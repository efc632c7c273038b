//! Static results pages: a query box over a list of captions.
//!
//! Caption order comes from a SplitMix64 generator keyed only by the seed
//! and the query id, so every extraction method sees the same order for the
//! same query. The key derivation is:
//!
//! ```text
//! state = splitmix64_mix(seed) ^ fnv1a64(query_id bytes)
//! ```
//!
//! followed by a Fisher-Yates shuffle drawing `next() % (i + 1)` for
//! `i = n-1 .. 1`. Links are rendered without `href` so they cannot be
//! followed.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::InterventionCondition;
use crate::extract::Caption;

pub const DEFAULT_QUERY_TEMPLATE: &str = "Is {intervention} effective in treating {condition}?";

#[derive(Debug, Error, PartialEq)]
pub enum SerpError {
    #[error("empty SERP")]
    Empty,
}

/// SplitMix64 (Steele, Lea and Flood), as used to seed xoshiro generators.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix(self.state)
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

pub fn order_key(seed: u64, query_id: &str) -> u64 {
    mix(seed) ^ fnv1a64(query_id.as_bytes())
}

/// The permutation applied to `n` captions: `result[k]` is the input
/// index shown at position `k`.
pub fn permutation(n: usize, query_id: &str, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(order_key(seed, query_id));
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    idx
}

pub fn order_captions<T: Clone>(captions: &[T], query_id: &str, seed: u64) -> Vec<T> {
    permutation(captions.len(), query_id, seed)
        .into_iter()
        .map(|i| captions[i].clone())
        .collect()
}

/// Fills `{intervention}` and `{condition}` in `template`.
pub fn display_query(template: &str, ic: &InterventionCondition) -> String {
    template
        .replace("{intervention}", &ic.intervention)
        .replace("{condition}", &ic.condition)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerpPage {
    pub query_text: String,
    pub query_id: String,
    /// Captions in display order.
    pub captions: Vec<Caption>,
    pub seed: u64,
    pub method_tag: String,
}

impl SerpPage {
    /// Builds a page, ordering `captions` by (seed, query_id).
    pub fn new(
        query_text: impl Into<String>,
        query_id: impl Into<String>,
        captions: &[Caption],
        seed: u64,
        method_tag: impl Into<String>,
    ) -> Self {
        let query_id = query_id.into();
        Self {
            captions: order_captions(captions, &query_id, seed),
            query_text: query_text.into(),
            query_id,
            seed,
            method_tag: method_tag.into(),
        }
    }
}

pub fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

const STYLE: &str = "body{font-family:arial,sans-serif;margin:24px 48px;max-width:640px;color:#202124}\
.query input{width:100%;font-size:16px;padding:8px 12px;border:1px solid #dfe1e5;border-radius:20px}\
.results{list-style:none;padding:0}\
.result{margin:24px 0}\
.result .title{color:#1a0dab;font-size:20px;cursor:default;text-decoration:none}\
.result .url{color:#006621;font-size:14px}\
.result .snippet{margin:4px 0;font-size:14px;line-height:1.58}";

/// Self-contained HTML for `page`. Output depends only on the page.
pub fn render(page: &SerpPage) -> Result<String, SerpError> {
    if page.captions.is_empty() {
        return Err(SerpError::Empty);
    }
    let q = escape_html(&page.query_text);
    let mut html = String::new();
    let _ = writeln!(html, "<!DOCTYPE html>");
    let _ = writeln!(html, "<html lang=\"en\">");
    let _ = writeln!(html, "<head>");
    let _ = writeln!(html, "<meta charset=\"utf-8\">");
    let _ = writeln!(
        html,
        "<meta name=\"serp-query-id\" content=\"{}\">",
        escape_html(&page.query_id)
    );
    let _ = writeln!(html, "<meta name=\"serp-seed\" content=\"{}\">", page.seed);
    let _ = writeln!(
        html,
        "<meta name=\"serp-method\" content=\"{}\">",
        escape_html(&page.method_tag)
    );
    let _ = writeln!(html, "<title>{q}</title>");
    let _ = writeln!(html, "<style>{STYLE}</style>");
    let _ = writeln!(html, "</head>");
    let _ = writeln!(html, "<body>");
    let _ = writeln!(
        html,
        "<form class=\"query\" onsubmit=\"return false\"><input type=\"text\" value=\"{q}\" readonly></form>"
    );
    let _ = writeln!(html, "<ol class=\"results\">");
    for c in &page.captions {
        let _ = writeln!(html, "<li class=\"result\">");
        let _ = writeln!(
            html,
            "<a class=\"title\" role=\"link\" aria-disabled=\"true\">{}</a>",
            escape_html(&c.title)
        );
        if let Some(url) = &c.url {
            let _ = writeln!(html, "<div class=\"url\">{}</div>", escape_html(url));
        }
        let _ = writeln!(
            html,
            "<p class=\"snippet\">{}</p>",
            escape_html(&c.snippet_text)
        );
        let _ = writeln!(html, "</li>");
    }
    let _ = writeln!(html, "</ol>");
    let _ = writeln!(html, "</body>");
    let _ = writeln!(html, "</html>");
    Ok(html)
}
