//! Optional TOML configuration. Command-line flags take precedence over
//! the environment, which takes precedence over the file.
//!
//! ```toml
//! model = "model.json"        # or: endpoint = "http://host:8080/classify"
//! timeout_secs = 30
//! jobs = 4
//! seed = 7
//!
//! [bm25]
//! k1 = 1.2
//! b = 0.75
//!
//! [preprocess]
//! window_words = 510
//! fallback = true
//!
//! [extract]
//! crop_limit = 160
//!
//! [serp]
//! template = "Is {intervention} effective in treating {condition}?"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::failure::{io_failure, Failure};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub timeout_secs: Option<u64>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub bm25: Bm25Section,
    #[serde(default)]
    pub preprocess: PreprocessSection,
    #[serde(default)]
    pub extract: ExtractSection,
    #[serde(default)]
    pub serp: SerpSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bm25Section {
    pub k1: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessSection {
    pub window_words: Option<usize>,
    pub fallback: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractSection {
    pub crop_limit: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SerpSection {
    pub template: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| io_failure("read config", path, e))?;
        Self::parse(&text)
            .map_err(|e| Failure::Data(format!("invalid config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}
