//! Viewpoint-focused snippet extraction for "does intervention X help
//! condition Y" queries.
//!
//! The pipeline narrows a document to the paragraphs and term windows most
//! likely to state its conclusion ([`preprocess`]), classifies that text's
//! viewpoint ([`viewpoint`]), and picks the sentence whose removal moves the
//! prediction the most ([`extract`]). [`evaluate`] computes caption
//! reliability metrics from human annotations and [`serpgen`] renders
//! static result pages.

pub mod corpus;
pub mod evaluate;
pub mod extract;
pub mod preprocess;
pub mod relevance;
pub mod serpgen;
pub mod synth;
pub mod viewpoint;

pub use corpus::{
    Document, InterventionCondition, Sentence, Viewpoint, ViewpointClass, ViewpointLabel,
};
pub use extract::{extract_snippet, Caption, ExtractOptions, SnippetResult};
pub use viewpoint::{ViewpointClassifier, ViewpointDistribution};
