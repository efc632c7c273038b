//! The viewpoint classifier contract and its implementations.
//!
//! A classifier maps a text and an intervention-condition pair to a
//! probability distribution over {effective, inconclusive, ineffective}.
//! Implementations must be deterministic: the erasure step relies on
//! repeated calls agreeing bit for bit.

mod baseline;
mod remote;
pub mod toy;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{InterventionCondition, Viewpoint};

pub use baseline::{train_baseline, BaselineModel, TrainError, TrainParams, MODEL_FORMAT};
pub use remote::{RemoteClassifier, RemoteReply, RemoteRequest};

/// Tolerance on the sum of a distribution's scores.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("empty classifier input")]
    EmptyInput,
    #[error("classifier endpoint unreachable: {0}")]
    Network(String),
    #[error("classifier endpoint returned status {0}")]
    Status(u16),
    #[error("malformed classifier reply: {0}")]
    Malformed(String),
    #[error("invalid classifier scores: {0}")]
    InvalidScores(String),
}

impl ClassifyError {
    /// Errors caused by a remote model server rather than by the input.
    pub fn is_remote(&self) -> bool {
        !matches!(self, ClassifyError::EmptyInput)
    }
}

/// Scores over the three viewpoints, indexed in `Viewpoint` order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewpointDistribution {
    scores: [f64; 3],
}

impl ViewpointDistribution {
    /// Accepts scores that already form a distribution.
    pub fn new(scores: [f64; 3]) -> Result<Self, ClassifyError> {
        for (v, s) in Viewpoint::ALL.iter().zip(scores) {
            if !s.is_finite() || !(0.0..=1.0).contains(&s) {
                return Err(ClassifyError::InvalidScores(format!(
                    "score for '{v}' is {s}, outside [0, 1]"
                )));
            }
        }
        let sum: f64 = scores.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(ClassifyError::InvalidScores(format!(
                "scores sum to {sum}, not 1"
            )));
        }
        Ok(Self { scores })
    }

    /// Normalizes non-negative scores by their sum.
    pub fn from_unnormalized(scores: [f64; 3]) -> Result<Self, ClassifyError> {
        for (v, s) in Viewpoint::ALL.iter().zip(scores) {
            if !s.is_finite() || s < 0.0 {
                return Err(ClassifyError::InvalidScores(format!(
                    "score for '{v}' is {s}"
                )));
            }
        }
        let sum: f64 = scores.iter().sum();
        if sum <= 0.0 {
            return Err(ClassifyError::InvalidScores("scores sum to zero".into()));
        }
        Self::new(scores.map(|s| s / sum))
    }

    /// Softmax over class logits.
    pub fn softmax(logits: [f64; 3]) -> Result<Self, ClassifyError> {
        if logits.iter().any(|l| !l.is_finite()) {
            return Err(ClassifyError::InvalidScores(format!(
                "non-finite logits {logits:?}"
            )));
        }
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exp = logits.map(|l| (l - max).exp());
        Self::from_unnormalized(exp)
    }

    pub fn uniform() -> Self {
        Self {
            scores: [1.0 / 3.0; 3],
        }
    }

    pub fn score(&self, v: Viewpoint) -> f64 {
        self.scores[v.index()]
    }

    pub fn scores(&self) -> [f64; 3] {
        self.scores
    }

    /// Highest-scoring viewpoint; ties go to the earlier of
    /// effective, inconclusive, ineffective.
    pub fn predicted(&self) -> Viewpoint {
        let mut best = Viewpoint::Effective;
        for v in Viewpoint::ALL {
            if self.score(v) > self.score(best) {
                best = v;
            }
        }
        best
    }
}

/// A trained viewpoint model. `classify` must be a pure function of the
/// model state and its arguments.
pub trait ViewpointClassifier: Send + Sync {
    fn classify(
        &self,
        text: &str,
        ic: &InterventionCondition,
    ) -> Result<ViewpointDistribution, ClassifyError>;

    /// Short description recorded in reports.
    fn identity(&self) -> String;
}

impl<T: ViewpointClassifier + ?Sized> ViewpointClassifier for &T {
    fn classify(
        &self,
        text: &str,
        ic: &InterventionCondition,
    ) -> Result<ViewpointDistribution, ClassifyError> {
        (**self).classify(text, ic)
    }

    fn identity(&self) -> String {
        (**self).identity()
    }
}

impl<T: ViewpointClassifier + ?Sized> ViewpointClassifier for Box<T> {
    fn classify(
        &self,
        text: &str,
        ic: &InterventionCondition,
    ) -> Result<ViewpointDistribution, ClassifyError> {
        (**self).classify(text, ic)
    }

    fn identity(&self) -> String {
        (**self).identity()
    }
}

/// Classifies `text`, rejecting empty input before the model sees it.
pub fn classify<C: ViewpointClassifier + ?Sized>(
    model: &C,
    text: &str,
    ic: &InterventionCondition,
) -> Result<ViewpointDistribution, ClassifyError> {
    if text.trim().is_empty() {
        return Err(ClassifyError::EmptyInput);
    }
    model.classify(text, ic)
}
