//! Small deterministic classifiers with hand-computable outputs. Used to
//! check the erasure arithmetic and as plug-in examples.

use std::sync::atomic::{AtomicUsize, Ordering};

use super::{ClassifyError, ViewpointClassifier, ViewpointDistribution};
use crate::corpus::{tokenize, InterventionCondition};

/// Always returns the uniform distribution.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformClassifier;

impl ViewpointClassifier for UniformClassifier {
    fn classify(
        &self,
        _text: &str,
        _ic: &InterventionCondition,
    ) -> Result<ViewpointDistribution, ClassifyError> {
        Ok(ViewpointDistribution::uniform())
    }

    fn identity(&self) -> String {
        "uniform".into()
    }
}

/// Scores each class by the Laplace-smoothed count of its marker tokens:
/// `(count_v + 1) * scale`, normalized over the three classes.
#[derive(Debug, Clone)]
pub struct KeywordClassifier {
    pub markers: [Vec<String>; 3],
    pub scale: f64,
}

impl Default for KeywordClassifier {
    fn default() -> Self {
        Self {
            markers: [
                vec!["good".into()],
                vec!["unclear".into()],
                vec!["bad".into()],
            ],
            scale: 1.0,
        }
    }
}

impl KeywordClassifier {
    pub fn with_scale(scale: f64) -> Self {
        Self {
            scale,
            ..Self::default()
        }
    }

    pub fn counts(&self, text: &str) -> [usize; 3] {
        let tokens = tokenize(text);
        let mut counts = [0; 3];
        for (k, markers) in self.markers.iter().enumerate() {
            counts[k] = tokens.iter().filter(|t| markers.contains(t)).count();
        }
        counts
    }
}

impl ViewpointClassifier for KeywordClassifier {
    fn classify(
        &self,
        text: &str,
        _ic: &InterventionCondition,
    ) -> Result<ViewpointDistribution, ClassifyError> {
        let c = self.counts(text);
        ViewpointDistribution::from_unnormalized(c.map(|n| (n as f64 + 1.0) * self.scale))
    }

    fn identity(&self) -> String {
        format!("keyword(scale={})", self.scale)
    }
}

/// Wraps a classifier and counts how often it is invoked.
#[derive(Debug, Default)]
pub struct CountingClassifier<C> {
    pub inner: C,
    calls: AtomicUsize,
}

impl<C> CountingClassifier<C> {
    pub fn new(inner: C) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<C: ViewpointClassifier> ViewpointClassifier for CountingClassifier<C> {
    fn classify(
        &self,
        text: &str,
        ic: &InterventionCondition,
    ) -> Result<ViewpointDistribution, ClassifyError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.classify(text, ic)
    }

    fn identity(&self) -> String {
        self.inner.identity()
    }
}
