//! Native baseline: multinomial logistic regression over tf-idf
//! bag-of-words features, trained with seeded SGD.
//!
//! Term weights are `(1 + ln tf) * idf` with no length normalization, so
//! adding an occurrence of a token only ever moves that token's feature.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ClassifyError, ViewpointClassifier, ViewpointDistribution};
use crate::corpus::{tokenize, InterventionCondition, Viewpoint};

/// Version tag written into every persisted model.
pub const MODEL_FORMAT: &str = "viewsnip-baseline/1";

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("no training examples for class '{0}'")]
    MissingClass(Viewpoint),
    #[error("invalid hyperparameters: {0}")]
    InvalidParams(String),
    #[error("cannot access model file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid model file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    /// Tokens seen in fewer training documents are left out of the vocabulary.
    pub min_df: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            epochs: 30,
            learning_rate: 0.1,
            l2: 1e-4,
            min_df: 1,
        }
    }
}

impl TrainParams {
    fn validate(&self) -> Result<(), TrainError> {
        if self.epochs == 0 {
            return Err(TrainError::InvalidParams("epochs must be positive".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(TrainError::InvalidParams(
                "learning rate must be positive".into(),
            ));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(TrainError::InvalidParams("l2 must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelFile {
    format: String,
    seed: u64,
    params: TrainParams,
    vocabulary: Vec<String>,
    idf: Vec<f64>,
    weights: [Vec<f64>; 3],
    biases: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct BaselineModel {
    file: ModelFile,
    lookup: HashMap<String, usize>,
}

impl PartialEq for BaselineModel {
    fn eq(&self, other: &Self) -> bool {
        self.file == other.file
    }
}

type SparseVec = Vec<(usize, f64)>;

impl BaselineModel {
    fn from_file(file: ModelFile) -> Result<Self, TrainError> {
        if file.format != MODEL_FORMAT {
            return Err(TrainError::Format(format!(
                "unsupported format tag '{}', expected '{MODEL_FORMAT}'",
                file.format
            )));
        }
        let v = file.vocabulary.len();
        if file.idf.len() != v || file.weights.iter().any(|w| w.len() != v) {
            return Err(TrainError::Format(format!(
                "vocabulary has {v} entries but idf/weights lengths differ"
            )));
        }
        let lookup: HashMap<String, usize> = file
            .vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        if lookup.len() != v {
            return Err(TrainError::Format("duplicate vocabulary entries".into()));
        }
        Ok(Self { file, lookup })
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.file.vocabulary
    }

    pub fn seed(&self) -> u64 {
        self.file.seed
    }

    pub fn weights(&self, v: Viewpoint) -> &[f64] {
        &self.file.weights[v.index()]
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&self.file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str) -> Result<Self, TrainError> {
        let file: ModelFile =
            serde_json::from_str(json).map_err(|e| TrainError::Format(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TrainError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| TrainError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TrainError> {
        let path = path.as_ref();
        let json = fs::read_to_string(path).map_err(|source| TrainError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&json)
    }

    fn features(&self, text: &str) -> SparseVec {
        let mut tf: BTreeMap<usize, u32> = BTreeMap::new();
        for t in tokenize(text) {
            if let Some(&j) = self.lookup.get(&t) {
                *tf.entry(j).or_default() += 1;
            }
        }
        tf.into_iter()
            .map(|(j, n)| (j, (1.0 + (n as f64).ln()) * self.file.idf[j]))
            .collect()
    }

    fn logits(&self, x: &SparseVec) -> [f64; 3] {
        let mut z = self.file.biases;
        for (k, zk) in z.iter_mut().enumerate() {
            let w = &self.file.weights[k];
            for &(j, v) in x {
                *zk += w[j] * v;
            }
        }
        z
    }
}

impl ViewpointClassifier for BaselineModel {
    fn classify(
        &self,
        text: &str,
        _ic: &InterventionCondition,
    ) -> Result<ViewpointDistribution, ClassifyError> {
        ViewpointDistribution::softmax(self.logits(&self.features(text)))
    }

    fn identity(&self) -> String {
        format!(
            "baseline-tfidf-logreg(vocab={}, seed={})",
            self.file.vocabulary.len(),
            self.file.seed
        )
    }
}

/// Trains the baseline on labeled texts. Deterministic for a fixed corpus,
/// parameter set and seed.
pub fn train_baseline<S: AsRef<str>>(
    examples: &[(S, Viewpoint)],
    params: &TrainParams,
    seed: u64,
) -> Result<BaselineModel, TrainError> {
    params.validate()?;
    for v in Viewpoint::ALL {
        if !examples.iter().any(|(_, l)| *l == v) {
            return Err(TrainError::MissingClass(v));
        }
    }

    let tokenized: Vec<Vec<String>> = examples.iter().map(|(t, _)| tokenize(t.as_ref())).collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tokens in &tokenized {
        let mut distinct: Vec<&str> = tokens.iter().map(String::as_str).collect();
        distinct.sort_unstable();
        distinct.dedup();
        for t in distinct {
            *df.entry(t).or_default() += 1;
        }
    }
    let n = examples.len() as f64;
    let (vocabulary, idf): (Vec<String>, Vec<f64>) = df
        .into_iter()
        .filter(|&(_, d)| d >= params.min_df)
        .map(|(t, d)| (t.to_string(), ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0))
        .unzip();
    let v = vocabulary.len();

    let mut model = BaselineModel::from_file(ModelFile {
        format: MODEL_FORMAT.to_string(),
        seed,
        params: *params,
        vocabulary,
        idf,
        weights: [vec![0.0; v], vec![0.0; v], vec![0.0; v]],
        biases: [0.0; 3],
    })?;

    let data: Vec<(SparseVec, usize)> = examples
        .iter()
        .map(|(t, l)| (model.features(t.as_ref()), l.index()))
        .collect();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        let lr = params.learning_rate / (1.0 + 0.05 * epoch as f64);
        for &i in &order {
            let (x, y) = &data[i];
            let p = ViewpointDistribution::softmax(model.logits(x))
                .map_err(|e| TrainError::InvalidParams(format!("training diverged: {e}")))?
                .scores();
            let file = &mut model.file;
            for (k, pk) in p.into_iter().enumerate() {
                let g = pk - if k == *y { 1.0 } else { 0.0 };
                let w = &mut file.weights[k];
                for &(j, xj) in x {
                    w[j] -= lr * (g * xj + params.l2 * w[j]);
                }
                file.biases[k] -= lr * g;
            }
        }
    }
    Ok(model)
}
