//! HTTP adapter for classifiers served by an external model server.
//!
//! Request: `POST {"text", "intervention", "condition", "labels"}`.
//! Reply: `{"scores": {"effective": x, "inconclusive": y, "ineffective": z}}`.
//! Scores may be unnormalized; they are validated and divided by their sum.
//! There are no retries: a failed call surfaces as an error.

use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::Url;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{ClassifyError, ViewpointClassifier, ViewpointDistribution};
use crate::corpus::{InterventionCondition, Viewpoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteRequest {
    pub text: String,
    pub intervention: String,
    pub condition: String,
    pub labels: [String; 3],
}

impl RemoteRequest {
    pub fn new(text: &str, ic: &InterventionCondition) -> Self {
        Self {
            text: text.to_string(),
            intervention: ic.intervention.clone(),
            condition: ic.condition.clone(),
            labels: Viewpoint::ALL.map(|v| v.as_str().to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteReply {
    pub scores: Map<String, Value>,
}

impl RemoteReply {
    /// Validates a raw reply body and normalizes its scores.
    pub fn parse(body: &str) -> Result<ViewpointDistribution, ClassifyError> {
        let value: Value = serde_json::from_str(body)
            .map_err(|e| ClassifyError::Malformed(format!("body is not JSON: {e}")))?;
        let scores = value
            .get("scores")
            .and_then(Value::as_object)
            .ok_or_else(|| ClassifyError::Malformed("missing \"scores\" object".into()))?;
        let mut out = [0.0; 3];
        for v in Viewpoint::ALL {
            let raw = scores
                .get(v.as_str())
                .ok_or_else(|| ClassifyError::Malformed(format!("missing score for '{v}'")))?;
            out[v.index()] = raw.as_f64().ok_or_else(|| {
                ClassifyError::Malformed(format!("score for '{v}' is not a number"))
            })?;
        }
        if scores.len() != Viewpoint::ALL.len() {
            let extra: Vec<&str> = scores
                .keys()
                .map(String::as_str)
                .filter(|k| Viewpoint::from_str_opt(k).is_none())
                .collect();
            return Err(ClassifyError::InvalidScores(format!(
                "expected 3 scores, got {} (unexpected labels {extra:?})",
                scores.len()
            )));
        }
        ViewpointDistribution::from_unnormalized(out)
    }
}

/// Classifier backed by a remote HTTP endpoint.
#[derive(Debug, Clone)]
pub struct RemoteClassifier {
    endpoint: Url,
    client: Client,
}

impl RemoteClassifier {
    pub fn new(endpoint: &str, timeout: Duration) -> Result<Self, ClassifyError> {
        let endpoint = Url::parse(endpoint)
            .map_err(|e| ClassifyError::Network(format!("invalid endpoint '{endpoint}': {e}")))?;
        let client = Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ClassifyError::Network(e.to_string()))?;
        Ok(Self { endpoint, client })
    }

    pub fn endpoint(&self) -> &Url {
        &self.endpoint
    }
}

impl ViewpointClassifier for RemoteClassifier {
    fn classify(
        &self,
        text: &str,
        ic: &InterventionCondition,
    ) -> Result<ViewpointDistribution, ClassifyError> {
        let response = self
            .client
            .post(self.endpoint.clone())
            .json(&RemoteRequest::new(text, ic))
            .send()
            .map_err(|e| ClassifyError::Network(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(ClassifyError::Status(status.as_u16()));
        }
        let body = response
            .text()
            .map_err(|e| ClassifyError::Network(format!("reading reply: {e}")))?;
        RemoteReply::parse(&body)
    }

    fn identity(&self) -> String {
        format!("remote({})", self.endpoint)
    }
}
