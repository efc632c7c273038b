//! Viewpoint vocabularies: the six annotator labels, the four grouped
//! classes and the three-way classifier output space.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;

/// Label assigned by a human annotator to a document or a caption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewpointLabel {
    Effective,
    PotentiallyEffective,
    Inconclusive,
    PotentiallyIneffective,
    Ineffective,
    NoViewpoint,
}

impl ViewpointLabel {
    pub const ALL: [ViewpointLabel; 6] = [
        ViewpointLabel::Effective,
        ViewpointLabel::PotentiallyEffective,
        ViewpointLabel::Inconclusive,
        ViewpointLabel::PotentiallyIneffective,
        ViewpointLabel::Ineffective,
        ViewpointLabel::NoViewpoint,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViewpointLabel::Effective => "effective",
            ViewpointLabel::PotentiallyEffective => "potentially_effective",
            ViewpointLabel::Inconclusive => "inconclusive",
            ViewpointLabel::PotentiallyIneffective => "potentially_ineffective",
            ViewpointLabel::Ineffective => "ineffective",
            ViewpointLabel::NoViewpoint => "no_viewpoint",
        }
    }

    /// Position on the 5-point effectiveness scale (1 = ineffective,
    /// 5 = effective). `None` for `no_viewpoint`.
    pub fn likert(self) -> Option<u8> {
        match self {
            ViewpointLabel::Ineffective => Some(1),
            ViewpointLabel::PotentiallyIneffective => Some(2),
            ViewpointLabel::Inconclusive => Some(3),
            ViewpointLabel::PotentiallyEffective => Some(4),
            ViewpointLabel::Effective => Some(5),
            ViewpointLabel::NoViewpoint => None,
        }
    }
}

impl fmt::Display for ViewpointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ViewpointLabel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ViewpointLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| CorpusError::UnknownLabel {
                token: s.to_string(),
                line: None,
            })
    }
}

/// Four-level rating obtained by folding the "potentially" labels into
/// their definite counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewpointClass {
    Effective,
    Inconclusive,
    Ineffective,
    NoViewpoint,
}

impl ViewpointClass {
    pub const ALL: [ViewpointClass; 4] = [
        ViewpointClass::Effective,
        ViewpointClass::Inconclusive,
        ViewpointClass::Ineffective,
        ViewpointClass::NoViewpoint,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViewpointClass::Effective => "effective",
            ViewpointClass::Inconclusive => "inconclusive",
            ViewpointClass::Ineffective => "ineffective",
            ViewpointClass::NoViewpoint => "no_viewpoint",
        }
    }

    /// The classifier-space viewpoint, or `None` for `no_viewpoint`.
    pub fn viewpoint(self) -> Option<Viewpoint> {
        match self {
            ViewpointClass::Effective => Some(Viewpoint::Effective),
            ViewpointClass::Inconclusive => Some(Viewpoint::Inconclusive),
            ViewpointClass::Ineffective => Some(Viewpoint::Ineffective),
            ViewpointClass::NoViewpoint => None,
        }
    }
}

impl fmt::Display for ViewpointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Folds `potentially_effective` into `effective` and
/// `potentially_ineffective` into `ineffective`.
pub fn regroup(label: ViewpointLabel) -> ViewpointClass {
    match label {
        ViewpointLabel::Effective | ViewpointLabel::PotentiallyEffective => {
            ViewpointClass::Effective
        }
        ViewpointLabel::Inconclusive => ViewpointClass::Inconclusive,
        ViewpointLabel::Ineffective | ViewpointLabel::PotentiallyIneffective => {
            ViewpointClass::Ineffective
        }
        ViewpointLabel::NoViewpoint => ViewpointClass::NoViewpoint,
    }
}

impl From<ViewpointClass> for ViewpointLabel {
    fn from(class: ViewpointClass) -> Self {
        match class {
            ViewpointClass::Effective => ViewpointLabel::Effective,
            ViewpointClass::Inconclusive => ViewpointLabel::Inconclusive,
            ViewpointClass::Ineffective => ViewpointLabel::Ineffective,
            ViewpointClass::NoViewpoint => ViewpointLabel::NoViewpoint,
        }
    }
}

/// Classifier output space. Declaration order is the argmax tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Viewpoint {
    Effective,
    Inconclusive,
    Ineffective,
}

impl Viewpoint {
    pub const ALL: [Viewpoint; 3] = [
        Viewpoint::Effective,
        Viewpoint::Inconclusive,
        Viewpoint::Ineffective,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Viewpoint::Effective => "effective",
            Viewpoint::Inconclusive => "inconclusive",
            Viewpoint::Ineffective => "ineffective",
        }
    }

    pub fn from_str_opt(s: &str) -> Option<Viewpoint> {
        Viewpoint::ALL.into_iter().find(|v| v.as_str() == s)
    }
}

impl fmt::Display for Viewpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<Viewpoint> for ViewpointClass {
    fn from(v: Viewpoint) -> Self {
        match v {
            Viewpoint::Effective => ViewpointClass::Effective,
            Viewpoint::Inconclusive => ViewpointClass::Inconclusive,
            Viewpoint::Ineffective => ViewpointClass::Ineffective,
        }
    }
}
