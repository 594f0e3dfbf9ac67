//! Rank-aware bias measures over perspective-labeled result lists.
//!
//! Each measure is an IR utility measure evaluated once for the conservative
//! view and once for the liberal view; the bias is their difference. A
//! positive value leans conservative, a negative value leans liberal.
//! `BothOrNeither` documents occupy rank positions but never contribute.
//!
//! | Measure | Discount at rank i | Bound on \|bias\| |
//! |---------|--------------------|-----------------|
//! | P@n     | 1/n for i ≤ n      | 1               |
//! | RBP(p)  | (1-p)·p^(i-1)      | 1 - p^L         |
//! | DCG@n   | 1/log2(i+1), i ≤ n | Σ 1/log2(i+1)   |

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::domain::{Perspective, Serp, SerpError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("unrecognised metric {0:?}")]
    UnknownMetric(String),
    #[error(transparent)]
    Serp(#[from] SerpError),
}

/// Rank cutoff `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cutoff(NonZeroUsize);

impl Cutoff {
    pub const TEN: Cutoff = Cutoff(NonZeroUsize::new(10).unwrap());

    pub fn new(n: usize) -> Result<Self, MetricError> {
        NonZeroUsize::new(n)
            .map(Cutoff)
            .ok_or_else(|| MetricError::ParameterOutOfRange("cutoff n must be at least 1".into()))
    }

    pub fn get(self) -> usize {
        self.0.get()
    }
}

/// RBP persistence `p ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Persistence(f64);

impl Persistence {
    pub fn new(p: f64) -> Result<Self, MetricError> {
        if p > 0.0 && p < 1.0 {
            Ok(Persistence(p))
        } else {
            Err(MetricError::ParameterOutOfRange(format!(
                "RBP persistence must lie in (0, 1), got {p}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Persistence {
    fn default() -> Self {
        Persistence(0.8)
    }
}

fn count_view(labels: &[Perspective], view: Perspective, n: usize) -> usize {
    labels.iter().take(n).filter(|&&l| l == view).count()
}

/// Fraction of the first `n` positions holding `view`. The denominator is
/// `n` even when the list is shorter.
pub fn view_p_at_n(labels: &[Perspective], view: Perspective, n: Cutoff) -> f64 {
    count_view(labels, view, n.get()) as f64 / n.get() as f64
}

pub fn bias_p_at_n(labels: &[Perspective], n: Cutoff) -> f64 {
    view_p_at_n(labels, Perspective::Conservative, n) - view_p_at_n(labels, Perspective::Liberal, n)
}

/// Rank-biased precision of one view over the whole retrieved list.
pub fn view_rbp(labels: &[Perspective], view: Perspective, p: Persistence) -> f64 {
    let p = p.get();
    let mut weight = 1.0;
    let mut sum = 0.0;
    for &l in labels {
        if l == view {
            sum += weight;
        }
        weight *= p;
    }
    (1.0 - p) * sum
}

pub fn bias_rbp(labels: &[Perspective], p: Persistence) -> f64 {
    view_rbp(labels, Perspective::Conservative, p) - view_rbp(labels, Perspective::Liberal, p)
}

/// Logarithmic rank discount, `1 / log2(rank + 1)` for 1-based ranks.
pub fn dcg_discount(rank: usize) -> f64 {
    1.0 / ((rank + 1) as f64).log2()
}

pub fn view_dcg_at_n(labels: &[Perspective], view: Perspective, n: Cutoff) -> f64 {
    labels
        .iter()
        .take(n.get())
        .enumerate()
        .filter(|(_, &l)| l == view)
        .map(|(i, _)| dcg_discount(i + 1))
        .sum()
}

pub fn bias_dcg_at_n(labels: &[Perspective], n: Cutoff) -> f64 {
    view_dcg_at_n(labels, Perspective::Conservative, n)
        - view_dcg_at_n(labels, Perspective::Liberal, n)
}

/// Rank-free proportion difference over the entire list. Empty lists score 0.
pub fn bias_whole_list(labels: &[Perspective]) -> f64 {
    match Cutoff::new(labels.len()) {
        Ok(n) => bias_p_at_n(labels, n),
        Err(_) => 0.0,
    }
}

/// Largest attainable `|bias_dcg_at_n|`.
pub fn dcg_bound(n: Cutoff) -> f64 {
    (1..=n.get()).map(dcg_discount).sum()
}

/// Largest attainable `|bias_rbp|` on a list of `len` documents.
pub fn rbp_bound(p: Persistence, len: usize) -> f64 {
    1.0 - p.get().powi(len as i32)
}

/// A bias measure together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricId {
    PAtN(Cutoff),
    Rbp(Persistence),
    DcgAtN(Cutoff),
    PWholeList,
}

impl MetricId {
    pub fn evaluate(&self, labels: &[Perspective]) -> f64 {
        match *self {
            MetricId::PAtN(n) => bias_p_at_n(labels, n),
            MetricId::Rbp(p) => bias_rbp(labels, p),
            MetricId::DcgAtN(n) => bias_dcg_at_n(labels, n),
            MetricId::PWholeList => bias_whole_list(labels),
        }
    }

    /// Upper bound on `|value|` for a list of `len` documents.
    pub fn bound(&self, len: usize) -> f64 {
        match *self {
            MetricId::PAtN(_) | MetricId::PWholeList => 1.0,
            MetricId::Rbp(p) => rbp_bound(p, len),
            MetricId::DcgAtN(n) => dcg_bound(n),
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricId::PAtN(n) => write!(f, "p@{}", n.get()),
            MetricId::Rbp(p) => write!(f, "rbp({})", p.get()),
            MetricId::DcgAtN(n) => write!(f, "dcg@{}", n.get()),
            MetricId::PWholeList => f.write_str("p@all"),
        }
    }
}

impl FromStr for MetricId {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let unknown = || MetricError::UnknownMetric(s.clone());
        if s == "p@all" {
            return Ok(MetricId::PWholeList);
        }
        if let Some(n) = s.strip_prefix("p@") {
            return Cutoff::new(n.parse().map_err(|_| unknown())?).map(MetricId::PAtN);
        }
        if let Some(n) = s.strip_prefix("dcg@") {
            return Cutoff::new(n.parse().map_err(|_| unknown())?).map(MetricId::DcgAtN);
        }
        if let Some(p) = s.strip_prefix("rbp(").and_then(|r| r.strip_suffix(')')) {
            return Persistence::new(p.parse().map_err(|_| unknown())?).map(MetricId::Rbp);
        }
        Err(unknown())
    }
}

impl Serialize for MetricId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetricId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bias of one serp under one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasScore {
    pub engine_id: String,
    pub query_id: String,
    pub metric: MetricId,
    pub value: f64,
}

/// Scores a fully labeled serp.
pub fn score(serp: &Serp, metric: MetricId) -> Result<BiasScore, MetricError> {
    let labels = serp.labels()?;
    Ok(BiasScore {
        engine_id: serp.engine_id.clone(),
        query_id: serp.query_id.clone(),
        metric,
        value: metric.evaluate(&labels),
    })
}
