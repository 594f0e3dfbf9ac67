//! Resolves a perspective for every document.
//!
//! Resolution order per document: a perspective already present, then the
//! stance transformed relative to the query's pro side, then weak
//! supervision from the leaning of the publishing source.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Corpus, Perspective, QueryTopic, Serp, Stance, UnknownToken, Wing};
use crate::ingestion::FeedDocument;

/// Five-point left/right rating of a news source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Leaning {
    Left,
    LeanLeft,
    Center,
    LeanRight,
    Right,
}

impl Leaning {
    pub fn mirrored(self) -> Self {
        match self {
            Leaning::Left => Leaning::Right,
            Leaning::LeanLeft => Leaning::LeanRight,
            Leaning::Center => Leaning::Center,
            Leaning::LeanRight => Leaning::LeanLeft,
            Leaning::Right => Leaning::Left,
        }
    }

    pub fn as_token(self) -> &'static str {
        match self {
            Leaning::Left => "left",
            Leaning::LeanLeft => "lean-left",
            Leaning::Center => "center",
            Leaning::LeanRight => "lean-right",
            Leaning::Right => "right",
        }
    }
}

impl fmt::Display for Leaning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_token())
    }
}

impl FromStr for Leaning {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Ok(Leaning::Left),
            "lean-left" => Ok(Leaning::LeanLeft),
            "center" => Ok(Leaning::Center),
            "lean-right" => Ok(Leaning::LeanRight),
            "right" => Ok(Leaning::Right),
            _ => Err(UnknownToken {
                field: "leaning",
                token: s.to_string(),
            }),
        }
    }
}

/// Lowercases a host or URL, drops scheme, port, path and a leading `www.`.
///
/// Returns `None` when nothing host-like remains.
pub fn normalize_domain(raw: &str) -> Option<String> {
    let raw = raw.trim();
    let without_scheme = match raw.find("://") {
        Some(i) => &raw[i + 3..],
        None => raw,
    };
    let host = without_scheme
        .split(['/', '?', '#'])
        .next()
        .unwrap_or_default();
    // userinfo@host:port
    let host = host.rsplit('@').next().unwrap_or_default();
    let host = host.split(':').next().unwrap_or_default();
    let host = host.trim_end_matches('.').to_ascii_lowercase();
    let host = host.strip_prefix("www.").unwrap_or(&host).to_string();
    if host.is_empty() || host.chars().any(|c| c.is_whitespace() || c.is_control()) {
        None
    } else {
        Some(host)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("source {0:?} listed more than once")]
    DuplicateSource(String),
    #[error("source {0:?} is not a usable hostname")]
    InvalidSource(String),
}

/// Normalized source domain to leaning.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LeaningMap {
    entries: BTreeMap<String, Leaning>,
}

impl LeaningMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: &str, leaning: Leaning) -> Result<(), ChartError> {
        let key = normalize_domain(source)
            .ok_or_else(|| ChartError::InvalidSource(source.to_string()))?;
        if self.entries.contains_key(&key) {
            return Err(ChartError::DuplicateSource(key));
        }
        self.entries.insert(key, leaning);
        Ok(())
    }

    /// Looks up a domain or URL after normalization.
    pub fn get(&self, domain: &str) -> Option<Leaning> {
        normalize_domain(domain).and_then(|k| self.entries.get(&k).copied())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Leaning)> {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

pub fn stance_to_perspective(stance: Stance, pro_side: Wing) -> Perspective {
    match stance {
        Stance::Pro => pro_side.into(),
        Stance::Against => pro_side.opposite().into(),
        Stance::NeutralOrBoth => Perspective::BothOrNeither,
    }
}

pub fn leaning_to_perspective(leaning: Leaning) -> Perspective {
    match leaning {
        Leaning::Left | Leaning::LeanLeft => Perspective::Liberal,
        Leaning::Right | Leaning::LeanRight => Perspective::Conservative,
        Leaning::Center => Perspective::BothOrNeither,
    }
}

/// Weak label for a news article from the leaning of its source.
pub fn weak_label(doc: &FeedDocument, chart: &LeaningMap) -> Option<Perspective> {
    doc.source_domain
        .as_deref()
        .and_then(|d| chart.get(d))
        .map(leaning_to_perspective)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelPolicy {
    /// Unresolvable documents are an error.
    #[default]
    Strict,
    /// Unresolvable documents become `BothOrNeither` and are counted.
    Permissive,
}

impl LabelPolicy {
    pub fn as_token(self) -> &'static str {
        match self {
            LabelPolicy::Strict => "strict",
            LabelPolicy::Permissive => "permissive",
        }
    }
}

impl FromStr for LabelPolicy {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Ok(LabelPolicy::Strict),
            "permissive" => Ok(LabelPolicy::Permissive),
            _ => Err(UnknownToken {
                field: "label-policy",
                token: s.to_string(),
            }),
        }
    }
}

/// How a document's perspective was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Preset,
    Stance,
    Chart,
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelingStats {
    pub preset_count: usize,
    pub stance_count: usize,
    pub chart_count: usize,
    pub fallback_count: usize,
    pub conservative: usize,
    pub liberal: usize,
    pub both_or_neither: usize,
}

impl LabelingStats {
    pub fn documents(&self) -> usize {
        self.preset_count + self.stance_count + self.chart_count + self.fallback_count
    }

    fn record(&mut self, path: Resolution, label: Perspective) {
        match path {
            Resolution::Preset => self.preset_count += 1,
            Resolution::Stance => self.stance_count += 1,
            Resolution::Chart => self.chart_count += 1,
            Resolution::Fallback => self.fallback_count += 1,
        }
        match label {
            Perspective::Conservative => self.conservative += 1,
            Perspective::Liberal => self.liberal += 1,
            Perspective::BothOrNeither => self.both_or_neither += 1,
        }
    }
}

impl AddAssign for LabelingStats {
    fn add_assign(&mut self, o: Self) {
        self.preset_count += o.preset_count;
        self.stance_count += o.stance_count;
        self.chart_count += o.chart_count;
        self.fallback_count += o.fallback_count;
        self.conservative += o.conservative;
        self.liberal += o.liberal;
        self.both_or_neither += o.both_or_neither;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error(
        "document {doc_id:?} (rank {rank}) in serp ({engine}, {query}) has no perspective, \
         no usable stance and no chart entry for its source"
    )]
    UnlabelableDocument {
        engine: String,
        query: String,
        doc_id: String,
        rank: u32,
    },
    #[error("serp ({engine}, {query}) has no matching query topic")]
    MissingQuery { engine: String, query: String },
}

/// Fills in every document's perspective.
///
/// A stance is only usable when the query declares its pro side. Without a
/// chart, the source lookup is skipped.
pub fn label_serp(
    serp: &Serp,
    query: &QueryTopic,
    chart: Option<&LeaningMap>,
    policy: LabelPolicy,
) -> Result<(Serp, LabelingStats), LabelError> {
    let mut stats = LabelingStats::default();
    let mut out = serp.clone();
    for doc in &mut out.documents {
        let resolved = if let Some(p) = doc.perspective {
            Some((p, Resolution::Preset))
        } else if let (Some(stance), Some(pro)) = (doc.stance, query.pro_perspective) {
            Some((stance_to_perspective(stance, pro), Resolution::Stance))
        } else {
            doc.source_domain
                .as_deref()
                .and_then(|d| chart.and_then(|c| c.get(d)))
                .map(|l| (leaning_to_perspective(l), Resolution::Chart))
        };
        let (label, path) = match (resolved, policy) {
            (Some(r), _) => r,
            (None, LabelPolicy::Permissive) => (Perspective::BothOrNeither, Resolution::Fallback),
            (None, LabelPolicy::Strict) => {
                return Err(LabelError::UnlabelableDocument {
                    engine: serp.engine_id.clone(),
                    query: serp.query_id.clone(),
                    doc_id: doc.doc_id.clone(),
                    rank: doc.rank,
                })
            }
        };
        doc.perspective = Some(label);
        stats.record(path, label);
    }
    Ok((out, stats))
}

/// Labels every serp of a corpus, returning the labeled copy and
/// per-engine statistics.
pub fn label_corpus(
    corpus: &Corpus,
    chart: Option<&LeaningMap>,
    policy: LabelPolicy,
) -> Result<(Corpus, BTreeMap<String, LabelingStats>), LabelError> {
    let mut labeled = corpus.clone();
    let mut stats: BTreeMap<String, LabelingStats> = BTreeMap::new();
    for serp in corpus.serps() {
        let query = corpus
            .query(&serp.query_id)
            .ok_or_else(|| LabelError::MissingQuery {
                engine: serp.engine_id.clone(),
                query: serp.query_id.clone(),
            })?;
        let (s, st) = label_serp(serp, query, chart, policy)?;
        *stats.entry(serp.engine_id.clone()).or_default() += st;
        labeled.replace_serp(s);
    }
    Ok((labeled, stats))
}
