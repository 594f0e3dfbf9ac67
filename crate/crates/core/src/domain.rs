//! Shared data model: perspectives, stances, queries, ranked documents,
//! result pages and the corpus that holds them.
//!
//! Everything here is immutable once built. Operations return new values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Political perspective of a document relative to a query topic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Perspective {
    Conservative,
    Liberal,
    #[serde(rename = "both-neither")]
    BothOrNeither,
}

impl Perspective {
    pub const ALL: [Perspective; 3] = [
        Perspective::Conservative,
        Perspective::Liberal,
        Perspective::BothOrNeither,
    ];

    /// Swaps the two wings and leaves `BothOrNeither` in place.
    pub fn mirrored(self) -> Self {
        match self {
            Perspective::Conservative => Perspective::Liberal,
            Perspective::Liberal => Perspective::Conservative,
            Perspective::BothOrNeither => Perspective::BothOrNeither,
        }
    }

    pub fn as_token(self) -> &'static str {
        match self {
            Perspective::Conservative => "conservative",
            Perspective::Liberal => "liberal",
            Perspective::BothOrNeither => "both-neither",
        }
    }

    /// +1 for conservative, -1 for liberal, 0 otherwise.
    pub fn signed_indicator(self) -> f64 {
        match self {
            Perspective::Conservative => 1.0,
            Perspective::Liberal => -1.0,
            Perspective::BothOrNeither => 0.0,
        }
    }
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_token())
    }
}

impl FromStr for Perspective {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conservative" => Ok(Perspective::Conservative),
            "liberal" => Ok(Perspective::Liberal),
            "both-neither" => Ok(Perspective::BothOrNeither),
            _ => Err(UnknownToken::new("perspective", s)),
        }
    }
}

/// One side of the political spectrum. A controversial query's "pro"
/// side always maps to one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Wing {
    Conservative,
    Liberal,
}

impl Wing {
    pub fn opposite(self) -> Self {
        match self {
            Wing::Conservative => Wing::Liberal,
            Wing::Liberal => Wing::Conservative,
        }
    }

    pub fn as_token(self) -> &'static str {
        match self {
            Wing::Conservative => "conservative",
            Wing::Liberal => "liberal",
        }
    }
}

impl From<Wing> for Perspective {
    fn from(w: Wing) -> Self {
        match w {
            Wing::Conservative => Perspective::Conservative,
            Wing::Liberal => Perspective::Liberal,
        }
    }
}

impl FromStr for Wing {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conservative" => Ok(Wing::Conservative),
            "liberal" => Ok(Wing::Liberal),
            _ => Err(UnknownToken::new("query_pro_perspective", s)),
        }
    }
}

/// Stance of a document toward the proposition behind a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stance {
    Pro,
    Against,
    NeutralOrBoth,
}

impl Stance {
    pub fn as_token(self) -> &'static str {
        match self {
            Stance::Pro => "pro",
            Stance::Against => "against",
            Stance::NeutralOrBoth => "neutral",
        }
    }
}

impl FromStr for Stance {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pro" => Ok(Stance::Pro),
            "against" => Ok(Stance::Against),
            "neutral" => Ok(Stance::NeutralOrBoth),
            _ => Err(UnknownToken::new("stance", s)),
        }
    }
}

/// A token outside the documented set for an enumerated field.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {field} token {token:?}")]
pub struct UnknownToken {
    pub field: &'static str,
    pub token: String,
}

impl UnknownToken {
    fn new(field: &'static str, token: &str) -> Self {
        Self {
            field,
            token: token.to_string(),
        }
    }
}

/// A controversial query topic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryTopic {
    pub query_id: String,
    pub text: String,
    /// The wing a "pro" stance supports. Needed only when documents carry
    /// stance labels that must be transformed.
    pub pro_perspective: Option<Wing>,
}

impl QueryTopic {
    pub fn new(query_id: impl Into<String>, text: impl Into<String>, pro: Option<Wing>) -> Self {
        Self {
            query_id: query_id.into(),
            text: text.into(),
            pro_perspective: pro,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankedDocument {
    pub doc_id: String,
    /// 1-based position in the result page.
    pub rank: u32,
    pub title: String,
    pub content: Option<String>,
    pub source_domain: Option<String>,
    pub stance: Option<Stance>,
    pub perspective: Option<Perspective>,
}

impl RankedDocument {
    /// A document that only carries a perspective label.
    pub fn labeled(doc_id: impl Into<String>, rank: u32, perspective: Perspective) -> Self {
        Self {
            doc_id: doc_id.into(),
            rank,
            perspective: Some(perspective),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerpError {
    #[error("rank {rank} appears more than once in serp ({engine}, {query})")]
    DuplicateRank {
        engine: String,
        query: String,
        rank: u32,
    },
    #[error("ranks of serp ({engine}, {query}) are not exactly 1..{len}")]
    NonContiguousRanks {
        engine: String,
        query: String,
        len: usize,
    },
    #[error("document {doc_id:?} at rank {rank} of serp ({engine}, {query}) has no perspective")]
    UnlabeledDocument {
        engine: String,
        query: String,
        doc_id: String,
        rank: u32,
    },
}

/// The ordered result list one engine returned for one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Serp {
    pub engine_id: String,
    pub query_id: String,
    pub documents: Vec<RankedDocument>,
}

impl Serp {
    pub fn new(
        engine_id: impl Into<String>,
        query_id: impl Into<String>,
        documents: Vec<RankedDocument>,
    ) -> Self {
        Self {
            engine_id: engine_id.into(),
            query_id: query_id.into(),
            documents,
        }
    }

    /// Builds a validated serp from labels listed in rank order.
    pub fn from_labels(
        engine_id: impl Into<String>,
        query_id: impl Into<String>,
        labels: &[Perspective],
    ) -> Self {
        let documents = labels
            .iter()
            .enumerate()
            .map(|(i, &p)| RankedDocument::labeled(format!("d{}", i + 1), i as u32 + 1, p))
            .collect();
        Self::new(engine_id, query_id, documents)
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn key(&self) -> SerpKey {
        SerpKey::new(&self.engine_id, &self.query_id)
    }

    /// Checks that ranks are exactly `1..=L` in ascending order.
    ///
    /// An empty serp is valid.
    pub fn validate(self) -> Result<Self, SerpError> {
        let mut seen = BTreeSet::new();
        for doc in &self.documents {
            if !seen.insert(doc.rank) {
                return Err(SerpError::DuplicateRank {
                    engine: self.engine_id.clone(),
                    query: self.query_id.clone(),
                    rank: doc.rank,
                });
            }
        }
        let contiguous = self
            .documents
            .iter()
            .enumerate()
            .all(|(i, d)| d.rank as usize == i + 1);
        if !contiguous {
            return Err(SerpError::NonContiguousRanks {
                engine: self.engine_id.clone(),
                query: self.query_id.clone(),
                len: self.documents.len(),
            });
        }
        Ok(self)
    }

    /// Keeps the documents ranked `<= n`, in order.
    pub fn truncate(&self, n: usize) -> Serp {
        Serp {
            engine_id: self.engine_id.clone(),
            query_id: self.query_id.clone(),
            documents: self.documents.iter().take(n).cloned().collect(),
        }
    }

    /// Perspective labels in rank order. Fails on the first unlabeled document.
    pub fn labels(&self) -> Result<Vec<Perspective>, SerpError> {
        self.documents
            .iter()
            .map(|d| {
                d.perspective.ok_or_else(|| SerpError::UnlabeledDocument {
                    engine: self.engine_id.clone(),
                    query: self.query_id.clone(),
                    doc_id: d.doc_id.clone(),
                    rank: d.rank,
                })
            })
            .collect()
    }
}

/// Identifies a serp within a corpus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SerpKey {
    pub engine_id: String,
    pub query_id: String,
}

impl SerpKey {
    pub fn new(engine_id: &str, query_id: &str) -> Self {
        Self {
            engine_id: engine_id.to_string(),
            query_id: query_id.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("serp ({engine}, {query}) references unknown query")]
    UnknownQuery { engine: String, query: String },
    #[error("serp ({engine}, {query}) inserted twice")]
    DuplicateSerp { engine: String, query: String },
    #[error("query {0:?} inserted twice")]
    DuplicateQuery(String),
    #[error(transparent)]
    Serp(#[from] SerpError),
}

/// All result pages across engines and queries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    engines: BTreeSet<String>,
    queries: BTreeMap<String, QueryTopic>,
    serps: BTreeMap<SerpKey, Serp>,
    reranked: BTreeSet<SerpKey>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_query(&mut self, query: QueryTopic) -> Result<(), CorpusError> {
        if self.queries.contains_key(&query.query_id) {
            return Err(CorpusError::DuplicateQuery(query.query_id));
        }
        self.queries.insert(query.query_id.clone(), query);
        Ok(())
    }

    /// Validates and inserts a serp. Its query must already be present.
    pub fn add_serp(&mut self, serp: Serp) -> Result<(), CorpusError> {
        if !self.queries.contains_key(&serp.query_id) {
            return Err(CorpusError::UnknownQuery {
                engine: serp.engine_id,
                query: serp.query_id,
            });
        }
        let serp = serp.validate()?;
        let key = serp.key();
        if self.serps.contains_key(&key) {
            return Err(CorpusError::DuplicateSerp {
                engine: key.engine_id,
                query: key.query_id,
            });
        }
        self.engines.insert(serp.engine_id.clone());
        self.serps.insert(key, serp);
        Ok(())
    }

    pub(crate) fn mark_reranked(&mut self, key: SerpKey) {
        self.reranked.insert(key);
    }

    /// Serps whose source ranks had gaps and were renumbered at ingestion.
    pub fn reranked(&self) -> impl Iterator<Item = &SerpKey> {
        self.reranked.iter()
    }

    pub fn engines(&self) -> impl Iterator<Item = &str> {
        self.engines.iter().map(String::as_str)
    }

    pub fn queries(&self) -> impl Iterator<Item = &QueryTopic> {
        self.queries.values()
    }

    pub fn query(&self, query_id: &str) -> Option<&QueryTopic> {
        self.queries.get(query_id)
    }

    pub fn serp(&self, engine_id: &str, query_id: &str) -> Option<&Serp> {
        self.serps.get(&SerpKey::new(engine_id, query_id))
    }

    /// All serps ordered by (engine, query).
    pub fn serps(&self) -> impl Iterator<Item = &Serp> {
        self.serps.values()
    }

    pub fn serps_for_engine<'a>(&'a self, engine_id: &'a str) -> impl Iterator<Item = &'a Serp> {
        self.serps
            .values()
            .filter(move |s| s.engine_id == engine_id)
    }

    pub fn has_engine(&self, engine_id: &str) -> bool {
        self.engines.contains(engine_id)
    }

    /// Query ids for which both engines have a serp, in lexicographic order.
    pub fn common_queries(&self, a: &str, b: &str) -> Vec<String> {
        self.queries
            .keys()
            .filter(|q| self.serp(a, q).is_some() && self.serp(b, q).is_some())
            .cloned()
            .collect()
    }

    /// Replaces the documents of an existing serp, keeping its key.
    pub(crate) fn replace_serp(&mut self, serp: Serp) {
        self.serps.insert(serp.key(), serp);
    }

    pub fn num_documents(&self) -> usize {
        self.serps.values().map(Serp::len).sum()
    }

    /// Copy of the corpus with every serp cut to its top `n` documents.
    pub fn truncated(&self, n: usize) -> Corpus {
        let mut out = self.clone();
        for serp in out.serps.values_mut() {
            serp.documents.truncate(n);
        }
        out
    }

    /// Copy of the corpus without one engine's serps.
    pub fn without_engine(&self, engine_id: &str) -> Corpus {
        let mut out = self.clone();
        out.engines.remove(engine_id);
        out.serps.retain(|k, _| k.engine_id != engine_id);
        out.reranked.retain(|k| k.engine_id != engine_id);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn serp_with_ranks(ranks: &[u32]) -> Serp {
        let docs = ranks
            .iter()
            .map(|&r| RankedDocument::labeled(format!("d{r}"), r, Perspective::BothOrNeither))
            .collect();
        Serp::new("e", "q", docs)
    }

    #[test]
    fn contiguous_ranks_validate() {
        let s = serp_with_ranks(&[1, 2, 3]);
        assert_eq!(s.clone().validate().unwrap(), s);
    }

    #[test]
    fn duplicate_rank_rejected() {
        let err = serp_with_ranks(&[1, 1, 2]).validate().unwrap_err();
        assert!(matches!(err, SerpError::DuplicateRank { rank: 1, .. }));
    }

    #[test]
    fn gap_rejected() {
        let err = serp_with_ranks(&[1, 3]).validate().unwrap_err();
        assert!(matches!(err, SerpError::NonContiguousRanks { len: 2, .. }));
    }

    #[test]
    fn unsorted_rejected() {
        assert!(serp_with_ranks(&[2, 1]).validate().is_err());
    }

    #[test]
    fn empty_serp_is_valid() {
        assert!(serp_with_ranks(&[]).validate().is_ok());
    }

    #[test]
    fn truncate_lengths() {
        let long = serp_with_ranks(&(1..=25).collect::<Vec<_>>());
        assert_eq!(long.truncate(10).len(), 10);
        let short = serp_with_ranks(&[1, 2, 3, 4]);
        assert_eq!(short.truncate(10).len(), 4);
        assert!(serp_with_ranks(&[]).truncate(10).is_empty());
    }

    #[test]
    fn token_parsing() {
        assert_eq!(
            "Conservative".parse::<Perspective>().unwrap(),
            Perspective::Conservative
        );
        assert_eq!(
            "both-neither".parse::<Perspective>().unwrap(),
            Perspective::BothOrNeither
        );
        assert!("neutral".parse::<Perspective>().is_err());
        assert_eq!("neutral".parse::<Stance>().unwrap(), Stance::NeutralOrBoth);
        assert!("both-neither".parse::<Wing>().is_err());
    }

    #[test]
    fn corpus_rejects_serp_for_unknown_query() {
        let mut c = Corpus::new();
        let err = c.add_serp(serp_with_ranks(&[1])).unwrap_err();
        assert!(matches!(err, CorpusError::UnknownQuery { .. }));
    }

    #[test]
    fn common_queries_only_pairs_present_on_both() {
        let mut c = Corpus::new();
        for q in ["q1", "q2", "q3"] {
            c.add_query(QueryTopic::new(q, q, None)).unwrap();
        }
        for (e, q) in [("a", "q1"), ("a", "q2"), ("b", "q2"), ("b", "q3")] {
            c.add_serp(Serp::new(e, q, vec![])).unwrap();
        }
        assert_eq!(c.common_queries("a", "b"), vec!["q2".to_string()]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn validate_is_idempotent(len in 0usize..30) {
                let s = serp_with_ranks(&(1..=len as u32).collect::<Vec<_>>());
                let once = s.validate().unwrap();
                prop_assert_eq!(once.clone().validate().unwrap(), once);
            }

            #[test]
            fn truncate_is_an_idempotent_prefix(len in 0usize..40, n in 1usize..50) {
                let s = serp_with_ranks(&(1..=len as u32).collect::<Vec<_>>());
                let t = s.truncate(n);
                prop_assert_eq!(t.truncate(n), t.clone());
                prop_assert_eq!(t.len(), n.min(len));
                let ranks: Vec<u32> = t.documents.iter().map(|d| d.rank).collect();
                let src: Vec<u32> = s.documents.iter().map(|d| d.rank).collect();
                prop_assert_eq!(&src[..ranks.len()], &ranks[..]);
            }
        }
    }
}
