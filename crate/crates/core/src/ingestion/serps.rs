//! Line-delimited JSON SERP dumps, one document per line.
//!
//! ```text
//! {"engine":"bing","query_id":"q01","query_text":"abortion","query_pro_perspective":"liberal",
//!  "rank":1,"doc_id":"https://...","title":"...","stance":"pro"}
//! ```

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    Corpus, CorpusError, Perspective, QueryTopic, RankedDocument, Serp, SerpKey, Stance,
    UnknownToken, Wing,
};

/// One document of one result page, as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerpRecord {
    pub engine: String,
    pub query_id: String,
    pub query_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_pro_perspective: Option<String>,
    pub rank: i64,
    pub doc_id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perspective: Option<String>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: query {query_id:?} has text {found:?}, previously {expected:?}")]
    ConflictingQueryText {
        line: usize,
        query_id: String,
        expected: String,
        found: String,
    },
    #[error("line {line}: query {query_id:?} has conflicting pro perspectives")]
    ConflictingQueryPerspective { line: usize, query_id: String },
    #[error("line {line}: {source}")]
    UnknownEnumToken {
        line: usize,
        #[source]
        source: UnknownToken,
    },
    #[error("line {line}: rank {rank} appears twice in serp ({engine}, {query_id})")]
    DuplicateRank {
        line: usize,
        engine: String,
        query_id: String,
        rank: u32,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

fn token<T: std::str::FromStr<Err = UnknownToken>>(
    line: usize,
    raw: Option<&str>,
) -> Result<Option<T>, IngestError> {
    raw.map(|s| s.parse())
        .transpose()
        .map_err(|source| IngestError::UnknownEnumToken { line, source })
}

/// Reads a SERP dump into a validated corpus.
///
/// Documents are grouped by (engine, query) and sorted by rank. A serp whose
/// source ranks have gaps is renumbered `1..=L` and listed in
/// [`Corpus::reranked`].
pub fn parse_serp_dataset<R: BufRead>(input: R) -> Result<Corpus, IngestError> {
    let mut queries: BTreeMap<String, QueryTopic> = BTreeMap::new();
    let mut groups: BTreeMap<SerpKey, BTreeMap<u32, (usize, RankedDocument)>> = BTreeMap::new();

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SerpRecord =
            serde_json::from_str(&line).map_err(|e| IngestError::MalformedRecord {
                line: line_no,
                reason: e.to_string(),
            })?;
        if rec.rank < 1 || rec.rank > u32::MAX as i64 {
            return Err(IngestError::MalformedRecord {
                line: line_no,
                reason: format!("rank must be a positive integer, got {}", rec.rank),
            });
        }
        if rec.engine.is_empty() || rec.query_id.is_empty() {
            return Err(IngestError::MalformedRecord {
                line: line_no,
                reason: "engine and query_id must be nonempty".into(),
            });
        }
        let pro: Option<Wing> = token(line_no, rec.query_pro_perspective.as_deref())?;
        let stance: Option<Stance> = token(line_no, rec.stance.as_deref())?;
        let perspective: Option<Perspective> = token(line_no, rec.perspective.as_deref())?;

        match queries.get_mut(&rec.query_id) {
            Some(q) => {
                if q.text != rec.query_text {
                    return Err(IngestError::ConflictingQueryText {
                        line: line_no,
                        query_id: rec.query_id,
                        expected: q.text.clone(),
                        found: rec.query_text,
                    });
                }
                match (q.pro_perspective, pro) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(IngestError::ConflictingQueryPerspective {
                            line: line_no,
                            query_id: rec.query_id,
                        })
                    }
                    (None, Some(b)) => q.pro_perspective = Some(b),
                    _ => {}
                }
            }
            None => {
                queries.insert(
                    rec.query_id.clone(),
                    QueryTopic::new(rec.query_id.clone(), rec.query_text.clone(), pro),
                );
            }
        }

        let rank = rec.rank as u32;
        let key = SerpKey::new(&rec.engine, &rec.query_id);
        let doc = RankedDocument {
            doc_id: rec.doc_id,
            rank,
            title: rec.title,
            content: rec.content,
            source_domain: rec.source_domain,
            stance,
            perspective,
        };
        let group = groups.entry(key).or_default();
        if group.contains_key(&rank) {
            return Err(IngestError::DuplicateRank {
                line: line_no,
                engine: rec.engine,
                query_id: rec.query_id,
                rank,
            });
        }
        group.insert(rank, (line_no, doc));
    }

    let mut corpus = Corpus::new();
    for q in queries.into_values() {
        corpus.add_query(q)?;
    }
    for (key, docs) in groups {
        let mut reranked = false;
        let documents: Vec<RankedDocument> = docs
            .into_values()
            .enumerate()
            .map(|(i, (_, mut d))| {
                let dense = i as u32 + 1;
                if d.rank != dense {
                    reranked = true;
                    d.rank = dense;
                }
                d
            })
            .collect();
        corpus.add_serp(Serp::new(&key.engine_id, &key.query_id, documents))?;
        if reranked {
            corpus.mark_reranked(key);
        }
    }
    Ok(corpus)
}

/// Flattens a corpus into wire records ordered by (engine, query, rank).
pub fn corpus_to_records(corpus: &Corpus) -> Vec<SerpRecord> {
    let mut out = Vec::with_capacity(corpus.num_documents());
    for serp in corpus.serps() {
        let query = corpus
            .query(&serp.query_id)
            .expect("corpus invariant: every serp has a query");
        for d in &serp.documents {
            out.push(SerpRecord {
                engine: serp.engine_id.clone(),
                query_id: serp.query_id.clone(),
                query_text: query.text.clone(),
                query_pro_perspective: query.pro_perspective.map(|w| w.as_token().to_string()),
                rank: d.rank as i64,
                doc_id: d.doc_id.clone(),
                title: d.title.clone(),
                content: d.content.clone(),
                source_domain: d.source_domain.clone(),
                stance: d.stance.map(|s| s.as_token().to_string()),
                perspective: d.perspective.map(|p| p.as_token().to_string()),
            });
        }
    }
    out
}

pub fn write_serp_dataset<W: Write>(corpus: &Corpus, mut out: W) -> io::Result<()> {
    for rec in corpus_to_records(corpus) {
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(engine: &str, q: &str, rank: i64) -> String {
        format!(
            r#"{{"engine":"{engine}","query_id":"{q}","query_text":"text {q}","rank":{rank},"doc_id":"{engine}-{q}-{rank}","title":"t"}}"#
        )
    }

    fn parse(lines: &[String]) -> Result<Corpus, IngestError> {
        parse_serp_dataset(lines.join("\n").as_bytes())
    }

    #[test]
    fn two_lines_make_one_serp() {
        let c = parse(&[line("g", "q1", 1), line("g", "q1", 2)]).unwrap();
        assert_eq!(c.serp("g", "q1").unwrap().len(), 2);
        assert_eq!(c.reranked().count(), 0);
    }

    #[test]
    fn rank_zero_is_malformed() {
        let err = parse(&[line("g", "q1", 0)]).unwrap_err();
        assert!(matches!(err, IngestError::MalformedRecord { line: 1, .. }));
    }

    #[test]
    fn gaps_are_reranked_and_recorded() {
        let c = parse(&[line("g", "q1", 3), line("g", "q1", 1)]).unwrap();
        let ranks: Vec<u32> = c
            .serp("g", "q1")
            .unwrap()
            .documents
            .iter()
            .map(|d| d.rank)
            .collect();
        assert_eq!(ranks, vec![1, 2]);
        assert_eq!(c.serp("g", "q1").unwrap().documents[1].doc_id, "g-q1-3");
        assert_eq!(
            c.reranked().collect::<Vec<_>>(),
            vec![&SerpKey::new("g", "q1")]
        );
    }

    #[test]
    fn conflicting_query_text() {
        let bad = line("b", "q1", 1).replace("text q1", "other");
        let err = parse(&[line("g", "q1", 1), bad]).unwrap_err();
        assert!(matches!(
            err,
            IngestError::ConflictingQueryText { line: 2, .. }
        ));
    }

    #[test]
    fn unknown_tokens() {
        let l = line("g", "q1", 1).replace(r#""title":"t""#, r#""title":"t","stance":"maybe""#);
        let err = parse(&[l]).unwrap_err();
        assert!(matches!(
            err,
            IngestError::UnknownEnumToken { line: 1, ref source } if source.field == "stance"
        ));
        let l = line("g", "q1", 1).replace(
            r#""title":"t""#,
            r#""title":"t","query_pro_perspective":"both-neither""#,
        );
        assert!(matches!(
            parse(&[l]),
            Err(IngestError::UnknownEnumToken { .. })
        ));
    }

    #[test]
    fn duplicate_rank_in_source() {
        let err = parse(&[line("g", "q1", 2), line("g", "q1", 2)]).unwrap_err();
        assert!(matches!(err, IngestError::DuplicateRank { rank: 2, .. }));
    }

    #[test]
    fn not_json() {
        let err = parse_serp_dataset("\n{oops\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::MalformedRecord { line: 2, .. }));
    }

    #[test]
    fn pro_side_may_be_given_on_any_line() {
        let with = line("g", "q1", 2).replace(
            r#""title":"t""#,
            r#""title":"t","query_pro_perspective":"liberal""#,
        );
        let c = parse(&[line("g", "q1", 1), with]).unwrap();
        assert_eq!(c.query("q1").unwrap().pro_perspective, Some(Wing::Liberal));
    }
}
