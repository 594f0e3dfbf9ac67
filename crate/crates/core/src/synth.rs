//! Synthetic result pages with planted bias.
//!
//! Every rank is labeled independently: conservative with probability
//! `q_c`, liberal with `q_l`, both-or-neither otherwise. The label at a rank
//! is a pure function of `(seed, engine, query, rank)`, so any document can
//! be regenerated in isolation.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::domain::{Corpus, Perspective, QueryTopic, RankedDocument, Serp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid planted-bias spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedBiasSpec {
    pub q_c: f64,
    pub q_l: f64,
    pub length: usize,
    pub seed: u64,
}

impl PlantedBiasSpec {
    pub fn new(q_c: f64, q_l: f64, length: usize, seed: u64) -> Result<Self, SynthError> {
        let spec = Self {
            q_c,
            q_l,
            length,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.q_c) || !unit(self.q_l) {
            return Err(SynthError::InvalidSpec(format!(
                "probabilities must lie in [0, 1], got q_c={} q_l={}",
                self.q_c, self.q_l
            )));
        }
        if self.q_c + self.q_l > 1.0 + 1e-12 {
            return Err(SynthError::InvalidSpec(format!(
                "q_c + q_l must not exceed 1, got {}",
                self.q_c + self.q_l
            )));
        }
        if self.length == 0 {
            return Err(SynthError::InvalidSpec("length must be at least 1".into()));
        }
        Ok(())
    }

    /// The same spec with the two wings' probabilities exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            q_c: self.q_l,
            q_l: self.q_c,
            ..*self
        }
    }
}

fn serp_key(seed: u64, engine_id: &str, query_id: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((engine_id.len() as u64).to_le_bytes());
    h.update(engine_id.as_bytes());
    h.update((query_id.len() as u64).to_le_bytes());
    h.update(query_id.as_bytes());
    h.finalize().into()
}

/// Label of one rank under the planted model.
pub fn planted_label(
    spec: &PlantedBiasSpec,
    engine_id: &str,
    query_id: &str,
    rank: u32,
) -> Perspective {
    label_from_key(spec, serp_key(spec.seed, engine_id, query_id), rank)
}

fn label_from_key(spec: &PlantedBiasSpec, key: [u8; 32], rank: u32) -> Perspective {
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(rank as u64);
    let u: f64 = rng.random();
    if u < spec.q_c {
        Perspective::Conservative
    } else if u < spec.q_c + spec.q_l {
        Perspective::Liberal
    } else {
        Perspective::BothOrNeither
    }
}

pub fn generate_serp(
    spec: &PlantedBiasSpec,
    engine_id: &str,
    query_id: &str,
) -> Result<Serp, SynthError> {
    spec.validate()?;
    let key = serp_key(spec.seed, engine_id, query_id);
    let documents = (1..=spec.length as u32)
        .map(|rank| {
            let mut d = RankedDocument::labeled(
                format!("{engine_id}/{query_id}/{rank}"),
                rank,
                label_from_key(spec, key, rank),
            );
            d.title = format!("synthetic document {rank}");
            d
        })
        .collect();
    Ok(Serp::new(engine_id, query_id, documents))
}

/// Query ids `q001`, `q002`, ... in lexicographic order.
pub fn synthetic_query_ids(count: usize) -> Vec<String> {
    let width = count.to_string().len().max(3);
    (1..=count).map(|i| format!("q{i:0width$}")).collect()
}

/// A corpus with `queries` synthetic queries and one serp per
/// (engine, query), each engine following its own spec.
pub fn generate_corpus(
    engines: &[(&str, PlantedBiasSpec)],
    queries: usize,
) -> Result<Corpus, SynthError> {
    let mut corpus = Corpus::new();
    let ids = synthetic_query_ids(queries);
    for (i, id) in ids.iter().enumerate() {
        corpus
            .add_query(QueryTopic::new(
                id,
                format!("synthetic query {}", i + 1),
                None,
            ))
            .expect("generated query ids are unique");
    }
    for (engine, spec) in engines {
        for id in &ids {
            let serp = generate_serp(spec, engine, id)?;
            corpus
                .add_serp(serp)
                .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
        }
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{bias_p_at_n, Cutoff, MetricId, Persistence};

    #[test]
    fn all_conservative_when_q_c_is_one() {
        let spec = PlantedBiasSpec::new(1.0, 0.0, 10, 7).unwrap();
        let s = generate_serp(&spec, "e", "q").unwrap();
        let labels = s.labels().unwrap();
        assert_eq!(bias_p_at_n(&labels, Cutoff::TEN), 1.0);
    }

    #[test]
    fn all_neutral_when_both_zero() {
        let spec = PlantedBiasSpec::new(0.0, 0.0, 5, 7).unwrap();
        let labels = generate_serp(&spec, "e", "q").unwrap().labels().unwrap();
        for m in [
            MetricId::PAtN(Cutoff::TEN),
            MetricId::Rbp(Persistence::default()),
            MetricId::DcgAtN(Cutoff::TEN),
            MetricId::PWholeList,
        ] {
            assert_eq!(m.evaluate(&labels), 0.0);
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(PlantedBiasSpec::new(0.7, 0.4, 10, 0).is_err());
        assert!(PlantedBiasSpec::new(-0.1, 0.4, 10, 0).is_err());
        assert!(PlantedBiasSpec::new(0.1, 0.4, 0, 0).is_err());
        assert!(PlantedBiasSpec::new(f64::NAN, 0.4, 3, 0).is_err());
    }

    #[test]
    fn deterministic_and_reproducible_per_rank() {
        let spec = PlantedBiasSpec::new(0.4, 0.4, 30, 99).unwrap();
        let a = generate_serp(&spec, "bing", "q7").unwrap();
        assert_eq!(a, generate_serp(&spec, "bing", "q7").unwrap());
        for d in &a.documents {
            assert_eq!(
                d.perspective,
                Some(planted_label(&spec, "bing", "q7", d.rank))
            );
        }
        assert_ne!(
            a.labels().unwrap(),
            generate_serp(&spec, "google", "q7")
                .unwrap()
                .labels()
                .unwrap()
        );
    }

    #[test]
    fn query_ids_sort_lexicographically() {
        let ids = synthetic_query_ids(57);
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert_eq!(ids[0], "q001");
    }
}
