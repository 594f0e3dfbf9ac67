//! The full audit: label, score, aggregate, test, compare engines and
//! compare top-n bias with whole-list bias.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Corpus, UnknownToken};
use crate::labeling::{label_corpus, LabelError, LabelPolicy, LabelingStats, LeaningMap};
use crate::metrics::{score, Cutoff, MetricError, MetricId, Persistence};
use crate::stats::{
    mean_absolute_bias, mean_bias, one_sample_ttest, paired_ttest, pearson, StatsError, TTestResult,
};

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("engines {0:?} and {1:?} share no queries")]
    NoCommonQueries(String, String),
    #[error("engine {0:?} has no serps in the corpus")]
    UnknownEngine(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("labeling failed: {0}")]
    Label(#[from] LabelError),
    #[error("scoring failed: {0}")]
    Metric(#[from] MetricError),
    #[error("statistics failed: {0}")]
    Stats(#[from] StatsError),
}

/// The rank-weighted measures an audit can run on the top-n documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    PAtN,
    Rbp,
    DcgAtN,
}

impl FromStr for MetricKind {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p_at_n" | "p@n" | "p" => Ok(MetricKind::PAtN),
            "rbp" => Ok(MetricKind::Rbp),
            "dcg_at_n" | "dcg@n" | "dcg" => Ok(MetricKind::DcgAtN),
            _ => Err(UnknownToken {
                field: "metric",
                token: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub top_n: Cutoff,
    pub rbp_p: Persistence,
    pub metrics: Vec<MetricKind>,
    pub alpha: f64,
    pub label_policy: LabelPolicy,
    pub compare_engines: bool,
    /// Minimum share of queries whose top-n and whole-list bias agree in sign
    /// for the two to count as consistent.
    pub min_sign_agreement: f64,
    /// Minimum ratio of whole-list MAB to top-n MAB for the two to count as
    /// consistent.
    pub min_magnitude_ratio: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            top_n: Cutoff::TEN,
            rbp_p: Persistence::default(),
            metrics: vec![MetricKind::PAtN, MetricKind::Rbp, MetricKind::DcgAtN],
            alpha: 0.05,
            label_policy: LabelPolicy::Strict,
            compare_engines: true,
            min_sign_agreement: 0.8,
            min_magnitude_ratio: 0.5,
        }
    }
}

impl AuditConfig {
    /// Configured measures in lexicographic order of their names.
    pub fn metric_ids(&self) -> Vec<MetricId> {
        let mut ids: Vec<MetricId> = self
            .metrics
            .iter()
            .map(|k| match k {
                MetricKind::PAtN => MetricId::PAtN(self.top_n),
                MetricKind::Rbp => MetricId::Rbp(self.rbp_p),
                MetricKind::DcgAtN => MetricId::DcgAtN(self.top_n),
            })
            .collect();
        ids.sort_by_key(|m| m.to_string());
        ids.dedup();
        ids
    }

    fn validate(&self) -> Result<(), AuditError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(AuditError::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.metrics.is_empty() {
            return Err(AuditError::InvalidConfig("no metrics selected".into()));
        }
        Ok(())
    }
}

/// Outcome of a t-test that may be undefined for degenerate samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TestOutcome {
    Tested(TTestResult),
    /// Every sample equals `constant`.
    Degenerate {
        constant: f64,
        note: String,
    },
    InsufficientSamples {
        samples: usize,
    },
}

impl TestOutcome {
    fn from_result(r: Result<TTestResult, StatsError>) -> Result<Self, StatsError> {
        match r {
            Ok(t) => Ok(TestOutcome::Tested(t)),
            Err(StatsError::ZeroVariance { constant }) => Ok(TestOutcome::Degenerate {
                constant,
                note: if constant == 0.0 {
                    "degenerate: exactly unbiased".into()
                } else {
                    format!("degenerate: uniformly biased (every value is {constant})")
                },
            }),
            Err(StatsError::InsufficientSamples(n)) => {
                Ok(TestOutcome::InsufficientSamples { samples: n })
            }
            Err(e) => Err(e),
        }
    }

    /// True when the null of zero mean is rejected, or when every sample is
    /// the same nonzero value.
    pub fn indicates_bias(&self) -> bool {
        match self {
            TestOutcome::Tested(t) => t.reject_at_alpha,
            TestOutcome::Degenerate { constant, .. } => *constant != 0.0,
            TestOutcome::InsufficientSamples { .. } => false,
        }
    }

    pub fn as_tested(&self) -> Option<&TTestResult> {
        match self {
            TestOutcome::Tested(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for TestOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestOutcome::Tested(t) => write!(
                f,
                "t={:.4} df={} p={:.4}{}",
                t.t_statistic,
                t.degrees_of_freedom,
                t.p_value_two_tailed,
                if t.reject_at_alpha { " *" } else { "" }
            ),
            TestOutcome::Degenerate { note, .. } => f.write_str(note),
            TestOutcome::InsufficientSamples { samples } => {
                write!(f, "untestable ({samples} sample)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryScore {
    pub query_id: String,
    pub beta: f64,
}

/// Mean and mean absolute bias of one engine under one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub engine_id: String,
    pub metric: MetricId,
    pub mb: f64,
    pub mab: f64,
    pub n_queries: usize,
    pub per_query: Vec<QueryScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineAggregate {
    pub aggregate: AggregateResult,
    /// One-sample test of the signed scores against zero.
    pub mb_test: TestOutcome,
    /// One-sample test of the absolute scores against zero.
    pub mab_test: TestOutcome,
    /// Queries of the corpus this engine returned no serp for.
    pub skipped_queries: Vec<String>,
}

/// Scores every serp of one engine and runs both one-sample tests.
///
/// Serps are scored as they are; truncate the corpus first for a top-n
/// evaluation.
pub fn aggregate_engine(
    corpus: &Corpus,
    engine_id: &str,
    metric: MetricId,
    alpha: f64,
) -> Result<EngineAggregate, AuditError> {
    if !corpus.has_engine(engine_id) {
        return Err(AuditError::UnknownEngine(engine_id.to_string()));
    }
    let mut per_query = Vec::new();
    let mut skipped_queries = Vec::new();
    for q in corpus.queries() {
        match corpus.serp(engine_id, &q.query_id) {
            Some(serp) => per_query.push(QueryScore {
                query_id: q.query_id.clone(),
                beta: score(serp, metric)?.value,
            }),
            None => skipped_queries.push(q.query_id.clone()),
        }
    }
    let betas: Vec<f64> = per_query.iter().map(|s| s.beta).collect();
    let abs: Vec<f64> = betas.iter().map(|b| b.abs()).collect();
    let aggregate = AggregateResult {
        engine_id: engine_id.to_string(),
        metric,
        mb: mean_bias(&betas)?,
        mab: mean_absolute_bias(&betas)?,
        n_queries: per_query.len(),
        per_query,
    };
    Ok(EngineAggregate {
        aggregate,
        mb_test: TestOutcome::from_result(one_sample_ttest(&betas, 0.0, alpha))?,
        mab_test: TestOutcome::from_result(one_sample_ttest(&abs, 0.0, alpha))?,
        skipped_queries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineComparison {
    pub metric: MetricId,
    pub engine_a: String,
    pub engine_b: String,
    pub aligned_queries: usize,
    /// Mean of per-query `beta_a - beta_b`.
    pub mean_difference: f64,
    pub test: TestOutcome,
}

/// Paired test between two engines over the queries both answered.
pub fn compare_engines(
    a: &AggregateResult,
    b: &AggregateResult,
    alpha: f64,
) -> Result<EngineComparison, AuditError> {
    let lookup: BTreeMap<&str, f64> = b
        .per_query
        .iter()
        .map(|s| (s.query_id.as_str(), s.beta))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .per_query
        .iter()
        .filter_map(|s| lookup.get(s.query_id.as_str()).map(|&y| (s.beta, y)))
        .unzip();
    if xs.is_empty() {
        return Err(AuditError::NoCommonQueries(
            a.engine_id.clone(),
            b.engine_id.clone(),
        ));
    }
    let diffs: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| x - y).collect();
    let test = match TestOutcome::from_result(paired_ttest(&xs, &ys, alpha))? {
        TestOutcome::Degenerate { constant, .. } => TestOutcome::Degenerate {
            constant,
            note: if constant == 0.0 {
                "degenerate: engines score identically on every query".into()
            } else {
                format!("degenerate: every per-query difference is {constant}")
            },
        },
        other => other,
    };
    Ok(EngineComparison {
        metric: a.metric,
        engine_a: a.engine_id.clone(),
        engine_b: b.engine_id.clone(),
        aligned_queries: xs.len(),
        mean_difference: mean_bias(&diffs)?,
        test,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceVerdict {
    /// The top-n documents show no significant bias.
    NoTopNBias,
    /// The whole lists carry bias of matching sign and comparable size.
    ConsistentWithInput,
    /// The top-n bias is not reproduced by the whole lists.
    NotExplainedByInput,
}

impl fmt::Display for SourceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceVerdict::NoTopNBias => "no top-n bias",
            SourceVerdict::ConsistentWithInput => "consistent: bias present in input data",
            SourceVerdict::NotExplainedByInput => "inconsistent: bias not explained by input data",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceQuery {
    pub query_id: String,
    pub top_n_beta: f64,
    pub whole_list_beta: f64,
    pub whole_list_length: usize,
}

/// Top-n versus whole-list comparison for one engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceOfBias {
    pub engine_id: String,
    pub top_n_metric: MetricId,
    pub per_query: Vec<SourceQuery>,
    pub top_n_mb: f64,
    pub top_n_mab: f64,
    pub whole_list_mb: f64,
    pub whole_list_mab: f64,
    pub top_n_mab_test: TestOutcome,
    pub whole_list_mab_test: TestOutcome,
    pub pearson: Option<f64>,
    pub sign_agreement: f64,
    pub verdict: SourceVerdict,
}

/// Share of pairs whose signs agree. A zero agrees with anything. Empty
/// input gives 1.
pub fn sign_agreement(pairs: &[(f64, f64)]) -> f64 {
    if pairs.is_empty() {
        return 1.0;
    }
    let agree = pairs
        .iter()
        .filter(|(a, b)| *a == 0.0 || *b == 0.0 || (a.signum() == b.signum()))
        .count();
    agree as f64 / pairs.len() as f64
}

fn source_of_bias(
    corpus: &Corpus,
    engine_id: &str,
    config: &AuditConfig,
) -> Result<SourceOfBias, AuditError> {
    let top_metric = MetricId::PAtN(config.top_n);
    let top = aggregate_engine(corpus, engine_id, top_metric, config.alpha)?;
    let whole = aggregate_engine(corpus, engine_id, MetricId::PWholeList, config.alpha)?;
    let per_query: Vec<SourceQuery> = top
        .aggregate
        .per_query
        .iter()
        .zip(&whole.aggregate.per_query)
        .map(|(t, w)| SourceQuery {
            query_id: t.query_id.clone(),
            top_n_beta: t.beta,
            whole_list_beta: w.beta,
            whole_list_length: corpus.serp(engine_id, &t.query_id).map_or(0, |s| s.len()),
        })
        .collect();
    let pairs: Vec<(f64, f64)> = per_query
        .iter()
        .map(|q| (q.top_n_beta, q.whole_list_beta))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let agreement = sign_agreement(&pairs);
    let (top_mab, whole_mab) = (top.aggregate.mab, whole.aggregate.mab);
    let verdict = if !top.mab_test.indicates_bias() {
        SourceVerdict::NoTopNBias
    } else if agreement >= config.min_sign_agreement
        && whole_mab >= config.min_magnitude_ratio * top_mab
    {
        SourceVerdict::ConsistentWithInput
    } else {
        SourceVerdict::NotExplainedByInput
    };
    Ok(SourceOfBias {
        engine_id: engine_id.to_string(),
        top_n_metric: top_metric,
        per_query,
        top_n_mb: top.aggregate.mb,
        top_n_mab: top_mab,
        whole_list_mb: whole.aggregate.mb,
        whole_list_mab: whole_mab,
        top_n_mab_test: top.mab_test,
        whole_list_mab_test: whole.mab_test,
        pearson: pearson(&xs, &ys),
        sign_agreement: agreement,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub top_n: usize,
    pub rbp_p: f64,
    pub metrics: Vec<MetricId>,
    pub alpha: f64,
    pub label_policy: LabelPolicy,
    pub min_sign_agreement: f64,
    pub min_magnitude_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerpRef {
    pub engine_id: String,
    pub query_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineLabeling {
    pub engine_id: String,
    pub stats: LabelingStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DataQuality {
    pub skipped: Vec<SerpRef>,
    pub reranked: Vec<SerpRef>,
    pub fallback_labels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub config: ConfigSummary,
    pub engines: Vec<String>,
    pub n_queries: usize,
    pub n_documents: usize,
    pub labeling: Vec<EngineLabeling>,
    /// Ordered by (engine, metric name).
    pub engine_bias: Vec<EngineAggregate>,
    /// Ordered by (metric name, engine pair).
    pub comparisons: Vec<EngineComparison>,
    pub source_of_bias: Vec<SourceOfBias>,
    pub data_quality: DataQuality,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn engine_bias(&self, engine_id: &str, metric: MetricId) -> Option<&EngineAggregate> {
        self.engine_bias
            .iter()
            .find(|e| e.aggregate.engine_id == engine_id && e.aggregate.metric == metric)
    }

    pub fn source(&self, engine_id: &str) -> Option<&SourceOfBias> {
        self.source_of_bias
            .iter()
            .find(|s| s.engine_id == engine_id)
    }
}

const MAB_NOTE: &str = "The MAB test compares nonnegative |beta| values against a mean of zero, \
so any nonzero bias tends to reject; read it together with the MB test.";
const SOURCE_NOTE: &str =
    "Top-n versus whole-list consistency is summarised by Pearson correlation and \
sign agreement of per-query P@n and whole-list P scores; these statistics and the verdict \
thresholds are choices of this tool.";

/// Runs the full audit over a corpus.
///
/// The chart is only consulted for documents that have neither a
/// perspective nor a usable stance.
pub fn run_audit(
    corpus: &Corpus,
    chart: Option<&LeaningMap>,
    config: &AuditConfig,
) -> Result<AuditReport, AuditError> {
    config.validate()?;
    let (labeled, label_stats) = label_corpus(corpus, chart, config.label_policy)?;
    let top = labeled.truncated(config.top_n.get());
    let metrics = config.metric_ids();
    let engines: Vec<String> = labeled.engines().map(String::from).collect();

    let mut engine_bias = Vec::new();
    for engine in &engines {
        for &m in &metrics {
            engine_bias.push(aggregate_engine(&top, engine, m, config.alpha)?);
        }
    }

    let mut comparisons = Vec::new();
    if config.compare_engines {
        for &m in &metrics {
            for (i, a) in engines.iter().enumerate() {
                for b in &engines[i + 1..] {
                    let find = |e: &str| {
                        engine_bias
                            .iter()
                            .find(|x| x.aggregate.engine_id == e && x.aggregate.metric == m)
                            .map(|x| &x.aggregate)
                            .expect("aggregate computed above")
                    };
                    comparisons.push(compare_engines(find(a), find(b), config.alpha)?);
                }
            }
        }
    }

    let source_of_bias = engines
        .iter()
        .map(|e| source_of_bias(&labeled, e, config))
        .collect::<Result<Vec<_>, _>>()?;

    let mut data_quality = DataQuality::default();
    for engine in &engines {
        for q in labeled.queries() {
            if labeled.serp(engine, &q.query_id).is_none() {
                data_quality.skipped.push(SerpRef {
                    engine_id: engine.clone(),
                    query_id: q.query_id.clone(),
                });
            }
        }
    }
    data_quality.reranked = corpus
        .reranked()
        .map(|k| SerpRef {
            engine_id: k.engine_id.clone(),
            query_id: k.query_id.clone(),
        })
        .collect();
    data_quality.fallback_labels = label_stats.values().map(|s| s.fallback_count).sum();

    Ok(AuditReport {
        config: ConfigSummary {
            top_n: config.top_n.get(),
            rbp_p: config.rbp_p.get(),
            metrics,
            alpha: config.alpha,
            label_policy: config.label_policy,
            min_sign_agreement: config.min_sign_agreement,
            min_magnitude_ratio: config.min_magnitude_ratio,
        },
        engines,
        n_queries: labeled.queries().count(),
        n_documents: labeled.num_documents(),
        labeling: label_stats
            .into_iter()
            .map(|(engine_id, stats)| EngineLabeling { engine_id, stats })
            .collect(),
        engine_bias,
        comparisons,
        source_of_bias,
        data_quality,
        notes: vec![MAB_NOTE.to_string(), SOURCE_NOTE.to_string()],
    })
}
