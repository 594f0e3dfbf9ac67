//! Political bias auditing for search engine result pages.
//!
//! Documents in each result page carry a political perspective
//! (conservative, liberal, or both/neither). Bias of a page is the
//! conservative utility minus the liberal utility under an IR measure:
//!
//! | Measure | Function | Rank weighting |
//! |---------|----------|----------------|
//! | P@n | [`metrics::bias_p_at_n`] | uniform over the top n |
//! | RBP | [`metrics::bias_rbp`] | geometric, persistence p |
//! | DCG@n | [`metrics::bias_dcg_at_n`] | 1/log2(i+1) over the top n |
//! | whole list | [`metrics::bias_whole_list`] | none |
//!
//! Per-query scores aggregate into mean bias (direction) and mean absolute
//! bias (magnitude) per engine, with one-sample and paired t-tests in
//! [`stats`]. [`audit::run_audit`] strings everything together.
//!
//! ```
//! use serpbias::domain::Perspective::{Conservative as C, Liberal as L, BothOrNeither as N};
//! use serpbias::metrics::{bias_rbp, Persistence};
//!
//! let beta = bias_rbp(&[C, L, N, C], Persistence::new(0.8).unwrap());
//! assert!((beta - 0.1424).abs() < 1e-12);
//! ```

pub mod audit;
pub mod domain;
pub mod ingestion;
pub mod labeling;
pub mod metrics;
pub mod report;
pub mod stats;
pub mod synth;

pub use audit::{run_audit, AuditConfig, AuditError, AuditReport};
pub use domain::{Corpus, Perspective, QueryTopic, RankedDocument, Serp, Stance, Wing};
pub use metrics::{Cutoff, MetricId, Persistence};
pub use report::{emit_report, ReportFormat};
