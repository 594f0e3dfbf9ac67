//! Parsers for everything that enters the pipeline: SERP dumps, the
//! source-leaning chart and RSS/Atom news feeds.

mod chart;
mod feed;
mod fetch;
mod serps;

pub use chart::{parse_leaning_chart, ChartParseError};
pub use feed::{parse_feed, FeedDocument, FeedError};
pub use fetch::{fetch_feed, FetchError, MAX_REDIRECTS};
pub use serps::{
    corpus_to_records, parse_serp_dataset, write_serp_dataset, IngestError, SerpRecord,
};
