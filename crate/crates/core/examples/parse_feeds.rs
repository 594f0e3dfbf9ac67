//! Parse RSS and Atom feeds and attach weak perspective labels from a
//! source-leaning chart.
//!
//!     cargo run --example parse_feeds
//!     cargo run --example parse_feeds -- https://example.com/feed.xml

use std::time::Duration;

use serpbias::ingestion::{fetch_feed, parse_feed, parse_leaning_chart};
use serpbias::labeling::weak_label;

const RSS: &[u8] = include_bytes!("../fixtures/sample_rss.xml");
const ATOM: &[u8] = include_bytes!("../fixtures/sample_atom.xml");
const CHART: &str = include_str!("../fixtures/leaning_chart.csv");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chart = parse_leaning_chart(CHART.as_bytes())?;

    let mut feeds: Vec<(String, Vec<u8>)> = vec![
        ("sample_rss.xml".into(), RSS.to_vec()),
        ("sample_atom.xml".into(), ATOM.to_vec()),
    ];
    for url in std::env::args().skip(1) {
        match fetch_feed(&url, Duration::from_secs(15)) {
            Ok(bytes) => feeds.push((url, bytes)),
            Err(e) => eprintln!("{url}: {e}"),
        }
    }

    for (name, bytes) in &feeds {
        println!("== {name}");
        match parse_feed(bytes) {
            Ok(docs) => {
                for d in docs {
                    let label = weak_label(&d, &chart).map_or("unlabeled", |p| p.as_token());
                    println!(
                        "  [{label:<12}] {} ({})",
                        d.title,
                        d.source_domain.as_deref().unwrap_or("?")
                    );
                }
            }
            Err(e) => println!("  {e}"),
        }
    }

    println!();
    println!(
        "malformed input gives a typed error: {}",
        parse_feed(b"<rss><channel>").unwrap_err()
    );
    Ok(())
}
