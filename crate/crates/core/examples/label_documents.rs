//! Resolve document perspectives from stances, presets and a source-leaning
//! chart, then compare the two labeling policies.
//!
//!     cargo run --example label_documents

use serpbias::domain::{Corpus, QueryTopic, RankedDocument, Serp, Stance, Wing};
use serpbias::labeling::{label_corpus, normalize_domain, LabelPolicy, Leaning, LeaningMap};

fn doc(id: &str, rank: u32, domain: &str, stance: Option<Stance>) -> RankedDocument {
    RankedDocument {
        doc_id: id.into(),
        rank,
        source_domain: Some(domain.into()),
        stance,
        ..Default::default()
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut chart = LeaningMap::new();
    chart.insert("https://www.left-daily.com/", Leaning::Left)?;
    chart.insert("centrist.org", Leaning::Center)?;
    chart.insert("rightwire.net", Leaning::LeanRight)?;

    for raw in [
        "HTTPS://WWW.Left-Daily.com:443/a/b?x=1",
        "news.rightwire.net",
        "not a domain",
    ] {
        println!("{raw:<42} -> {:?}", normalize_domain(raw));
    }
    println!();

    let mut corpus = Corpus::new();
    // Supporting a higher minimum wage is the liberal side of this debate.
    corpus.add_query(QueryTopic::new(
        "minwage",
        "raise the minimum wage",
        Some(Wing::Liberal),
    ))?;
    // No declared pro side: stances cannot be mapped, the chart decides.
    corpus.add_query(QueryTopic::new("news", "economy news", None))?;

    corpus.add_serp(Serp::new(
        "engine",
        "minwage",
        vec![
            doc("m1", 1, "rightwire.net", Some(Stance::Pro)),
            doc("m2", 2, "left-daily.com", Some(Stance::Against)),
            doc("m3", 3, "centrist.org", None),
            doc("m4", 4, "www.left-daily.com", Some(Stance::NeutralOrBoth)),
        ],
    ))?;
    corpus.add_serp(Serp::new(
        "engine",
        "news",
        vec![
            doc("n1", 1, "rightwire.net", Some(Stance::Pro)),
            doc("n2", 2, "blog.example.net", None),
        ],
    ))?;

    match label_corpus(&corpus, Some(&chart), LabelPolicy::Strict) {
        Ok(_) => println!("strict: everything labeled"),
        Err(e) => println!("strict: {e}"),
    }

    let (labeled, stats) = label_corpus(&corpus, Some(&chart), LabelPolicy::Permissive)?;
    println!("permissive:");
    for serp in labeled.serps() {
        for d in &serp.documents {
            println!(
                "  {:<8} {:<3} {:<20} {:<8} -> {}",
                serp.query_id,
                d.doc_id,
                d.source_domain.as_deref().unwrap_or("-"),
                d.stance.map_or("-", |s| s.as_token()),
                d.perspective.expect("labeled").as_token()
            );
        }
    }
    for (engine, s) in stats {
        println!(
            "{engine}: {} from stance, {} from chart, {} fallback",
            s.stance_count, s.chart_count, s.fallback_count
        );
    }
    Ok(())
}
