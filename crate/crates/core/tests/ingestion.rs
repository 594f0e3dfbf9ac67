use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use proptest::prelude::*;
use serpbias::domain::{Corpus, Perspective, QueryTopic, RankedDocument, Serp, Stance, Wing};
use serpbias::ingestion::{
    corpus_to_records, fetch_feed, parse_feed, parse_leaning_chart, parse_serp_dataset,
    write_serp_dataset, FeedError, FetchError,
};
use serpbias::labeling::Leaning;

const RSS: &[u8] = include_bytes!("../fixtures/sample_rss.xml");
const ATOM: &[u8] = include_bytes!("../fixtures/sample_atom.xml");
const CHART: &str = include_str!("../fixtures/leaning_chart.csv");
const SERPS: &str = include_str!("../fixtures/serps_small.jsonl");

#[test]
fn rss_fixture() {
    let docs = parse_feed(RSS).unwrap();
    assert_eq!(docs.len(), 3);

    assert_eq!(docs[0].title, "Senate debates minimum wage increase");
    assert_eq!(
        docs[0].link,
        "https://www.example-left.com/2021/03/minimum-wage"
    );
    assert_eq!(
        docs[0].body.as_deref(),
        Some("Lawmakers clashed over a $15 federal minimum wage & its effect on jobs.")
    );
    assert_eq!(
        docs[0].published.as_deref(),
        Some("Tue, 02 Mar 2021 14:30:00 GMT")
    );
    assert_eq!(docs[0].source_domain.as_deref(), Some("example-left.com"));

    assert_eq!(docs[1].title, "Medical marijuana: what states allow & why");
    assert_eq!(docs[1].body.as_deref(), Some("A look at state laws ."));
    assert_eq!(docs[1].published, None);

    assert_eq!(
        docs[2].body.as_deref(),
        Some("The bill\u{2019}s sponsors vowed to try again.")
    );
    assert_eq!(
        docs[2].source_domain.as_deref(),
        Some("news.example-left.com")
    );
}

#[test]
fn atom_fixture() {
    let docs = parse_feed(ATOM).unwrap();
    assert_eq!(docs.len(), 3);

    assert_eq!(docs[0].title, "Border security funding passes House");
    assert_eq!(docs[0].link, "https://www.example-right.com/border-funding");
    assert_eq!(
        docs[0].body.as_deref(),
        Some("The measure now heads to the Senate.")
    );
    assert_eq!(docs[0].published.as_deref(), Some("2021-03-05T10:00:00Z"));
    assert_eq!(docs[0].source_domain.as_deref(), Some("example-right.com"));

    assert_eq!(docs[1].title, "Tax cuts & the deficit");
    assert_eq!(
        docs[1].body.as_deref(),
        Some("Economists disagree on the long-run effect.")
    );
    assert_eq!(docs[1].published.as_deref(), Some("2021-03-04T08:00:00Z"));

    assert_eq!(docs[2].body.as_deref(), Some("Both sides make their case."));
    assert_eq!(docs[2].source_domain.as_deref(), Some("example-center.org"));
}

#[test]
fn feeds_weak_label_through_chart() {
    let chart = parse_leaning_chart(CHART.as_bytes()).unwrap();
    let labels: Vec<_> = parse_feed(ATOM)
        .unwrap()
        .iter()
        .map(|d| serpbias::labeling::weak_label(d, &chart))
        .collect();
    assert_eq!(
        labels,
        vec![
            Some(Perspective::Conservative),
            Some(Perspective::Conservative),
            Some(Perspective::BothOrNeither)
        ]
    );
}

#[test]
fn malformed_feeds() {
    assert!(matches!(
        parse_feed(b"not xml"),
        Err(FeedError::MalformedXml(_))
    ));
    let truncated = &RSS[..RSS.len() / 2];
    assert!(matches!(
        parse_feed(truncated),
        Err(FeedError::MalformedXml(_))
    ));
    assert!(matches!(
        parse_feed(b"<html><body/></html>"),
        Err(FeedError::UnrecognizedFeedRoot(_))
    ));
    assert!(matches!(
        parse_feed(b"\xff\xfe<\x00r\x00"),
        Err(FeedError::UnsupportedEncoding(_))
    ));
}

#[test]
fn chart_fixture() {
    let chart = parse_leaning_chart(CHART.as_bytes()).unwrap();
    assert_eq!(chart.len(), 5);
    assert_eq!(
        chart.get("www.example-leanleft.com"),
        Some(Leaning::LeanLeft)
    );
}

#[test]
fn serp_fixture() {
    let c = parse_serp_dataset(SERPS.as_bytes()).unwrap();
    assert_eq!(c.engines().collect::<Vec<_>>(), vec!["bing", "google"]);
    assert_eq!(c.queries().count(), 2);
    assert_eq!(
        c.query("abortion").unwrap().pro_perspective,
        Some(Wing::Liberal)
    );
    let bing = c.serp("bing", "abortion").unwrap();
    assert_eq!(bing.len(), 3);
    assert_eq!(bing.documents[2].doc_id, "b-ab-4");
    assert_eq!(bing.documents[2].rank, 3);
    assert_eq!(bing.documents[1].stance, Some(Stance::Against));
    assert_eq!(c.reranked().count(), 1);
}

#[test]
fn fixture_round_trips_after_reranking() {
    let c = parse_serp_dataset(SERPS.as_bytes()).unwrap();
    let mut buf = Vec::new();
    write_serp_dataset(&c, &mut buf).unwrap();
    let again = parse_serp_dataset(buf.as_slice()).unwrap();
    assert_eq!(corpus_to_records(&again), corpus_to_records(&c));
    assert_eq!(again.reranked().count(), 0);
}

fn arb_corpus() -> impl Strategy<Value = Corpus> {
    let doc = (
        proptest::option::of(0usize..3),
        proptest::option::of(0usize..3),
        proptest::option::of("[a-z]{1,8}\\.(com|org)"),
        proptest::option::of("[ -~]{0,20}"),
        "[ -~]{0,12}",
    );
    let serp = proptest::collection::vec(doc, 1..8);
    let query = (
        proptest::option::of(prop_oneof![Just(Wing::Conservative), Just(Wing::Liberal)]),
        "[ -~é\"\\\\]{0,16}",
    );
    (
        proptest::collection::vec(query, 1..5),
        proptest::collection::vec(
            proptest::collection::vec(proptest::option::of(serp), 1..5),
            1..4,
        ),
    )
        .prop_map(|(queries, engines)| {
            let stances = [Stance::Pro, Stance::Against, Stance::NeutralOrBoth];
            let mut c = Corpus::new();
            for (i, (pro, text)) in queries.iter().enumerate() {
                c.add_query(QueryTopic::new(format!("q{i}"), text.clone(), *pro))
                    .unwrap();
            }
            for (e, serps) in engines.iter().enumerate() {
                for (q, serp) in serps.iter().take(queries.len()).enumerate() {
                    let Some(docs) = serp else { continue };
                    let documents = docs
                        .iter()
                        .enumerate()
                        .map(|(r, (p, s, dom, content, title))| RankedDocument {
                            doc_id: format!("e{e}q{q}d{r}"),
                            rank: r as u32 + 1,
                            title: title.clone(),
                            content: content.clone(),
                            source_domain: dom.clone(),
                            stance: s.map(|k| stances[k]),
                            perspective: p.map(|k| Perspective::ALL[k]),
                        })
                        .collect();
                    c.add_serp(Serp::new(format!("engine{e}"), format!("q{q}"), documents))
                        .unwrap();
                }
            }
            c
        })
        // Queries without any serp cannot be represented one-document-per-line.
        .prop_filter("every query has a serp", |c| {
            c.queries()
                .all(|q| c.serps().any(|s| s.query_id == q.query_id))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wire_format_round_trip(c in arb_corpus()) {
        let mut buf = Vec::new();
        write_serp_dataset(&c, &mut buf).unwrap();
        let back = parse_serp_dataset(buf.as_slice()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn line_order_does_not_matter(c in arb_corpus(), seed in any::<u64>()) {
        let mut buf = Vec::new();
        write_serp_dataset(&c, &mut buf).unwrap();
        let mut lines: Vec<String> = buf.lines().map(Result::unwrap).collect();
        // Deterministic shuffle.
        let mut state = seed | 1;
        for i in (1..lines.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            lines.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let shuffled = parse_serp_dataset(lines.join("\n").as_bytes()).unwrap();
        prop_assert_eq!(shuffled, c);
    }
}

/// Minimal HTTP/1.1 server answering by path. Returns the base URL.
fn serve() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut first = String::new();
                if reader.read_line(&mut first).is_err() {
                    return;
                }
                loop {
                    let mut l = String::new();
                    if reader.read_line(&mut l).unwrap_or(0) == 0 || l == "\r\n" {
                        break;
                    }
                }
                let path = first.split_whitespace().nth(1).unwrap_or("/").to_string();
                let (status, extra, body): (&str, String, &[u8]) = match path.as_str() {
                    "/feed.xml" => ("200 OK", String::new(), RSS),
                    "/moved" => (
                        "301 Moved Permanently",
                        "Location: /feed.xml\r\n".into(),
                        b"",
                    ),
                    "/loop" => ("302 Found", "Location: /loop\r\n".into(), b""),
                    "/slow" => {
                        thread::sleep(Duration::from_secs(3));
                        ("200 OK", String::new(), RSS)
                    }
                    _ => ("404 Not Found", String::new(), b"nope"),
                };
                let head = format!(
                    "HTTP/1.1 {status}\r\n{extra}Content-Length: {}\r\nConnection: close\r\n\r\n",
                    body.len()
                );
                let _ = stream.write_all(head.as_bytes());
                let _ = stream.write_all(body);
            });
        }
    });
    format!("http://{addr}")
}

#[test]
fn fetch_contract() {
    let base = serve();
    let t = Duration::from_secs(5);

    let bytes = fetch_feed(&format!("{base}/feed.xml"), t).unwrap();
    assert_eq!(parse_feed(&bytes).unwrap().len(), 3);

    let bytes = fetch_feed(&format!("{base}/moved"), t).unwrap();
    assert_eq!(bytes, RSS);

    assert!(matches!(
        fetch_feed(&format!("{base}/loop"), t),
        Err(FetchError::TooManyRedirects)
    ));
    assert!(matches!(
        fetch_feed(&format!("{base}/missing"), t),
        Err(FetchError::HttpStatus(404))
    ));
    assert!(matches!(
        fetch_feed(&format!("{base}/slow"), Duration::from_millis(300)),
        Err(FetchError::Timeout)
    ));
    assert!(matches!(
        fetch_feed("ftp://example.com/feed", t),
        Err(FetchError::InvalidUrl(_))
    ));
}

#[test]
fn fetch_refused_connection() {
    let port = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    assert!(matches!(
        fetch_feed(&format!("http://127.0.0.1:{port}/"), Duration::from_secs(2)),
        Err(FetchError::NetworkUnreachable(_))
    ));
}
