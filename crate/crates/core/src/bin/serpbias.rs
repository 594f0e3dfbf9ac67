use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use serpbias::audit::MetricKind;
use serpbias::ingestion::{
    fetch_feed, parse_feed, parse_leaning_chart, parse_serp_dataset, write_serp_dataset,
    FeedDocument,
};
use serpbias::labeling::{label_corpus, weak_label, LabelPolicy, LeaningMap};
use serpbias::synth::{generate_corpus, PlantedBiasSpec};
use serpbias::{
    emit_report, run_audit, AuditConfig, Cutoff, Persistence, Perspective, ReportFormat,
};

#[derive(Parser)]
#[command(
    name = "serpbias",
    version,
    about = "Audit search result pages for political bias"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label, score, aggregate and test a SERP dataset.
    Audit {
        #[arg(long)]
        serps: PathBuf,
        #[arg(long)]
        chart: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        top_n: usize,
        #[arg(long, default_value_t = 0.8)]
        rbp_p: f64,
        /// Comma-separated subset of p_at_n, rbp, dcg_at_n.
        #[arg(long, value_delimiter = ',', default_value = "p_at_n,rbp,dcg_at_n")]
        metrics: Vec<MetricKind>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "strict")]
        label_policy: LabelPolicy,
        /// structured, table or plotdata.
        #[arg(long, default_value = "table")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic SERP dataset with planted bias.
    Gen {
        #[arg(long)]
        qc: f64,
        #[arg(long)]
        ql: f64,
        #[arg(long, default_value_t = 10)]
        length: usize,
        #[arg(long, default_value_t = 57)]
        queries: usize,
        /// Comma-separated engine names.
        #[arg(long, value_delimiter = ',', default_value = "engine-a,engine-b")]
        engines: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resolve every document's perspective and write the labeled dataset.
    Label {
        #[arg(long)]
        serps: PathBuf,
        #[arg(long)]
        chart: Option<PathBuf>,
        #[arg(long, default_value = "strict")]
        label_policy: LabelPolicy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse RSS/Atom feeds (files or URLs) into a JSON-lines article listing.
    Feed {
        /// Feed files or http(s) URLs.
        #[arg(required = true)]
        sources: Vec<String>,
        /// Attach weak labels from this leaning chart.
        #[arg(long)]
        chart: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        timeout_secs: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct FeedListing<'a> {
    feed: &'a str,
    #[serde(flatten)]
    doc: &'a FeedDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    perspective: Option<Perspective>,
}

/// A failure caused by bad arguments rather than bad data.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| {
        format!("cannot open {}", path.display())
    })?))
}

fn load_chart(path: Option<&Path>) -> Result<Option<LeaningMap>> {
    path.map(|p| parse_leaning_chart(open(p)?).with_context(|| format!("in chart {}", p.display())))
        .transpose()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Audit {
            serps,
            chart,
            top_n,
            rbp_p,
            metrics,
            alpha,
            label_policy,
            format,
            out,
        } => {
            let config = AuditConfig {
                top_n: Cutoff::new(top_n).map_err(|e| UsageError(e.to_string()))?,
                rbp_p: Persistence::new(rbp_p).map_err(|e| UsageError(e.to_string()))?,
                metrics,
                alpha,
                label_policy,
                ..Default::default()
            };
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(UsageError(format!("--alpha must lie in (0, 1), got {alpha}")).into());
            }
            let corpus = parse_serp_dataset(open(&serps)?)
                .with_context(|| format!("in {}", serps.display()))?;
            let chart = load_chart(chart.as_deref())?;
            let report = run_audit(&corpus, chart.as_ref(), &config)?;
            let mut w = output(out.as_deref())?;
            w.write_all(&emit_report(&report, format))?;
            w.flush()?;
        }
        Command::Gen {
            qc,
            ql,
            length,
            queries,
            engines,
            seed,
            out,
        } => {
            let spec = PlantedBiasSpec::new(qc, ql, length, seed)
                .map_err(|e| UsageError(e.to_string()))?;
            let pairs: Vec<(&str, PlantedBiasSpec)> =
                engines.iter().map(|e| (e.as_str(), spec)).collect();
            let corpus = generate_corpus(&pairs, queries)?;
            let mut w = output(out.as_deref())?;
            write_serp_dataset(&corpus, &mut w)?;
            w.flush()?;
        }
        Command::Label {
            serps,
            chart,
            label_policy,
            out,
        } => {
            let corpus = parse_serp_dataset(open(&serps)?)
                .with_context(|| format!("in {}", serps.display()))?;
            let chart = load_chart(chart.as_deref())?;
            let (labeled, stats) = label_corpus(&corpus, chart.as_ref(), label_policy)?;
            let mut w = output(out.as_deref())?;
            write_serp_dataset(&labeled, &mut w)?;
            w.flush()?;
            for (engine, s) in stats {
                eprintln!(
                    "{engine}: {} preset, {} stance, {} chart, {} fallback",
                    s.preset_count, s.stance_count, s.chart_count, s.fallback_count
                );
            }
        }
        Command::Feed {
            sources,
            chart,
            timeout_secs,
            out,
        } => {
            let chart = load_chart(chart.as_deref())?;
            let mut w = output(out.as_deref())?;
            for src in &sources {
                let bytes = if src.starts_with("http://") || src.starts_with("https://") {
                    fetch_feed(src, Duration::from_secs(timeout_secs))
                        .with_context(|| format!("fetching {src}"))?
                } else {
                    std::fs::read(src).with_context(|| format!("cannot read {src}"))?
                };
                let docs = parse_feed(&bytes).with_context(|| format!("parsing {src}"))?;
                for doc in &docs {
                    let perspective = chart.as_ref().and_then(|c| weak_label(doc, c));
                    serde_json::to_writer(
                        &mut w,
                        &FeedListing {
                            feed: src,
                            doc,
                            perspective,
                        },
                    )?;
                    w.write_all(b"\n")?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
