//! Run a complete audit on a dataset file (or a synthetic one) and print the
//! report.
//!
//!     cargo run --example full_audit
//!     cargo run --example full_audit -- serps.jsonl chart.csv table

use std::fs::File;
use std::io::{BufReader, Write};

use serpbias::ingestion::{parse_leaning_chart, parse_serp_dataset};
use serpbias::labeling::LabelPolicy;
use serpbias::synth::{generate_corpus, PlantedBiasSpec};
use serpbias::{emit_report, run_audit, AuditConfig, ReportFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();

    let corpus = match args.first() {
        Some(path) => parse_serp_dataset(BufReader::new(File::open(path)?))?,
        None => {
            let left = PlantedBiasSpec::new(0.2, 0.45, 20, 1)?;
            let right = PlantedBiasSpec::new(0.45, 0.2, 20, 1)?;
            let even = PlantedBiasSpec::new(0.3, 0.3, 20, 1)?;
            generate_corpus(
                &[("leftish", left), ("rightish", right), ("even", even)],
                30,
            )?
        }
    };
    let chart = args
        .get(1)
        .map(|p| File::open(p).map(parse_leaning_chart))
        .transpose()?
        .transpose()?;
    let format: ReportFormat = args.get(2).map_or(Ok(ReportFormat::Table), |f| f.parse())?;

    let config = AuditConfig {
        label_policy: LabelPolicy::Permissive,
        ..Default::default()
    };
    let report = run_audit(&corpus, chart.as_ref(), &config)?;
    std::io::stdout().write_all(&emit_report(&report, format))?;
    Ok(())
}
