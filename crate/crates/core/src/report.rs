//! Report serialization: a full JSON dump, an aligned text table, and flat
//! CSV rows for plotting.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::audit::AuditReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported report format {0:?} (expected structured, table or plotdata)")]
pub struct UnsupportedFormat(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Structured,
    Table,
    PlotData,
}

impl FromStr for ReportFormat {
    type Err = UnsupportedFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "structured" | "json" => Ok(ReportFormat::Structured),
            "table" => Ok(ReportFormat::Table),
            "plotdata" | "csv" => Ok(ReportFormat::PlotData),
            _ => Err(UnsupportedFormat(s.to_string())),
        }
    }
}

pub fn emit_report(report: &AuditReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Structured => {
            let mut out = serde_json::to_vec_pretty(report).expect("report is always serializable");
            out.push(b'\n');
            out
        }
        ReportFormat::Table => render_table(report).into_bytes(),
        ReportFormat::PlotData => render_plotdata(report),
    }
}

/// Reads back a structured report.
pub fn parse_structured_report(bytes: &[u8]) -> serde_json::Result<AuditReport> {
    serde_json::from_slice(bytes)
}

fn render_plotdata(report: &AuditReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["engine", "query", "metric", "beta"])
        .expect("in-memory write");
    for e in &report.engine_bias {
        let metric = e.aggregate.metric.to_string();
        for q in &e.aggregate.per_query {
            w.write_record([
                e.aggregate.engine_id.as_str(),
                q.query_id.as_str(),
                metric.as_str(),
                &q.beta.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

fn render_table(r: &AuditReport) -> String {
    let mut s = String::new();
    let c = &r.config;
    let _ = writeln!(s, "SERP bias audit");
    let _ = writeln!(
        s,
        "{} engines, {} queries, {} documents | top-n {} | rbp p {} | alpha {} | labels {}",
        r.engines.len(),
        r.n_queries,
        r.n_documents,
        c.top_n,
        c.rbp_p,
        c.alpha,
        c.label_policy.as_token()
    );

    if !r.engine_bias.is_empty() {
        let _ = writeln!(s, "\nEngine bias (top {})", c.top_n);
        let _ = writeln!(
            s,
            "{:<14} {:<10} {:>7} {:>8} {:>8}  {:<34} {:<34}",
            "engine", "metric", "queries", "MB", "MAB", "MB test", "MAB test"
        );
        for e in &r.engine_bias {
            let a = &e.aggregate;
            let _ = writeln!(
                s,
                "{:<14} {:<10} {:>7} {:>8.4} {:>8.4}  {:<34} {:<34}",
                a.engine_id,
                a.metric.to_string(),
                a.n_queries,
                a.mb,
                a.mab,
                e.mb_test.to_string(),
                e.mab_test.to_string()
            );
        }
    }

    if !r.comparisons.is_empty() {
        let _ = writeln!(s, "\nEngine comparison (paired, two-tailed)");
        let _ = writeln!(
            s,
            "{:<10} {:<14} {:<14} {:>7} {:>9}  test",
            "metric", "engine A", "engine B", "queries", "mean A-B"
        );
        for cmp in &r.comparisons {
            let _ = writeln!(
                s,
                "{:<10} {:<14} {:<14} {:>7} {:>9.4}  {}",
                cmp.metric.to_string(),
                cmp.engine_a,
                cmp.engine_b,
                cmp.aligned_queries,
                cmp.mean_difference,
                cmp.test
            );
        }
    }

    if !r.source_of_bias.is_empty() {
        let _ = writeln!(s, "\nSource of bias (top {} vs whole list)", c.top_n);
        let _ = writeln!(
            s,
            "{:<14} {:>9} {:>9} {:>9} {:>9} {:>8} {:>6}  verdict",
            "engine", "top MB", "top MAB", "all MB", "all MAB", "pearson", "signs"
        );
        for src in &r.source_of_bias {
            let pearson = src
                .pearson
                .map_or_else(|| "n/a".to_string(), |p| format!("{p:.3}"));
            let _ = writeln!(
                s,
                "{:<14} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>8} {:>6.3}  {}",
                src.engine_id,
                src.top_n_mb,
                src.top_n_mab,
                src.whole_list_mb,
                src.whole_list_mab,
                pearson,
                src.sign_agreement,
                src.verdict
            );
        }
    }

    let dq = &r.data_quality;
    if !dq.skipped.is_empty() || !dq.reranked.is_empty() || dq.fallback_labels > 0 {
        let _ = writeln!(s, "\nData quality");
        let _ = writeln!(s, "  missing serps:   {}", dq.skipped.len());
        let _ = writeln!(s, "  re-ranked serps: {}", dq.reranked.len());
        let _ = writeln!(s, "  fallback labels: {}", dq.fallback_labels);
    }

    if !r.notes.is_empty() {
        let _ = writeln!(s, "\nNotes");
        for n in &r.notes {
            let _ = writeln!(s, "  - {n}");
        }
    }
    s
}
