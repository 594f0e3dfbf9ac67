use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_serpbias"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn gen_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let serps = dir.path().join("serps.jsonl");
    let out = run(bin()
        .args([
            "gen",
            "--qc",
            "0.6",
            "--ql",
            "0.2",
            "--queries",
            "8",
            "--seed",
            "4",
        ])
        .arg("--out")
        .arg(&serps));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&serps).unwrap();
    assert_eq!(text.lines().count(), 2 * 8 * 10);

    let out = run(bin()
        .args(["audit", "--format", "structured", "--metrics", "rbp,p_at_n"])
        .arg("--serps")
        .arg(&serps));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["n_queries"], 8);
    assert_eq!(
        report["config"]["metrics"],
        serde_json::json!(["p@10", "rbp(0.8)"])
    );
}

#[test]
fn label_writes_perspectives() {
    let out = run(bin()
        .args(["label", "--label-policy", "permissive"])
        .arg("--serps")
        .arg(fixture("serps_small.jsonl"))
        .arg("--chart")
        .arg(fixture("leaning_chart.csv")));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 9);
    assert!(stdout.lines().all(|l| l.contains("\"perspective\":")));
}

#[test]
fn feed_lists_documents_with_weak_labels() {
    let out = run(bin()
        .arg("feed")
        .arg(fixture("sample_rss.xml"))
        .arg(fixture("sample_atom.xml"))
        .arg("--chart")
        .arg(fixture("leaning_chart.csv")));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["perspective"], "liberal");
    assert_eq!(rows[3]["perspective"], "conservative");
    assert_eq!(rows[5]["perspective"], "both-neither");
}

#[test]
fn exit_codes() {
    // Usage errors.
    assert_eq!(run(bin().args(["audit"])).status.code(), Some(2));
    assert_eq!(run(bin().args(["frobnicate"])).status.code(), Some(2));
    let out = run(bin()
        .args(["audit", "--rbp-p", "1.5", "--serps"])
        .arg(fixture("serps_small.jsonl")));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        run(bin().args(["audit", "--format", "xml", "--serps", "x"]))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(bin().args(["gen", "--qc", "0.9", "--ql", "0.9"]))
            .status
            .code(),
        Some(2)
    );

    // Data errors.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"engine\":\"e\"}\n").unwrap();
    let out = run(bin().arg("audit").arg("--serps").arg(&bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    // Strict labeling of the fixture hits an unknown source.
    let out = run(bin()
        .arg("audit")
        .arg("--serps")
        .arg(fixture("serps_small.jsonl"))
        .arg("--chart")
        .arg(fixture("leaning_chart.csv")));
    assert_eq!(out.status.code(), Some(1));
}
