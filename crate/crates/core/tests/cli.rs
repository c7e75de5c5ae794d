//! End-to-end runs of the `dimdecon` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dimdecon"))
}

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn table() -> PathBuf {
    manifest("data/ctm_s3.ctm")
}

fn glyphs() -> PathBuf {
    manifest("tests/fixtures/glyphs_23x73.pbm")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn build_and_inspect_a_two_state_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s2.ctm");
    let o = run(&[
        "table",
        "build",
        "--states",
        "2",
        "--step-budget",
        "50",
        "--shards",
        "4",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&["table", "inspect", "--json", p(&out)]);
    assert!(o.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["states"], 2);
    assert_eq!(summary["ran_total"], 10_000);
    assert!(summary["halted_total"].as_u64().unwrap() > 0);

    let text = stdout(&run(&["table", "inspect", p(&out)]));
    assert!(text.contains("machines      10000"), "{text}");
}

#[test]
fn sweep_writes_one_csv_row_per_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep",
        "--measure",
        "bdm",
        "--table",
        p(&table()),
        p(&glyphs()),
        "--csv",
        p(&csv),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("leading_dim,dims,remainder,measure,score,fallback_fraction")
    );
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        lines.count() as u64,
        summary["candidates"].as_u64().unwrap()
    );
    assert!(text.contains("\n23,23x73,0,bdm,"));

    let o = run(&["spikes", p(&csv)]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        report["ranked"][0]["candidate"]["dims"],
        serde_json::json!([23, 73])
    );
}

#[test]
fn sweep_output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let csv = dir.path().join(format!("j{jobs}.csv"));
        let o = run(&[
            "--jobs",
            jobs,
            "sweep",
            "--measure",
            "bdm",
            "--table",
            p(&table()),
            p(&glyphs()),
            "--csv",
            p(&csv),
        ]);
        assert!(o.status.success());
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn sweep_svg_is_self_contained() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("sweep.svg");
    let o = run(&[
        "sweep",
        "--measure",
        "entropy",
        p(&glyphs()),
        "--svg",
        p(&svg),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.trim_end().ends_with("</svg>"));
    // the namespace declaration is the only URL allowed
    let body = text.replace("xmlns=\"http://www.w3.org/2000/svg\"", "");
    assert!(!body.contains("href") && !body.contains("http"), "{body}");
}

#[test]
fn scoring_all_zeros_from_stdin() {
    let mut child = bin()
        .args(["score", "--measure", "entropy", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"0000 0000\n0000 0000\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let score: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(score["value"], 0.0);
    assert_eq!(score["scored_bits"], 16);
}

#[test]
fn score_with_dims_uses_grid_blocks() {
    let bits = manifest("tests/fixtures/glyphs_23x73.bits");
    let o = run(&[
        "score",
        "--measure",
        "bdm",
        "--table",
        p(&table()),
        "--dims",
        "23x73",
        p(&bits),
    ]);
    assert!(o.status.success());
    let from_bits: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let o = run(&[
        "score",
        "--measure",
        "bdm",
        "--table",
        p(&table()),
        p(&glyphs()),
    ]);
    let from_pbm: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(from_bits["value"], from_pbm["value"]);
}

#[test]
fn input_errors_exit_with_one() {
    assert_eq!(
        run(&["score", "--measure", "entropy", "--bogus", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["score", "--measure", "entropy", "/nonexistent/file"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["score", "--measure", "bdm", p(&glyphs())])
            .status
            .code(),
        Some(1)
    );
    let o = run(&["perturb", "--kind", "flip", "--count", "3", p(&glyphs())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    assert_eq!(
        run(&[
            "curve",
            "--schedule",
            "1:3",
            "--measure",
            "entropy",
            p(&glyphs())
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn perturb_is_reproducible_and_exact() {
    let bits = manifest("tests/fixtures/glyphs_23x73.bits");
    let args = [
        "perturb",
        "--kind",
        "flip",
        "--count",
        "50",
        "--seed",
        "7",
        p(&bits),
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let original = dimdecon::codec::read_bits(&bits).unwrap();
    let flipped = dimdecon::codec::parse_bits(&a.stdout).unwrap();
    assert_eq!(original.hamming(&flipped), Some(50));
}

#[test]
fn curve_csv_has_one_row_per_magnitude() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let bits = manifest("tests/fixtures/glyphs_23x73.bits");
    let o = run(&[
        "curve",
        "--schedule",
        "10:50:10",
        "--trials",
        "3",
        "--measure",
        "compress",
        "--seed",
        "1",
        p(&bits),
        "--csv",
        p(&csv),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "magnitude,measure,mean,std,trials");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("10,compress,"));
}

#[test]
fn reconstruct_writes_the_original_and_its_variants() {
    let dir = tempfile::tempdir().unwrap();
    let bits = manifest("tests/fixtures/glyphs_23x73.bits");
    let o = run(&[
        "reconstruct",
        "--dims",
        "23x73",
        "--out-dir",
        p(dir.path()),
        p(&bits),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4, "{names:?}");
    assert!(names.iter().all(|n| n.ends_with(".pbm")));
    let original = names.iter().find(|n| n.contains("original")).unwrap();
    let g = dimdecon::codec::read_pbm(dir.path().join(original)).unwrap();
    assert_eq!(g, dimdecon::codec::read_pbm(glyphs()).unwrap());
}
