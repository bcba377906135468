use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rqzeta_core::irregularity::{scan_fixed_primes, ScanMode, RECORD_CSV_HEADER};
use rqzeta_core::numtheory::odd_primes_up_to;

fn rqzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqzeta")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = rqzeta(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

fn code(args: &[&str]) -> i32 {
    rqzeta(args).status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn lvalue_examples() {
    assert_eq!(ok(&["lvalue", "--disc", "5", "--m", "1"]), "-2/5\n");
    assert_eq!(ok(&["lvalue", "--disc", "8", "--m", "2"]), "11\n");
    assert_eq!(ok(&["lvalue", "--disc", "5", "--m", "2", "--mod", "7"]), "2\n");
    assert_eq!(code(&["lvalue", "--disc", "9", "--m", "1"]), 2);
    assert_eq!(code(&["lvalue", "--disc", "5", "--m", "1", "--mod", "5"]), 2);
    assert_eq!(code(&["lvalue", "--disc", "8", "--m", "2", "--mod", "3"]), 2);
}

#[test]
fn zeta_and_index() {
    assert_eq!(ok(&["zeta", "--m", "6"]), "691/32760\n");
    assert_eq!(ok(&["zeta", "--disc", "5", "--m", "1"]), "1/30\n");
    assert_eq!(ok(&["index", "--mod", "37", "--type", "classical"]), "p=37 delta=36 index=1 hits=32:1\n");
    assert_eq!(ok(&["index", "--disc", "24", "--mod", "3"]), "D=24 p=3 delta=2 index=1 hits=2:1\n");
    assert_eq!(
        ok(&["index", "--disc", "24", "--mod", "3", "--format", "csv"]),
        format!("{RECORD_CSV_HEADER}\n24,3,2,1,2:1\n")
    );
    assert_eq!(code(&["index", "--disc", "5", "--mod", "9"]), 2);
}

#[test]
fn stats_subcommand() {
    assert_eq!(ok(&["stats", "--statistic", "0.29", "--df", "3"]), "chi-squared = 0.29, df = 3, significance = .962\n");
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["stats", "--statistic", "0", "--df", "2", "--format", "json"])).unwrap();
    assert_eq!(v["significance"], 1.0);
    let hist = ok(&["stats", "--disc", "5", "--mod", "7", "--format", "csv"]);
    assert_eq!(hist.lines().count(), 8);
    assert_eq!(code(&["stats", "--statistic", "1.0"]), 2);
}

#[test]
fn scan_is_deterministic_across_workers_and_resume() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "4", "16"] {
        let dir = tmp.path().join(format!("w{workers}"));
        ok(&["scan", "--kind", "grid", "--dmax", "2500", "--pmax", "40", "--out", path(&dir), "--workers", workers]);
        outputs.push(dir_bytes(&dir));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);

    let dir = tmp.path().join("resumed");
    let args = ["scan", "--kind", "grid", "--dmax", "2500", "--pmax", "40", "--out", path(&dir)];
    let first = ok(&[&args[..], &["--stop-after", "1"]].concat());
    assert!(first.contains("complete=false"), "{first}");
    assert_eq!(code(&["report", "--input", path(&dir), "--table", "2"]), 3);
    let partial = ok(&["report", "--input", path(&dir), "--table", "2", "--allow-partial", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&partial).unwrap();
    assert!(v["size"].as_u64().unwrap() > 0);
    let second = ok(&[&args[..], &["--resume"]].concat());
    assert!(second.contains("computed=2"), "{second}");
    assert_eq!(dir_bytes(&dir), outputs[0]);

    // A resume with different parameters is refused.
    assert_eq!(
        code(&["scan", "--kind", "grid", "--dmax", "3000", "--pmax", "40", "--out", path(&dir), "--resume"]),
        2
    );
}

#[test]
fn shards_concatenate_to_a_single_run() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("grid");
    ok(&["scan", "--kind", "grid", "--dmax", "3100", "--pmax", "30", "--out", path(&dir)]);
    let manifest = fs::read_to_string(dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("shards=4\n"));
    assert!(manifest.ends_with("complete=true\n"));
    let mut rows = Vec::new();
    for i in 0..4 {
        let text = fs::read_to_string(dir.join(format!("shard-{i:05}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(RECORD_CSV_HEADER));
        rows.extend(lines.map(str::to_string));
    }
    let direct: Vec<String> = scan_fixed_primes(0, 3100, &odd_primes_up_to(30), ScanMode::Full, 1)
        .unwrap()
        .iter()
        .map(|r| r.to_csv_row())
        .collect();
    assert_eq!(rows, direct);
}

#[test]
fn corrupt_or_missing_input_is_incomplete() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&["report", "--input", path(&tmp.path().join("nothing")), "--table", "1"]), 3);
    let dir = tmp.path().join("d5");
    ok(&["scan", "--kind", "fixed-disc", "--disc", "5", "--pmax", "200", "--out", path(&dir)]);
    fs::write(dir.join("shard-00000.csv"), "D,p,delta,index,hits\n5,3,2,0,\n").unwrap();
    assert_eq!(code(&["report", "--input", path(&dir), "--table", "1"]), 3);
}

#[test]
fn invalid_scan_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let out = path(tmp.path());
    assert_eq!(code(&["scan", "--kind", "million", "--dmax", "1000", "--primes", "3,7", "--out", out]), 2);
    assert_eq!(code(&["scan", "--kind", "fixed-disc", "--pmax", "100", "--out", out]), 2);
    assert_eq!(code(&["scan", "--kind", "fixed-disc", "--disc", "9", "--pmax", "100", "--out", out]), 2);
    assert_eq!(code(&["scan", "--kind", "grid", "--dmax", "100", "--out", out]), 2);
    assert_eq!(code(&["scan", "--kind", "grid", "--dmax", "100", "--primes", "3,9", "--out", out]), 2);
}

#[test]
fn fixed_disc_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("d5");
    ok(&["scan", "--kind", "fixed-disc", "--disc", "5", "--pmax", "1000", "--out", path(&dir)]);
    let text = ok(&["report", "--input", path(&dir), "--table", "1"]);
    assert!(text.contains("0 & 112 & 101.29 & .606531\n"), "{text}");
    assert!(text.contains("chi-squared = 3.32, df = 3, significance = .344\n"), "{text}");

    let json = ok(&["report", "--input", path(&dir), "--table", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["size"], 167);
    assert_eq!(v["df"], 3);
    assert_eq!(v["categories"].as_array().unwrap().len(), 4);
    assert_eq!(v["categories"][3]["tail"], true);

    let residues = ok(&["report", "--input", path(&dir), "--table", "residues", "--classes-mod", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&residues).unwrap();
    assert_eq!(v["categories"].as_array().unwrap().len(), 2);
    assert!(v["significance"].as_f64().unwrap() <= 1.0);

    let ratios = ok(&["report", "--input", path(&dir), "--table", "ratios", "--bins", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&ratios).unwrap();
    let hist: u64 = v["histogram"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).sum();
    assert_eq!(hist, v["pairs"].as_u64().unwrap());
    let ks = v["ks"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&ks));
}

#[test]
fn grid_histogram_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("grid");
    ok(&["scan", "--kind", "grid", "--dmax", "600", "--pmax", "10", "--out", path(&dir)]);
    let hist = ok(&["report", "--input", path(&dir), "--table", "histogram", "--mod", "7", "--format", "csv"]);
    assert_eq!(hist.lines().count(), 8);
    let observed: f64 = hist.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!(observed > 0.0);
    assert_eq!(code(&["report", "--input", path(&dir), "--table", "residues"]), 2);
}

#[test]
fn empty_scans() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("empty");
    ok(&["scan", "--kind", "grid", "--dmax", "5", "--pmax", "10", "--out", path(&dir)]);
    assert_eq!(
        ok(&["report", "--input", path(&dir), "--table", "1", "--format", "csv"]),
        "r,observed,expected,observed_fraction,predicted_fraction\n"
    );
    assert!(ok(&["survey", "--input", path(&dir)]).starts_with("p=3 max 0\n"));
}
