use std::path::Path;
use std::process::{Command, Output};

use theta_sums::published::BELOW_2K;

fn thetasum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetasum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn table_csv_round_trips_and_flags_published_errata() {
    let out = thetasum(&["table", "--max", "20"]);
    assert_eq!(out.status.code(), Some(1), "published S(9..20) differ");
    let text = stdout(&out);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["k", "s_k", "t_k"]);
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[4], ["5", "4", "-9"]);
    assert!(text.contains("# S(9): published 11, recomputed 8"));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("S(20)"),
        "discrepancies are named on stderr"
    );
}

#[test]
fn table_within_agreeing_prefix_exits_zero() {
    let out = thetasum(&["table", "--max", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!stdout(&out).contains('#'));
}

#[test]
fn verify_all_passes() {
    let out = thetasum(&["verify", "--max", "120"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn verify_json_is_independent_of_thread_count() {
    let one = thetasum(&[
        "--threads",
        "1",
        "--format",
        "json",
        "verify",
        "--max",
        "60",
    ]);
    let four = thetasum(&[
        "--threads",
        "4",
        "--format",
        "json",
        "verify",
        "--max",
        "60",
    ]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert!(v.as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn scan_2k_lists_published_primes() {
    let out = thetasum(&["scan", "--threshold", "2k", "--max", "10000", "--primes"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header[0], "k");
    let ks: Vec<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ks, BELOW_2K);
}

#[test]
fn scan_output_is_identical_across_thread_counts() {
    let args = |t: &'static str| ["--threads", t, "scan", "--max", "3000"];
    let one = thetasum(&args("1"));
    let four = thetasum(&args("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn scan_writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let p = path.to_str().unwrap();
    let args = ["scan", "--threshold", "2k", "--max", "500", "--primes"];
    let out = thetasum(&[&["--out", p][..], &args].concat());
    assert_eq!(out.status.code(), Some(0));
    let direct = thetasum(&args);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn corrupted_checkpoint_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("scan.ckpt");
    let c = ckpt.to_str().unwrap();
    let first = thetasum(&["scan", "--max", "2000", "--checkpoint", c]);
    assert_eq!(first.status.code(), Some(0));
    assert!(Path::new(c).exists());
    let resumed = thetasum(&["scan", "--max", "2000", "--checkpoint", c]);
    assert_eq!(
        resumed.stdout, first.stdout,
        "resuming a finished run is a no-op"
    );

    let text = std::fs::read_to_string(&ckpt).unwrap();
    let tampered = text.replacen("[[1,0]", "[[1,1]", 1);
    assert_ne!(tampered, text);
    std::fs::write(&ckpt, tampered).unwrap();
    let out = thetasum(&["scan", "--max", "2000", "--checkpoint", c]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sha256"));
}

#[test]
fn checkpoint_for_other_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("scan.ckpt");
    let c = ckpt.to_str().unwrap();
    assert_eq!(
        thetasum(&["scan", "--max", "600", "--checkpoint", c])
            .status
            .code(),
        Some(0)
    );
    let out = thetasum(&["scan", "--max", "700", "--checkpoint", c]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(thetasum(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(thetasum(&["table", "--max", "0"]).status.code(), Some(2));
    assert_eq!(
        thetasum(&["scan", "--threshold", "5k"]).status.code(),
        Some(2)
    );
    assert_eq!(
        thetasum(&["--threads", "0", "table"]).status.code(),
        Some(2)
    );
    assert_eq!(thetasum(&["asympt", "--max", "10"]).status.code(), Some(2));
}

#[test]
fn prime_scan_against_all_thresholds_reports_the_4k_list() {
    let out = thetasum(&["scan", "--max", "500", "--primes"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("S(k) < 4k: k=499"));
}

#[test]
fn help_exits_zero() {
    let out = thetasum(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("scan"));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("missing").join("t.csv");
    let out = thetasum(&["--out", p.to_str().unwrap(), "table", "--max", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn census_json_reports_counts() {
    let out = thetasum(&["census", "--max", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["total"], 1);
    assert_eq!(v["div15"], 1, "945 = 3^3 * 5 * 7");
}

#[test]
fn asympt_csv_has_fifteen_significant_digits() {
    let out = thetasum(&["asympt", "--max", "100000"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header,
        [
            "x",
            "partial_sum_times_two",
            "main_term",
            "abs_err",
            "rel_err"
        ]
    );
    assert!(!rows.is_empty());
    let main = &rows.last().unwrap()[2];
    let mantissa = main.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 15, "{main}");
    let x: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert_eq!(x, 100_000.0);
}

#[test]
fn bench_reports_exponents() {
    let out = thetasum(&["--format", "json", "bench", "--max", "2000"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["fast_exponent"].as_f64().is_some());
    assert!(v["naive_exponent"].as_f64().is_some());
    assert_eq!(v["mismatches"], serde_json::json!([]));
}
