use std::io::Write;
use std::process::{Command, Output, Stdio};

const DEG8: &str = "x^8-56x^7-157x^6-228x^5-247x^4-228x^3-157x^2-56x+1";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_salem-census"));
    c.env_remove("SALEM_CENSUS_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_exit_codes() {
    let o = run(&["check", "x^2-3x+1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("Salem"), "{s}");
    assert!(s.contains("lambda: 2.6180339887"), "{s}");

    let o = run(&["check", "1,1,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("order: 3"));

    let o = run(&["check", "x^3-2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "ReducibleOrOther");

    let o = run(&["check", "x^2+*1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn check_json() {
    let o = run(&["--format", "json", "check", "x^4-x^3-x^2-x+1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classification"], "Salem");
    assert_eq!(v["m"], 2);
    let l: f64 = v["lambda"].as_str().unwrap().parse().unwrap();
    assert!((l - 1.722083805739043).abs() < 1e-12);
}

#[test]
fn sqroot_witnesses() {
    let o = run(&["--format", "json", "sqroot", DEG8]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ws = v["witnesses"].as_array().unwrap();
    let alphas: Vec<u64> = ws.iter().map(|w| w["alpha"].as_u64().unwrap()).collect();
    assert_eq!(alphas, [2, 6, 26, 78]);
    assert!(ws.iter().all(|w| w["verified"] == true));

    let o = run(&["sqroot", "x^2-3x+1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("witnesses: 1"));
    assert!(s.contains("\n5; "), "{s}");

    let o = run(&["sqroot", "x^6-x^4-x^3-x^2+1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witnesses: 0"));

    // Not Salem: an input error.
    let o = run(&["sqroot", "x^2+1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn count_degree_two() {
    let o = run(&["--shards", "3", "count", "--m", "1", "--max", "10", "--sq"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some(salem_census::census::CSV_HEADER));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..7], ["1", "10", "8", "8", "10", "10", "10"]);
    assert_eq!(row[10], "3");
}

#[test]
fn budget_exit_code() {
    let o = run(&["--budget", "1e4", "count", "--m", "3", "--max", "100"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn bad_config_is_input_error() {
    let o = run(&["--precision-bits", "32", "check", "x^2-3x+1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn theory_json() {
    let o = run(&["theory", "--m", "3", "--max", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["m", "Q", "all_main", "sq_lower", "sq_upper"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let pi2 = std::f64::consts::PI.powi(2);
    let want = 32.0 / 9.0 * 6.0 / pi2 * 1000.0 * 100f64.ln();
    let got = v["sq_upper"].as_f64().unwrap();
    assert!((got - want).abs() < 1e-9 * want);

    let o = run(&["theory", "--dim", "5", "--length", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["delta57"], 1);
    assert_eq!(v["distinct_lengths_kind"], "main-term proxy");
    let o = run(&["theory", "--dim", "4", "--length", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["c_prime"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);

    // Mixed argument sets are rejected by the parser.
    let o = run(&["theory", "--m", "3", "--dim", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn records_round_trip_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.txt");
    let o = run(&[
        "count",
        "--m",
        "2",
        "--max",
        "8",
        "--sq",
        "--records",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let records = std::fs::read_to_string(&path).unwrap();
    assert!(records.lines().any(|l| l.starts_with("  ")), "witness lines");
    let n = records.lines().filter(|l| !l.starts_with(' ')).count();
    assert!(n > 0);

    let mut child = bin()
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(records.as_bytes())
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), n);
    assert!(s.lines().all(|l| l.starts_with("Salem ")));
}

#[test]
fn work_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let first = bin()
        .env("SALEM_CENSUS_DIR", dir.path())
        .args(["--shards", "2", "count", "--m", "2", "--max", "12"])
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    let run_dir = dir.path().join("all-m2-q12-n2");
    let completed = std::fs::read_to_string(run_dir.join("completed")).unwrap();
    assert_eq!(completed.lines().count(), 2);

    // A resumed run reports the same counts.
    let again = bin()
        .args(["--shards", "2", "--resume"])
        .arg(dir.path())
        .args(["count", "--m", "2", "--max", "12"])
        .output()
        .unwrap();
    let counts = |o: &Output| {
        let s = stdout(o);
        let row = s.lines().nth(1).unwrap().to_string();
        row.split(',').take(4).collect::<Vec<_>>().join(",")
    };
    assert_eq!(counts(&first), counts(&again));
}

#[test]
fn sweep_reports_slopes() {
    let o = run(&["sweep", "--m", "1", "--max", "1000,10,100"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let qs: Vec<&str> = s
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(qs, ["10", "100", "1000"]);
    let slope = s
        .lines()
        .find(|l| l.starts_with("# slope,count_all"))
        .unwrap();
    let v: f64 = slope.split(',').nth(3).unwrap().parse().unwrap();
    assert!((v - 1.0).abs() < 0.05, "{slope}");
}
