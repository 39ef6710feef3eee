use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use inspag::metrics::{read_round_csv, ROUND_COLUMNS};

fn inspag(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inspag"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

const SMALL: &[&str] = &["--synthetic", "300,6,0.5", "--workers", "2", "--n-precond", "60"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn run_inspag_writes_rounds_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = inspag(dir.path(), &with(&["run-inspag"], &with(SMALL, &["--out", "r.csv", "--reference", "--jsonl", "r.jsonl"])));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let rows = read_round_csv(fs::File::open(dir.path().join("r.csv")).unwrap()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.windows(2).all(|w| w[1].round > w[0].round));
    let jsonl = fs::read_to_string(dir.path().join("r.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), rows.len());

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "run-inspag");
    assert_eq!(summary["certificate_met"], true);
    assert_eq!(summary["rounds"].as_u64().unwrap(), rows.last().unwrap().round as u64);
    assert!(summary["final_gap"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn zero_rounds_gives_header_only_csv_and_not_certified() {
    let dir = tempfile::tempdir().unwrap();
    let out = inspag(dir.path(), &with(&["run-inspag"], &with(SMALL, &["--rounds", "0", "--out", "r.csv"])));
    assert_eq!(out.status.code(), Some(2));
    let text = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(text.trim_end(), ROUND_COLUMNS.join(","));
}

#[test]
fn missing_data_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = inspag(dir.path(), &["run-inspag", "--data", "nope.libsvm", "--out", "r.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.libsvm"));
    assert!(!dir.path().join("r.csv").exists());
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn invalid_arguments_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        vec!["run-inspag", "--synthetic", "100,0,0.5"],
        vec!["run-inspag", "--synthetic", "100,5,0.5", "--workers", "0"],
        vec!["run-inspag", "--synthetic", "100,5,0.5", "--sigma=-1"],
        vec!["run-inspag", "--no-such-flag"],
    ] {
        let out = inspag(dir.path(), &bad);
        assert_eq!(out.status.code(), Some(1), "{bad:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = inspag(dir.path(), &with(&["run-inspag"], &with(SMALL, &["--no-wall-clock", "--rounds", "8", "--out", name])));
        assert!(matches!(out.status.code(), Some(0 | 2)));
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# small run\nsynthetic = 300,6,0.5\nworkers = 3\nn_precond = 50\nrounds = 4\n",
    )
    .unwrap();
    let out = inspag(dir.path(), &["run-inspag", "--config", "run.cfg", "--workers", "2", "--out", "r.csv"]);
    assert!(matches!(out.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(summary["workers"], 2);
    assert_eq!(summary["n_precond"], 50);
    assert!(summary["iterations"].as_u64().unwrap() <= 4);

    fs::write(dir.path().join("bad.cfg"), "wrokers = 2\n").unwrap();
    let out = inspag(dir.path(), &["run-inspag", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wrokers"));
}

#[test]
fn quartic_restarts_use_constant_step_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = inspag(dir.path(), &["run-hyperfast", "--objective", "quartic", "--q", "4", "--out", "h.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,scale,steps,certified_gap,measured_gap,certificate_holds");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert!(rows.len() >= 5);
    assert!(rows.iter().all(|r| r[2] == rows[0][2]));
    assert!(rows.iter().all(|r| r[5] == "true"));
}

#[test]
fn strongly_convex_quartic_and_logistic_restarts_certify() {
    let dir = tempfile::tempdir().unwrap();
    let out = inspag(dir.path(), &["run-hyperfast", "--objective", "quartic", "--q", "2", "--dim", "3", "--out", "q2.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let out = inspag(dir.path(), &["run-hyperfast", "--synthetic", "10,3,1", "--reference", "--out", "lr.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["q2.csv", "lr.csv"] {
        let text = fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(text.lines().skip(1).all(|l| l.ends_with("true")), "{f}:\n{text}");
    }
}

#[test]
fn agm_run_respects_its_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = inspag(dir.path(), &["run-agm", "--rounds", "60", "--out", "agm.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("agm.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let gap = headers.iter().position(|h| h == "gap").unwrap();
    let bound = headers.iter().position(|h| h == "bound").unwrap();
    let mut n = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        assert!(rec[gap].parse::<f64>().unwrap() <= rec[bound].parse::<f64>().unwrap());
        n += 1;
    }
    assert_eq!(n, 60);
}

#[test]
fn oracle_check_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let ok = inspag(dir.path(), &["check-oracles", "--synthetic", "200,8,0.5"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = inspag(dir.path(), &["check-oracles", "--synthetic", "200,8,0.5", "--corrupt-gradient"]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn generated_dataset_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = inspag(dir.path(), &["gen-synthetic", "--synthetic", "50,4,0.5", "--seed", "3", "--out", "s.libsvm"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("s.libsvm")).unwrap();
    assert_eq!(text.lines().count(), 50);
    let out = inspag(dir.path(), &["run-inspag", "--data", "s.libsvm", "--workers", "2", "--n-precond", "20", "--rounds", "5", "--out", "r.csv"]);
    assert!(matches!(out.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&out.stderr));
}
