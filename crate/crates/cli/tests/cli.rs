use std::path::PathBuf;
use std::process::{Command, Output};

fn minwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minwalk"))
        .args(args)
        .env_remove("MINWALK_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn summary(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("summary JSON on stderr")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("minwalk-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn pmf_of_three_steps() {
    let out = minwalk(&["pmf", "--n", "3", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "index,value");
    for row in ["1,0.375", "2,0.375", "3,0.25"] {
        assert!(rows.contains(&row), "{csv}");
    }
    let s = summary(&out);
    assert_eq!(s["command"], "pmf");
    assert_eq!(s["params"]["n"], 3);
    assert!(s["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn invalid_input_exits_two_without_output() {
    let out = minwalk(&["pmf", "--n", "0", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let out = minwalk(&["mean-var", "--n", "10", "--p", "0.3", "--q", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q < p"));

    let out = minwalk(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let out = minwalk(&["pmf", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_validation_leaves_no_files() {
    let dir = scratch("novalid");
    let target = dir.join("pmf.csv");
    let out = minwalk(&[
        "pmf",
        "--n",
        "0",
        "--p",
        "0.5",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 0);
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate", "--p", "0.5", "--n", "100", "--trials", "10", "--seed", "42",
    ];
    let a = minwalk(&args);
    let b = minwalk(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        stdout(&a).lines().next(),
        Some("seed,trajectory,checkpoint,position,w_hat")
    );

    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(minwalk(&threaded).stdout, a.stdout);
}

#[test]
fn generated_seed_reproduces_the_run() {
    let first = minwalk(&[
        "simulate", "--p", "0.6", "--q", "0.2", "--n", "500", "--trials", "4",
    ]);
    assert_eq!(first.status.code(), Some(0));
    let seed = summary(&first)["seed"].as_u64().expect("seed reported");
    let again = minwalk(&[
        "simulate",
        "--p",
        "0.6",
        "--q",
        "0.2",
        "--n",
        "500",
        "--trials",
        "4",
        "--seed",
        &seed.to_string(),
    ]);
    assert_eq!(first.stdout, again.stdout);
}

#[test]
fn out_file_and_summary() {
    let dir = scratch("out");
    let target = dir.join("law.json");
    let out = minwalk(&[
        "pmf",
        "--n",
        "4",
        "--p",
        "0.5",
        "--format",
        "json",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let data: serde_json::Value = serde_json::from_slice(&std::fs::read(&target).unwrap()).unwrap();
    assert_eq!(data["mass"].as_array().unwrap().len(), 5);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("law.json.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["format"], "json");
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch("env");
    let out = Command::new(env!("CARGO_BIN_EXE_minwalk"))
        .args(["moments", "--n", "10", "--p", "0.5", "--k", "3"])
        .env("MINWALK_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("moments.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.join("moments.csv.summary.json").exists());
}

#[test]
fn flags_override_config() {
    let dir = scratch("config");
    let config = dir.join("run.json");
    std::fs::write(&config, r#"{"n": 3, "p": 0.9, "format": "csv"}"#).unwrap();
    let out = minwalk(&["pmf", "--config", config.to_str().unwrap(), "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("3,0.25"));

    std::fs::write(&config, r#"{"n": 3, "colour": 1}"#).unwrap();
    let out = minwalk(&["pmf", "--config", config.to_str().unwrap(), "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn other_commands_run() {
    let out = minwalk(&["ml", "--p", "0.5", "--k", "2"]);
    let csv = stdout(&out);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3);
    let first: f64 = rows[1].strip_prefix("1,").unwrap().parse().unwrap();
    assert!((first - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
    assert_eq!(rows[2], "2,2");

    let out = minwalk(&["enumerate", "--n", "2", "--alpha", "0.5"]);
    assert!(stdout(&out).contains("sum_second,3,3,0"));

    let out = minwalk(&["mean-var", "--n", "10000", "--p", "0.5", "--q", "0.25"]);
    assert!(stdout(&out).contains(",linear,0.4444444444444444"));

    let out = minwalk(&["pmf", "--n", "20", "--p", "0.4", "--compare"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(summary(&out)["results"]["max_abs_diff"].as_f64().unwrap() < 1e-14);

    let out = minwalk(&[
        "percolate",
        "--n",
        "10",
        "--alpha",
        "0.5",
        "--trials",
        "20000",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(summary(&out)["results"]["tv_distance"].as_f64().unwrap() < 0.02);

    let out = minwalk(&[
        "clt", "--p", "0.5", "--n", "50", "--trials", "100", "--seed", "2",
    ]);
    let s = summary(&out);
    assert_eq!(s["results"]["N"], 5000);
    assert_eq!(stdout(&out).lines().count(), 101);

    let out = minwalk(&[
        "clt", "--p", "0.5", "--n", "50", "--N", "100", "--trials", "10", "--seed", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = minwalk(&["lil", "--p", "0.5", "--n", "65536", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).starts_with("seed,trajectory,checkpoint,deviation,running_max,running_min\n")
    );
}

#[test]
fn selftest_passes() {
    let out = minwalk(&["selftest"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).lines().skip(1).all(|l| l.contains(",true,")));
}
