use std::path::PathBuf;
use std::process::{Command, Output};

const TINY: &str = r#"{"m": 3, "constraint": {"type": "knapsack", "budget": 2},
 "elements": [
  {"cost": 1, "dist": [[0, "1/2"], [3, "1/2"]]},
  {"cost": "1/2", "dist": [[1, 0.25], [2, 0.75]]},
  {"cost": 2, "dist": [[0, "0.9"], [3, "0.1"]]}
 ]}"#;

fn write_instance(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("probemin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write instance");
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_probemin"))
        .args(args)
        .output()
        .expect("spawn probemin")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn exact_solve_reports_rational_expectation() {
    let inst = write_instance("tiny.json", TINY);
    let o = run(&["--instance", inst.to_str().unwrap(), "solve", "--algo", "optimal", "--t", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("json");
    assert_eq!(v["expectation"]["exact"], "3/10");
    assert_eq!(v["outcomes"], 8);
}

#[test]
fn oracle_on_tiny_instance() {
    let inst = write_instance("tiny-oracle.json", TINY);
    let path = inst.to_str().unwrap();
    let o = run(&["--instance", path, "oracle", "--kind", "expectation"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("json");
    assert_eq!(v["kind"], "expectation");
    assert_eq!(v["value"]["exact"], "3/10");

    let o = run(&["--instance", path, "--format", "csv", "oracle", "--kind", "rank-knapsack", "--t", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rank-knapsack,9/10,"), "{}", stdout(&o));
}

#[test]
fn monte_carlo_emits_one_row_per_trial() {
    let inst = write_instance("tiny-mc.json", TINY);
    let o = run(&["--instance", inst.to_str().unwrap(), "--mc", "37", "--seed", "4", "solve", "--algo", "metamin"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("trial,")).count(), 37);
    assert_eq!(text.lines().filter(|l| l.starts_with("summary,")).count(), 1);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let inst = write_instance("tiny-det.json", TINY);
    let path = inst.to_str().unwrap();
    let cases: [&[&str]; 3] = [
        &["--instance", path, "--mc", "500", "--seed", "11", "solve", "--algo", "metamin"],
        &["--seed", "3", "sweep", "--algo", "metamin", "--param", "n=3,5", "--trials", "4"],
        &["--seed", "5", "verify", "metamin-4x", "--trials", "4"],
    ];
    for args in cases {
        let one: Vec<&str> = [&["--jobs", "1"][..], args].concat();
        let many: Vec<&str> = [&["--jobs", "3"][..], args].concat();
        let a = run(&one);
        let b = run(&many);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stdout, run(&one).stdout, "{args:?}");
    }
}

#[test]
fn verify_suite_passes() {
    let o = run(&["verify", "nesting", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("nesting,")).count(), 50);
    assert!(!text.contains(",FAIL,"));
}

#[test]
fn gap_reports_exact_values_and_failed_claims() {
    let o = run(&["--mc", "20000", "--seed", "2", "gap", "--N", "10"]);
    let text = stdout(&o);
    assert!(text.contains("gap-adaptive,PASS,N=10 adaptive E=199/1000"), "{text}");
    assert!(text.contains("gap-mc,PASS"), "{text}");
    // the stated non-adaptive value of the instance does not hold
    assert!(text.contains("gap-nonadaptive,FAIL"), "{text}");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--algo", "density"]).status.code(), Some(2));
    let bad = write_instance("bad.json", r#"{"m": 1}"#);
    let o = run(&["--instance", bad.to_str().unwrap(), "solve", "--algo", "density"]);
    assert_eq!(o.status.code(), Some(2));

    let elements: Vec<String> = (0..30)
        .map(|_| r#"{"cost": 1, "dist": [[0, "1/2"], [3, "1/2"]]}"#.to_string())
        .collect();
    let big = write_instance(
        "big.json",
        &format!(r#"{{"m": 3, "constraint": {{"type": "knapsack", "budget": 30}}, "elements": [{}]}}"#, elements.join(",")),
    );
    let big = big.to_str().unwrap();
    assert_eq!(run(&["--instance", big, "oracle", "--kind", "expectation"]).status.code(), Some(3));
    assert_eq!(run(&["--instance", big, "solve", "--algo", "density"]).status.code(), Some(3));
    // sampling works where exact enumeration does not
    assert_eq!(run(&["--instance", big, "--mc", "100", "solve", "--algo", "density"]).status.code(), Some(0));
}
