//! End-to-end checks of the binary: exit codes, determinism, round trips.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdsched"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_s = path.to_str().unwrap().to_owned();
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.push("--out");
    full.push(&path_s);
    let out = run(&full);
    assert!(out.status.success(), "generate failed: {}", String::from_utf8_lossy(&out.stderr));
    path_s
}

#[test]
fn generate_then_enumerate_finds_no_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "noNE2.json", &["--family", "noNE2"]);
    let out = run(&["analyze", "--instance", &inst, "enumerate"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"]["ne_count"], 0);

    let inst3 = generate(dir.path(), "noNE3.json", &["--family", "noNE3"]);
    let out = run(&["analyze", "--instance", &inst3, "enumerate"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"]["ne_count"], 0);
}

#[test]
fn simulate_reports_known_completions() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "noNE2.json", &["--family", "noNE2"]);
    let out = run(&["simulate", "--instance", &inst, "--profile", "u:0,v:0"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let jobs = v["results"]["schedule"]["jobs"].as_array().unwrap();
    assert_eq!(jobs[0]["completion"], "24");
    assert_eq!(jobs[1]["completion"], "27");
}

#[test]
fn poa_report_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "sbpt.json", &["--family", "sbpt_tight"]);
    let out = run(&["analyze", "--instance", &inst, "poa"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"]["poa"]["exact"], "5/3");
    assert_eq!(v["results"]["opt_makespan"]["exact"], "3");
}

#[test]
fn exit_codes_follow_error_kinds() {
    let dir = tempfile::tempdir().unwrap();
    // parse error -> 1
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["simulate", "--instance", bad.to_str().unwrap(), "--profile", "0:0"]);
    assert_eq!(out.status.code(), Some(1));

    // class mismatch -> 2
    let inst = generate(dir.path(), "noNE2.json", &["--family", "noNE2"]);
    let out = run(&["solve", "--instance", &inst, "--algorithm", "greedy"]);
    assert_eq!(out.status.code(), Some(2));

    // budget exceeded -> 3
    let out = run(&["analyze", "--instance", &inst, "enumerate", "--budget", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generated_files_and_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--family", "random", "--class", "sym", "--n", "5", "--m", "2", "--seed", "7"];
    let a = generate(dir.path(), "a.json", &args);
    let b = generate(dir.path(), "b.json", &args);
    assert_eq!(
        std::fs::read_to_string(&a).unwrap(),
        std::fs::read_to_string(&b).unwrap()
    );
    let r1 = stdout(&run(&["analyze", "--instance", &a, "poa"]));
    let r2 = stdout(&run(&["analyze", "--instance", &a, "poa"]));
    assert_eq!(r1, r2);
}

#[test]
fn instance_files_round_trip_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(
        dir.path(),
        "exp.json",
        &["--family", "exponential", "--m", "2", "--k", "2", "--a", "1"],
    );
    let out = run(&["solve", "--instance", &inst, "--algorithm", "ls"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"]["schedule"]["makespan"]["exact"], "141");
    assert_eq!(v["results"]["is_nash"], true);
}

#[test]
fn reduction_counts_from_text_input() {
    let dir = tempfile::tempdir().unwrap();
    let threedm = dir.path().join("fig2a.txt");
    std::fs::write(&threedm, "2 3\n0 0 0\n1 1 1\n0 1 1\n").unwrap();
    let inst = generate(
        dir.path(),
        "red.json",
        &["--family", "reduce3dm", "--input", threedm.to_str().unwrap()],
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(v["jobs"].as_array().unwrap().len(), 17);
    assert_eq!(v["machines"].as_array().unwrap().len(), 6);
}

#[test]
fn float_instances_use_plain_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(
        dir.path(),
        "sdr.json",
        &[
            "--family", "sdr_lb", "--m", "3", "--k", "2", "--b", "10", "--a", "0.009",
            "--big-b", "1111", "--tau", "0.001",
        ],
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(v["numeric_mode"], "float");
    assert!(v["jobs"][0]["b"].is_number());
    let out = run(&["mechanism", "--instance", &inst, "--policy", "sdr"]);
    assert!(out.status.success());
}

#[test]
fn brd_from_an_equilibrium_converges_in_zero_steps() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "sbpt.json", &["--family", "sbpt_tight"]);
    // u on machine 0, v on machine 1, w on machine 0 is a known equilibrium
    let out = run(&[
        "analyze", "--instance", &inst, "brd", "--profile", "u:0,v:1,w:0",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"]["outcome"], "converged");
    assert_eq!(v["results"]["steps"], 0);
}
