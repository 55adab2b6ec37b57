use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_fraclie");
const SCHEMA: &str = include_str!("../schema/fraclie-report-1.schema.json");

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("FRACLIE_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)));
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
    v
}

#[test]
fn tables_case1_reproduces() {
    let o = run(&["tables", "--case", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("((1 - α)/α)·X2"), "{out}");
    assert!(out.contains("tables match"));
}

#[test]
fn tables_reject_degenerate_and_half() {
    let o = run(&["tables", "--case", "2.1", "--alpha", "1/3", "--m", "1"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("degenerate"), "{}", stderr(&o));
    let o = run(&["tables", "--case", "2.2", "--alpha", "1/2"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("α ≠ 1/2"), "{}", stderr(&o));
}

#[test]
fn tables_json_validates() {
    let v = json(&run(&["tables", "--case", "2.2", "--format", "json"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["catalog"]["basis"].as_array().unwrap().len(), 4);
    assert!(v["alphas"].as_array().unwrap().len() >= 3);
}

#[test]
fn optimal_listings() {
    let o = run(&["optimal", "--case", "2.2", "--alpha", "1/3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    for u in ["U1", "U2", "U3", "U4", "U5"] {
        assert!(out.contains(&format!("Case2.2-{u}:")), "{out}");
    }
    assert_eq!(out.matches("PASS Case 2.2").count(), 8);
    for item in ["a)", "b)", "c)", "d)"] {
        assert!(out.contains(item));
    }

    let out = stdout(&run(&["optimal", "--case", "1", "--alpha", "1/2"]));
    assert_eq!(out.lines().filter(|l| l.trim_start().starts_with("Case1-U")).count(), 3);

    let v = json(&run(&["optimal", "--case", "2.1", "--alpha", "1/3", "--m", "2", "--format", "json"]));
    assert_eq!(v["catalog"]["optimal_system"].as_array().unwrap().len(), 6);
    let eqs = v["equivalences"].as_array().unwrap();
    assert!(!eqs.is_empty() && eqs.iter().all(|e| e["passed"] == true));
}

#[test]
fn verify_family_19_passes_where_real() {
    let o = run(&["verify", "--family", "19", "--m", "2", "--k", "1", "--alpha", "1/3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"pde-residual") && names.contains(&"sequential-equation"), "{names:?}");
    assert!(names.iter().any(|n| n.starts_with("invariance-surface")));
}

#[test]
fn verify_family_19_at_half_has_no_real_solution() {
    // A^(2m) comes out negative at m = 2, α = 1/2
    let o = run(&["verify", "--family", "19", "--m", "2", "--k", "1", "--alpha", "1/2"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("non-real root"), "{}", stderr(&o));
}

#[test]
fn verify_family_5_1_emits_coefficient_notes() {
    let o = run(&["verify", "--family", "5.1", "--a", "1", "--alpha", "1/2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    let notes: Vec<&str> = v["notes"].as_array().unwrap().iter().map(|n| n["text"].as_str().unwrap()).collect();
    // Γ(1/2)/Γ(1) = √π and 1/Γ(1/2) = 1/√π
    let computed = format!("{:.12}", PI.sqrt());
    let alternative = format!("{:.12}", 1.0 / PI.sqrt());
    assert!(notes.iter().any(|n| n.contains(&computed)), "{notes:?}");
    assert!(notes.iter().any(|n| n.contains(&alternative)), "{notes:?}");
}

#[test]
fn verify_gamma_pole_is_input_error() {
    let o = run(&["verify", "--family", "19", "--m", "1", "--k", "1", "--alpha", "1/3"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("singular parameter"), "{}", stderr(&o));
}

#[test]
fn verify_other_families() {
    let cases: &[&[&str]] = &[
        &["--family", "5.5", "--a", "1", "--c1", "2", "--alpha", "1/3"],
        &["--family", "20", "--m", "2", "--c2", "1/2", "--alpha", "1/3"],
        &["--family", "lemma2", "--m", "2", "--alpha", "1/4", "--a1", "1", "--a2", "1", "--b1", "1", "--b2", "1"],
        &["--family", "22", "--alpha", "1/3"],
    ];
    for extra in cases {
        let args: Vec<&str> = ["verify"].iter().chain(extra.iter()).copied().collect();
        let o = run(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}{}", stdout(&o), stderr(&o));
        assert_eq!(json(&o)["passed"], true);
    }
}

#[test]
fn bad_inputs_exit_3() {
    for args in [
        vec!["verify", "--family", "19", "--m", "2", "--alpha", "0.5"],
        vec!["verify", "--family", "19", "--alpha", "1/3"],
        vec!["verify", "--family", "nope", "--alpha", "1/3"],
        vec!["verify", "--family", "19", "--m", "2", "--alpha", "1/3", "--x0", "-1", "--x1", "1"],
        vec!["verify", "--family", "5.5", "--a", "1", "--c1", "2", "--alpha", "1/3", "--path", "exact"],
        vec!["tables"],
        vec!["selftest", "--filter", "no-such-criterion"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 3, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn evolve_reports_convergence_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let o = run(&[
        "evolve", "--family", "19", "--m", "2", "--alpha", "1/3", "--t0", "1", "--t1", "1.5", "--steps", "40", "--nx", "21",
        "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert!(v["run"]["relative_error"].as_f64().unwrap() < 1e-2);
    let order = v["convergence"]["order"].as_f64().unwrap();
    assert!((0.7..1.5).contains(&order), "{order}");
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,u,v"));
    assert_eq!(lines.count(), 41 * 21);
}

#[test]
fn evolve_single_step_has_no_estimate() {
    let o = run(&["evolve", "--family", "19", "--m", "2", "--alpha", "1/3", "--steps", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert!(v["convergence"].is_null());
    assert_eq!(v["run"]["steps"], 1);
}

#[test]
fn evolve_kernel_stays_flat() {
    let o = run(&["evolve", "--family", "5.1", "--a", "0", "--c1", "1", "--alpha", "1/2", "--steps", "8"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["run"]["x_independent"], true);

    let v = json(&run(&["evolve", "--family", "5.1", "--a", "0", "--alpha", "1/2", "--steps", "4"]));
    assert_eq!(v["run"]["x_independent"], true);
    assert_eq!(v["run"]["max_error"], 0.0);
}

#[test]
fn evolve_csv_mode_streams_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let o = run(&[
        "evolve", "--family", "19", "--m", "2", "--alpha", "1/3", "--steps", "2", "--nx", "5", "--format", "csv", "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("t,x,u,v\n"));
    assert_eq!(out.lines().count(), 1 + 3 * 5);
    let s: Value = serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(s["command"], "evolve");
}

#[test]
fn selftest_filter_and_failure_code() {
    let o = run(&["selftest", "--filter", "tables"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("PASS [1] tables"), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 1);

    // the stated time-stepper parameters have no real solution
    let o = run(&["selftest", "--filter", "9", "--format", "json"]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["results"][0]["passed"], false);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# family 19\nfamily = 19\nalpha = 1/3\nm = 2\nsteps = 3\n").unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(&o)["family"], "19");

    // command line overrides the file
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--m", "1"]);
    assert_eq!(code(&o), 3);

    fs::write(&cfg, "family = 19\nalpha = 0.25\nm = 2\n").unwrap();
    assert_eq!(code(&run(&["verify", "--config", cfg.to_str().unwrap()])), 3);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["verify", "--family", "5.5", "--a", "1", "--c1", "2", "--alpha", "1/3", "--seed", "7"];
    let one = run_env(&args, &[("FRACLIE_THREADS", "1")]);
    let four = run_env(&args, &[("FRACLIE_THREADS", "4")]);
    assert_eq!(code(&one), 0);
    assert_eq!(stdout(&one), stdout(&four));
    assert_eq!(json(&one)["seed"], 7);
    assert_eq!(code(&run_env(&args, &[("FRACLIE_THREADS", "zero")])), 3);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = run(&["verify", "--family", "22", "--alpha", "1/3", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schema"], "fraclie-report/1");
}
