use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tactical() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tactical"));
    cmd.env_remove("TACTICAL_OUT_DIR").env_remove("TACTICAL_JOBS");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const WORKED: &str = r#"{
  "schema_version": 1,
  "L": 2,
  "K": 1,
  "capacity": [30, 10],
  "workstack": [5, 20],
  "rollover_cost": [1.0, 1.0],
  "i_max": [20, 20],
  "ambiguity": { "N": 10, "alpha": 0.005, "n_probs": 100, "p_hat": [0.75, 0.75] }
}"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn solve_worked_instance_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "worked.json", WORKED);
    let out = run(tactical().args(["solve", "--algorithm", "CS", "--instance"]).arg(&instance));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("algorithm,plan,worst_case,objective"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("CS,"), "{row}");
    assert!(row.contains("19.069"), "{row}");
}

#[test]
fn solve_worked_instance_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "worked.json", WORKED);
    let target = dir.path().join("p.json");
    let out = run(tactical()
        .args(["--format", "json", "solve", "--algorithm", "P", "--master", "mip", "--instance"])
        .arg(&instance)
        .arg("--out")
        .arg(&target));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let objective = value["objective"].as_f64().unwrap();
    assert!((objective - 19.196).abs() < 1e-3, "{objective}");
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", &WORKED.replace("[20, 20]", "[20]"));
    let out = run(tactical().args(["solve", "--algorithm", "P", "--instance"]).arg(&bad));
    assert_eq!(out.status.code(), Some(2));

    let good = write(dir.path(), "worked.json", WORKED);
    let out = run(tactical().args(["solve", "--algorithm", "XYZ", "--instance"]).arg(&good));
    assert_eq!(out.status.code(), Some(2));

    let results = write(dir.path(), "results.csv", "instance_id,algorithm\nx,P\n");
    write(dir.path(), "instances.csv", "instance_id\nx\n");
    let out = run(tactical().args(["report", "--in"]).arg(results.parent().unwrap()));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("status"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_suite_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "suite.json",
        r#"{ "horizons": [3], "replicates": 1, "samples": [10], "n_probs": [5],
             "algorithms": ["P", "CS", "NP"], "max_intake_space": 5000, "max_ambiguity_size": 500 }"#,
    );
    let generated = dir.path().join("gen");
    let out = run(tactical().args(["gen", "--config"]).arg(&config).env("TACTICAL_OUT_DIR", &generated));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(generated.join("instances.csv").exists());

    let suite = dir.path().join("suite");
    let out = run(tactical().args(["suite", "--jobs", "2", "--config"]).arg(&config).arg("--out-dir").arg(&suite));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["results.csv", "instances.csv", "distributions.csv", "manifest.json"] {
        assert!(suite.join(file).exists(), "{file}");
    }

    let out = run(tactical().args(["report", "--in"]).arg(&suite));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.lines().count() > 1);
    assert!(text.contains("CS"));
}

#[test]
fn gen_without_output_directory_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "suite.json", r#"{ "horizons": [3] }"#);
    let out = run(tactical().args(["gen", "--config"]).arg(&config));
    assert_eq!(out.status.code(), Some(2));
}
