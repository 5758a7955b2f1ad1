//! End-to-end checks of the command-line surface: file formats, exit codes,
//! and the run/report pipeline.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thresholdlab"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const K5_EDGES: &str = "5 10\n0 1\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";

#[test]
fn construct_emits_edge_list_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.edges");
    let status = bin()
        .args(["construct", "--t", "6", "--seed", "42"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("21 42\n"));
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("h.edges.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["t"], 6);
    assert_eq!(sidecar["cherry_of"].as_array().unwrap().len(), 15);

    // Determinism: same seed, same bytes.
    let out2 = dir.path().join("h2.edges");
    bin()
        .args(["construct", "--t", "6", "--seed", "42"])
        .arg("--out")
        .arg(&out2)
        .status()
        .unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
}

#[test]
fn construct_rejects_impossible_t() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["construct", "--t", "4", "--seed", "0"])
        .arg("--out")
        .arg(dir.path().join("x.edges"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn qf_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("h.edges");
    bin()
        .args(["construct", "--t", "5", "--seed", "0"])
        .arg("--out")
        .arg(&graph)
        .status()
        .unwrap();
    let report = dir.path().join("report.json");
    let csv = dir.path().join("report.csv");
    let status = bin()
        .args(["qf", "--n", "64", "--family", "structural"])
        .arg("--graph")
        .arg(&graph)
        .arg("--out")
        .arg(&report)
        .arg("--csv")
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(parsed["qf_estimate"].as_f64().unwrap() > 0.0);
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("v,e,aut,copies,critical_p_qf,critical_p_pE\n"));
}

#[test]
fn qf_without_sidecar_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k5.edges");
    write(&graph, K5_EDGES);
    let status = bin()
        .args(["qf", "--n", "64"])
        .arg("--graph")
        .arg(&graph)
        .arg("--out")
        .arg(dir.path().join("r.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn contains_exit_codes_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let core = dir.path().join("k5.edges");
    write(&core, K5_EDGES);
    let host = dir.path().join("h.edges");
    bin()
        .args(["construct", "--t", "5", "--seed", "0"])
        .arg("--out")
        .arg(&host)
        .status()
        .unwrap();
    let witness = dir.path().join("w.json");
    let status = bin()
        .arg("contains")
        .arg("--host")
        .arg(&host)
        .arg("--core")
        .arg(&core)
        .arg("--witness")
        .arg(&witness)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let w: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&witness).unwrap()).unwrap();
    assert_eq!(w["core_image"].as_array().unwrap().len(), 5);

    // Empty host: domain-negative exit code 1.
    let empty = dir.path().join("empty.edges");
    write(&empty, "15 0\n");
    let status = bin()
        .arg("contains")
        .arg("--host")
        .arg(&empty)
        .arg("--core")
        .arg(&core)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // Tiny budget: exit code 2.
    let status = bin()
        .args(["contains", "--budget", "2"])
        .arg("--host")
        .arg(&host)
        .arg("--core")
        .arg(&core)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn contains_rejects_malformed_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.edges");
    write(&bad, "3 1\n1 0\n");
    let core = dir.path().join("k5.edges");
    write(&core, K5_EDGES);
    let status = bin()
        .arg("contains")
        .arg("--host")
        .arg(&bad)
        .arg("--core")
        .arg(&core)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn curve_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let status = bin()
        .args([
            "curve", "--t", "5", "--n", "15", "--p-grid", "0.2:0.8:0.3", "--trials", "40",
            "--seed", "1",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,trials,successes,point,ci_lo,ci_hi");
    assert_eq!(lines.len(), 4); // header + p in {0.2, 0.5, 0.8}
}

#[test]
fn verify_all_produces_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let output = bin()
        .args(["verify", "--suite", "all", "--t", "6", "--seed", "3", "--trials", "400"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    for name in [
        "bk_exhaustive",
        "claim_path_bounds",
        "aut_copy_bounds",
        "core_sparsity",
        "extension_bound",
        "goal_inequality",
        "core_inequality",
    ] {
        assert!(stdout.contains(name), "missing {name} in:\n{stdout}");
    }
    let reports: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 7);
}

#[test]
fn run_and_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.toml");
    write(
        &config,
        r#"t_list = [5]
n_list = ["1vH"]
seeds = [0]
trials = 60
tolerance = 0.25
workers = 1
target = 0.5
trials_cap = 480

[family.structural]
sub_core_max = 3
cherry_union_max = 2
star_max = 4
path_cycle_max = 4
"#,
    );
    let run_dir = dir.path().join("run");
    let status = bin()
        .arg("run")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&run_dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(run_dir.join("gap_table.csv").exists());
    assert!(run_dir.join("config.toml").exists());
    assert!(run_dir
        .join("cells/t5_n15_seed0/cell.json")
        .exists());
    assert!(run_dir.join("cells/t5_n15_seed0/f.edges").exists());
    assert!(run_dir.join("cells/t5_n15_seed0/h.edges").exists());

    let output = bin().arg("report").arg(&run_dir).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("per-t aggregates"));

    // Config with an invalid (t, n) pairing is a validation error.
    let bad = dir.path().join("bad.toml");
    write(
        &bad,
        r#"t_list = [5]
n_list = ["10"]
seeds = [0]
trials = 10
tolerance = 0.2
workers = 1

[family.structural]
sub_core_max = 3
cherry_union_max = 2
star_max = 4
path_cycle_max = 4
"#,
    );
    let status = bin()
        .arg("run")
        .arg("--config")
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("run2"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}
