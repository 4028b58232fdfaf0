use std::path::Path;
use std::process::{Command, Output};

use qfridge::experiments::{parse_csv, run_sweep, Axis, SweepConfig};
use qfridge::models::{ModelIParams, ModelParams};
use serde_json::Value;
use tempfile::TempDir;

const MODEL_I: &str = r#"
model = "I"

[params]
E1 = 1.0
E2 = 3.0
Tc = 1.0
Th = 4.0
p1 = 1e-3
p2 = 1e-3
p3 = 1e-3
g = 1e-3

[sweep]
axis = "Th"
start = 1.0
stop = 6.0
count = 6
"#;

fn qfridge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfridge"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn workdir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("model.toml"), MODEL_I).unwrap();
    dir
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn sweep_matches_library_to_nine_digits() {
    let dir = workdir();
    let o = qfridge(dir.path(), &["sweep", "--config", "model.toml", "--out", "s.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (cols, rows) = parse_csv(&std::fs::read_to_string(dir.path().join("s.csv")).unwrap()).unwrap();

    let base = ModelParams::I(ModelIParams {
        e1: 1.0,
        e2: 3.0,
        tc: 1.0,
        tr: 1.0,
        th: 4.0,
        p1: 1e-3,
        p2: 1e-3,
        p3: 1e-3,
        g: 1e-3,
    });
    let expected = run_sweep(&SweepConfig::new(base, Axis::linear("Th", 1.0, 6.0, 6).unwrap())).unwrap();
    assert_eq!(cols, expected.columns);
    assert_eq!(rows.len(), expected.rows.len());
    for (got, want) in rows.iter().zip(&expected.rows) {
        for (k, (a, b)) in got.iter().zip(&want.values).enumerate() {
            if cols[k] == "residual" || b.abs() < 1e-15 {
                assert!(a.abs() < 1e-12, "{} = {a}", cols[k]);
            } else {
                assert!(close(*a, *b, 1e-9), "{}: {a} vs {b}", cols[k]);
            }
        }
    }
}

#[test]
fn steady_at_equilibrium_reports_bath_temperature_and_no_current() {
    let dir = workdir();
    let o = qfridge(
        dir.path(),
        &["steady", "--config", "model.toml", "--set", "Th=1", "--out", "eq.json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let doc = read_json(&dir.path().join("eq.json"));
    for t in doc["temperatures"].as_array().unwrap() {
        assert!((t["value"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{t}");
        assert_eq!(t["kind"], "finite");
    }
    for q in doc["heat_currents"].as_array().unwrap() {
        assert!(q.as_f64().unwrap().abs() < 1e-12);
    }
    assert_eq!(doc["converged"], true);
    let re = doc["rho"]["re"].as_array().unwrap();
    assert_eq!(re.len(), 8);
}

#[test]
fn steady_with_hot_bath_cools_the_target() {
    let dir = workdir();
    let o = qfridge(dir.path(), &["steady", "--config", "model.toml", "--format", "json", "--out", "hot.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc = read_json(&dir.path().join("hot.json"));
    let t1 = doc["temperatures"][0]["value"].as_f64().unwrap();
    let q1 = doc["heat_currents"][0].as_f64().unwrap();
    assert!(t1 < 1.0, "T1 = {t1}");
    assert!(q1 > 0.0, "Q1 = {q1}");
    // CSV form writes a state file beside the report.
    let o = qfridge(dir.path(), &["steady", "--config", "model.toml", "--out", "hot.csv"]);
    assert!(o.status.success());
    assert!(dir.path().join("hot_rho.csv").exists());
}

#[test]
fn missing_parameter_is_a_usage_error_naming_the_field() {
    let dir = workdir();
    let text = MODEL_I.replace("E2 = 3.0\n", "");
    std::fs::write(dir.path().join("bad.toml"), text).unwrap();
    let o = qfridge(dir.path(), &["steady", "--config", "bad.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E2"), "{}", stderr(&o));
}

#[test]
fn invalid_parameter_and_unknown_key_are_usage_errors() {
    let dir = workdir();
    let o = qfridge(dir.path(), &["steady", "--config", "model.toml", "--set", "E2=0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E2"));
    let o = qfridge(dir.path(), &["steady", "--config", "model.toml", "--set", "h=0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains('h'), "{}", stderr(&o));
    let o = qfridge(dir.path(), &["steady", "--bogus-flag"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_figure_lists_valid_ids() {
    let dir = workdir();
    let o = qfridge(dir.path(), &["figure", "fig9"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for id in ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"] {
        assert!(err.contains(id), "{err}");
    }
}

#[test]
fn fig5_tails_approach_insulated_limits() {
    let dir = workdir();
    let o = qfridge(dir.path(), &["figure", "fig5", "--out", "f5.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    // Insulated limit E1 / (E2/Tc - E3/Th) with E1=1, E2=3, Tc=1.
    for (th, want) in [(4.0, 0.4), (8.0, 4.0 / 11.0), (12.0, 6.0 / 17.0)] {
        let path = dir.path().join(format!("f5_fig5-Th{th}.csv"));
        let (cols, rows) = parse_csv(&std::fs::read_to_string(path).unwrap()).unwrap();
        let k = cols.iter().position(|c| c == "T1").unwrap();
        let last = rows.last().unwrap()[k];
        assert!(close(last, want, 5e-3), "Th={th}: {last} vs {want}");
    }
}

#[test]
fn fig6_records_its_parameter_settings() {
    let dir = workdir();
    let o = qfridge(dir.path(), &["figure", "fig6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# model: II"));
    assert!(out.contains("p=0.001"));
    assert!(out.contains("Tc=1"));
    assert!(out.contains("E=1"));
    assert_eq!(out.matches("# label: fig6-").count(), 3);

    let o = qfridge(dir.path(), &["figure", "fig6", "--format", "json"]);
    let docs: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(docs.as_array().unwrap().len(), 3);
    assert_eq!(docs[0]["metadata"]["fixed"]["Tc"], 1.0);
}

#[test]
fn validate_passes_and_catches_injected_fault() {
    let dir = workdir();
    let o = qfridge(dir.path(), &["validate"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = qfridge(dir.path(), &["validate", "--inject-fault", "commutator-sign"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL energy_balance"), "{}", stdout(&o));

    let o = qfridge(dir.path(), &["validate", "--tol", "1e-3", "--out", "v.json"]);
    assert!(o.status.success());
    let doc = read_json(&dir.path().join("v.json"));
    let checks = doc["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["threshold"] == 1e-3), "{doc}");
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = workdir();
    let a = qfridge(dir.path(), &["figure", "fig1", "--threads", "1"]);
    let b = qfridge(dir.path(), &["figure", "fig1", "--threads", "3"]);
    let c = qfridge(dir.path(), &["figure", "fig1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn manifest_lists_outputs_and_resolved_parameters() {
    let dir = workdir();
    let o = qfridge(dir.path(), &["figure", "fig3", "--out", "f3.csv"]);
    assert!(o.status.success());
    let m = read_json(&dir.path().join("f3.manifest.json"));
    assert_eq!(m["command"], "figure");
    let outputs: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(outputs.len(), 2);
    for out in &outputs {
        assert!(dir.path().join(out).exists(), "{out}");
    }
    assert_eq!(m["resolved"]["figure"], "fig3");
    assert!(m["version"].is_string());
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn evolve_relaxes_towards_the_stationary_state() {
    let dir = workdir();
    let o = qfridge(
        dir.path(),
        &[
            "evolve",
            "--config",
            "model.toml",
            "--set",
            "Th=1",
            "--set",
            "p1=0.1",
            "--set",
            "p2=0.1",
            "--set",
            "p3=0.1",
            "--set",
            "evolve.t_final=300",
            "--set",
            "evolve.samples=4",
            "--set",
            "evolve.initial=ground",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('t'))
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    let last = rows.last().unwrap();
    // Columns: t, T1..T3, Q1..Q3, trace_defect, min_eigenvalue.
    for t in &last[1..4] {
        assert!((t - 1.0).abs() < 0.05, "{last:?}");
    }
    assert!(last[7].abs() < 1e-9);
    assert!(last[8] >= -1e-12);
}
