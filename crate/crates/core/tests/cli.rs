use std::path::PathBuf;
use std::process::{Command, Output};

fn graph(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("graphs").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclecount"))
        .args(args)
        .env_remove("CYCLECOUNT_EVENT_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_two_vertex() {
    let g = graph("two_vertex");
    let o = run(&["check", "--graph", g.to_str().unwrap(), "--T", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "N1=7 (both paths)\n");
}

#[test]
fn coefficient_on_four_vertex() {
    let g = graph("four_vertex");
    let o = run(&["coefficient", "--graph", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n_leading: 6.4826299"), "{}", stdout(&o));

    let o = run(&["coefficient", "--graph", g.to_str().unwrap(), "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let n = doc["n_leading"].as_f64().unwrap();
    assert!((n - 0.000064826299).abs() < 1e-9 * 0.000064826299);
    assert_eq!(doc["beta"], 5);
    assert_eq!(doc["tuple_count"], 2);
}

#[test]
fn output_is_byte_identical() {
    let g = graph("four_vertex");
    let g = g.to_str().unwrap();
    for args in [
        vec!["validate", "--graph", g],
        vec!["enumerate", "--graph", g],
        vec!["--format", "json", "enumerate", "--graph", g],
        vec!["coefficient", "--graph", g],
        vec!["simulate", "--graph", g, "--T", "30", "--vertex", "3", "--segment", "0,0.2,1"],
        vec!["convergence", "--graph", g, "--t-max", "40", "--samples", "10"],
        vec!["check", "--graph", g, "--T", "30"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn enumerate_counts_on_four_vertex() {
    let g = graph("four_vertex");
    let o = run(&["--format", "json", "enumerate", "--graph", g.to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let counts: Vec<u64> = doc["sets"].as_array().unwrap().iter().map(|s| s["count"].as_u64().unwrap()).collect();
    assert_eq!(counts, [5, 13, 16, 9, 2]);
    let first = &doc["sets"][0]["tuples"][0][0];
    assert!(first["vertices"].is_array() && first["edges"].is_array());
}

#[test]
fn convergence_csv_is_increasing_and_converges() {
    let dir = tempfile::tempdir().unwrap();
    for (name, t_max) in [("two_vertex", "2000"), ("triangle", "300")] {
        let g = graph(name);
        let out = dir.path().join(format!("{name}.csv"));
        let o = run(&[
            "convergence",
            "--graph",
            g.to_str().unwrap(),
            "--t-max",
            t_max,
            "--samples",
            "25",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let csv = std::fs::read_to_string(&out).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("T,N,N1,ratio"));
        let rows: Vec<Vec<f64>> =
            lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 25);
        assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]), "{name}: T not increasing");

        let o = run(&["coefficient", "--graph", g.to_str().unwrap(), "--json"]);
        let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let n_leading = doc["n_leading"].as_f64().unwrap();
        let last = rows.last().unwrap()[3];
        assert!((last / n_leading - 1.0).abs() < 0.15, "{name}: {last} vs {n_leading}");
    }
}

#[test]
fn simulate_reports_counts() {
    let g = graph("two_vertex");
    let o = run(&["--format", "json", "simulate", "--graph", g.to_str().unwrap(), "--T", "10", "--vertex", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["N1"], 7);
    assert!(doc["N"].as_u64().unwrap() > 0);
    assert_eq!(doc["vertex"]["x"], 2);
}

#[test]
fn validate_rejects_non_hamiltonian() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "bad.json",
        r#"{"vertices": 3, "start": 1, "edges": [
            {"from": 1, "to": 2, "length": {"sqrt": 2}},
            {"from": 2, "to": 1, "length": {"sqrt": 3}},
            {"from": 3, "to": 1, "length": {"sqrt": 5}}]}"#,
    );
    let o = run(&["validate", "--graph", &path]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("error:"), "{}", stderr(&o));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["validate", "--graph", missing.to_str().unwrap()]).status.code(), Some(2));

    let garbage = write_temp(&dir, "garbage.json", "{ not json");
    assert_eq!(run(&["validate", "--graph", &garbage]).status.code(), Some(2));

    let dependent = write_temp(
        &dir,
        "dependent.json",
        r#"{"vertices": 2, "start": 1, "edges": [
            {"from": 1, "to": 2, "length": {"sqrt": 2}},
            {"from": 2, "to": 1, "length": {"sqrt": 8}}]}"#,
    );
    assert_eq!(run(&["validate", "--graph", &dependent]).status.code(), Some(3));

    let g = graph("four_vertex");
    let g = g.to_str().unwrap();
    let o = run(&["--event-cap", "100", "simulate", "--graph", g, "--T", "100"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let o = run(&["--beta-cap", "3", "enumerate", "--graph", g]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(run(&["simulate", "--graph", g, "--T=-1"]).status.code(), Some(3));
    assert_eq!(run(&["simulate", "--graph", g, "--T", "5", "--segment", "0,1,5"]).status.code(), Some(3));
}

#[test]
fn event_cap_from_environment() {
    let g = graph("four_vertex");
    let o = Command::new(env!("CARGO_BIN_EXE_cyclecount"))
        .args(["simulate", "--graph", g.to_str().unwrap(), "--T", "100"])
        .env("CYCLECOUNT_EVENT_CAP", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn near_horizon_warning() {
    // the first return to vertex 1 lands exactly on T
    let g = graph("triangle");
    let l = 2f64.sqrt() + 3f64.sqrt() + 5f64.sqrt();
    let o = run(&["simulate", "--graph", g.to_str().unwrap(), "--T", &format!("{l}")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
}
