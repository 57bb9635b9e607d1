use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use m2ch_cli::io::Table;

fn m2ch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_m2ch")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run_ok(cfg: &Path) -> String {
    let out = m2ch(&["run", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn diagnostics(dir: &Path) -> Table {
    Table::read_csv(&dir.join("diagnostics.csv")).unwrap()
}

fn gaussian_config(out: &str, n: usize, dt: f64, format: &str) -> String {
    format!(
        r#"{{"scenario": {{"type": "gaussian", "amp_u": 0.8, "amp_gamma": 0.4, "width": 1.0}},
            "grid": {{"xi_min": -30.0, "xi_max": 30.0, "n": {n}}},
            "time": {{"dt": {dt}, "t_end": 0.5, "output_every": 0.25}},
            "eulerian_out": {{"x_min": -6.0, "x_max": 6.0, "m": 241}},
            "output": {{"directory": "{out}", "format": "{format}"}}}}"#
    )
}

#[test]
fn zero_scenario_has_zero_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "zero.json",
        r#"{"scenario": {"type": "zero"}, "grid": {"n": 201},
            "time": {"dt": 0.01, "t_end": 1.0, "output_every": 0.25}}"#,
    );
    run_ok(&cfg);
    let d = diagnostics(&tmp.path().join("out"));
    assert_eq!(d.rows(), 5);
    assert!(d.column("total_energy").unwrap().iter().all(|&e| e == 0.0));
    assert!(d.column("breaking_flag").unwrap().iter().all(|&f| f == 0.0));
    let atoms = Table::read_csv(&tmp.path().join("out/atoms.csv")).unwrap();
    assert_eq!(atoms.rows(), 0);
    let e = Table::read_csv(&tmp.path().join("out/eulerian_00004.csv")).unwrap();
    assert_eq!(e.columns, ["x", "u", "gamma", "mu_density"]);
    assert_eq!(e.rows(), 2001);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let cfg = write_config(tmp.path(), &format!("{name}.json"), &gaussian_config(name, 401, 0.01, "csv"));
        run_ok(&cfg);
    }
    let mut names: Vec<_> = std::fs::read_dir(tmp.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 3 * 2 + 2);
    for n in names {
        let a = std::fs::read(tmp.path().join("a").join(&n)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(&n)).unwrap();
        assert!(a == b, "{n:?} differs");
        assert!(!a.contains(&b'\r'));
    }
}

#[test]
fn peakon_antipeakon_breaks_and_keeps_its_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "pa.json",
        r#"{"scenario": {"type": "peakon_antipeakon", "c": 1.0, "a": 2.0},
            "grid": {"n": 2048},
            "time": {"t_end": 3.5, "output_every": 0.5}}"#,
    );
    let stdout = run_ok(&cfg);
    assert!(stdout.contains("breaking at t = 2.71"), "{stdout}");
    let d = diagnostics(&tmp.path().join("out"));
    let (t, flag) = (d.column("t").unwrap(), d.column("breaking_flag").unwrap());
    let k = flag.iter().position(|&f| f == 1.0).expect("breaking is flagged");
    assert!((t[k] - 2.7135).abs() < 1e-3, "{}", t[k]);
    let e = d.column("total_energy").unwrap();
    assert!(e.iter().all(|v| (v - e[0]).abs() <= 1e-4 * e[0]));

    let atoms = Table::read_csv(&tmp.path().join("out/atoms.csv")).unwrap();
    assert!(atoms.rows() > 0);
    let at = atoms.column("t").unwrap();
    assert!(at.iter().all(|&s| (s - t[k]).abs() < 1e-12), "{at:?}");
    let mass = atoms.column("mass").unwrap()[0];
    assert!(mass > 0.9 * e[0] && mass <= e[0]);
    assert!(atoms.column("location").unwrap()[0].abs() < 1e-6);

    let snap = tmp.path().join(format!("out/lagrangian_{k:05}.csv"));
    let out = m2ch(&["check", snap.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn unknown_config_key_exits_with_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "typo.json",
        r#"{"scenario": {"type": "zero"}, "tolerances": {"constraint_tool": 1e-6}}"#,
    );
    let out = m2ch(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("constraint_tool"));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn bad_usage_and_missing_files() {
    assert_eq!(m2ch(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(m2ch(&["run", "/nonexistent/config.json"]).status.code(), Some(3));
    assert_eq!(m2ch(&["check", "/nonexistent/snapshot.csv"]).status.code(), Some(3));
    assert_eq!(m2ch(&["--help"]).status.code(), Some(0));
}

#[test]
fn compare_identical_runs_is_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "a.json", &gaussian_config("a", 201, 0.05, "csv"));
    run_ok(&cfg);
    let a = tmp.path().join("a");
    let out = m2ch(&["compare", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,table,field,norm,ab"));
    let rows: Vec<&str> = lines.collect();
    // 3 snapshots, 9 Lagrangian fields with 2 norms plus the E-norm, 3 Eulerian fields with 2 norms
    assert_eq!(rows.len(), 3 * (9 * 2 + 1 + 3 * 2));
    assert!(rows.iter().all(|r| r.ends_with(",0.0000000000000000e0")), "{text}");
}

#[test]
fn compare_rejects_mismatched_times() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&write_config(tmp.path(), "a.json", &gaussian_config("a", 201, 0.05, "csv")));
    let other = gaussian_config("b", 201, 0.05, "csv").replace("\"output_every\": 0.25", "\"output_every\": 0.1");
    run_ok(&write_config(tmp.path(), "b.json", &other));
    let out = m2ch(&["compare", tmp.path().join("a").to_str().unwrap(), tmp.path().join("b").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_output_matches_csv_output() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&write_config(tmp.path(), "a.json", &gaussian_config("a", 201, 0.05, "csv")));
    run_ok(&write_config(tmp.path(), "b.json", &gaussian_config("b", 201, 0.05, "json")));
    let text = std::fs::read_to_string(tmp.path().join("b/snapshots.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 3);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["t", "lagrangian", "eulerian", "atoms", "total_energy", "min_nu", "res_218", "res_219", "breaking_flag"] {
        assert!(first.get(key).is_some(), "{key}");
    }
    let out = m2ch(&["compare", tmp.path().join("a").to_str().unwrap(), tmp.path().join("b").to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|r| r.ends_with(",0.0000000000000000e0")), "{text}");
}

fn orders(text: &str, table: &str, field: &str, norm: &str) -> Vec<f64> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|c| c[1] == table && c[2] == field && c[3] == norm && !c[6].is_empty())
        .map(|c| c[6].parse().unwrap())
        .collect()
}

#[test]
fn compare_reports_grid_convergence_order() {
    let tmp = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for (name, n) in [("n1", 301), ("n2", 601), ("n3", 1201)] {
        let body = gaussian_config(name, n, 0.01, "csv").replace("\"m\": 241", "\"m\": 121");
        run_ok(&write_config(tmp.path(), &format!("{name}.json"), &body));
        dirs.push(tmp.path().join(name).to_str().unwrap().to_string());
    }
    let out = m2ch(&["compare", &dirs[0], &dirs[1], &dirs[2]]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let u = orders(&text, "eulerian", "u", "linf");
    assert_eq!(u.len(), 3);
    assert!(u.iter().all(|&p| p >= 1.9), "{u:?}");
}

#[test]
fn compare_reports_time_convergence_order() {
    let tmp = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for (name, dt) in [("d1", 0.05), ("d2", 0.025), ("d3", 0.0125)] {
        run_ok(&write_config(tmp.path(), &format!("{name}.json"), &gaussian_config(name, 401, dt, "csv")));
        dirs.push(tmp.path().join(name).to_str().unwrap().to_string());
    }
    let out = m2ch(&["compare", &dirs[0], &dirs[1], &dirs[2]]);
    let text = String::from_utf8(out.stdout).unwrap();
    let e = orders(&text, "lagrangian", "state", "E");
    assert_eq!(e.len(), 2);
    assert!(e.iter().all(|&p| p >= 3.9), "{e:?}");
}

#[test]
fn check_detects_a_broken_constraint() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&write_config(tmp.path(), "a.json", &gaussian_config("a", 201, 0.05, "csv")));
    let snap = tmp.path().join("a/lagrangian_00001.csv");
    assert!(m2ch(&["check", snap.to_str().unwrap()]).status.success());
    let mut t = Table::read_csv(&snap).unwrap();
    let k = t.columns.iter().position(|c| c == "kappa").unwrap();
    t.data[k][100] += 1e-3;
    let bad = tmp.path().join("bad.csv");
    t.write_csv(&bad).unwrap();
    let out = m2ch(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn file_scenario_matches_analytic_start() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&write_config(tmp.path(), "a.json", &gaussian_config("a", 401, 0.05, "csv")));
    let body = gaussian_config("b", 401, 0.05, "csv").replace(
        r#"{"type": "gaussian", "amp_u": 0.8, "amp_gamma": 0.4, "width": 1.0}"#,
        r#"{"type": "from_file", "path": "a/eulerian_00000.csv"}"#,
    );
    run_ok(&write_config(tmp.path(), "b.json", &body));
    let ea = diagnostics(&tmp.path().join("a")).column("total_energy").unwrap().to_vec();
    let eb = diagnostics(&tmp.path().join("b")).column("total_energy").unwrap().to_vec();
    assert!((ea[0] - eb[0]).abs() < 1e-3 * ea[0], "{ea:?} {eb:?}");
}

#[test]
fn metric_writes_ratios() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "m.json",
        r#"{"scenario": {"type": "gaussian", "amp_u": 0.5, "amp_gamma": 0.2, "width": 1.0},
            "grid": {"xi_min": -30.0, "xi_max": 30.0, "n": 601},
            "time": {"dt": 0.01},
            "eulerian_out": {"x_min": -6.0, "x_max": 6.0, "m": 121},
            "metric": {"epsilons": [1e-2, 1e-3], "times": [0.0, 0.2]}}"#,
    );
    let out = m2ch(&["metric", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = Table::read_csv(&tmp.path().join("out/metric.csv")).unwrap();
    assert_eq!(t.rows(), 4);
    let ratio = t.column("ratio").unwrap();
    assert!(ratio.iter().step_by(2).all(|&r| r == 1.0));
    assert!(ratio.iter().all(|&r| r > 0.5 && r < 2.0), "{ratio:?}");
}
