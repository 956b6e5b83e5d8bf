use std::path::Path;
use std::process::{Command, Output};

fn fractura(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractura")).args(args).env("FRACTURA_THREADS", "1").output().unwrap()
}

fn phi_values(vtk: &str) -> Vec<f64> {
    let mut lines = vtk.lines().skip_while(|l| !l.starts_with("SCALARS phi")).skip(2);
    let n: usize = vtk.lines().find_map(|l| l.strip_prefix("POINT_DATA ")).unwrap().trim().parse().unwrap();
    (0..n).map(|_| lines.next().unwrap().parse().unwrap()).collect()
}

fn run_elastic(out: &Path) -> Output {
    fractura(&["run", "--scenario", "elastic", "--set", "cadence=5", "--out", out.to_str().unwrap()])
}

#[test]
fn elastic_run_writes_log_snapshots_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_elastic(dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "step,t,dt,E,n_elements,h_min,n_stagger,dissipation,crack_tip_x,crack_tip_speed");
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());

    let mut snapshots: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "vtk"))
        .collect();
    snapshots.sort();
    assert_eq!(snapshots.len(), rows.len().div_ceil(5));
    for p in &snapshots {
        let vtk = std::fs::read_to_string(p).unwrap();
        assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
        assert!(vtk.contains("CELLS 256 1024"));
        assert!(phi_values(&vtk).iter().all(|v| (v - 1.0).abs() < 1e-6));
    }

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["total_steps"].as_u64().unwrap() as usize, rows.len());
    assert_eq!(summary["final_elements"], 256);
    assert!(summary["aborted"].is_null());
    let printed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed["total_steps"], summary["total_steps"]);
}

#[test]
fn single_threaded_reruns_are_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run_elastic(a.path()).status.success());
    assert!(run_elastic(b.path()).status.success());
    let read = |d: &Path| std::fs::read(d.join("run.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn validate_config_resolves_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("plate.cfg");
    std::fs::write(&cfg, "# desk plate\nscenario = branching-desk\nnx = 32\ntraction = 5e3\n").unwrap();
    let out = fractura(&["validate-config", cfg.to_str().unwrap(), "--tol-max", "2e-3", "--chi", "0.3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["scenario"]["traction"], 5e3);
    assert_eq!(v["scenario"]["tol_max"], 2e-3);
    assert_eq!(v["scenario"]["mesh"]["Structured"]["ny"], 16);
    assert_eq!(v["driver"]["chi"], 0.3);
}

#[test]
fn bad_input_exits_with_an_error() {
    let out = fractura(&["validate-config", "--set", "no_such_key=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = fractura(&["run", "--scenario", "cubic", "--mesh-file", "/no/such/file.mesh", "--out", "/tmp/unused"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fractura(&["validate-config", "/no/such/config"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_and_convergence_verbs() {
    let out = fractura(&["profile-1d", "--cells-per-ell", "10"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["linf"].as_f64().unwrap() < 2e-2);
    let out = fractura(&["convergence"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("rho_inf = 0.5"));
}
