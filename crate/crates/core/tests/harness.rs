use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use nullgeo::error::{CheckError, HarnessError};
use nullgeo::harness::report::{to_csv, to_human, to_json};
use nullgeo::harness::{from_json, run_scenario_with_threads, Scenario, Verdict};

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn load(name: &str) -> Scenario {
    Scenario::load(&scenario_dir().join(name)).unwrap()
}

fn inline(text: &str) -> Scenario {
    Scenario::from_toml(text).unwrap()
}

#[test]
fn hyperplane_full_suite_passes() {
    let start = Instant::now();
    let r = run_scenario_with_threads(&load("hyperplane.toml"), None).unwrap();
    eprintln!("hyperplane full suite: {:?}", start.elapsed());
    assert_eq!(r.verdict, Verdict::Pass, "{:#?}", r.summary);
    assert_eq!(r.points.len(), 81);
}

#[test]
fn de_sitter_full_suite_passes() {
    let r = run_scenario_with_threads(&load("desitter.toml"), None).unwrap();
    let failing: Vec<_> = r.summary.iter().filter(|(_, s)| !s.pass).collect();
    assert!(failing.is_empty(), "{failing:#?}");
    assert!(r.summary.contains_key("ricci_flat.margin"));
    assert!(r.summary.contains_key("einstein_structure.single_k"));
}

#[test]
fn every_shipped_scenario_parses() {
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn grw_report_names_the_matching_psi() {
    let r = run_scenario_with_threads(&load("grw_exp.toml"), None).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.ambient_curvature, Some(1.0));
    for p in &r.points {
        let reference = p.fits.psi_reference.as_ref().unwrap();
        assert_eq!(reference.matches, "sqrt2 rho'/rho");
        assert!((p.fits.phi - 1.0).abs() < 1e-8);
    }
}

#[test]
fn cartan_on_a_non_isoparametric_graph_is_a_structured_error() {
    let err = run_scenario_with_threads(&load("torus_cartan.toml"), None).unwrap_err();
    assert!(matches!(err, HarnessError::Check(CheckError::NotIsoparametric(_))), "{err}");
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn non_eikonal_graph_aborts_construction() {
    let s = inline(
        r#"
        [ambient]
        kind = "minkowski"
        dim = 4
        [hypersurface]
        graph = { kind = "linear", direction = [1.5, 0.0, 0.0] }
        domain = [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]
        "#,
    );
    let err = run_scenario_with_threads(&s, None).unwrap_err();
    assert!(matches!(err, HarnessError::EikonalViolated { .. }));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn space_form_checks_on_a_generic_grw_are_rejected() {
    let s = inline(
        r#"
        [ambient]
        kind = "grw"
        warping = { kind = "constant", value = 1.0 }
        fiber = "hyperbolic"
        fiber_dim = 3
        t_min = -3.0
        t_max = 3.0
        [hypersurface]
        graph = { kind = "hyperbolic_radial" }
        domain = [[0.1, 0.5], [0.1, 0.5], [0.1, 0.5]]
        [grid]
        count = 2
        [checks]
        enabled = ["einstein"]
        "#,
    );
    let err = run_scenario_with_threads(&s, None).unwrap_err();
    assert_eq!(err.exit_code(), 3);

    let mut default_checks = s.clone();
    default_checks.checks.enabled = None;
    let r = run_scenario_with_threads(&default_checks, None).unwrap();
    assert_eq!(r.ambient_curvature, None);
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(!r.summary.keys().any(|k| k.starts_with("space_form.")));
}

#[test]
fn reports_are_identical_across_runs_and_worker_counts() {
    let s = load("desitter.toml");
    let a = to_json(&run_scenario_with_threads(&s, Some(1)).unwrap()).unwrap();
    let b = to_json(&run_scenario_with_threads(&s, Some(4)).unwrap()).unwrap();
    let c = to_json(&run_scenario_with_threads(&s, Some(4)).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(b, c);
}

#[test]
fn seed_changes_only_the_test_vectors() {
    let mut s = load("cylinder.toml");
    let a = run_scenario_with_threads(&s, None).unwrap();
    s.seed += 1;
    let b = run_scenario_with_threads(&s, None).unwrap();
    assert_eq!(a.points.len(), b.points.len());
    for (p, q) in a.points.iter().zip(&b.points) {
        assert_eq!(p.fits, q.fits);
    }
}

#[test]
fn single_point_grid_gives_one_csv_row_per_identity() {
    let s = inline(
        r#"
        [hypersurface]
        catalog = "minkowski_null_cone"
        [grid]
        count = 1
        "#,
    );
    let r = run_scenario_with_threads(&s, None).unwrap();
    assert_eq!(r.points.len(), 1);
    let csv = String::from_utf8(to_csv(&r).unwrap()).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), r.summary.len());
    assert!(rows.iter().all(|row| row.starts_with("0,")));
    let names: std::collections::BTreeSet<&str> = rows.iter().map(|row| row.split(',').nth(2).unwrap()).collect();
    assert_eq!(names.len(), rows.len());
}

#[test]
fn json_round_trips() {
    let r = run_scenario_with_threads(&load("cylinder.toml"), None).unwrap();
    let bytes = to_json(&r).unwrap();
    let back = from_json(&bytes).unwrap();
    assert_eq!(back, r);
    assert_eq!(to_json(&back).unwrap(), bytes);
    let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["schema_version"], 1);
    for key in ["scenario", "points", "summary", "verdict", "ambient_curvature"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn human_format_lists_fitted_quantities() {
    let r = run_scenario_with_threads(&load("desitter.toml"), None).unwrap();
    let text = to_human(&r);
    for needle in ["phi    =", "psi    =", "k      =", "lambda = [", "verdict: PASS", "einstein.fit"] {
        assert!(text.contains(needle), "missing {needle}");
    }
}

#[test]
fn tolerance_override_can_fail_a_run() {
    let mut s = load("cylinder.toml");
    s.override_tolerances(&["einstein.ricci_two_routes=1e-300".into()]).unwrap();
    let r = run_scenario_with_threads(&s, None).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.summary["einstein.ricci_two_routes"].pass);
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nullgeo"))
}

#[test]
fn cli_check_writes_reports_and_sets_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = cli()
        .args(["check", "--format", "json", "--output"])
        .arg(&out)
        .arg(scenario_dir().join("cylinder.toml"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = from_json(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);

    let csv = cli().args(["report", "--format", "csv"]).arg(&out).output().unwrap();
    assert_eq!(csv.status.code(), Some(0));
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("point_index,u,identity"));

    let failing = cli()
        .args(["check", "--tol", "einstein=1e-300", "--seed", "4"])
        .arg(scenario_dir().join("cylinder.toml"))
        .output()
        .unwrap();
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8(failing.stdout).unwrap().contains("FAIL"));
}

#[test]
fn cli_errors_are_structured() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[hypersurface]\ncatalog = \"desitter_distance_graph\"\nalpha = 2.0\n").unwrap();
    let out = cli().arg("check").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["exit_code"], 3);

    let out = cli().arg("check").arg(scenario_dir().join("torus_cartan.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("isoparametric"));

    std::fs::write(&bad, "[hypersurface]\ncatalog = \"minkowski_null_hyperplane\"\nbogus = 1\n").unwrap();
    assert_eq!(cli().arg("check").arg(&bad).output().unwrap().status.code(), Some(3));
}

#[test]
fn cli_catalog_lists_and_describes() {
    let out = cli().args(["catalog", "list"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["minkowski_null_hyperplane", "minkowski_null_cone", "grw_graph", "desitter_distance_graph", "cylinder_l2"] {
        assert!(text.contains(name));
    }
    let out = cli().args(["catalog", "describe", "desitter_distance_graph"]).output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("alpha"));
    assert_eq!(cli().args(["catalog", "describe", "nope"]).output().unwrap().status.code(), Some(3));
}
