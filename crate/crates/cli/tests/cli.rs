use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use deadcore::balance::BarrierProfile;
use deadcore_cli::{
    command, emit_report, run, Report, Verb, EXIT_CONFIG, EXIT_INADMISSIBLE, EXIT_OK, EXIT_RUNTIME, EXIT_UNWRITABLE,
};
use serde_json::Value;
use tempfile::TempDir;

const EXACT: &str = r#"{"beta":0,"m":1,"q":0,"gamma":0,"alpha":0,"lambda":1,"c":0,"d":1,
"hamiltonian":"none","nonlinearity":"hardy_henon"}"#;

const ROW_ONE: &str = r#"{"beta":0,"m":1,"q":0.5,"gamma":1,"alpha":0,"lambda":1,"c":-1,"d":1,
"hamiltonian":"negative_mixed","nonlinearity":"hardy_henon"}"#;

fn spec_file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn balance_reports_classical_constants() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let out = dir.path().join("out");
    assert_eq!(run(&command(Verb::Balance, &spec, &out, &[])), EXIT_OK);
    let r = report(&out);
    let res = &r["results"];
    assert!((num(&res["p"]) - 4.0 / 3.0).abs() < 1e-11);
    assert!((num(&res["tau"]) - 1.08168717773).abs() < 1e-10);
    assert!((num(&res["T"]) - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-11);
    let profile: BarrierProfile = serde_json::from_value(res["profile"].clone()).unwrap();
    assert!((profile.thickness - num(&res["T"])).abs() < 1e-15);
    assert_eq!(r["violations"], Value::Array(vec![]));
    assert!(fs::read_to_string(out.join("summary.txt")).unwrap().contains("p = 1.33333333333"));
}

#[test]
fn admit_lists_every_constraint_satisfied() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "row1.json", ROW_ONE);
    let out = dir.path().join("out");
    assert_eq!(run(&command(Verb::Admit, &spec, &out, &[])), EXIT_OK);
    let r = report(&out);
    assert_eq!(r["admissible"], Value::Bool(true));
    assert_eq!(r["results"]["violation_count"], Value::from(0));
    assert!(fs::read_to_string(out.join("summary.txt"))
        .unwrap()
        .contains("all constraints satisfied"));
}

#[test]
fn admit_reports_violations_without_failing() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "row1.json", ROW_ONE);
    let out = dir.path().join("out");
    let set = ["m=3", "q=0", "hamiltonian=gradient_power", "c=1", "gamma=0"];
    assert_eq!(run(&command(Verb::Admit, &spec, &out, &set)), EXIT_OK);
    let r = report(&out);
    assert_eq!(r["admissible"], Value::Bool(false));
    let messages: Vec<&str> = r["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["constraint"].as_str().unwrap())
        .collect();
    assert_eq!(messages, ["m < 3−β"]);
}

#[test]
fn inadmissible_spec_exits_two_with_report() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let out = dir.path().join("out");
    assert_eq!(run(&command(Verb::Balance, &spec, &out, &["gamma=3.5"])), EXIT_INADMISSIBLE);
    assert_eq!(report(&out)["admissible"], Value::Bool(false));
}

#[test]
fn config_errors_exit_sixty_four() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&command(Verb::Balance, &missing, &out, &[])), EXIT_CONFIG);
    let broken = spec_file(&dir, "broken.json", "{\"beta\": ");
    assert_eq!(run(&command(Verb::Balance, &broken, &out, &[])), EXIT_CONFIG);
    let spec = spec_file(&dir, "exact.json", EXACT);
    assert_eq!(run(&command(Verb::Balance, &spec, &out, &["typo=1"])), EXIT_CONFIG);
    assert_eq!(run(&command(Verb::Balance, &spec, &out, &["noequals"])), EXIT_CONFIG);
    assert_eq!(run(&command(Verb::Grid, &spec, &out, &["stencil_dirs=12"])), EXIT_CONFIG);
    assert!(!out.exists());
}

#[test]
fn unwritable_output_exits_seventy_three() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let blocker = spec_file(&dir, "file", "");
    let out = blocker.join("sub");
    assert_eq!(run(&command(Verb::Balance, &spec, &out, &[])), EXIT_UNWRITABLE);
}

#[test]
fn runtime_errors_exit_one_and_still_report() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let out = dir.path().join("out");
    let exp = ["nonlinearity=exponential", "hamiltonian=gradient_power", "c=1"];
    assert_eq!(run(&command(Verb::Liouville, &spec, &out, &exp)), EXIT_RUNTIME);
    assert!(report(&out)["results"]["error"].as_str().unwrap().contains("unsupported"));
    assert_eq!(run(&command(Verb::Balance, &spec, &out, &["R=0.5"])), EXIT_RUNTIME);
    let grid = ["nodes=9", "max_iters=2"];
    assert_eq!(run(&command(Verb::Grid, &spec, &out, &grid)), EXIT_RUNTIME);
    assert_eq!(report(&out)["results"]["converged"], Value::Bool(false));
}

#[test]
fn identical_runs_are_bitwise_identical() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(run(&command(Verb::Barrier, &spec, out, &["samples=50"])), EXIT_OK);
    }
    for name in ["report.json", "summary.txt", "residuals.csv", "profile.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let header = fs::read_to_string(a.join("residuals.csv")).unwrap();
    assert!(header.starts_with("s,lhs,balanced_rhs,other_rhs,residual,ratio_other_over_lhs\n"));
}

#[test]
fn empty_report_has_empty_arrays() {
    let dir = TempDir::new().unwrap();
    emit_report(&Report::new("admit", None), dir.path()).unwrap();
    let r = report(dir.path());
    assert_eq!(r["violations"], Value::Array(vec![]));
    assert_eq!(r["artifacts"], Value::Array(vec![]));
    assert_eq!(r["results"], Value::Object(Default::default()));
}

#[test]
fn radial_matches_closed_form_thickness() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let out = dir.path().join("out");
    assert_eq!(run(&command(Verb::Radial, &spec, &out, &[])), EXIT_OK);
    let res = &report(&out)["results"];
    assert!((num(&res["t_measured"]) / num(&res["t_predicted"]) - 1.0).abs() < 1e-4);
    assert!(num(&res["plateau_max"]) < 1e-9);
    assert!(fs::read_to_string(out.join("radial.csv")).unwrap().starts_with("s,h,hp,residual\n"));
}

#[test]
fn grid_modes_agree() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let (gs, jac) = (dir.path().join("gs"), dir.path().join("jac"));
    assert_eq!(run(&command(Verb::Grid, &spec, &gs, &["nodes=17"])), EXIT_OK);
    assert_eq!(run(&command(Verb::Grid, &spec, &jac, &["nodes=17", "mode=jacobi"])), EXIT_OK);
    let (a, b) = (report(&gs), report(&jac));
    assert_eq!(b["results"]["mode"], Value::from("jacobi"));
    assert!((num(&a["results"]["max_u"]) - 1.0).abs() < 1e-12);
    assert!(num(&a["results"]["min_u"]) >= 0.0);
    let csv = |p: &Path| fs::read_to_string(p.join("grid.csv")).unwrap();
    let values = |text: String| -> Vec<f64> {
        text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect()
    };
    let gap = values(csv(&gs))
        .iter()
        .zip(values(csv(&jac)))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-6, "gap {gap}");
}

#[test]
fn liouville_classifies_the_witness_ladder() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    for (scale, expected) in [("0.9", "subcritical"), ("1.0", "at_threshold"), ("1.1", "above_threshold")] {
        let out = dir.path().join(scale);
        let set = [format!("witness_scale={scale}"), "consistency_ladder=[]".to_string()];
        let set: Vec<&str> = set.iter().map(String::as_str).collect();
        assert_eq!(run(&command(Verb::Liouville, &spec, &out, &set)), EXIT_OK);
        assert_eq!(report(&out)["results"]["witness"]["classification"], Value::from(expected));
    }
    let out = dir.path().join("plateau");
    assert_eq!(run(&command(Verb::Liouville, &spec, &out, &[])), EXIT_OK);
    assert!(num(&report(&out)["results"]["plateau_fraction_max_rel_error"]) < 0.02);
}

#[test]
fn counterexample_is_a_supersolution() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let out = dir.path().join("out");
    let set = ["nonlinearity=exponential", "hamiltonian=gradient_power", "c=1", "gamma=1", "alpha=-0.5"];
    assert_eq!(run(&command(Verb::Counterexample, &spec, &out, &set)), EXIT_OK);
    let r = report(&out);
    assert!(num(&r["results"]["max_residual"]) <= 0.0);
    assert_eq!(r["results"]["oscillation"]["tail_decreasing"], Value::Bool(true));
    let rows = fs::read_to_string(out.join("counterexample.csv")).unwrap().lines().count();
    assert_eq!(rows, 301);
}

#[test]
fn table1_sweeps_every_model_row() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let out = dir.path().join("out");
    let set = ["sweep_beta=[0,1]", "sweep_gamma=[0,0.5,1]"];
    assert_eq!(run(&command(Verb::Table1, &spec, &out, &set)), EXIT_OK);
    let text = fs::read_to_string(out.join("table1.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 2 * 3);
    let first = &rows[0];
    assert_eq!(first[0], "1");
    assert_eq!(first[11], "1.33333333333");
    assert_eq!(first[12], "1.08168717773");
    assert!(rows.iter().filter(|r| r[0] == "3").all(|r| r[6] == "0"));
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_deadcore"))
}

#[test]
fn every_verb_help_names_an_anchor() {
    for verb in ["admit", "balance", "barrier", "radial", "grid", "liouville", "counterexample", "table1"] {
        let out = binary().args([verb, "--help"]).output().unwrap();
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("Anchors:"), "{verb}");
    }
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "exact.json", EXACT);
    let out = dir.path().join("out");
    let status = |cmd: &mut Process| cmd.status().unwrap().code().unwrap();
    let spec_arg = spec.to_str().unwrap();
    let out_arg = out.to_str().unwrap();
    assert_eq!(status(binary().args(["balance", "--spec", spec_arg, "--out", out_arg])), EXIT_OK);
    assert_eq!(status(binary().args(["frobnicate"])), EXIT_CONFIG);
    assert_eq!(
        status(binary().args(["balance", "--spec", spec_arg, "--out", out_arg]).env("DEADCORE_THREADS", "zero")),
        EXIT_CONFIG
    );
    assert_eq!(
        status(binary().args(["grid", "--spec", spec_arg, "--out", out_arg, "--set", "nodes=9"]).env("DEADCORE_THREADS", "1")),
        EXIT_OK
    );
}
