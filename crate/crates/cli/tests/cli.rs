//! The `curveflow` binary: subcommands, exit codes and the output override.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn curveflow(args: &[&str], out_root: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_curveflow"));
    cmd.args(args).env_remove("CURVEFLOW_OUTPUT_DIR");
    if let Some(root) = out_root {
        cmd.env("CURVEFLOW_OUTPUT_DIR", root);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SHORT: [&str; 4] = ["--set", "solver.t_end=0.2", "--set", "solver.snapshot_dt=0.1"];

#[test]
fn lists_every_builtin() {
    let out = curveflow(&["list-scenarios"], None);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in [
        "torus_knot_2_3",
        "torus_knot_2_3_immersed",
        "torus_attract_3_5",
        "klein_knot_1_4",
        "bump_surface_ellipse",
        "sphere_latitude",
        "great_circle",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn shown_config_runs_as_a_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = curveflow(&["show-scenario", "great_circle"], None);
    assert_eq!(code(&out), 0);
    let config = tmp.path().join("gc.toml");
    fs::write(&config, stdout(&out)).unwrap();
    let mut args = vec!["run", config.to_str().unwrap()];
    args.extend(SHORT);
    let out = curveflow(&args, Some(tmp.path()));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let dir = tmp.path().join("great_circle");
    assert!(dir.join("metadata.toml").exists());
    assert!(dir.join("series.csv").exists());
    assert_eq!(fs::read_dir(dir.join("snapshots")).unwrap().count(), 3);
}

#[test]
fn output_override_places_runs_by_name() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["scenario", "torus_knot_2_3"];
    args.extend(SHORT);
    let out = curveflow(&args, Some(tmp.path()));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let snaps = tmp.path().join("torus_knot_2_3").join("snapshots");
    // csv and obj for each of the three snapshot times
    assert_eq!(fs::read_dir(snaps).unwrap().count(), 6);
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut args = vec!["scenario", "torus_knot_2_3_immersed"];
    args.extend(SHORT);
    assert_eq!(code(&curveflow(&args, Some(a.path()))), 0);
    assert_eq!(code(&curveflow(&args, Some(b.path()))), 0);
    let snap = |root: &Path| {
        let dir = root.join("torus_knot_2_3_immersed").join("snapshots");
        let mut files: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        files.iter().map(|p| fs::read(p).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(snap(a.path()), snap(b.path()));
}

#[test]
fn diag_reports_a_finished_run() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["scenario", "torus_attract_3_5"];
    args.extend(SHORT);
    assert_eq!(code(&curveflow(&args, Some(tmp.path()))), 0);
    let dir = tmp.path().join("torus_attract_3_5");
    let out = curveflow(&["diag", dir.to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("torus_attract_3_5"));
    for file in ["length.dat", "max_f.dat", "dispersion.dat", "summary.txt"] {
        assert!(dir.join(file).exists(), "{file}");
    }
}

#[test]
fn sweep_runs_each_scenario_into_its_own_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "great_circle", "sphere_latitude", "--threads", "2"];
    args.extend(SHORT);
    let out = curveflow(&args, Some(tmp.path()));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(tmp.path().join("great_circle").join("series.csv").exists());
    assert!(tmp.path().join("sphere_latitude").join("series.csv").exists());
}

#[test]
fn bad_input_exits_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = curveflow(&["scenario", "no_such_scenario"], Some(tmp.path()));
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("no_such_scenario"));

    let out = curveflow(&["scenario", "great_circle", "--set", "solver.t_end=-1"], Some(tmp.path()));
    assert_eq!(code(&out), 2);

    let config = tmp.path().join("bad.toml");
    fs::write(
        &config,
        "name = \"x\"\nformulation = \"embedded\"\n[surface]\nname = \"torus\"\ntube_radius = 4.0\ncenter_radius = 1.0\n\
         [initial_curve]\ntype = \"torus_knot\"\nk = 2\nl = 3\n[solver]\nt_end = 1.0\n",
    )
    .unwrap();
    let out = curveflow(&["run", config.to_str().unwrap()], Some(tmp.path()));
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("0 < r < R"), "{}", stderr(&out));
}

#[test]
fn solver_failure_exits_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = curveflow(
        &["scenario", "klein_knot_1_4", "--set", "redistribution.omega=10", "--set", "solver.t_end=0.2"],
        Some(tmp.path()),
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    // the partial run is still on disk
    assert!(tmp.path().join("klein_knot_1_4").join("metadata.toml").exists());
}

#[test]
fn io_failures_exit_with_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = curveflow(&["diag", tmp.path().join("missing").to_str().unwrap()], None);
    assert_eq!(code(&out), 4);

    let out = curveflow(&["run", tmp.path().join("absent.toml").to_str().unwrap()], None);
    assert_eq!(code(&out), 4);
}
