use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ssdyn(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ssdyn"));
    cmd.args(args).env_remove("SSDYN_OUT");
    if let Some(p) = env_out {
        cmd.env("SSDYN_OUT", p);
    }
    cmd.output().expect("spawn ssdyn")
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn header(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

fn rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn spectra_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&ssdyn(
        &[
            "spectra", "--algs", "new2", "--xi", "0.1", "--points", "25", "--out", out,
        ],
        None,
    ));
    let csv = dir.path().join("spectra/spectra_new2.csv");
    assert_eq!(header(&csv), "omega_dt,xi,rho,xibar,pe");
    assert_eq!(rows(&csv), 25);
    assert!(dir.path().join("spectra").read_dir().unwrap().any(|e| e
        .unwrap()
        .path()
        .extension()
        .is_some_and(|x| x == "gp")));
}

#[test]
fn converge_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&ssdyn(
        &[
            "converge",
            "--problem",
            "forced-damped",
            "--algs",
            "new2",
            "--k-min",
            "2",
            "--k-max",
            "4",
            "--out",
            out,
        ],
        None,
    ));
    let csv = dir.path().join("converge/converge_forced-damped_new2.csv");
    assert_eq!(header(&csv), "dt,err_u,err_v,err_a");
    assert_eq!(rows(&csv), 3);
}

#[test]
fn simulate_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&ssdyn(
        &[
            "simulate",
            "--problem",
            "free-damped",
            "--algs",
            "new1",
            "--dt",
            "0.1",
            "--t-end",
            "1",
            "--out",
            out,
        ],
        None,
    ));
    let csv = dir.path().join("simulate/sim_free-damped_new1.csv");
    assert_eq!(header(&csv), "t,node,u,v");
    assert_eq!(rows(&csv), 11);
    assert_eq!(
        header(&dir.path().join("simulate/sim_free-damped_reference.csv")),
        "t,node,u,v"
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "command = \"spectra\"\nname = \"mine\"\nalgs = [\"ne\"]\npoints = 40\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = ssdyn(
        &[
            "run",
            cfg.to_str().unwrap(),
            "--points",
            "7",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    ok(&o);
    assert_eq!(rows(&out.join("mine/spectra_ne.csv")), 7);
}

#[test]
fn output_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    ok(&ssdyn(
        &["stability", "--algs", "new2", "--xi", "0", "--xi", "0.5"],
        Some(dir.path()),
    ));
    let csv = dir.path().join("stability/stability.csv");
    assert!(csv.exists());
    assert_eq!(rows(&csv), 2);
}

#[test]
fn unknown_config_key_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "command = \"spectra\"\ntime_step = 0.1\n").unwrap();
    let o = ssdyn(
        &[
            "run",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("time_step"), "{err}");
}

#[test]
fn divergence_names_algorithm_and_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = ssdyn(
        &[
            "simulate",
            "--problem",
            "free-undamped",
            "--algs",
            "ne",
            "--dt",
            "1.5",
            "--t-end",
            "2000",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("NE") && err.contains("step"), "{err}");
}

#[test]
fn unknown_algorithm_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = ssdyn(
        &[
            "spectra",
            "--algs",
            "bogus",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}
