use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const QUICK: &str = r#"
dt = 0.01
t_end = 0.08
seed = 5
checkpoint_every = 4

[grid]
modes = [8, 8, 8]

[damping]
kind = "logarithmic"
alpha = 1.0

[ic]
kind = "taylor_green"
amplitude = 1.0
perturbation = 0.05

[checks]
relative_tolerance = 1e-3
"#;

fn nsdamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsdamp"))
        .args(args)
        .env_remove("NSDAMP_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn run_succeeds_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "quick.toml", QUICK);
    let out_dir = dir.path().join("out");
    let out = nsdamp(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("PASS energy_inequality_logarithmic"),
        "{stdout}"
    );
    for f in [
        "ledger.csv",
        "manifest.json",
        "config.toml",
        "final.ckpt",
        "checkpoint_00000004.ckpt",
    ] {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
}

#[test]
fn identical_seeds_give_identical_ledgers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "quick.toml", QUICK);
    let ledger = |sub: &str, seed: &str| {
        let d = dir.path().join(sub);
        assert_eq!(
            code(&nsdamp(&[
                "run",
                "--config",
                &cfg,
                "--out",
                d.to_str().unwrap(),
                "--seed",
                seed
            ])),
            0
        );
        fs::read(d.join("ledger.csv")).unwrap()
    };
    let a = ledger("a", "9");
    assert_eq!(a, ledger("b", "9"));
    assert_ne!(a, ledger("c", "10"));
}

#[test]
fn zero_length_run_records_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "zero.toml",
        &QUICK.replace("t_end = 0.08", "t_end = 0.0"),
    );
    let out_dir = dir.path().join("out");
    let out = nsdamp(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("ledger.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    assert_eq!(
        code(&nsdamp(&["run", "--config", missing.to_str().unwrap()])),
        2
    );

    let bad = write(
        dir.path(),
        "bad.toml",
        &QUICK.replace("dt = 0.01", "dt = -0.01"),
    );
    let out = nsdamp(&[
        "run",
        "--config",
        &bad,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let typo = write(
        dir.path(),
        "typo.toml",
        &format!("{QUICK}\nviscosty = 2.0\n"),
    );
    assert_eq!(
        code(&nsdamp(&[
            "run",
            "--config",
            &typo,
            "--out",
            dir.path().join("p").to_str().unwrap()
        ])),
        2
    );

    assert_eq!(code(&nsdamp(&["verify", "--suite", "everything"])), 2);
    assert_eq!(code(&nsdamp(&[])), 2);
    assert_eq!(code(&nsdamp(&["run"])), 2);
}

#[test]
fn failed_check_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let strict = write(
        dir.path(),
        "strict.toml",
        &QUICK.replace("relative_tolerance = 1e-3", "relative_tolerance = 1e-12"),
    );
    let out_dir = dir.path().join("out");
    let out = nsdamp(&[
        "run",
        "--config",
        &strict,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL energy_inequality_logarithmic"));
    let manifest = fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"energy_inequality_logarithmic\""));
}

#[test]
fn verify_suite_passes() {
    let out = nsdamp(&["verify", "--suite", "oracle", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 3,
        "{stdout}"
    );
}

#[test]
fn resume_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "quick.toml", QUICK);
    let full = dir.path().join("full");
    assert_eq!(
        code(&nsdamp(&[
            "run",
            "--config",
            &cfg,
            "--out",
            full.to_str().unwrap()
        ])),
        0
    );
    let resumed = dir.path().join("resumed");
    let ckpt = full.join("checkpoint_00000004.ckpt");
    let out = nsdamp(&[
        "resume",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--config",
        &cfg,
        "--out",
        resumed.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(full.join("ledger.csv")).unwrap(),
        fs::read(resumed.join("ledger.csv")).unwrap()
    );

    let other = write(
        dir.path(),
        "other.toml",
        &QUICK.replace("modes = [8, 8, 8]", "modes = [8, 8, 16]"),
    );
    let out = nsdamp(&[
        "resume",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--config",
        &other,
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sweep_summary_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let spec = format!(
        "{}\n[sweep]\nkinds = [\"logarithmic\", \"power_law\"]\nalpha = [1.0, 2.0]\nbeta = [4.0]\n",
        QUICK.replace("t_end = 0.08", "t_end = 0.03")
    );
    let cfg = write(dir.path(), "sweep.toml", &spec);
    let summary = |workers: &str| {
        let d = dir.path().join(format!("w{workers}"));
        let out = nsdamp(&[
            "sweep",
            "--config",
            &cfg,
            "--out",
            d.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(d.join("summary.csv")).unwrap()
    };
    let one = summary("1");
    assert_eq!(one.lines().count(), 5);
    assert_eq!(one, summary("3"));
}
