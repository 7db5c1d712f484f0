use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn soc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soc"))
        .args(args)
        .output()
        .unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const TINY_CATCH: &str =
    "[env]\nname = catch\n[run]\nepochs = 2\ntrain_steps = 200\neval_steps = 100\n";

#[test]
fn oracle_solves_the_bundled_chain() {
    let out = soc(&[
        "oracle",
        configs().join("chain.mdp").to_str().unwrap(),
        "--gamma",
        "0.9",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "state,value,action");
    assert_eq!(rows.len(), 6);
    let v0: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((v0 - 0.729).abs() < 1e-9);
    assert!(rows[1..5].iter().all(|r| r.ends_with(",1")));
}

#[test]
fn train_writes_metrics_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY_CATCH);
    let out_dir = dir.path().join("out");
    let out = soc(&[
        "train",
        &cfg,
        "--seeds",
        "3",
        "--seed",
        "10",
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3 + 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("10,1,"));
    for seed in 10..13 {
        let d = out_dir.join(format!("tables/seed-{seed}"));
        assert!(d.join("high.qtable").exists() && d.join("low.qtable").exists());
    }

    let again = dir.path().join("again");
    soc(&[
        "train",
        &cfg,
        "--seeds",
        "3",
        "--seed",
        "10",
        "--out",
        again.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(
        std::fs::read_to_string(again.join("metrics.csv")).unwrap(),
        csv
    );

    let eval = soc(&[
        "eval",
        &cfg,
        "--tables",
        out_dir.join("tables").to_str().unwrap(),
        "--seeds",
        "3",
        "--seed",
        "10",
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(
        eval.status.success(),
        "{}",
        String::from_utf8_lossy(&eval.stderr)
    );
    assert!(out_dir.join("eval.csv").exists());
}

#[test]
fn pretrain_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let pac = write_config(dir.path(), "[env]\nname = pacboy\n");
    let out = dir.path().join("pre");
    let r = soc(&[
        "pretrain",
        &pac,
        "--group",
        "ghosts",
        "--steps",
        "1000",
        "--seeds",
        "1",
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(out.join("tables/seed-1/ghosts.qtable").exists());

    let cfg = write_config(dir.path(), TINY_CATCH);
    let sw = dir.path().join("sweep");
    let r = soc(&[
        "sweep",
        &cfg,
        "--param",
        "comm_bonus",
        "--values",
        "0,0.1",
        "--seeds",
        "1",
        "--out",
        sw.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(String::from_utf8(r.stdout).unwrap().lines().count(), 2);
    assert!(sw.join("sweep_comm_bonus.csv").exists());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "[env]\nname = catch\nspeed = 3\n");
    assert_eq!(soc(&["train", &bad]).status.code(), Some(2));
    assert_eq!(soc(&["train", "/no/such/file.cfg"]).status.code(), Some(2));
    assert_eq!(soc(&["bogus"]).status.code(), Some(2));
    let cfg = write_config(dir.path(), TINY_CATCH);
    assert_eq!(
        soc(&["sweep", &cfg, "--param", "speed", "--values", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        soc(&["pretrain", &cfg, "--group", "ghosts", "--steps", "10"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn runtime_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let mdp = dir.path().join("loop.mdp");
    // An undiscounted reward loop with no terminal state never converges.
    std::fs::write(&mdp, "states 1 actions 1\n0 0 0 1 1\n").unwrap();
    let out = soc(&["oracle", mdp.to_str().unwrap(), "--gamma", "1"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        soc(&["oracle", mdp.to_str().unwrap(), "--gamma", "1.5"])
            .status
            .code(),
        Some(2)
    );
}
