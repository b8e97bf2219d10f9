use std::process::{Command, Output};

fn qbgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbgame")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_reports_thresholds() {
    let o = qbgame(&["verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("0.298") && text.contains("0.508"), "{text}");
    assert_eq!(text.matches("PASS").count(), 2, "{text}");
}

#[test]
fn verify_json_is_parseable() {
    let o = qbgame(&["verify", "--eps", "0.1", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reports"][0]["passed"], true);
    assert!((v["threshold_high_ebits"].as_f64().unwrap() - 0.508).abs() < 1e-3);
}

#[test]
fn oracle_prints_anchors() {
    let text = stdout(&qbgame(&["oracle"]));
    assert!(text.contains("0.702500"), "{text}");
    assert!(text.contains("0.786378"), "{text}");
    let o = qbgame(&["oracle", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["classical_optimum"].as_f64().unwrap() - 0.75).abs() < 1e-9);
}

#[test]
fn run_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/fg.csv");
    let o = qbgame(&[
        "run", "--game", "epd", "--scenario", "fools-gold", "--sims", "2", "--rounds", "30", "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 61);
    assert!(stdout(&o).contains("ending"));
}

#[test]
fn run_reads_toml_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "game = \"chsh\"\ngamma_ebits = 0.5\nprior_a = \"skew-quantum\"\nprior_b = \"uniform\"\nsims = 1\nrounds = 3\nformat = \"jsonl\"\n",
    )
    .unwrap();
    let out = dir.path().join("c.jsonl");
    let o = qbgame(&["run", "--config", cfg.to_str().unwrap(), "--quiet", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    let row: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(row["round"], 1);
}

#[test]
fn bad_input_exits_nonzero() {
    assert!(!qbgame(&["frobnicate"]).status.success());
    let o = qbgame(&["run", "--game", "epd", "--scenario", "making-do"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
    assert!(!qbgame(&["run", "--game", "chsh", "--gamma-ebits", "0.5", "--prior-a", "uniform", "--prior-b", "uniform", "--rounds", "0"])
        .status
        .success());
    assert!(!qbgame(&["run", "--game", "epd", "--scenario", "fools-gold", "--epd-update", "sideways"]).status.success());
}
