use std::process::{Command, Output};

fn fredkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fredkin")).args(args).output().expect("spawn fredkin")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn truthtable_passes_its_checks() {
    let o = fredkin(&["truthtable"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("input,output,amplitude_re,amplitude_im,matches"));
    assert!(text.lines().skip(1).all(|l| l.ends_with("true")));
}

#[test]
fn sweep_loss_rows_follow_grid() {
    let o = fredkin(&["sweep-loss", "--grid-start", "0.1", "--grid-stop", "0.5", "--grid-count", "5", "--linear"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let gammas: Vec<f64> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(gammas.len(), 5);
    for (g, want) in gammas.iter().zip([0.1, 0.2, 0.3, 0.4, 0.5]) {
        assert!((g - want).abs() < 1e-12);
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# small grid\ngrid-count = 3\ngrid-start = 0.01\ngrid-stop = 0.1\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();

    let from_file = fredkin(&["sweep-loss", "--config", c]);
    assert!(from_file.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    assert!((rows[0]["gamma"].as_f64().unwrap() - 0.01).abs() < 1e-12);

    let overridden = fredkin(&["sweep-loss", "--config", c, "--grid-count", "4", "--format", "csv"]);
    assert!(overridden.status.success());
    assert_eq!(stdout(&overridden).lines().count(), 5);
}

#[test]
fn unknown_config_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "grid-cnt = 3\n").unwrap();
    let o = fredkin(&["sweep-loss", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_file_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phys.csv");
    let o = fredkin(&["lambda-physical", "--omega", "1", "--intensity", "10", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let lambda: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((lambda - std::f64::consts::PI / 10.0).abs() < 1e-10);
}

#[test]
fn exit_codes() {
    assert_eq!(fredkin(&["lossy-gate", "--placement", "middle"]).status.code(), Some(2));
    assert_eq!(fredkin(&["sweep-loss", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(fredkin(&["lambda-physical", "--omega", "1"]).status.code(), Some(2));
    assert_eq!(fredkin(&["lambda-physical", "--omega", "1", "--intensity", "0"]).status.code(), Some(1));
    assert_eq!(fredkin(&["lossy-gate", "--gamma=-0.5"]).status.code(), Some(1));
    assert_eq!(fredkin(&["sweep-loss", "--grid-count", "0"]).status.code(), Some(1));
}

#[test]
fn lossy_gate_placements_and_formats() {
    for p in ["before-kerr", "after-kerr", "split"] {
        let o = fredkin(&["lossy-gate", "--gamma", "0.3", "--placement", p, "--format", "json"]);
        assert!(o.status.success(), "{p}");
        let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let trace: f64 = rows
            .as_array()
            .unwrap()
            .iter()
            .filter(|r| r["row"] == r["col"])
            .map(|r| r["re"].as_f64().unwrap())
            .sum();
        assert!((trace - 1.0).abs() < 1e-10, "{p}");
    }
}

#[test]
fn monte_carlo_sweep_is_reproducible_and_seed_sensitive() {
    let args = ["sweep-dephasing", "--grid-count", "4", "--samples", "5000", "--seed", "42"];
    let a = fredkin(&args);
    let b = fredkin(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = fredkin(&["sweep-dephasing", "--grid-count", "4", "--samples", "5000", "--seed", "43"]);
    assert_ne!(a.stdout, other.stdout);
}
