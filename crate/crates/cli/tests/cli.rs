use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn hvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hvlab"))
        .args(args)
        .env_remove("HVLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV body, split into cells; skips the comment and header.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(2)
        .map(|l| split_csv(l))
        .collect()
}

fn split_csv(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(String::new()),
            c => out.last_mut().unwrap().push(c),
        }
    }
    out
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn bell_sweep_follows_half_sine_squared() {
    let o = hvlab(&["bell", "--state", "psi-minus", "--delta-grid", "0:pi:pi/16", "--n", "1000000", "--seed", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("# manifest-sha256="));
    assert_eq!(
        out.lines().nth(1).unwrap(),
        "state,semantics,alpha,beta,n_pp,n_pm,n_mp,n_mm,fraction,analytic,stderr"
    );
    let rows = rows(&out);
    assert_eq!(rows.len(), 17);
    for (k, r) in rows.iter().enumerate() {
        let delta = k as f64 * PI / 16.0;
        let expected = 0.5 * delta.sin().powi(2);
        assert!((num(&r[9]) - expected).abs() < 1e-12);
        let se = (expected * (1.0 - expected) / 1e6).sqrt();
        assert!((num(&r[8]) - expected).abs() <= 4.0 * se + 1e-12, "{r:?}");
    }
}

#[test]
fn naive_semantics_table_is_labelled() {
    let o = hvlab(&["bell", "--semantics", "naive-uniform", "--alpha", "0", "--beta", "pi/2", "--n", "100000", "--seed", "1"]);
    assert!(o.status.success());
    let r = &rows(&stdout(&o))[0];
    assert_eq!(r[1], "naive-uniform");
    assert!((num(&r[9]) - 0.375).abs() < 1e-12);
}

#[test]
fn zero_intervals_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bell.csv");
    let o = hvlab(&["bell", "--n", "0", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "no partial output");
}

#[test]
fn malformed_inputs_exit_with_two() {
    for args in [
        &["bell", "--seed", "1", "--alpha", "pie"][..],
        &["bell", "--seed", "1", "--delta-grid", "0:1"],
        &["bell", "--seed", "1", "--state", "chi"],
        &["bell", "--seed", "1", "--discipline", "sometimes"],
        &["bell", "--seed", "1", "--modulus-range", "0.2:0.5"],
        &["chsh", "--seed", "1", "--a", "0"],
        &["swap", "--seed", "1", "--draws", "0"],
        &["accept", "--criteria", "12", "--n", "10"],
    ] {
        let o = hvlab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn seed_must_be_explicit() {
    let o = hvlab(&["bell", "--n", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let env_only = Command::new(env!("CARGO_BIN_EXE_hvlab"))
        .args(["bell", "--n", "1000"])
        .env("HVLAB_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(env_only.status.code(), Some(2));
    let allowed = Command::new(env!("CARGO_BIN_EXE_hvlab"))
        .args(["bell", "--n", "1000", "--allow-env-seed"])
        .env("HVLAB_SEED", "5")
        .output()
        .unwrap();
    assert!(allowed.status.success());
    let flag = hvlab(&["bell", "--n", "1000", "--seed", "5"]);
    assert_eq!(stdout(&allowed), stdout(&flag));
}

#[test]
fn chsh_canonical_report() {
    let o = hvlab(&["chsh", "--n", "1000000", "--seed", "11", "--discipline", "bernoulli"]);
    assert!(o.status.success());
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 15);
    let s = |model: &str| {
        let r = rows.iter().find(|r| r[0] == model && r[1] == "S").unwrap();
        (num(&r[4]), num(&r[6]))
    };
    let (vector, vector_exact) = s("vector-projection");
    assert!((vector - 2.0 * 2f64.sqrt()).abs() < 0.01, "{vector}");
    assert!((vector_exact - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    let (naive, _) = s("vector-naive-uniform");
    assert!(naive <= 2.0, "{naive}");
    let (boolean, boolean_exact) = s("boolean");
    assert!((boolean - 2.0).abs() < 0.01, "{boolean}");
    assert!((boolean_exact - 2.0).abs() < 1e-12);
}

#[test]
fn custom_chsh_angles_are_echoed_in_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("chsh.csv");
    let o = hvlab(&[
        "chsh", "--seed", "2", "--n", "20000", "--a", "0.1", "--a-prime", "pi/3", "--b", "-0.2", "--b-prime", "1",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = read(&dir.path().join("chsh.csv.manifest.toml"));
    assert!(manifest.contains("subcommand = \"chsh\""));
    assert!(manifest.contains("a = 0.1"));
    assert!(manifest.contains(&format!("a_prime = {:?}", PI / 3.0)));
    assert!(manifest.contains("b = -0.2"));
    assert!(manifest.contains("b_prime = 1.0"));
    assert!(manifest.contains("seed = 2"));
}

#[test]
fn malus_at_thirty_degrees() {
    let o = hvlab(&["malus", "--alpha", "0", "--beta", "pi/6", "--n", "1000000", "--seed", "3"]);
    assert!(o.status.success());
    let r = &rows(&stdout(&o))[0];
    assert!((num(&r[5]) - 0.75).abs() < 0.005, "{r:?}");
}

#[test]
fn gram_is_near_identity() {
    let o = hvlab(&["gram", "--n", "1000000", "--seed", "4"]);
    assert!(o.status.success());
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    for (i, r) in rows.iter().enumerate() {
        for j in 0..4 {
            let v = num(&r[j + 1]);
            let id = if i == j { 1.0 } else { 0.0 };
            assert!((v - id).abs() < 0.01, "{i} {j} {v}");
        }
    }
}

#[test]
fn hom_phi_plus_bunches() {
    let o = hvlab(&["hom", "--state", "phi-plus", "--seed", "1", "--n", "10000"]);
    assert!(o.status.success());
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r[0], "phi-plus");
    assert_eq!((num(&r[2]), num(&r[3])), (2.0, 0.0));
    assert_eq!(num(&r[11]), 0.0);
}

#[test]
fn hom_classifier_over_all_states() {
    let o = hvlab(&["hom", "--seed", "1", "--n", "10000", "--samples", "8", "--cycles", "2"]);
    assert!(o.status.success());
    for r in rows(&stdout(&o)) {
        let want = if r[0] == "psi-minus" { 1.0 } else { 0.0 };
        assert_eq!(num(&r[11]), want, "{r:?}");
        assert!((num(&r[2]) + num(&r[3]) - 2.0 * num(&r[1])).abs() < 1e-12);
    }
}

#[test]
fn swap_report_has_sixteen_rows_per_draw() {
    let o = hvlab(&["swap", "--seed", "1", "--draws", "3"]);
    assert!(o.status.success());
    let rows = rows(&stdout(&o));
    // three regimes, three draws plus one mean block each
    assert_eq!(rows.len(), 3 * 4 * 16);
    for r in &rows {
        assert!((num(&r[7]) - num(&r[8]) - num(&r[9])).abs() < 1e-12);
    }
}

#[test]
fn csv_is_identical_across_partitions_and_reruns() {
    let dir = TempDir::new().unwrap();
    let mut bodies = Vec::new();
    for p in ["1", "2", "8"] {
        let out = dir.path().join(format!("p{p}.csv"));
        let o = hvlab(&[
            "bell", "--discipline", "bernoulli", "--delta-grid", "0:pi/2:pi/8", "--n", "200000", "--seed", "9",
            "--partitions", p, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        bodies.push(read(&out));
    }
    assert!(bodies.iter().all(|b| *b == bodies[0]));

    let manifest = dir.path().join("p2.csv.manifest.toml");
    let again = dir.path().join("again.csv");
    let o = hvlab(&[
        "bell", "--config", manifest.to_str().unwrap(), "--partitions", "3", "--out", again.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&again), bodies[0]);
}

#[test]
fn manifest_for_another_subcommand_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.csv");
    assert!(hvlab(&["malus", "--seed", "1", "--n", "1000", "--out", out.to_str().unwrap()]).status.success());
    let manifest = dir.path().join("m.csv.manifest.toml");
    let o = hvlab(&["bell", "--config", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 5\nn = 50000\nstate = \"phi-plus\"\nalpha = \"pi/3\"\nbeta = 0\n").unwrap();
    let from_file = hvlab(&["bell", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.status.success(), "{}", String::from_utf8_lossy(&from_file.stderr));
    let r = &rows(&stdout(&from_file))[0];
    assert_eq!(r[0], "phi-plus");
    assert!((num(&r[9]) - 0.125).abs() < 1e-12);
    let flag = hvlab(&["bell", "--config", cfg.to_str().unwrap(), "--state", "psi-minus"]);
    let r = &rows(&stdout(&flag))[0];
    assert_eq!(r[0], "psi-minus");
    assert!((num(&r[9]) - 0.375).abs() < 1e-12);

    std::fs::write(&cfg, "seed = 5\nunknown_key = 1\n").unwrap();
    assert_eq!(hvlab(&["bell", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn json_mirror() {
    let o = hvlab(&["boolean", "--seed", "1", "--n", "10000", "--alpha", "0", "--beta", "pi/4", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"][0]["semantics"], "boolean");
    assert!((v["rows"][0]["analytic"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(v["manifest_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn accept_reports_and_signals_failure() {
    let o = hvlab(&["accept", "--criteria", "7,8", "--n", "1000"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);

    // a hundred intervals cannot pin S to ±0.01
    let o = hvlab(&["accept", "--criteria", "3", "--n", "100"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("FAIL [3]"));
}
