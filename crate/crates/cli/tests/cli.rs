use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chaos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaos"))
        .args(args)
        .env_remove("CHAOS_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn identities_pass_and_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ids");
    let o = chaos(&["identities", "--max-degree", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let report = fs::read_to_string(out.join("identities.txt")).unwrap();
    for name in ["h2j", "man000", "man001", "man010", "man011", "det-M", "eigenrelation"] {
        assert!(report.lines().any(|l| l.starts_with(name) && l.contains("PASS")), "{name}\n{report}");
    }
    let table = fs::read_to_string(out.join("h2j_complex_to_real_1.csv")).unwrap();
    assert_eq!(table, "row,col,coefficient\n0,0,-i\n0,1,1\n1,0,i\n1,1,1\n");
}

#[test]
fn identities_degree_budget_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&chaos(&["identities", "--max-degree", "9", "--out", out])), 64);
    let o = chaos(&["identities", "--max-degree", "4", "--out", out, "--tamper", "2,1"]);
    assert_eq!(code(&o), 2);
    let err = text(&o.stderr);
    assert!(err.contains("h2j") && err.contains("man011"), "{err}");
    assert!(text(&o.stdout).contains("J_{2,1}"));
}

#[test]
fn oracle_examples_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = chaos(&["oracle", &write(d, "abs4", "# E|ζ|⁴ with ζ ~ CN(0, 2)\ndim 1\nexpect (z_1*zb_1)^2\n")]);
    assert_eq!((code(&o), text(&o.stdout)), (0, "8\n".to_string()));
    let o = chaos(&["oracle", &write(d, "j11", "dim 1\nexpect J(1,1,z_1)\n")]);
    assert_eq!((code(&o), text(&o.stdout)), (0, "0\n".to_string()));
    assert_eq!(code(&chaos(&["oracle", &write(d, "bad", "dim 1\nexpect (z_1 +\n")])), 65);
    assert_eq!(code(&chaos(&["oracle", &write(d, "big", "dim 1\nexpect z_1^20\n")])), 64);
    assert_eq!(code(&chaos(&["oracle", d.join("absent").to_str().unwrap()])), 66);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&chaos(&["frobnicate"])), 64);
    assert_eq!(code(&chaos(&["identities"])), 64);
    assert_eq!(code(&chaos(&["--help"])), 0);
}

const BLOCK_CONFIG: &str = r#"{
  "kernel": {"block": {"m": 1, "n": 2}},
  "k": [4, 16, 64],
  "n": 100000,
  "seed": 20240607,
  "criterion": {"case": "gaussian-offdiag", "sigma2": 2.0}
}"#;

#[test]
fn block_experiment_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = write(d, "block.json", BLOCK_CONFIG);
    let mut outputs = Vec::new();
    for (tag, extra) in [("seq", vec!["--sequential"]), ("w1", vec!["--workers", "1"]), ("w3", vec!["--workers", "3"])] {
        let out = d.join(tag);
        let mut args = vec!["experiment", cfg.as_str(), "--out", out.to_str().unwrap()];
        args.extend(extra);
        let o = chaos(&args);
        assert_eq!(code(&o), 0, "{}", text(&o.stderr));
        outputs.push((fs::read(out.join("moments.csv")).unwrap(), fs::read(out.join("verdict.json")).unwrap()));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let csv = text(&outputs[0].0);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,quantity,estimate,stderr,target,pass");
    assert_eq!(lines.len(), 1 + 3 * 5);
    let json: Value = serde_json::from_slice(&outputs[0].1).unwrap();
    assert_eq!(json["reports"].as_array().unwrap().len(), 3);
    assert!(json["ks"]["re"]["p_value"].is_number());
    assert!(json["nonnegativity_gaps"].as_array().unwrap().iter().all(|g| g["nonnegative"] == true));
}

#[test]
fn seed_from_environment_is_overridden_by_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let body = r#"{"kernel": {"block": {"m": 1, "n": 2}}, "k": [2], "n": 5000,
                  "criterion": {"case": "gaussian-offdiag", "sigma2": 2.0}}"#;
    let cfg = write(d, "noseed.json", body);
    let run = |seed: &str, out: &str| {
        Command::new(env!("CARGO_BIN_EXE_chaos"))
            .args(["experiment", &cfg, "--out", d.join(out).to_str().unwrap()])
            .env("CHAOS_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("7", "a")), 0);
    let a: Value = serde_json::from_str(&fs::read_to_string(d.join("a/verdict.json")).unwrap()).unwrap();
    assert_eq!(a["seed"], 7);
    let with_seed = write(d, "seeded.json", &body.replacen('{', r#"{"seed": 11, "#, 1));
    let o = Command::new(env!("CARGO_BIN_EXE_chaos"))
        .args(["experiment", &with_seed, "--out", d.join("b").to_str().unwrap()])
        .env("CHAOS_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let b: Value = serde_json::from_str(&fs::read_to_string(d.join("b/verdict.json")).unwrap()).unwrap();
    assert_eq!(b["seed"], 11);
    assert_eq!(code(&chaos(&["experiment", &cfg, "--out", d.join("c").to_str().unwrap()])), 65);
}

#[test]
fn experiment_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = d.join("out");
    let out = out.to_str().unwrap();
    let odd = write(
        d,
        "odd.json",
        r#"{"kernel": {"block": {"m": 1, "n": 2}}, "k": [4], "n": 1000, "seed": 1,
            "criterion": {"case": "chi-square-offdiag", "sigma2": 2.0}}"#,
    );
    let o = chaos(&["experiment", &odd, "--out", out]);
    assert_eq!(code(&o), 65);
    assert!(text(&o.stderr).contains("there does not exist any"), "{}", text(&o.stderr));

    let missing = write(
        d,
        "missing.json",
        r#"{"kernel": {"file": "nowhere.txt"}, "blocks": false, "n": 1000, "seed": 1,
            "criterion": {"case": "gaussian-diag", "sigma2": 2.0}}"#,
    );
    assert_eq!(code(&chaos(&["experiment", &missing, "--out", out])), 66);
    assert_eq!(code(&chaos(&["experiment", &write(d, "junk.json", "{ not json"), "--out", out])), 65);
    assert_eq!(code(&chaos(&["experiment", d.join("absent.json").to_str().unwrap(), "--out", out])), 66);

    let equal = write(
        d,
        "equal.json",
        r#"{"components": [
              {"kernel": {"block": {"m": 1, "n": 1}}, "criterion": {"case": "gaussian-diag", "sigma2": 2.0}},
              {"kernel": {"block": {"m": 2, "n": 0}}, "criterion": {"case": "gaussian-offdiag", "sigma2": 2.0}}
           ], "k": [4], "n": 1000, "seed": 1}"#,
    );
    let o = chaos(&["experiment", &equal, "--out", out]);
    assert_eq!(code(&o), 65, "{}", text(&o.stderr));
    assert!(text(&o.stderr).contains("distinct"));
}

#[test]
fn chi_square_kernel_file_exact_and_sampled() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // F = (|ζ_1|² − 2) + i(|ζ_2|² − 2): two independent centered χ²_2 parts
    fs::write(d.join("chi.txt"), "# m n D\n1 1 2\n1 1 2 0\n2 2 0 2\n").unwrap();
    let exact = write(
        d,
        "exact.json",
        r#"{"kernel": {"file": "chi.txt"}, "blocks": false, "exact": true,
            "criterion": {"case": "chi-square-diag", "sigma2": 8.0, "a": 0.0, "b": 0.0}}"#,
    );
    let o = chaos(&["experiment", &exact, "--out", d.join("e").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(d.join("e/verdict.json")).unwrap()).unwrap();
    assert_eq!(v["pass"], true, "{v:#}");
    assert_eq!(v["verdict"]["configured_law"]["nu1"], 2.0);

    let sampled = write(
        d,
        "sampled.json",
        r#"{"kernel": {"file": "chi.txt"}, "blocks": false, "n": 200000, "seed": 5,
            "criterion": {"case": "chi-square-diag", "sigma2": 8.0, "a": 0.0, "b": 0.0}}"#,
    );
    let o = chaos(&["experiment", &sampled, "--out", d.join("s").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(d.join("s/verdict.json")).unwrap()).unwrap();
    assert!(v["ks"]["re"]["p_value"].as_f64().unwrap() > 1e-4);
}

#[test]
fn multichaos_and_multivariate_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let multi = write(
        d,
        "multi.json",
        r#"{"kernels": [{"block": {"m": 1, "n": 2}}, {"block": {"m": 3, "n": 0}}], "k": [1, 4], "exact": true,
            "criterion": {"case": "multichaos", "sigma2": 8.0, "a": 0.0, "b": 0.0}}"#,
    );
    let o = chaos(&["experiment", &multi, "--out", d.join("m").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let csv = fs::read_to_string(d.join("m/moments.csv")).unwrap();
    assert!(csv.contains("|u(x)_1u|^2") && csv.contains("|v(x)_2v|^2"), "{csv}");

    let mv = write(
        d,
        "mv.json",
        r#"{"components": [
              {"kernel": {"block": {"m": 1, "n": 0}}, "criterion": {"case": "gaussian-offdiag", "sigma2": 1.0}},
              {"kernel": {"block": {"m": 1, "n": 1}}, "criterion": {"case": "gaussian-diag", "sigma2": 2.0}}
           ], "k": [1, 8], "n": 20000, "seed": 3}"#,
    );
    let o = chaos(&["experiment", &mv, "--out", d.join("v").to_str().unwrap()]);
    // (1,0) has total degree 1, which no fourth-moment case accepts
    assert_eq!(code(&o), 65);
    fs::write(
        &mv,
        r#"{"components": [
              {"kernel": {"block": {"m": 1, "n": 1}}, "criterion": {"case": "gaussian-diag", "sigma2": 2.0}},
              {"kernel": {"block": {"m": 2, "n": 2}}, "criterion": {"case": "gaussian-diag", "sigma2": 16.0}}
           ], "k": [1, 8], "n": 20000, "seed": 3}"#,
    )
    .unwrap();
    let o = chaos(&["experiment", &mv, "--out", d.join("v").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let csv = fs::read_to_string(d.join("v/moments.csv")).unwrap();
    assert!(csv.contains("F1 E|F|^2") && csv.contains("F2 T3") && csv.contains("E[F1^2 F2]"), "{csv}");
}
