use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn kacroots(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kacroots"))
        .args(args)
        .env_remove("KACROOTS_THREADS")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn manifest_digests_match(dir: &Path) {
    let m = read_json(&dir.join("manifest.json"));
    for o in m["outputs"].as_array().unwrap() {
        let bytes = std::fs::read(dir.join(o["file"].as_str().unwrap())).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(o["sha256"].as_str().unwrap(), hex);
        assert_eq!(o["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
}

#[test]
fn gaussian_degree_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = kacroots(&["simulate", "--atom", "gaussian", "--degrees", "1", "--trials", "100", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("summary.csv"));
    assert_eq!(
        rows[0],
        [
            "n",
            "trials",
            "mean",
            "variance",
            "residual",
            "ci_half_width",
            "near_double_freq",
            "min_gap_p01",
            "min_gap_p50",
            "excluded",
            "seed"
        ]
    );
    assert_eq!(rows[1][2], "1.0000000000");
    manifest_digests_match(dir.path());
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["subcommand"], "simulate");
    assert_eq!(m["parameters"]["trials"], "100");
}

#[test]
fn statistics_columns_fill_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = kacroots(&[
        "simulate", "--degrees", "2^3..2^5", "--trials", "50", "--stat", "gaps,near-double,variance", "--out", out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("summary.csv"));
    assert_eq!(rows.len(), 4);
    assert!(rows[1..].iter().all(|r| r.iter().all(|c| !c.is_empty())));
    let var = csv_rows(&dir.path().join("variance.csv"));
    assert_eq!(var[0], ["n", "trials", "variance", "ratio", "jackknife_se", "target"]);
    manifest_digests_match(dir.path());
}

#[test]
fn quadrature_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(kacroots(&["ek", "--n", "1", "--out", out]).status.success());
    let rows = csv_rows(&dir.path().join("ek.csv"));
    assert_eq!(rows[0], ["n", "expected", "residual", "quad_error"]);
    assert_eq!(rows[1][1], "1.000000000000");

    assert!(kacroots(&["ek", "--n", "10", "--interval", "0,0.5", "--out", out]).status.success());
    let rows = csv_rows(&dir.path().join("ek.csv"));
    let got: f64 = rows[1][1].parse().unwrap();
    let err: f64 = rows[1][3].parse().unwrap();
    let direct = kac_core::ekq::ek_expected(10, kac_core::ekq::EkRange::Between(0.0, 0.5)).unwrap();
    assert!((got - direct.value).abs() <= err + 1e-12);
    assert_eq!(rows[1][2], "");
}

#[test]
fn exact_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let file = dir.path().join("double-root.json");
    assert!(kacroots(&["exact", "double-root", "--n", "3", "--N", "1", "--out", out]).status.success());
    assert_eq!(read_json(&file)["p_union"], "1/4");
    assert!(kacroots(&["exact", "double-root", "--n", "10", "--N", "1", "--out", out]).status.success());
    let v = read_json(&file);
    assert_eq!(v["p_union"], "0");
    assert_eq!(v["certificate"], "EvenParityObstruction");

    assert!(kacroots(&["exact", "separation", "--variant", "claim1", "--x", "4/5", "--k", "3", "--out", out])
        .status
        .success());
    let v = read_json(&dir.path().join("separation.json"));
    assert_eq!(v["pass"], true);
    // 2·(4/5)¹² = 2·4¹² / 5¹²
    assert_eq!(v["min_gap"], "33554432/244140625");

    assert!(kacroots(&["exact", "small-ball", "--n", "4", "--x", "1", "--delta", "0", "--out", out])
        .status
        .success());
    // Σξᵢ over five ±1 terms is odd, never 0.
    assert_eq!(read_json(&dir.path().join("small-ball.json"))["probability"], "0");
    manifest_digests_match(dir.path());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(kacroots(&["simulate", "--trials", "5"]).status.code(), Some(1));
    assert_eq!(kacroots(&["simulate", "--degrees", "5", "--atom", "cauchy"]).status.code(), Some(1));
    assert_eq!(kacroots(&["bogus"]).status.code(), Some(1));
    assert_eq!(kacroots(&["--help"]).status.code(), Some(0));
    let o = kacroots(&["exact", "clt-calibrate", "--n", "9", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(read_json(&dir.path().join("clt-calibrate.json"))["certificate"], "FourKPlusOneObstruction");
    let o = kacroots(&["exact", "anticonc", "--n", "5000", "--N", "4", "--out", out]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("instead"));
}

#[test]
fn config_file_defaults_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\natom = gaussian\ndegrees = 1,3\ntrials = 40\n").unwrap();
    let out = dir.path().join("o");
    let o = kacroots(&[
        "--config",
        cfg.to_str().unwrap(),
        "simulate",
        "--trials",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("summary.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][0], "1");
    assert_eq!(rows[1][1], "7");
    assert_eq!(rows[1][2], "1.0000000000");
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, sub: &str| {
        let out = dir.path().join(format!("{sub}-{threads}"));
        let o = kacroots(&[
            "--threads",
            threads,
            "simulate",
            "--atom",
            "uniform",
            "--degrees",
            "10,80",
            "--trials",
            "300",
            "--seed",
            "5",
            "--stat",
            "gaps",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read(out.join("summary.csv")).unwrap()
    };
    assert_eq!(run("1", "a"), run("3", "a"));
}
