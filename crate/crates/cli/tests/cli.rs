use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_floquet-tunnel")
}

fn config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

fn run(sub: &str, cfg: &Path, out: &Path) -> Output {
    Command::new(bin())
        .args([sub, "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

const STRONG_SCAN: &str = r#"{"barrier": {"V": 1.0, "L": 16.0}, "drive": {"beta": 1.0, "omega": 0.005},
    "incident": {"range": {"min": 0.76, "max": 0.9, "steps": 300}}}"#;

#[test]
fn undriven_spectrum_has_single_channel() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        r#"{"barrier": {"V": 1.0, "L": 3.0}, "drive": {"beta": 0.0, "omega": 0.05}, "incident": {"omega0": 0.5}}"#,
    );
    let out = run("spectrum", &cfg, tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&tmp.path().join("spectrum.csv"));
    assert_eq!(header, ["n", "E", "abs_s", "flux_weight"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "0");
}

#[test]
fn spectrum_rows_sorted_and_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        r#"{"barrier": {"V": 1.0, "L": 5.375}, "drive": {"beta": 1.739535, "omega": 0.0075}, "incident": {"omega0": 0.625}}"#,
    );
    assert_eq!(run("spectrum", &cfg, tmp.path()).status.code(), Some(0));
    let (_, rows) = read_csv(&tmp.path().join("spectrum.csv"));
    let ns: Vec<i64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(ns.windows(2).all(|w| w[0] < w[1]));
    for r in &rows {
        let e: f64 = r[1].parse().unwrap();
        assert_eq!(format!("{e:?}"), r[1]);
    }
}

#[test]
fn strong_scan_pairs_minima_with_predictions() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), STRONG_SCAN);
    let out = run("resonances", &cfg, tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&tmp.path().join("scan.csv"));
    assert_eq!(header, ["omega0", "omega_act", "total_flux", "converged"]);
    assert_eq!(rows.len(), 300);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("resonances.json")).unwrap()).unwrap();
    let list = json["resonances"].as_array().unwrap();
    assert!(list.len() >= 3);
    for r in list {
        assert!(r["m"].is_u64());
        assert!(r["omega_m_eq21"].as_f64().unwrap() < 1.0);
        assert!(r["depth"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn weak_scan_has_no_resonances() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        r#"{"barrier": {"V": 1.0, "L": 5.0}, "drive": {"beta": 0.2, "omega": 0.005},
            "incident": {"range": {"min": 0.3, "max": 0.6, "steps": 100}}}"#,
    );
    assert_eq!(run("scan", &cfg, tmp.path()).status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("resonances.json")).unwrap()).unwrap();
    assert!(json["resonances"].as_array().unwrap().is_empty());
}

#[test]
fn reversed_range_is_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        r#"{"barrier": {"V": 1.0, "L": 16.0}, "drive": {"beta": 1.0, "omega": 0.005},
            "incident": {"range": {"min": 0.9, "max": 0.76, "steps": 300}}}"#,
    );
    let out = run("scan", &cfg, tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incident.range"));
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    for body in [
        "",
        r#"{"barrier": {"V": 1.0, "L": 3.0}, "drive": {"beta": 1.0, "omega": 0.05}, "incident": {"omega0": 0.5}, "extra": 1}"#,
        r#"{"barrier": {"V": 1.0, "L": 3.0}, "drive": {"beta": 1.0, "omega": -0.05}, "incident": {"omega0": 0.5}}"#,
        r#"{"barrier": {"V": 1.0, "L": 3.0}, "drive": {"beta": 1.0, "omega": 0.05}}"#,
    ] {
        let cfg = config(tmp.path(), body);
        let out = run("spectrum", &cfg, tmp.path());
        assert_eq!(out.status.code(), Some(2), "{body}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run("spectrum", &tmp.path().join("missing.json"), tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_passes_then_fails_with_tiny_cap() {
    let tmp = tempfile::tempdir().unwrap();
    let base = r#"{"barrier": {"V": 1.0, "L": 5.375}, "drive": {"beta": 1.739535, "omega": 0.0075}, "incident": {"omega0": 0.625}"#;
    let cfg = config(tmp.path(), &format!("{base}}}"));
    assert_eq!(run("validate", &cfg, tmp.path()).status.code(), Some(0));
    let cfg = config(
        tmp.path(),
        &format!(r#"{base}, "solver": {{"tol_edge": 1e-12, "tol_conv": 1e-10, "n_cap": 8, "max_failure_fraction": 0.1}}}}"#),
    );
    assert_eq!(run("validate", &cfg, tmp.path()).status.code(), Some(1));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("validate.json")).unwrap()).unwrap();
    let flux = &json["checks"][0];
    assert!(flux["name"].as_str().unwrap().starts_with("flux_balance"));
    assert_eq!(flux["passed"], false);
}

#[test]
fn non_convergence_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        r#"{"barrier": {"V": 1.0, "L": 5.375}, "drive": {"beta": 1.739535, "omega": 0.0075}, "incident": {"omega0": 0.625},
            "solver": {"tol_edge": 1e-12, "tol_conv": 1e-10, "n_cap": 8, "max_failure_fraction": 0.1}}"#,
    );
    assert_eq!(run("spectrum", &cfg, tmp.path()).status.code(), Some(3));
}

#[test]
fn compare_outside_regime_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        r#"{"barrier": {"V": 1.0, "L": 5.0}, "drive": {"beta": 0.1, "omega": 0.005}, "incident": {"omega0": 0.5}}"#,
    );
    assert_eq!(run("compare", &cfg, tmp.path()).status.code(), Some(2));
    let cfg = config(
        tmp.path(),
        r#"{"barrier": {"V": 1.0, "L": 5.375}, "drive": {"beta": 1.739535, "omega": 0.0075}, "incident": {"omega0": 0.625}}"#,
    );
    assert_eq!(run("compare", &cfg, tmp.path()).status.code(), Some(0));
    let (header, _) = read_csv(&tmp.path().join("compare.csv"));
    assert_eq!(header, ["n", "E", "abs_s", "xi", "abs_g"]);
}

#[test]
fn oracle_dump_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        r#"{"barrier": {"V": 1.0, "L": 2.0}, "drive": {"beta": 1.5, "omega": 0.1}, "incident": {"omega0": 0.5},
            "oracle": {"sigma": 25.0, "total_time": 300.0, "dump": true}}"#,
    );
    let out = run("oracle", &cfg, tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(tmp.path().join("series.bin")).unwrap();
    assert_eq!(&bytes[..4], b"FQTS");
    let count = u64::from_le_bytes(bytes[72..80].try_into().unwrap()) as usize;
    assert_eq!(bytes.len(), 80 + 16 * count);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("oracle.json")).unwrap()).unwrap();
    assert_eq!(json["samples"].as_u64().unwrap() as usize, count);
    assert!(json["norm_drift"].as_f64().unwrap() < 1e-6);
}

#[test]
fn oracle_short_record_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        r#"{"barrier": {"V": 1.0, "L": 2.0}, "drive": {"beta": 1.5, "omega": 0.1}, "incident": {"omega0": 0.5},
            "oracle": {"sigma": 10.0, "total_time": 100.0}}"#,
    );
    assert_eq!(run("oracle", &cfg, tmp.path()).status.code(), Some(2));
}
