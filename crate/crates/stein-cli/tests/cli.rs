//! End-to-end checks of the binary: output determinism, exit codes, and
//! the documented CSV schemas.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stein"))
}

const CONFIG: &str = r#"{
    "schema_version": 1,
    "scenarios": [{
        "id": "demo",
        "dist": "rademacher",
        "g": {"preset": "square_sum", "d": 1},
        "h": {"preset": "sin"},
        "p": 2,
        "n_grid": [16, 32, 64, 128],
        "samples": 200000,
        "seed": 21,
        "bounds": ["cor41", "cor42"],
        "solve": {"w_min": -2.0, "w_max": 2.0, "points": 9}
    }]
}"#;

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, CONFIG).unwrap();
    path
}

#[test]
fn distance_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args(["distance", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .arg("--no-timestamp")
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["distance.csv", "validity.csv"] {
        let a = fs::read(out_a.join(file)).unwrap();
        let b = fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    let text = fs::read_to_string(out_a.join("distance.csv")).unwrap();
    assert!(text.starts_with("scenario,n,N,delta_mean,delta_stderr,seed\n"));
    let validity = fs::read_to_string(out_a.join("validity.csv")).unwrap();
    assert!(validity
        .starts_with("scenario,n,N,delta_mean,delta_stderr,bound_total,margin,seed\n"));
    // Every data row echoes the scenario id and the seed.
    for line in validity.lines().skip(1) {
        assert!(line.starts_with("demo:cor4"), "row missing scenario echo: {line}");
        assert!(line.ends_with(",21"), "row missing seed echo: {line}");
    }
}

#[test]
fn timestamp_header_is_present_unless_suppressed() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let status = bin()
        .args(["bound", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert!(text.starts_with("# generated_at "));
    // The JSON carries the full term breakdown.
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("bounds.json")).unwrap())
            .unwrap();
    let report = &json[0]["report"];
    assert_eq!(report["bound_id"], "cor41");
    assert!(report["total"].as_f64().unwrap() > 0.0);
    assert!(report["terms"].as_array().unwrap().len() >= 2);
}

#[test]
fn invalid_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // theorem33 requires an even g; monomial(3) is odd, so validation
    // fails at load.
    fs::write(
        &path,
        r#"{
            "schema_version": 1,
            "scenarios": [{
                "id": "bad",
                "dist": "rademacher",
                "g": {"preset": "monomial", "m": 3},
                "h": {"preset": "sin"},
                "bounds": ["theorem33"]
            }]
        }"#,
    )
    .unwrap();
    let output = bin()
        .args(["bound", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("theorem33"), "stderr: {stderr}");
}

#[test]
fn missing_config_file_exits_with_code_two() {
    let output = bin().args(["rate", "--config", "/nonexistent.json"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn solve_emits_small_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let status = bin()
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .arg("--no-timestamp")
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(dir.path().join("solve.csv")).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let residual: f64 = fields[4].parse().unwrap();
        assert!(residual < 1e-4, "residual {residual} in row {line}");
        rows += 1;
    }
    assert_eq!(rows, 9);
}

#[test]
fn selftest_passes() {
    let output = bin().arg("selftest").output().unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "selftest failed:\n{stdout}");
    assert!(stdout.contains("selftest: all checks passed"));
}
