//! End-to-end tests of the binary: exit codes, file round trips and output
//! schemas.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn envcheb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_envcheb"))
}

fn run(args: &[&str]) -> Output {
    envcheb().args(args).output().expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

const PARABOLA: &str = r#"{
  "bidegree": [2, 1],
  "x": [[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]],
  "y": [[0.0, 0.0], [0.0, 2.0], [1.0, 0.0]],
  "w": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
  "domain": [[0.0, 1.0], [0.0, 1.0]]
}"#;

const CUSP: &str = r#"{
  "bidegree": [3, 1],
  "x": [[0.0, 0.0], [0.0, 2.0], [1.0, 0.0], [0.0, 0.0]],
  "y": [[0.0, 0.0], [0.0, 0.0], [0.0, 3.0], [1.0, 0.0]],
  "w": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
  "domain": [[0.5, 1.5], [-0.5, 0.5]]
}"#;

fn write_family(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn implicitize_writes_result_and_reports_sigma() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "parabola.json", PARABOLA);
    let out = dir.path().join("result.json");
    let output = run(&[
        "implicitize",
        "--family",
        family.to_str().unwrap(),
        "--degree",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("sigma_min"), "{text}");
    assert!(text.contains("sigma_gap"), "{text}");
    assert!(text.contains("15 x 11"), "{text}");

    let result: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(result["sigma_min"].as_f64().unwrap() < 1e-10);
    let c_q: Vec<f64> = result["c_q"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let c_lambda: Vec<f64> = result["c_lambda"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let norm: f64 = c_q
        .iter()
        .chain(&c_lambda)
        .map(|c| c * c)
        .sum::<f64>()
        .sqrt();
    assert!((norm - 1.0).abs() <= 1e-12);
}

#[test]
fn implicitize_rejects_degree_zero() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "parabola.json", PARABOLA);
    let output = run(&[
        "implicitize",
        "--family",
        family.to_str().unwrap(),
        "--degree",
        "0",
    ]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("degree must be >= 1"));
}

#[test]
fn implicitize_rejects_missing_denominator_key() {
    let dir = TempDir::new().unwrap();
    let no_w = PARABOLA.replace("\"w\"", "\"v\"");
    let family = write_family(&dir, "broken.json", &no_w);
    let output = run(&[
        "implicitize",
        "--family",
        family.to_str().unwrap(),
        "--degree",
        "2",
    ]);
    assert_eq!(code(&output), 2);
}

#[test]
fn implicitize_rejects_shape_mismatch() {
    let dir = TempDir::new().unwrap();
    let bad = PARABOLA.replace("[[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]]", "[[0.0, 1.0]]");
    let family = write_family(&dir, "bad.json", &bad);
    let output = run(&[
        "implicitize",
        "--family",
        family.to_str().unwrap(),
        "--degree",
        "2",
    ]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("must be 3x2"));
}

#[test]
fn implicitize_reports_vanishing_denominator_as_numerical() {
    let dir = TempDir::new().unwrap();
    // w = s vanishes at the domain corner
    let family = write_family(
        &dir,
        "w_zero.json",
        r#"{
  "bidegree": [1, 1],
  "x": [[0.0, 0.0], [1.0, 0.0]],
  "y": [[0.0, 1.0], [0.0, 0.0]],
  "w": [[0.0, 0.0], [1.0, 0.0]],
  "domain": [[0.0, 1.0], [0.0, 1.0]]
}"#,
    );
    let output = run(&[
        "implicitize",
        "--family",
        family.to_str().unwrap(),
        "--degree",
        "1",
    ]);
    assert_eq!(code(&output), 3);
    assert!(stderr(&output).contains("denominator"));
}

#[test]
fn result_file_round_trips_bit_exactly() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "parabola.json", PARABOLA);
    let out = dir.path().join("result.json");
    let output = run(&[
        "implicitize",
        "--family",
        family.to_str().unwrap(),
        "--degree",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));

    let text = fs::read_to_string(&out).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rewritten = serde_json::to_string_pretty(&parsed).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&rewritten).unwrap();
    assert_eq!(parsed, reparsed);
    // numbers survive the decimal round trip unchanged
    for (a, b) in parsed["c_q"]
        .as_array()
        .unwrap()
        .iter()
        .zip(reparsed["c_q"].as_array().unwrap())
    {
        assert_eq!(a.as_f64().unwrap().to_bits(), b.as_f64().unwrap().to_bits());
    }
}

#[test]
fn implicitize_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "cusp.json", CUSP);
    let mut outputs = Vec::new();
    for (name, threads) in [("a.json", None), ("b.json", Some("1")), ("c.json", Some("3"))] {
        let out = dir.path().join(name);
        let mut cmd = envcheb();
        cmd.args([
            "implicitize",
            "--family",
            family.to_str().unwrap(),
            "--degree",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        if let Some(n) = threads {
            cmd.env("ENVCHEB_THREADS", n);
        }
        let output = cmd.output().expect("binary runs");
        assert_eq!(code(&output), 0, "{}", stderr(&output));
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn implicitize_honors_cofactor_overrides_and_weighting_flag() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "cusp.json", CUSP);
    let out = dir.path().join("result.json");
    let output = run(&[
        "implicitize",
        "--family",
        family.to_str().unwrap(),
        "--degree",
        "3",
        "--k1",
        "18",
        "--no-row-weighting",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let result: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(result["lambda_bidegree"][0], 18);
    assert_eq!(result["lambda_bidegree"][1], 1); // derived default kept
    assert_eq!(result["row_weighting"], false);
    assert!(result["sigma_min"].as_f64().unwrap() < 1e-9);
}

#[test]
fn study_writes_csv_with_monotone_errors() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "cusp.json", CUSP);
    let out = dir.path().join("study.csv");
    let output = run(&[
        "study",
        "--family",
        family.to_str().unwrap(),
        "--dmax",
        "2",
        "--imax",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));

    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "d,i,diameter,epsilon,rate,rows,cols,assembly_ms,svd_ms"
    );
    let mut per_degree: std::collections::HashMap<usize, Vec<f64>> = Default::default();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 9);
        let d: usize = fields[0].parse().unwrap();
        if fields[3] != "n/a" {
            per_degree.entry(d).or_default().push(fields[3].parse().unwrap());
        }
    }
    for (d, eps) in per_degree {
        for pair in eps.windows(2) {
            assert!(pair[1] <= pair[0], "d = {d}: non-monotone errors {eps:?}");
        }
    }
}

#[test]
fn study_center_off_zero_set_exits_4() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "parabola.json", PARABOLA);
    let output = run(&[
        "study",
        "--family",
        family.to_str().unwrap(),
        "--dmax",
        "1",
        "--imax",
        "1",
        "--center",
        "0.9,0.9",
    ]);
    assert_eq!(code(&output), 4);
    assert!(
        stderr(&output).contains("center not on envelope zero set (|h| = "),
        "{}",
        stderr(&output)
    );
}

#[test]
fn study_domain_without_envelope_exits_4() {
    let dir = TempDir::new().unwrap();
    // parabola tangents on t in [0.6, 0.9]: h = -2t never vanishes
    let shifted = PARABOLA.replace("[[0.0, 1.0], [0.0, 1.0]]", "[[0.0, 1.0], [0.6, 0.9]]");
    let family = write_family(&dir, "off.json", &shifted);
    let output = run(&[
        "study",
        "--family",
        family.to_str().unwrap(),
        "--dmax",
        "1",
        "--imax",
        "1",
    ]);
    assert_eq!(code(&output), 4);
}

#[test]
fn study_imax_zero_has_no_rates() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "cusp.json", CUSP);
    let out = dir.path().join("study.csv");
    let output = run(&[
        "study",
        "--family",
        family.to_str().unwrap(),
        "--dmax",
        "2",
        "--imax",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let csv = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2); // one row per degree
    for row in rows {
        assert_eq!(row.split(',').nth(4).unwrap(), "n/a");
    }
}

fn implicitize_parabola(dir: &TempDir) -> PathBuf {
    let family = write_family(dir, "parabola.json", PARABOLA);
    let out = dir.path().join("parabola.result.json");
    let output = run(&[
        "implicitize",
        "--family",
        family.to_str().unwrap(),
        "--degree",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    out
}

#[test]
fn contour_sign_changes_hug_the_parabola() {
    let dir = TempDir::new().unwrap();
    let result = implicitize_parabola(&dir);
    let out = dir.path().join("grid.csv");
    let n = 101usize;
    let output = run(&[
        "contour",
        "--result",
        result.to_str().unwrap(),
        "--grid",
        "101",
        "--box",
        "0,0,1,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));

    let csv = fs::read_to_string(&out).unwrap();
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        rows.push((f[0], f[1], f[2]));
    }
    assert_eq!(rows.len(), n * n);
    let cell = 1.0 / (n - 1) as f64;
    // consecutive rows with the same x differ only in y
    for pair in rows.windows(2) {
        let ((x0, y0, q0), (x1, y1, q1)) = (pair[0], pair[1]);
        if x0 == x1 && (q0 < 0.0) != (q1 < 0.0) {
            let y_mid = 0.5 * (y0 + y1);
            // vertical distance to y = x^2, converted to a point distance
            let dist = (y_mid - x0 * x0).abs() / (1.0 + 4.0 * x0 * x0).sqrt();
            assert!(
                dist <= 2.0 * cell,
                "sign change at ({x0}, {y_mid}) is {dist} from the parabola"
            );
        }
    }
}

#[test]
fn contour_grid_one_is_a_corner_sample() {
    let dir = TempDir::new().unwrap();
    let result = implicitize_parabola(&dir);
    let out = dir.path().join("grid.csv");
    let output = run(&[
        "contour",
        "--result",
        result.to_str().unwrap(),
        "--grid",
        "1",
        "--box",
        "0.25,0.25,1,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0.25,0.25,"));
}

#[test]
fn contour_rejects_empty_box() {
    let dir = TempDir::new().unwrap();
    let result = implicitize_parabola(&dir);
    let output = run(&[
        "contour",
        "--result",
        result.to_str().unwrap(),
        "--grid",
        "3",
        "--box",
        "0.5,0,0.5,1",
    ]);
    assert_eq!(code(&output), 2);
}

#[test]
fn contour_emits_member_polylines() {
    let dir = TempDir::new().unwrap();
    let result = implicitize_parabola(&dir);
    let out = dir.path().join("grid.csv");
    let output = run(&[
        "contour",
        "--result",
        result.to_str().unwrap(),
        "--grid",
        "5",
        "--family",
        dir.path().join("parabola.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let members = fs::read_to_string(dir.path().join("grid_members.csv")).unwrap();
    let mut ids: Vec<usize> = members
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    ids.dedup();
    assert_eq!(ids.len(), 64);
}

#[test]
fn contour_rejects_mismatched_family() {
    let dir = TempDir::new().unwrap();
    let result = implicitize_parabola(&dir);
    let other = write_family(&dir, "cusp.json", CUSP);
    let output = run(&[
        "contour",
        "--result",
        result.to_str().unwrap(),
        "--grid",
        "3",
        "--family",
        other.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("fingerprint"));
}

#[test]
fn bench_rows_and_determinism() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "parabola.json", PARABOLA);
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "bench",
            "--family",
            family.to_str().unwrap(),
            "--degrees",
            "1..3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&output), 0, "{}", stderr(&output));
    }

    let parse_entries = |path: &Path| -> Vec<u64> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
            .collect()
    };
    let entries_a = parse_entries(&out_a);
    assert_eq!(entries_a.len(), 3);
    for pair in entries_a.windows(2) {
        assert!(pair[1] > pair[0]);
    }
    // times may differ between runs; the dimension columns may not
    assert_eq!(entries_a, parse_entries(&out_b));
}

#[test]
fn bench_rejects_bad_degree_list() {
    let dir = TempDir::new().unwrap();
    let family = write_family(&dir, "parabola.json", PARABOLA);
    for degrees in ["0..2", "abc", "3..1", ""] {
        let output = run(&[
            "bench",
            "--family",
            family.to_str().unwrap(),
            "--degrees",
            degrees,
        ]);
        assert_eq!(code(&output), 2, "degrees = {degrees:?}");
    }
}

#[test]
fn missing_family_file_is_an_input_error() {
    let output = run(&[
        "implicitize",
        "--family",
        "/nonexistent/family.json",
        "--degree",
        "2",
    ]);
    assert_eq!(code(&output), 2);
}
