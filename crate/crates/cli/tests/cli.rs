//! End-to-end binary tests: schemas, example values, determinism, config
//! merging, and exit codes, all through the real executable.

use std::path::Path;
use std::process::{Command, Output};

fn spinphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinphase"))
        .args(args)
        .env_remove("SPINPHASE_JOBS")
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (String, Vec<&'static str>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).expect("output file exists");
    let mut lines = text.lines();
    let comment = lines.next().expect("comment line").to_string();
    assert!(comment.starts_with("# config {"), "{comment}");
    let headers: Vec<&'static str> = lines
        .next()
        .expect("header line")
        .split(',')
        .map(|h| Box::leak(h.to_string().into_boxed_str()) as &'static str)
        .collect();
    let rows = lines
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect();
    (comment, headers, rows)
}

fn column(headers: &[&str], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let index = headers.iter().position(|h| *h == name).unwrap_or_else(|| {
        panic!("missing column {name} in {headers:?}");
    });
    rows.iter().map(|row| row[index].parse().expect("numeric cell")).collect()
}

#[test]
fn toy_grid_of_three_hits_the_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("toy.csv");
    let run = spinphase(&["toy", "--theta-steps", "3", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let (_, headers, rows) = read_csv(&out);
    assert_eq!(
        headers,
        [
            "theta",
            "gamma_plus",
            "gamma_minus",
            "mu_plus_abs",
            "concurrence_analytic",
            "concurrence_from_phase",
            "concurrence_out_of_range"
        ]
    );
    let concurrence = column(&headers, &rows, "concurrence_analytic");
    for (found, expected) in concurrence.iter().zip([0.0, 0.5, 1.0]) {
        assert!((found - expected).abs() < 1e-12, "{found} vs {expected}");
    }
    let phase_route = column(&headers, &rows, "concurrence_from_phase");
    for (a, b) in concurrence.iter().zip(&phase_route) {
        assert!((a - b).abs() < 1e-12);
    }
    for row in &rows {
        assert_eq!(row.last().unwrap(), "false");
    }
}

#[test]
fn adiabatic_columns_track_the_analytic_phase() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("toy.csv");
    let run = spinphase(&[
        "toy",
        "--theta-steps",
        "3",
        "--adiabatic",
        "--ratio",
        "0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let (_, headers, rows) = read_csv(&out);
    assert_eq!(headers[6], "gamma_plus_numeric");
    assert_eq!(headers[7], "leakage");
    let analytic = column(&headers, &rows, "gamma_plus");
    let numeric = column(&headers, &rows, "gamma_plus_numeric");
    // theta = pi/2 is the interior point; the endpoints wrap to the same
    // branch only modulo 2 pi.
    assert!((analytic[1] - numeric[1]).abs() < 1e-2);
    let leakage = column(&headers, &rows, "leakage");
    assert!(leakage.iter().all(|&l| l < 1e-2));
}

#[test]
fn ising_zero_coupling_row_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ising.csv");
    let run = spinphase(&[
        "ising",
        "--lambda-min",
        "0",
        "--lambda-max",
        "0",
        "--lambda-steps",
        "1",
        "--mode-n",
        "51",
        "--ed",
        "--n",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let (_, headers, rows) = read_csv(&out);
    assert_eq!(
        headers,
        [
            "lambda",
            "gamma_thermo",
            "gamma_modesum_mean",
            "concurrence_phase",
            "concurrence_wootters_ed",
            "ed_gap",
            "concurrence_out_of_range"
        ]
    );
    assert_eq!(rows.len(), 1);
    assert_eq!(column(&headers, &rows, "gamma_thermo")[0], 0.0);
    assert_eq!(column(&headers, &rows, "concurrence_phase")[0], 0.0);
    assert!(column(&headers, &rows, "concurrence_wootters_ed")[0].abs() < 1e-12);
    assert!((column(&headers, &rows, "ed_gap")[0] - 2.0).abs() < 1e-8);
}

#[test]
fn identical_requests_give_byte_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let files = [
        dir.path().join("a.csv"),
        dir.path().join("b.csv"),
        dir.path().join("c.csv"),
    ];
    for (out, jobs) in files.iter().zip(["1", "1", "4"]) {
        let run = Command::new(env!("CARGO_BIN_EXE_spinphase"))
            .args([
                "ising",
                "--lambda-steps",
                "3",
                "--mode-n",
                "51",
                "--ed",
                "--n",
                "4",
                "--seed",
                "13",
                "--out",
                out.to_str().unwrap(),
            ])
            .env("SPINPHASE_JOBS", jobs)
            .output()
            .expect("binary runs");
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    }
    let texts: Vec<String> = files
        .iter()
        .map(|f| std::fs::read_to_string(f).unwrap())
        .collect();
    assert_eq!(texts[0], texts[1], "same request was not reproducible");
    // A different worker count changes only the echoed config line.
    let data = |text: &str| text.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(data(&texts[0]), data(&texts[2]), "rows depend on worker count");
}

#[test]
fn json_format_nests_config_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("afm.json");
    let run = spinphase(&[
        "afm",
        "--sizes",
        "2,4",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let text = std::fs::read_to_string(&out).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["config"]["command"], "afm");
    assert_eq!(parsed["config"]["sizes"], serde_json::json!([2, 4]));
    let rows = parsed["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["source"], "exact_bethe");
    let exact = rows[0]["concurrence"].as_f64().unwrap();
    assert!((exact - 0.3862943611198906).abs() < 1e-12);
    assert_eq!(rows[1]["n"], 2);
    assert!((rows[1]["wootters_nn"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((rows[2]["e_g"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"theta_steps": 2, "seed": 11}"#).unwrap();

    let out = dir.path().join("from_file.csv");
    let run = spinphase(&[
        "toy",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let (comment, _, rows) = read_csv(&out);
    assert_eq!(rows.len(), 2);
    assert!(comment.contains("\"seed\":11"), "{comment}");

    let out = dir.path().join("overridden.csv");
    let run = spinphase(&[
        "toy",
        "--config",
        config.to_str().unwrap(),
        "--theta-steps",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let (comment, _, rows) = read_csv(&out);
    assert_eq!(rows.len(), 5);
    assert!(comment.contains("\"seed\":11"), "{comment}");
}

#[test]
fn berry_loop_refines_with_more_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("loop.csv");
    let run = spinphase(&[
        "berry-loop",
        "--n",
        "3",
        "--lambda",
        "0.5",
        "--steps",
        "8,16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let (_, headers, rows) = read_csv(&out);
    assert_eq!(
        headers,
        ["n", "lambda", "steps", "gamma_wilson", "gamma_modesum", "abs_diff", "offset_multiple_of_pi"]
    );
    let diffs = column(&headers, &rows, "abs_diff");
    assert!(diffs[1] < diffs[0], "coarser loop was more accurate: {diffs:?}");
    for row in &rows {
        let offset: i64 = row.last().unwrap().parse().expect("integer offset");
        assert_eq!(offset, 0);
    }
}

#[test]
fn config_errors_exit_2_and_leave_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let cases: Vec<Vec<&str>> = vec![
        vec!["toy", "--theta-steps", "0"],
        vec!["afm", "--sizes", "5"],
        vec!["afm", "--sizes", "18"],
        vec!["ising", "--mode-n", "10"],
        vec!["ising", "--lambda-min", "2", "--lambda-max", "1"],
        vec!["ising", "--tol", "0"],
        vec!["berry-loop", "--n", "4"],
        vec!["berry-loop", "--steps", "4"],
        vec!["toy", "--adiabatic", "--time-steps", "10"],
    ];
    for case in cases {
        let mut args = case.clone();
        let out_str = out.to_str().unwrap();
        args.extend(["--out", out_str]);
        let run = spinphase(&args);
        assert_eq!(run.status.code(), Some(2), "args {case:?}");
        assert!(!out.exists(), "args {case:?} created a file");
    }
}

#[test]
fn unknown_config_keys_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("typo.json");
    std::fs::write(&config, r#"{"theta_stepz": 3}"#).unwrap();
    let run = spinphase(&["toy", "--config", config.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    let message = String::from_utf8_lossy(&run.stderr);
    assert!(message.contains("theta_stepz"), "{message}");
}

#[test]
fn degenerate_loop_exits_3_with_coupling_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let run = spinphase(&[
        "berry-loop",
        "--n",
        "9",
        "--lambda",
        "20",
        "--steps",
        "64",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(3));
    assert!(!out.exists());
    let message = String::from_utf8_lossy(&run.stderr);
    assert!(message.contains("lambda = 20"), "{message}");
    assert!(message.contains("degenerate"), "{message}");
}
