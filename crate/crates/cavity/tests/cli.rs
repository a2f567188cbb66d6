use std::process::Command;

use cavity::cli::{run, EXIT_FAILED, EXIT_OK, EXIT_TRUNCATION, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("cavity").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const CANONICAL: [&str; 10] = ["--eps", "1", "--lambda", "1", "--tau", "3.141592653589793", "--p", "0.5", "--tol", "1e-6"];

#[test]
fn canonical_compare_passes_with_enough_levels() {
    let mut args = vec!["compare", "--mode", "ideal"];
    args.extend(CANONICAL);
    args.extend(["--steps", "8", "--trunc", "128"]);
    let (code, out, err) = call(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.starts_with("quantity,step,"));
    assert!(err.contains(" 0 failed"));
}

#[test]
fn canonical_compare_at_48_levels_reports_the_guard() {
    let mut args = vec!["compare", "--mode", "ideal"];
    args.extend(CANONICAL);
    args.extend(["--steps", "8", "--trunc", "48", "--format", "json"]);
    let (code, out, err) = call(&args);
    assert_eq!(code, EXIT_TRUNCATION);
    assert!(err.contains("aborted after n=4"));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["aborted"]["last_valid_n"], 4);
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn failed_comparison_exits_one() {
    let (code, _, err) = call(&["compare", "--steps", "2", "--trunc", "40", "--tau", "1", "--tol", "1e-17"]);
    assert_eq!(code, EXIT_FAILED, "{err}");
}

#[test]
fn limit_needs_strict_damping() {
    let (code, _, err) = call(&["analytic", "--quantity", "limit", "--sigma-minus", "0.001", "--sigma-plus", "0.002"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("requires sigma_minus > sigma_plus"), "{err}");
}

#[test]
fn out_of_range_flags_name_the_bound() {
    for (args, needle) in [
        (vec!["simulate", "--p", "1.5"], "must lie in [0, 1]"),
        (vec!["simulate", "--tau", "0"], "must be > 0"),
        (vec!["simulate", "--sigma-minus", "-1"], "must be >= 0"),
        (vec!["simulate", "--trunc", "0"], "must be >= 1"),
        (vec!["simulate", "--init", "gibbs:-1"], "must be > 0"),
        (vec!["compare", "--mode", "ideal", "--sigma-minus", "0.1"], "sigma_minus = sigma_plus = 0"),
        (vec!["analytic", "--quantity", "nope"], "unknown quantity"),
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(err.contains(needle), "{args:?}: {err}");
    }
}

#[test]
fn simulate_truncation_exits_three() {
    let (code, _, err) = call(&["simulate", "--trunc", "6", "--steps", "4", "--lambda", "2", "--tau", "1"]);
    assert_eq!(code, EXIT_TRUNCATION, "{err}");
}

#[test]
fn figure1_file_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let (code, _, _) = call(&["figure1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 61);
    assert_eq!(lines[0], "n,t,N_ideal,N_open_analytic,N_open_numeric,asymptote");
}

#[test]
fn run_config_echoes_flags_verbatim() {
    let args = [
        "simulate", "--eps", "1.0", "--lambda=-0.25", "--tau", "0.7", "--p", "0.30", "--sigma-minus", "1e-1",
        "--sigma-plus", "0.02", "--init", "coherent:0.5,0.1", "--trunc", "30", "--steps", "3", "--substeps", "2",
        "--format", "json",
    ];
    let (code, out, err) = call(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let flags = &v["run_config"]["flags"];
    let mut i = 1;
    while i < args.len() {
        let (k, val) = match args[i].split_once('=') {
            Some((k, val)) => (k, val),
            None => {
                i += 1;
                (args[i - 1], args[i])
            }
        };
        assert_eq!(flags[k.trim_start_matches("--")], val, "{k}");
        i += 1;
    }
    assert_eq!(v["run_config"]["subcommand"], "simulate");
    assert_eq!(v["rows"].as_array().unwrap().len(), 1 + 3 * 2);
}

#[test]
fn same_argv_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run_once = |name: &str| {
        let path = dir.path().join(name);
        let (code, _, _) = call(&[
            "sweep", "--vary", "p", "--range", "0,1,11", "--quantity", "growth_ideal,photons_open,limit_open",
            "--sigma-minus", "0.05", "--tau", "1", "--steps", "20", "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        std::fs::read(path).unwrap()
    };
    let a = run_once("a.csv");
    assert_eq!(a, run_once("b.csv"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 12);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cavity");
    let status = Command::new(bin).args(["analytic", "--steps", "3"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    let status = Command::new(bin).args(["bogus"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
    let help = Command::new(bin).args(["--help"]).output().unwrap();
    assert_eq!(help.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&help.stdout).contains("radians"));
}
