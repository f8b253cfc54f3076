use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gwpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwpoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn pairs_file(dir: &Path) -> String {
    let path = dir.join("pairs.txt");
    fs::write(&path, "4 2\n0 1\n2 3\n").unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn matrix_verify_reports_identity_and_writes_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let h = pairs_file(dir.path());
    let mat = dir.path().join("a.txt");
    let out = gwpoly(&[
        "matrix-verify",
        "--hypergraph",
        &h,
        "--m",
        "2",
        "--r",
        "1",
        "--s",
        "800",
        "--write-matrix",
        mat.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("identity: OK, cover_count=16"));
    assert!(lines.next().unwrap().starts_with("n,m,r,s,edges,colors,cover_count"));
    assert!(text.lines().last().unwrap().starts_with("# seed=0 version="));
    let matrix = fs::read_to_string(&mat).unwrap();
    assert!(matrix.lines().next().unwrap().starts_with("16 "));
}

#[test]
fn perturbed_matrix_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let h = pairs_file(dir.path());
    let mat = dir.path().join("a.txt");
    let base = ["matrix-verify", "--hypergraph", &h, "--m", "2", "--r", "1", "--s", "800"];
    let mut args = base.to_vec();
    args.extend(["--write-matrix", mat.to_str().unwrap()]);
    assert_eq!(code(&gwpoly(&args)), 0);

    // Double the first stored entry.
    let text = fs::read_to_string(&mat).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let parts: Vec<&str> = lines[1].split_whitespace().collect();
    let value: f64 = parts[2].parse().unwrap();
    lines[1] = format!("{} {} {}", parts[0], parts[1], 2.0 * value);
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();

    let mut args = base.to_vec();
    args.extend(["--matrix", bad.to_str().unwrap()]);
    let out = gwpoly(&args);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).starts_with("identity: FAILED"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("identity fails at x"));
}

#[test]
fn budget_and_invalid_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let h = pairs_file(dir.path());
    let out = gwpoly(&["matrix-verify", "--hypergraph", &h, "--m", "3", "--r", "1", "--budget", "10"]);
    assert_eq!(code(&out), 3);

    let out = gwpoly(&["birthday", "--r", "0", "--n", "10"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains('r'));

    assert_eq!(code(&gwpoly(&["ap-count", "--N", "12", "--k", "3"])), 2);
    assert_eq!(code(&gwpoly(&["ap-count", "--N", "12", "--k", "3", "--loose"])), 0);
    assert_eq!(code(&gwpoly(&["upper-tail", "--N", "11", "--k", "3", "--p", "1.5", "--delta", "1"])), 2);
    assert_eq!(code(&gwpoly(&["gw-estimate", "--family", "identity"])), 2);
    assert_eq!(code(&gwpoly(&["--threads", "0", "bound-eval", "--n", "10", "--k", "1", "--d", "1", "--t", "1"])), 2);
    assert_eq!(code(&gwpoly(&["ap-count", "--N", "11", "--k", "3", "--write-hypergraph", "/nonexistent/dir/h.txt"])), 1);
}

#[test]
fn ap_count_and_structure() {
    let out = gwpoly(&["ap-count", "--N", "5", "--k", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..3], ["5", "3", "10"]);

    let out = gwpoly(&["ap-count", "--N", "7", "--k", "3", "--set", "0,1,2,3"]);
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().ends_with(",2"), "{text}");

    let out = gwpoly(&["ap-structure", "--N", "13", "--k", "4", "--samples", "20", "--trials", "20"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn intersective_fixed_sets() {
    let out = gwpoly(&["intersective", "--N", "5", "--ell", "3", "--alpha", "0.5", "--D", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains("not_intersective"), "{row}");

    let out = gwpoly(&["intersective", "--N", "5", "--ell", "2", "--alpha", "0.5", "--D", "1,2,3,4"]);
    assert!(stdout(&out).lines().nth(1).unwrap().contains(",intersective,"));
}

#[test]
fn json_output_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = gwpoly(&[
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
        "bound-eval",
        "--n",
        "16,64",
        "--k",
        "2",
        "--d",
        "2",
        "--t",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "bound-eval");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let bound = v["rows"][0]["bound"].as_f64().unwrap();
    let expected = 16.0 * (2.0 * 16f64.powf(0.0) * 16f64.ln()).sqrt();
    assert!((bound - expected).abs() < 1e-9 * expected, "{bound} vs {expected}");
}

#[test]
fn config_supplies_defaults_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    fs::write(&cfg, "N=11\nk=3\np=0.5\ndelta=0.5\nsamples=500\nseed=5\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&gwpoly(&["--config", cfg, "upper-tail"]));
    assert!(from_file.contains("# seed=5 "), "{from_file}");
    let overridden = stdout(&gwpoly(&["--config", cfg, "upper-tail", "--seed", "6"]));
    assert!(overridden.contains("# seed=6 "));
    let direct = stdout(&gwpoly(&[
        "upper-tail", "--N", "11", "--k", "3", "--p", "0.5", "--delta", "0.5", "--samples", "500", "--seed", "6",
    ]));
    assert_eq!(overridden, direct);

    let json = dir.path().join("c.json");
    fs::write(&json, r#"{"N": 11, "k": 3, "format": "json"}"#).unwrap();
    let out = gwpoly(&["--config", json.to_str().unwrap(), "ap-count"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"][0]["edges"], 55);

    assert_eq!(code(&gwpoly(&["--config", "/nonexistent.txt", "ap-count"])), 2);
}

/// Small invocations of every subcommand.
fn every_command(h: &str) -> Vec<Vec<String>> {
    let cmds: [&[&str]; 12] = [
        &["gw-estimate", "--family", "identity", "--n", "6", "--samples", "200"],
        &["gw-estimate", "--family", "random", "--ladder", "6,8", "--k", "3", "--d", "2", "--t", "2", "--samples", "100"],
        &["matrix-verify", "--hypergraph", h, "--m", "2", "--r", "1", "--s", "800"],
        &["birthday", "--r", "1", "--n", "100", "--samples", "500"],
        &["poisson-check", "--r", "1", "--n", "50", "--samples", "2000"],
        &["tj-ratio", "--ladder", "8,16", "--samples", "20"],
        &["ap-count", "--N", "11", "--k", "3"],
        &["ap-structure", "--N", "7", "--k", "3", "--samples", "10", "--trials", "10"],
        &["upper-tail", "--N", "11", "--k", "3", "--p", "0.4", "--delta", "0.5", "--samples", "1000"],
        &["intersective", "--N", "29", "--ell", "3", "--alpha", "0.3", "--D", "1,5"],
        &["intersective", "--N", "11", "--ell", "3", "--alpha", "0.3", "--model", "bernoulli", "--p", "0.3", "--trials", "100"],
        &["bound-eval", "--n", "10,100", "--k", "3", "--d", "4", "--t", "2"],
    ];
    cmds.iter()
        .map(|c| c.iter().map(|s| (*s).to_owned()).collect())
        .collect()
}

#[test]
fn every_command_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let h = pairs_file(dir.path());
    for cmd in every_command(&h) {
        let run = |threads: &str| {
            let mut args = vec!["--seed", "17", "--threads", threads];
            args.extend(cmd.iter().map(String::as_str));
            let out = gwpoly(&args);
            assert_eq!(code(&out), 0, "{cmd:?}: {}", String::from_utf8_lossy(&out.stderr));
            out.stdout
        };
        let one = run("1");
        assert_eq!(one, run("1"), "{cmd:?} rerun");
        assert_eq!(one, run("4"), "{cmd:?} across thread counts");
    }
}
