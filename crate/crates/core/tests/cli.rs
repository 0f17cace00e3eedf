use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

const QUICK: &[&str] = &[
    "--depth",
    "14",
    "--eps-boundary",
    "1e-4",
    "--angles",
    "16",
    "--k-max",
    "14",
    "--j-max",
    "64",
];

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bloch-scope"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn norm_of_identity_and_constant() {
    let r = json(&run(&[
        "norm", "--symbol", "identity", "--weight", "valpha:1",
    ]));
    assert!((r["results"]["norm"]["total"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(r["tool"], "bloch-scope");
    assert!(r["timing"]["elapsed_seconds"].is_number());

    let r = json(&run(&["norm", "--symbol", "const(2)"]));
    assert_eq!(r["results"]["norm"]["total"].as_f64(), Some(2.0));
}

#[test]
fn malformed_symbol_exits_with_position() {
    let out = run(&["norm", "--symbol", "compose(identity identity)"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("position 17"), "{err}");
    assert!(err.contains("^"));
}

#[test]
fn non_self_map_exits_3() {
    let out = run(&["essential", "--symbol", "scale(2, identity)"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compare_with_log_weight_exits_4() {
    let out = run(&["compare", "--symbol", "identity", "--weight", "log"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_errors_exit_2() {
    let out = run(&["scan-dump", "--symbol", "identity", "--angles", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["norm", "--symbol", "identity", "--set", "colour=blue"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown configuration key"));
    let out = run(&["norm"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["norm", "--symbol", "identity"])
        .env("BLOCH_SCOPE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    fs::write(
        &config,
        "# identity on the Bloch space\nsymbol = identity\nweight = valpha:2\n",
    )
    .unwrap();
    let out_path = dir.path().join("report.json");
    let status = bin()
        .args([
            "norm",
            "--config",
            config.to_str().unwrap(),
            "--weight",
            "valpha:1",
        ])
        .args(["--out", out_path.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let r: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["config"]["symbol"], "identity");
    assert_eq!(r["results"]["weight"], "valpha:1");

    fs::write(&config, "symbol = identity\nshape = round\n").unwrap();
    let out = run(&["norm", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn essential_verdicts() {
    let mut args = vec![
        "essential",
        "--alpha",
        "1",
        "--weight",
        "valpha:1",
        "--symbol",
    ];
    let verdict = |symbol: &str, args: &mut Vec<&str>| {
        let mut a = args.clone();
        a.push(symbol);
        a.extend_from_slice(QUICK);
        let r = json(&run(&a));
        (
            r["results"]["bounds"]["verdict"]
                .as_str()
                .unwrap()
                .to_string(),
            r["results"]["bounds"]["l"].as_f64().unwrap(),
            r["results"]["bounds"]["upper"].as_f64().unwrap(),
        )
    };
    let (v, l, upper) = verdict("identity", &mut args);
    assert_eq!(v, "non_compact");
    assert!((l - 0.5).abs() < 1e-3);
    assert!((upper - 4.0).abs() < 1e-2);
    assert_eq!(verdict("dilate(0.5, identity)", &mut args).0, "compact");
    assert_eq!(verdict("affine(0.5, 0.5)", &mut args).0, "non_compact");
}

#[test]
fn compare_reports_agreement() {
    let mut args = vec!["compare", "--symbol", "identity", "--beta", "1"];
    args.extend_from_slice(QUICK);
    let r = json(&run(&args));
    assert_eq!(r["results"]["agreement"], Value::Bool(true));
    let zhao = r["results"]["zhao"]["estimate"].as_f64().unwrap();
    assert!((zhao - 1.0).abs() < 2e-2, "{zhao}");
    assert!(r["results"]["tjani_scan"]["l_seminorm"].as_f64().unwrap() > 0.99);
}

#[test]
fn scan_dump_csv_shape() {
    let mut args = vec!["scan-dump", "--symbol", "identity", "--format", "csv"];
    args.extend_from_slice(QUICK);
    let out = run(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["radius", "theta", "norm", "seminorm", "radius_max"]
    );
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|c| c.parse().unwrap()).collect())
        .collect();
    // radii 1 - 2^-k for k = 3..=13, then the cap 1 - 1e-4
    assert_eq!(rows.len(), 12 * 16);
    let mut maxima: Vec<f64> = rows.chunks(16).map(|c| c[0][4]).collect();
    assert!(maxima.windows(2).all(|w| w[0] < w[1]));
    maxima.dedup();
    assert_eq!(maxima.len(), 12);
    assert!(rows
        .iter()
        .all(|r| (0.0..std::f64::consts::TAU).contains(&r[1])));
}

#[test]
fn selfcheck_passes() {
    let r = json(&run(&["selfcheck"]));
    assert_eq!(r["results"]["passed"], Value::Bool(true));
}
