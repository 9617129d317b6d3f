use std::fs;
use std::process::{Command, Output};

fn tangenta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tangenta"))
        .args(args)
        .env_remove("TANGENTA_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {:?}", o.stderr))
}

#[test]
fn ftc_example_holds() {
    let o = tangenta(&[
        "verify", "ftc", "--curve", "x", "--R", "1", "--domain", "0", "2", "--tol", "1e-4",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["verdict"], "holds");
    assert_eq!(r["probes"], 50);
}

#[test]
fn non_monotone_prop11_is_a_precondition_error() {
    let o = tangenta(&[
        "verify", "prop11", "--curve", "sin(x)", "--domain", "0", "6", "--x0", "1",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(stderr_json(&o)["error"], "precondition");
    assert!(o.stdout.is_empty());
}

#[test]
fn failing_verdict_exits_one() {
    // a four-cell table is far too coarse for central differences at 1e-6
    let o = tangenta(&[
        "verify", "ftc", "--curve", "sin(x)", "--domain", "0", "3", "--tol", "1e-6", "--nodes", "4", "--probes", "1",
    ]);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["verdict"], "fails");
}

#[test]
fn tractrix_trace() {
    let o = tangenta(&[
        "device", "tractrix", "--a", "1", "--from", "0.1", "--to", "0.99", "--step", "1e-4",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,z,ET,TC,CR,slope"));
    assert_eq!(lines.count(), 8901);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "ftc", "--domain", "0", "1"][..],
        &[
            "verify",
            "ftc",
            "--curve",
            "x",
            "--curve-file",
            "c.json",
            "--domain",
            "0",
            "1",
        ],
        &["verify", "ftc", "--curve", "x +", "--domain", "0", "1"],
        &["verify", "ftc", "--curve", "foo(x)", "--domain", "0", "1"],
        &["nonsense"],
        &["riemann", "--curve", "x", "--domain", "0", "1", "--cells", "many"],
    ] {
        let o = tangenta(args);
        assert_eq!(code(&o), 2, "{args:?}");
        let e = stderr_json(&o);
        assert_eq!(e["exit_code"], 2);
        assert!(e["message"].as_str().is_some());
    }
}

#[test]
fn help_lists_defaults() {
    let o = tangenta(&["verify", "ftc", "--help"]);
    assert_eq!(code(&o), 0);
    let help = stdout(&o);
    assert!(help.contains("[default: 0.000001]"), "{help}");
    assert!(help.contains("[default: 50]"));
    let o = tangenta(&["device", "simulate", "--help"]);
    assert!(stdout(&o).contains("[default: 0.0001]"));
}

#[test]
fn outputs_are_byte_identical() {
    let args = [
        "render", "leibniz", "--curve", "x^2 + 1", "--domain", "0", "2", "--x0", "0.5", "--delta", "0.5",
    ];
    let a = tangenta(&args);
    let b = tangenta(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("<?xml"));
    let q = ["quadratrix", "--curve", "exp(x)", "--domain", "0", "1", "--nodes", "9"];
    assert_eq!(tangenta(&q).stdout, tangenta(&q).stdout);
}

#[test]
fn out_dir_from_environment_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tangenta"))
        .args(["quadratrix", "--curve", "x", "--domain", "0", "1", "--nodes", "5"])
        .env("TANGENTA_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("quadratrix.csv")).unwrap();
    assert!(csv.starts_with("x,z_lo,z_hi,z_mid\n"));
    assert_eq!(csv.lines().count(), 6);

    let other = dir.path().join("nested");
    let o = tangenta(&[
        "--out-dir",
        other.to_str().unwrap(),
        "render",
        "barrow",
        "--curve",
        "x",
        "--domain",
        "0",
        "2",
        "--x0",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    let svg = fs::read_to_string(other.join("barrow.svg")).unwrap();
    assert!(svg.contains("</svg>"));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"curve": "x^2", "domain": [0, 2], "R": 2, "tol": 1e-4}"#).unwrap();
    let o = tangenta(&["verify", "ftc", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["inputs"]["R"], 2.0);
    // explicit flags override the file
    let o = tangenta(&["verify", "ftc", "--config", cfg.to_str().unwrap(), "--R", "1"]);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["inputs"]["R"], 1.0);
}

#[test]
fn curve_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.json");
    fs::write(&path, r#"{"kind": "sampled", "x": [0, 1, 2], "y": [0, 1, 2]}"#).unwrap();
    let o = tangenta(&["riemann", "--curve-file", path.to_str().unwrap(), "--cells", "2"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["lower"], 1.0);
    assert_eq!(r["upper"], 3.0);
}

#[test]
fn leibniz_frame_report() {
    let o = tangenta(&[
        "verify", "leibniz", "--curve", "x", "--domain", "0", "2", "--x0", "1", "--delta", "0.5", "--frame", "leibniz",
    ]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["inputs"]["frame"], "leibniz");
    assert_eq!(r["inputs"]["a"], 1.0);
    assert_eq!(r["inputs"]["y0"], 1.0);
}

#[test]
fn device_cam_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tangenta"))
        .args([
            "device", "cam", "--curve", "1", "--domain", "1", "2", "--U", "10", "--from", "1", "--to", "2",
        ])
        .env("TANGENTA_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cam = dir.path().join("cam.json");
    let o = tangenta(&[
        "device",
        "simulate",
        "--cam-file",
        cam.to_str().unwrap(),
        "--U",
        "10",
        "--from",
        "1",
        "--to",
        "2",
        "--sigma",
        "1",
        "--step",
        "0.01",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let last = stdout(&o).lines().last().unwrap().to_string();
    let z: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((z - 1.0).abs() < 1e-12);
}

#[test]
fn truncated_run_writes_partial_trace_and_exits_three() {
    let o = tangenta(&[
        "device", "tractrix", "--a", "1", "--from", "0.5", "--to", "1.2", "--step", "1e-3",
    ]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).starts_with("x,z,ET,TC,CR,slope\n"));
    assert!(stderr_json(&o)["message"].as_str().unwrap().contains("truncated"));
}

#[test]
fn roundtrip_and_infeasible_cam() {
    let ok = tangenta(&[
        "device",
        "roundtrip",
        "--curve",
        "x",
        "--domain",
        "0.5",
        "1.5",
        "--a",
        "1",
        "--U",
        "4",
        "--from",
        "0.5",
        "--to",
        "1.5",
    ]);
    assert_eq!(code(&ok), 0);
    let bad = tangenta(&[
        "device",
        "roundtrip",
        "--curve",
        "x",
        "--domain",
        "0.5",
        "1.5",
        "--a",
        "1",
        "--U",
        "1",
        "--from",
        "0.5",
        "--to",
        "1.5",
    ]);
    assert_eq!(code(&bad), 3);
}
