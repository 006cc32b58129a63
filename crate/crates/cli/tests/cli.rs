use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rhsolve"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const UNIT_DISC: &str = r#"{"domain":{"type":"disc"},"families":[{"type":"circle","fourier":{"R":[1]}}],"windings":[1]}"#;

const HALF_POWER: &str = r#"{
  "domain": {"type": "annulus", "q": 0.5},
  "families": [
    {"type": "circle", "fourier": {"R": [1]}},
    {"type": "circle", "fourier": {"R": [0.7071067811865476]}}
  ]
}"#;

#[test]
fn disc_solve_writes_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "disc.json", UNIT_DISC);
    let out = tmp.path().join("out");
    let o = run(&["solve"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(out.join("result.json"));
    assert!(r["solution"]["residual_sup"].as_f64().unwrap() < 1e-15);
    assert_eq!(r["solution"]["winding"], 1);
    assert!(r["solution"]["certificate"]["product"].is_number());
    let history = std::fs::read_to_string(out.join("history.csv")).unwrap();
    assert!(history.starts_with("iteration,residual\n0,"));
    assert_eq!(std::fs::read_to_string(out.join("trace_0.csv")).unwrap().lines().count(), 257);
    assert!(out.join("metadata.json").exists());
}

#[test]
fn radial_annulus_has_one_zero() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "a.json", HALF_POWER);
    let out = tmp.path().join("out");
    let o = run(&["solve"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(out.join("result.json"));
    let zeros = r["solution"]["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 1);
    let (re, im) = (zeros[0]["re"].as_f64().unwrap(), zeros[0]["im"].as_f64().unwrap());
    assert!(((re * re + im * im).sqrt() - 0.5f64.sqrt()).abs() < 1e-8);
    assert!(out.join("trace_1.csv").exists());
}

#[test]
fn malformed_config_exits_1_without_artifacts() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let bad = [
        r#"{"domain":{"type":"disc"},"families":[{"type":"circle","fourier":{"R":"one"}}],"windings":[1]}"#,
        r#"{"domain":{"type":"disc"},"families":[{"type":"circle","fourier":{"R":[1]}}],"windings":[1],"extra":true}"#,
        r#"{"domain":{"type":"disc"},"families":[{"type":"ellipse","fourier":{"p":[1]}}],"windings":[1]}"#,
    ];
    for (i, text) in bad.iter().enumerate() {
        let cfg = write_config(tmp.path(), &format!("bad{i}.json"), text);
        let o = run(&["solve"], &cfg, &out);
        assert_eq!(o.status.code(), Some(1), "config {i}");
        assert!(!o.stderr.is_empty());
        assert!(!out.exists());
    }
}

#[test]
fn no_convergence_exits_2() {
    let tmp = TempDir::new().unwrap();
    let text = r#"{"domain":{"type":"disc"},
        "families":[{"type":"ellipse","fourier":{"p":[3],"q":[1],"phi":[0,0,0.3]}}],
        "windings":[3],"newton":{"max_iter":1}}"#;
    let cfg = write_config(tmp.path(), "hard.json", text);
    let out = tmp.path().join("out");
    let o = run(&["solve"], &cfg, &out);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.join("result.json").exists());
}

#[test]
fn identical_runs_give_identical_results() {
    let tmp = TempDir::new().unwrap();
    let text = r#"{"domain":{"type":"disc"},
        "families":[{"type":"ellipse","fourier":{"p":[1.5,0.1],"q":[1],"phi":[0,0,0.2]}}],
        "windings":[2],"seed":7}"#;
    let cfg = write_config(tmp.path(), "e.json", text);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(run(&["solve"], &cfg, &a).status.code(), Some(0));
    assert_eq!(run(&["solve", "--seed", "7"], &cfg, &b).status.code(), Some(0));
    let ra = std::fs::read(a.join("result.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("result.json")).unwrap());
    assert_eq!(std::fs::read(a.join("trace_0.csv")).unwrap(), std::fs::read(b.join("trace_0.csv")).unwrap());
}

#[test]
fn identity_checks() {
    let tmp = TempDir::new().unwrap();
    let identity = |name: &str, text: &str| {
        let cfg = write_config(tmp.path(), name, text);
        let out = tmp.path().join(name.trim_end_matches(".json"));
        let o = run(&["check-identity"], &cfg, &out);
        (o, out)
    };
    let z = r#"{"domain":{"type":"annulus","q":0.5},
        "families":[{"type":"circle","fourier":{"R":[1]}},{"type":"circle","fourier":{"R":[0.5]}}],
        "windings":[1,-1]}"#;
    let (o, out) = identity("z.json", z);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(out.join("identity.json"));
    assert!(rep["diff"].as_f64().unwrap() < 1e-12);
    assert_eq!(rep["k1"], 1);

    let random = r#"{"domain":{"type":"annulus","q":0.25},
        "families":[{"type":"circle","fourier":{"R":[1,0.2,-0.1,0.05]}},{"type":"circle","fourier":{"R":[0.6,-0.1,0.1]}}]}"#;
    let (o, out) = identity("random.json", random);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read_json(out.join("identity.json"))["diff"].as_f64().unwrap() < 1e-6);

    let mislabeled = HALF_POWER.replace("]\n}", "],\n  \"windings\": [1, 1],\n  \"method\": \"radial\"\n}");
    let (o, out) = identity("mislabeled.json", &mislabeled);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read_json(out.join("identity.json"))["diff"].as_f64().unwrap() > 0.5);
}

#[test]
fn sweep_table_and_fit() {
    let tmp = TempDir::new().unwrap();
    let text = r#"{"domain":{"type":"annulus","q":0.5},
        "families":[{"type":"circle","fourier":{"R":[1]}},{"type":"circle","fourier":{"R":[1]}}]}"#;
    let cfg = write_config(tmp.path(), "s.json", text);
    let out = tmp.path().join("sweep");
    let o = run(&["sweep", "--n-min", "4", "--n-max", "12"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,pre_newton_residual,collar_norm,fitted_slope");
    assert_eq!(lines.len(), 11);
    let ns: Vec<&str> = lines[1..10].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["4", "5", "6", "7", "8", "9", "10", "11", "12"]);
    let slope: f64 = lines[10].strip_prefix("fit,,,").unwrap().parse().unwrap();
    assert!(slope <= 0.5f64.powf(1.0 / 3.0).ln() + 0.1, "{slope}");

    let single = tmp.path().join("single");
    assert_eq!(run(&["sweep", "--n-min", "5", "--n-max", "5"], &cfg, &single).status.code(), Some(0));
    let csv = std::fs::read_to_string(single.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(!csv.lines().any(|l| l.starts_with("fit,")));

    let empty = tmp.path().join("empty");
    assert_eq!(run(&["sweep", "--n-min", "6", "--n-max", "5"], &cfg, &empty).status.code(), Some(1));
    assert!(!empty.exists());
}

#[test]
fn surjectivity_demo_realizes_targets() {
    let tmp = TempDir::new().unwrap();
    let text = r#"{"domain":{"type":"annulus","q":0.5},
        "families":[{"type":"circle","fourier":{"R":[1]}},{"type":"circle","fourier":{"R":[1]}}]}"#;
    let cfg = write_config(tmp.path(), "d.json", text);
    let out = tmp.path().join("demo");
    let o = run(&["demo-surjectivity"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(out.join("result.json"));
    let points = r["points"].as_array().unwrap();
    assert_eq!(points.len(), 10);
    assert!(points.iter().all(|p| p["error"].as_f64().unwrap() < 1e-6 && p["zero_count"].as_u64().unwrap() <= 1));
}
