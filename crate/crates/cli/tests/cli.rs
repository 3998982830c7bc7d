use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_convexhyper"));
    c.env_remove("CONVEXHYPER_GRID");
    c
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn ok_json(out: Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SQUARE: &str = r#"{"type":"polytope","vertices":[[-1,-1],[1,-1],[1,1],[-1,1]]}"#;
const DISK: &str = r#"{"type":"ball","center":[0,0],"radius":1}"#;

#[test]
fn support_of_ball_prints_seventeen_digits() {
    let dir = TempDir::new().unwrap();
    let ball = write(&dir, "b.json", r#"{"type":"ball","center":[0,0],"radius":2}"#);
    let out = run(&["support", "--in", s(&ball), "--x", "3,4"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("1.0000000000000000e1"), "{text}");
    assert_eq!(ok_json(out)["support"].as_f64().unwrap(), 10.0);
}

#[test]
fn square_disk_distance() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (write(&dir, "a.json", SQUARE), write(&dir, "b.json", DISK));
    let v = ok_json(run(&["hausdorff", s(&a), s(&b)]));
    assert!((v["hausdorff"].as_f64().unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-9);
}

#[test]
fn recenter_then_steiner_is_origin() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "t.json", r#"{"type":"polytope","vertices":[[0,0],[3,0],[0.5,2]]}"#);
    let out = dir.path().join("c.json");
    assert!(run(&["recenter", "--in", s(&tri), "--out", s(&out)]).status.success());
    let v = ok_json(run(&["steiner", "--in", s(&out)]));
    for x in v["steiner"].as_array().unwrap() {
        assert!(x.as_f64().unwrap().abs() < 1e-12);
    }
    let q = ok_json(run(&["--grid-2d", "4096", "steiner", "--quadrature", "--in", s(&out)]));
    for x in q["steiner"].as_array().unwrap() {
        assert!(x.as_f64().unwrap().abs() < 1e-5);
    }
}

#[test]
fn minkowski_and_sample() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (write(&dir, "a.json", SQUARE), write(&dir, "b.json", DISK));
    let sum = dir.path().join("sum.json");
    assert!(run(&["minkowski", s(&a), s(&b), "--scale-b", "0.5", "--out", s(&sum)]).status.success());
    let v = ok_json(run(&["support", "--in", s(&sum), "--x", "1,0"]));
    assert_eq!(v["support"].as_f64().unwrap(), 1.5);

    let sampled = dir.path().join("sampled.json");
    assert!(run(&["--grid-2d", "512", "sample", "--in", s(&sum), "--out", s(&sampled)]).status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&sampled).unwrap()).unwrap();
    assert_eq!(doc["body"]["type"], "sampled");
    assert_eq!(doc["body"]["values"].as_array().unwrap().len(), 512);
}

#[test]
fn regularize_writes_a_smooth_body() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", SQUARE);
    let out = dir.path().join("r.json");
    assert!(run(&["--grid-2d", "512", "regularize", "--t", "0.1", "--in", s(&a), "--out", s(&out)])
        .status
        .success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["metadata"]["regularized_t"], "0.1");
    let d = ok_json(run(&["hausdorff", s(&out), s(&a)]))["hausdorff"].as_f64().unwrap();
    assert!(d > 0.0 && d < 0.3, "{d}");
}

#[test]
fn truncation_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", SQUARE);
    let out = dir.path().join("cut.json");
    let v = ok_json(run(&["truncate", "--u", "1,0", "--eps", "0.5", "--in", s(&a), "--out", s(&out)]));
    assert!((v["face_diameter"].as_f64().unwrap() - 2.0).abs() < 1e-12);

    let too_deep = run(&["truncate", "--u", "1,0", "--eps", "2.5", "--in", s(&a), "--out", s(&out)]);
    assert_eq!(too_deep.status.code(), Some(3));

    let missing = run(&["steiner", "--in", s(&dir.path().join("nope.json"))]);
    assert_eq!(missing.status.code(), Some(4));

    let bad = write(
        &dir,
        "bad.json",
        r#"{"type":"rotated","matrix":[[1,0],[0,1.000001]],"inner":{"type":"ball","center":[0,0],"radius":1}}"#,
    );
    let invalid = run(&["steiner", "--in", s(&bad)]);
    assert_eq!(invalid.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains('/'));

    let negative = write(&dir, "neg.json", r#"{"type":"ball","center":[0,0],"radius":-1}"#);
    assert_eq!(run(&["steiner", "--in", s(&negative)]).status.code(), Some(2));
}

#[test]
fn grid_environment_variable() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", SQUARE);
    let bad = bin().env("CONVEXHYPER_GRID", "lots").args(["steiner", "--in", s(&a)]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let out = dir.path().join("s.json");
    let good = bin()
        .env("CONVEXHYPER_GRID", "64,4x8")
        .args(["sample", "--in", s(&a), "--out", s(&out)])
        .output()
        .unwrap();
    assert!(good.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["body"]["values"].as_array().unwrap().len(), 64);
}

#[test]
fn symmetries_of_square_and_desymmetrized_square() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", SQUARE);
    let v = ok_json(run(&["symmetries", "--tol", "1e-9", "--in", s(&a)]));
    assert_eq!(v["count"], 8);

    let out = dir.path().join("d.json");
    let v = ok_json(run(&["desymmetrize", "--budget", "0.3", "--in", s(&a), "--out", s(&out)]));
    let faces = v["faces"].as_array().unwrap();
    assert_eq!(faces.len(), 2);
    assert!(faces[1]["diameter"].as_f64().unwrap() < faces[0]["diameter"].as_f64().unwrap());
    assert!(v["displacement"].as_f64().unwrap() <= 0.3);
    let v = ok_json(run(&["symmetries", "--in", s(&out)]));
    assert_eq!(v["count"], 1);

    let tiny = run(&["desymmetrize", "--budget", "1e-9", "--in", s(&a), "--out", s(&out)]);
    assert_eq!(tiny.status.code(), Some(3));
}

#[test]
fn congruence_of_moved_polygon() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"type":"polytope","vertices":[[0,0],[2,0],[0.3,1],[1.5,1.2]]}"#);
    let b = write(
        &dir,
        "b.json",
        r#"{"type":"rotated","matrix":[[0.6,-0.8],[0.8,0.6]],"inner":{"type":"polytope","vertices":[[5,0],[7,0],[5.3,1],[6.5,1.2]]}}"#,
    );
    let v = ok_json(run(&["congruence", s(&a), s(&b), "--tol", "1e-6"]));
    assert!(v["distance"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["congruent"], true);
    assert_eq!(v["certificate_size"], 720);
    let v = ok_json(run(&["congruence", s(&a), s(&a), "--so-n", "--coarse", "90"]));
    assert_eq!(v["certificate_size"], 90);
}

#[test]
fn corpus_is_reproducible_and_plots() {
    let dir = TempDir::new().unwrap();
    let (p, q) = (dir.path().join("c1.json"), dir.path().join("c2.json"));
    for out in [&p, &q] {
        let v = ok_json(run(&["corpus", "--seed", "3", "--spec", "n=2,vertices=8,bodies=3", "--out", s(out)]));
        assert_eq!(v["bodies"], 3);
    }
    assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&q).unwrap());

    let a = write(&dir, "a.json", SQUARE);
    let r = dir.path().join("r.json");
    assert!(run(&["--grid-2d", "512", "regularize", "--t", "0.1", "--in", s(&a), "--out", s(&r)])
        .status
        .success());
    let svg = dir.path().join("plot.svg");
    assert!(run(&["plot", s(&a), s(&r), "--out", s(&svg)]).status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.contains("<svg"));
    assert_eq!(text.matches("<path").count(), 2);
}
