use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_genus0"));
    c.env_remove("GENUS0_THREADS");
    c
}

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| v.to_string().parse().unwrap())
}

#[test]
fn periods_of_br() {
    let out = run(&["periods", "--builtin", "br", "--a", "1", "--p", "7", "--q", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((num(&v["level"]) - 1.246980).abs() < 1e-6);
    assert_eq!(v["period_bound"], 7);
    assert_eq!(v["detected_period"], 7);
}

#[test]
fn saito_symmetry() {
    let v = json_of(&run(&["symmetry", "--builtin", "saito"]));
    assert_eq!(v["lie_symmetry"]["x1"], "-x^2*y - x*y + x^2 + x");
    assert_eq!(v["lie_symmetry"]["x2"], "x*y^2 - x*y");
    assert_eq!(v["density"], "x*y - x");
    assert_eq!(v["passed"], true);
}

#[test]
fn automatic_conjugation_from_spec_files() {
    let dir = specs();
    let f = dir.join("pal6.toml");
    let g = dir.join("pal5.toml");
    let out = run(&["conjugate", "--f", f.to_str().unwrap(), "--g", g.to_str().unwrap(), "--auto"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["suggested_level"], "h");
    let c = &v["conjugation"];
    assert_eq!(c["psi"][0], "-y - b");
    assert_eq!(c["psi"][1], "(-x*y - b*x)/y");
}

#[test]
fn explicit_conjugation_and_failure() {
    let out = run(&["conjugate", "--f", "pal3", "--g", "pal4", "--level", "h", "--m", "b*t/((h - 1)*t - b)"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["conjugate", "--f", "pal3", "--g", "pal4", "--level", "h", "--m", "t"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["passed"], false);
    let out = run(&["conjugate", "--f", "pal5", "--g", "pal3", "--auto"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["suggested_level"], Value::Null);
}

#[test]
fn br_hyperbolic_fiber_record() {
    let v = json_of(&run(&["analyze", "--builtin", "br", "--h", "3", "--trials", "3"]));
    let fib = &v["fibers"][0];
    assert_eq!(fib["class"], "hyperbolic");
    let texts: Vec<&str> = fib["fixed_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| {
            assert_eq!(p["at_infinity"], true);
            p["t"]["text"].as_str().unwrap()
        })
        .collect();
    assert_eq!(texts, ["3/2 + 1/2*sqrt(5)", "3/2 - 1/2*sqrt(5)"]);
}

#[test]
fn saito_rotation_fiber_record() {
    let v = json_of(&run(&["analyze", "--builtin", "saito", "--h", "-1"]));
    let fib = &v["fibers"][0];
    assert_eq!(fib["class"], "rotation");
    assert_eq!(num(&fib["theta"]), 0.5);
    assert_eq!(fib["period"], 2);
    assert_eq!(fib["prediction"]["passed"], true);
}

#[test]
fn empty_grid_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.toml");
    std::fs::write(&path, "[map]\nfx = \"y\"\nfy = \"x\"\n[integral]\nnum = \"x + y\"\n").unwrap();
    let out = run(&["analyze", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["fibers"], Value::Array(vec![]));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["analyze", "--builtin", "br", "--h", "3,2,3/2", "--trials", "4"],
        &["symmetry", "--builtin", "pal2"],
        &["mobius", "--builtin", "nostra", "--h", "1,-1/4"],
        &["orbit", "--builtin", "br", "--h", "3/2", "--t", "1/3", "--steps", "20", "--mode", "float"],
        &["rotation", "--builtin", "br", "--samples", "5", "--estimate", "100"],
        &["periods", "--builtin", "br", "--p", "7", "--q", "6"],
        &["conjugate", "--f", "pal1", "--g", "pal2", "--auto"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let mut outs = Vec::new();
        for (j, threads) in ["1", "4"].iter().enumerate() {
            let p = dir.path().join(format!("{i}-{j}.json"));
            let st = bin()
                .args(*args)
                .args(["--out", p.to_str().unwrap()])
                .env("GENUS0_THREADS", threads)
                .status()
                .unwrap();
            assert_eq!(st.code(), Some(0), "{args:?}");
            outs.push(std::fs::read(&p).unwrap());
        }
        assert_eq!(outs[0], outs[1], "{args:?}");
    }
}

#[test]
fn exact_orbit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("o.csv");
    let out = run(&[
        "orbit", "--builtin", "saito", "--h", "-1/2 + 1/2*sqrt(-3)", "--t", "1", "--steps", "6", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["period"], 3);
    assert_eq!(v["mode"], "exact-quadratic");
    assert_eq!(v["integral_conserved"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,x,y,x_decimal,y_decimal");
    assert_eq!(lines.len(), 8);
    assert!(lines[1].starts_with("0,1,"));
    assert!(lines[1].contains("1.000000000000000000000000000000"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["analyze", "--builtin", "br", "--h", "3+"]).status.code(), Some(3));
    assert_eq!(run(&["analyze", "--builtin", "saito", "--a", "2"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--builtin", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--spec", "/no/such/file.toml"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--builtin", "br", "--spec", "x.toml"]).status.code(), Some(2));
    assert_eq!(run(&["conjugate", "--f", "pal1", "--g", "pal2"]).status.code(), Some(2));
    let out = bin().args(["verify", "--builtin", "br"]).env("GENUS0_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[map]\nfx = \"y +\"\nfy = \"x\"\n[integral]\nnum = \"x\"\n").unwrap();
    let out = run(&["analyze", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("map.fx"));
}

#[test]
fn verify_all_builtins() {
    let out = run(&["verify", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json_of(&out)["systems"].as_array().unwrap().len(), 9);
}
