use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mapgf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapgf")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn terms(o: &Output) -> Vec<Value> {
    let v: Value = serde_json::from_str(&stdout(o)).unwrap();
    v["terms"].as_array().unwrap().clone()
}

#[test]
fn series_examples() {
    let o = mapgf(&["series", "--family", "M1", "--order", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = terms(&o);
    let coeffs: Vec<&str> = t.iter().map(|x| x[2].as_str().unwrap()).collect();
    assert_eq!(coeffs, ["2", "9", "54"]);

    let o = mapgf(&["series", "--family", "M4", "--order", "2", "--format", "text"]);
    assert_eq!(stdout(&o).trim(), "2*z + z^2 + O(z^3)");

    // both size-1 maps are a loop or a bridge, neither has a non-root 2-gon
    let o = mapgf(&["series", "--family", "M1", "--ellgon", "2", "--order", "1", "--format", "text"]);
    assert_eq!(stdout(&o).trim(), "2*z + O(z^2)");

    // beyond the oracle the marked series comes from the block extraction
    let o = mapgf(&["series", "--family", "M1", "--ellgon", "2", "--order", "8", "--format", "text"]);
    assert!(stderr(&o).contains("from extract"));
    assert!(stdout(&o).starts_with("2*z + 8*z^2 + z^2*xh2 + 45*z^3"));
}

#[test]
fn sources_agree() {
    let dp = mapgf(&["series", "--family", "B1", "--face", "2", "--order", "4", "--source", "dp"]);
    let oracle = mapgf(&["series", "--family", "B1", "--face", "2", "--order", "4", "--source", "oracle"]);
    assert_eq!(stdout(&dp), stdout(&oracle));
    let ex = mapgf(&["series", "--family", "M4", "--face", "2", "--order", "5", "--source", "extract"]);
    let oracle = mapgf(&["series", "--family", "M4", "--face", "2", "--order", "5", "--source", "oracle"]);
    assert_eq!(stdout(&ex), stdout(&oracle));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["series", "--family", "M2b", "--stat", "xp:double-triangle", "--order", "5"][..],
        &["singularity", "--family", "M1", "--family", "B4", "--order", "40"][..],
        &["map", "dump", "--size", "3"][..],
    ] {
        let a = mapgf(args);
        assert!(a.status.success(), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, mapgf(args).stdout, "{args:?}");
    }
}

#[test]
fn verify_and_golden_files() {
    let o = mapgf(&["verify", "--scheme", "m1-m4.ellgon:2", "--order", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("PASS m1-m4.ellgon:2"));

    let o = mapgf(&["verify", "--all", "--order", "6", "--oracle"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report.as_array().unwrap().iter().all(|r| r["first_failing"].is_null()));

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = mapgf(&["verify", "--scheme", "m1-m4.ellgon:3", "--order", "4", "--write-golden", d]);
    assert!(o.status.success());
    let o = mapgf(&["verify", "--scheme", "m1-m4.ellgon:3", "--order", "4", "--golden", d]);
    assert!(o.status.success(), "{}", stderr(&o));

    // bump [z^4 xh3^1]
    let path = dir.path().join("m1-m4.ellgon:3").join("outer.json");
    let mut outer: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let term = outer["terms"].as_array_mut().unwrap().iter_mut().find(|t| t[0] == 4 && t[1][0] == 1).unwrap();
    let c: i64 = term[2].as_str().unwrap().parse().unwrap();
    term[2] = Value::String((c + 1).to_string());
    fs::write(&path, outer.to_string()).unwrap();
    let o = mapgf(&["verify", "--scheme", "m1-m4.ellgon:3", "--order", "4", "--golden", d]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("residual -1 at z^4 xh3^1"), "{}", stderr(&o));
}

#[test]
fn capability_errors() {
    let o = mapgf(&["series", "--family", "M4", "--face", "3", "--order", "9"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("scheme-engine"));
    let o = mapgf(&["series", "--family", "M1", "--face", "2", "--order", "8", "--source", "oracle"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("map-oracle"));
    let o = mapgf(&["clt", "--family", "M4", "--face", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = mapgf(&["series", "--family", "M6"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn estimates() {
    let o = mapgf(&["singularity", "--family", "M1", "--order", "60"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("family,marker,rho,exponent,mu,sigma2,spread"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!((row[2].parse::<f64>().unwrap() - 1.0 / 12.0).abs() < 1e-4);

    let o = mapgf(&["clt", "--family", "M1", "--face", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (mu, mean) = (r["mu"].as_f64().unwrap(), r["mean_limit"].as_f64().unwrap());
    assert!((mu / mean - 1.0).abs() < 0.01);
    assert!(r["sigma2"].as_f64().unwrap() > 0.0);

    // a short series leaves a large spread
    let o = mapgf(&["singularity", "--family", "B5", "--order", "25"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

fn write(dir: &Path, name: &str, v: Value) -> String {
    let p = dir.join(name);
    fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn germ_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", serde_json::json!({"rho": [1.0], "a0": [2.0], "a2": [2.0], "a3": [1.0]}));
    let o = mapgf(&["germ", "invert", "--in", &f]);
    let g: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(g["a2"][0], 0.5);
    assert!((g["a3"][0].as_f64().unwrap() + 2f64.powf(-2.5)).abs() < 1e-15);

    let f1 = serde_json::json!({"rho": [1.0, -0.5], "a0": [2.0, 1.0], "a2": [4.0, 0.0], "a3": [3.0, 0.0]});
    let mut f2 = serde_json::json!({"rho": [1.0, -0.5], "a0": [0.5, 3.0], "a2": [8.0, 0.0], "a3": [6.5, 0.0]});
    let p1 = write(dir.path(), "f1.json", f1);
    let p2 = write(dir.path(), "f2.json", f2.clone());
    let o = mapgf(&["germ", "transfer", "--f1", &p1, "--f2", &p2]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(t["u0"], 2.0);
    assert!(t["z_germ"]["a3"].is_array());

    f2["a3"] = serde_json::json!([6.0, 0.0]);
    let p2 = write(dir.path(), "f2.json", f2);
    let o = mapgf(&["germ", "transfer", "--f1", &p1, "--f2", &p2]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("coupling"));
}

#[test]
fn config_file_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "family = \"M4\"\norder = 3\nformat = \"text\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = mapgf(&["--config", c, "series"]);
    assert_eq!(stdout(&o).trim(), "2*z + z^2 + 2*z^3 + O(z^4)");
    // flags win
    let o = mapgf(&["--config", c, "series", "--order", "1"]);
    assert_eq!(stdout(&o).trim(), "2*z + O(z^2)");

    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_mapgf"))
            .env("MAPGF_THREADS", threads)
            .args(["series", "--family", "M1", "--face", "2", "--order", "5", "--source", "oracle"])
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("0").status.code(), Some(1));
}

#[test]
fn map_dump() {
    let o = mapgf(&["map", "dump", "--size", "2"]);
    assert_eq!(stdout(&o).lines().count(), 9);
    let o = mapgf(&["map", "dump", "--size", "2", "--family", "M4"]);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("2;"));
}
