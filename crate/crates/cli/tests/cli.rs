use std::io::Write;
use std::process::{Command, Output, Stdio};

use jsonschema::{Draft, JSONSchema};
use serde_json::{json, Value};

const EXAMPLE: &str = r#"{"kind":"2way","u":[5,5,1],"v":[2,7,2]}"#;
const DENSE_4X4: &str = r#"{"kind":"2way","u":[220,215,93,64],"v":[108,286,71,127]}"#;

fn run(args: &[&str], stdin: &str) -> Output {
    run_env(args, stdin, &[])
}

fn run_env(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_transportlab"));
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn schema_for(name: &str) -> JSONSchema {
    let text = include_str!("../../../docs/cli-output.schema.json");
    let mut root: Value = serde_json::from_str(text).unwrap();
    assert!(root["$defs"].get(name).is_some(), "no schema for {name}");
    root["$ref"] = json!(format!("#/$defs/{name}"));
    JSONSchema::options()
        .with_draft(Draft::Draft202012)
        .compile(&root)
        .expect("schema compiles")
}

/// Runs a subcommand, checks the exit code, and validates stdout against its schema.
fn checked(args: &[&str], stdin: &str, code: i32) -> Value {
    let out = run(args, stdin);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: stdout {stdout} stderr {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_str(&stdout).unwrap();
    let schema = schema_for(args[0]);
    if let Err(errors) = schema.validate(&v) {
        let msgs: Vec<String> = errors
            .map(|e| format!("{e} at {}", e.instance_path))
            .collect();
        panic!("{args:?} output violates its schema: {msgs:?}\n{v}");
    }
    v
}

#[test]
fn feasible_example() {
    assert_eq!(
        checked(&["feasible"], EXAMPLE, 0),
        json!({"feasible": true})
    );
    let bad = r#"{"kind":"2way","u":[5,5,1],"v":[2,7,3]}"#;
    assert_eq!(checked(&["feasible"], bad, 1), json!({"feasible": false}));
    let axial = r#"{"kind":"axial","u":[2,2],"v":[1,3],"w":[4]}"#;
    assert_eq!(checked(&["feasible"], axial, 0), json!({"feasible": true}));
    let planar = r#"{"kind":"planar","U":[[1,1],[1,1]],"V":[[1,1],[1,1]],"W":[[1,1],[1,1]]}"#;
    assert_eq!(checked(&["feasible"], planar, 0), json!({"feasible": true}));
}

#[test]
fn volume_of_b4() {
    let out = run(&["volume", "--p", "4"], "");
    assert!(String::from_utf8_lossy(&out.stdout).contains("352"));
    let v = checked(&["volume", "--p", "4"], "", 0);
    assert_eq!(v["normalized_volume"], json!("352"));
    let csv = run(&["volume", "--p", "3", "--format", "csv"], "");
    assert_eq!(
        String::from_utf8(csv.stdout).unwrap(),
        "p,normalized_volume\n3,3\n"
    );
}

#[test]
fn count_dense_4x4() {
    let v = checked(&["count"], DENSE_4X4, 0);
    assert_eq!(v["count"], json!("1225914276768514"));
}

#[test]
fn structure_commands_validate() {
    let v = checked(&["dimension"], EXAMPLE, 0);
    assert_eq!(v["dimension"], json!(4));
    let v = checked(&["nw-vertex"], EXAMPLE, 0);
    assert_eq!(v["table"], json!([[2, 3, 0], [0, 4, 1], [0, 0, 1]]));
    let v = checked(&["vertices"], EXAMPLE, 0);
    assert_eq!(v["count"], json!(12));
    let g = checked(&["graph"], EXAMPLE, 0);
    assert_eq!(g["vertices"].as_array().unwrap().len(), 12);
    let d = checked(&["diameter"], EXAMPLE, 0);
    assert!(d["diameter"].as_u64().unwrap() <= d["hirsch_bound"].as_u64().unwrap());
    checked(&["facets"], EXAMPLE, 0);
    let h = checked(&["hurkens"], EXAMPLE, 0);
    assert!(h["pivots"].as_u64().unwrap() <= h["budget"].as_u64().unwrap());
    let b = checked(&["birkhoff", "--p", "3"], "", 0);
    assert_eq!(
        (b["vertices"].clone(), b["diameter"].clone()),
        (json!(6), json!(1))
    );
    let axial = r#"{"kind":"axial","u":[5,8],"v":[6,7],"w":[4,9]}"#;
    checked(&["vertices"], axial, 0);
    checked(&["graph"], axial, 0);
    checked(&["diameter"], axial, 0);
    checked(&["dimension"], axial, 0);
    checked(&["nw-vertex"], axial, 0);
}

#[test]
fn facet_example() {
    let example = r#"{"kind":"2way","u":[100,6,6],"v":[38,37,37]}"#;
    let v = checked(&["facets"], example, 0);
    let cells = v["facet_cells"].as_array().unwrap();
    assert!(cells.contains(&json!([3, 3])));
    assert!(!cells.contains(&json!([1, 1])));
}

#[test]
fn hurkens_with_explicit_endpoints() {
    let inst = r#"{"kind":"2way","u":[5,5,1],"v":[2,7,2],
        "from":[[2,3,0],[0,4,1],[0,0,1]],"to":[[0,5,0],[2,1,2],[0,1,0]]}"#;
    let v = checked(&["hurkens"], inst, 0);
    let path = v["path"].as_array().unwrap();
    assert_eq!(
        path.first().unwrap(),
        &json!([[0, 5, 0], [2, 1, 2], [0, 1, 0]])
    );
    assert_eq!(
        path.last().unwrap(),
        &json!([[2, 3, 0], [0, 4, 1], [0, 0, 1]])
    );
}

#[test]
fn lattice_commands_validate() {
    let v = checked(&["range", "--cell", "1,2"], EXAMPLE, 0);
    assert_eq!((v["min"].clone(), v["max"].clone()), (json!(1), json!(5)));
    let m = checked(&["moves"], EXAMPLE, 0);
    assert_eq!(m["count"], json!(9));
    assert_eq!(
        checked(&["connect"], EXAMPLE, 0),
        json!({"connected": true})
    );
    let s = checked(&["sample", "--steps", "200", "--seed", "7"], EXAMPLE, 0);
    let rows: Vec<Vec<u64>> = serde_json::from_value(s["table"].clone()).unwrap();
    let sums: Vec<u64> = rows.iter().map(|r| r.iter().sum()).collect();
    assert_eq!(sums, vec![5, 5, 1]);
    let mg = checked(&["magic", "--p", "3", "--t", "3"], "", 0);
    assert_eq!(mg["samples"][3], json!([3, "55"]));
}

#[test]
fn reductions_validate() {
    let axial =
        r#"{"kind":"axial","u":[3,5],"v":[4,4],"w":[2,6],"cost":[[[3,-1],[4,1]],[[-5,9],[2,6]]]}"#;
    let v = checked(&["reduce-junginger"], axial, 0);
    assert_eq!(v["beta"], json!(6));
    let v = checked(&["reduce-junginger", "--big-m", "1/2"], axial, 0);
    assert_eq!(v["big_m"], json!("1/2"));
    let system = r#"{"kind":"system","A":[[2]],"b":[1]}"#;
    let enc = checked(&["encode-universality"], system, 0);
    let report = checked(&["verify-encoding"], &enc.to_string(), 0);
    assert_eq!(report["holds"], json!(true));
    let direct = checked(
        &["verify-encoding"],
        r#"{"kind":"system","A":[[1,1]],"b":[2]}"#,
        0,
    );
    assert_eq!(direct["source_integer_points"], json!(3));
}

#[test]
fn corrupted_encoding_is_rejected_or_false() {
    let system = r#"{"kind":"system","A":[[1,1]],"b":[2]}"#;
    let mut enc = checked(&["encode-universality"], system, 0);
    enc["margins"]["u"][0] = json!(enc["margins"]["u"][0].as_i64().unwrap() + 1);
    enc["margins"]["v"][0] = json!(enc["margins"]["v"][0].as_i64().unwrap() + 1);
    enc["margins"]["w"][0] = json!(enc["margins"]["w"][0].as_i64().unwrap() + 1);
    let out = run(&["verify-encoding"], &enc.to_string());
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn surveys_validate() {
    let v = checked(&["survey-table1", "--trials", "60", "--seed", "3"], "", 0);
    assert_eq!(v["subset"], json!(true));
    let v = checked(&["survey-table2", "--trials", "20", "--seed", "3"], "", 0);
    assert_eq!(v["subset"], json!(true));
    let v = checked(
        &[
            "survey-table3",
            "--trials",
            "10",
            "--seed",
            "3",
            "--shape",
            "2x2x3",
        ],
        "",
        0,
    );
    assert_eq!(v["subset"], json!(true));
}

#[test]
fn deterministic_output() {
    for args in [
        vec!["sample", "--steps", "500", "--seed", "11"],
        vec![
            "survey-table1",
            "--trials",
            "40",
            "--seed",
            "9",
            "--shape",
            "2x4",
        ],
        vec!["vertices"],
    ] {
        let a = run(&args, EXAMPLE);
        let b = run(&args, EXAMPLE);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_and_dot() {
    let out = run(&["vertices", "--format", "csv"], EXAMPLE);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("x_1_1,x_1_2,x_1_3,x_2_1,x_2_2,x_2_3,x_3_1,x_3_2,x_3_3")
    );
    assert_eq!(lines.count(), 12);
    let out = run(&["feasible", "--format", "csv"], EXAMPLE);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "key,value\nfeasible,true\n"
    );
    let out = run(&["graph", "--format", "dot"], EXAMPLE);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("graph "));
    assert_eq!(
        run(&["count", "--format", "dot"], EXAMPLE).status.code(),
        Some(3)
    );
}

#[test]
fn instance_from_file() {
    let dir = std::env::temp_dir().join(format!("transportlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dense.json");
    std::fs::write(&path, DENSE_4X4).unwrap();
    let out = run(&["count", path.to_str().unwrap()], "");
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("1225914276768514"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    let code = |args: &[&str], stdin: &str| run(args, stdin).status.code();
    assert_eq!(code(&["no-such-command"], ""), Some(3));
    assert_eq!(code(&["count"], "{not json"), Some(3));
    assert_eq!(
        code(&["count"], r#"{"kind":"2way","u":["1/2"],"v":["1/2"]}"#),
        Some(3)
    );
    assert_eq!(
        code(&["vertices"], r#"{"kind":"2way","u":[-1],"v":[-1]}"#),
        Some(3)
    );
    assert_eq!(
        code(&["nw-vertex"], r#"{"kind":"2way","u":[1],"v":[2]}"#),
        Some(1)
    );
    assert_eq!(code(&["birkhoff", "--p", "9"], ""), Some(2));
    assert_eq!(code(&["volume", "--p", "6"], ""), Some(2));
    assert_eq!(code(&["range", "--cell", "0,1"], EXAMPLE), Some(3));
    assert_eq!(code(&["range", "--cell", "4,1"], EXAMPLE), Some(3));
    assert_eq!(code(&["count"], "/nonexistent/path.json"), Some(3));
    assert_eq!(code(&["count", "/nonexistent/path.json"], ""), Some(3));
    assert_eq!(code(&["--help"], ""), Some(0));
    let out = run(&["count"], "{not json");
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn thread_variable() {
    let ok = run_env(&["feasible"], EXAMPLE, &[("TRANSPORTLAB_THREADS", "2")]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run_env(&["feasible"], EXAMPLE, &[("TRANSPORTLAB_THREADS", "0")]);
    assert_eq!(bad.status.code(), Some(3));
}
