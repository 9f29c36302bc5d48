use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ncjet::core::fixtures::{fixture, FIXTURE_NAMES};
use ncjet::{build_instance, load_instance, parse_instance, InstanceFile};
use serde_json::Value;

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

fn ncjet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncjet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn error_kind(o: &Output) -> String {
    let text = String::from_utf8_lossy(&o.stderr);
    let last = text.lines().last().expect("stderr has an error record");
    let v: Value = serde_json::from_str(last).expect("error record is JSON");
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn temp_file(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_passes_on_every_fixture() {
    let paths: Vec<String> = FIXTURE_NAMES
        .iter()
        .map(|n| fixture_path(n).to_str().unwrap().to_string())
        .collect();
    let mut args = vec!["check"];
    args.extend(paths.iter().map(String::as_str));
    let o = ncjet(&args);
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{out}");
    assert_eq!(out.matches("all invariants hold").count(), FIXTURE_NAMES.len());
    assert!(!out.contains("[FAIL]"));
}

#[test]
fn fixture_files_match_core_fixtures() {
    for name in FIXTURE_NAMES {
        let inst = load_instance(&fixture_path(name)).unwrap();
        let core = fixture(name).unwrap();
        assert_eq!(inst.algebra.dim(), core.algebra.dim(), "{name}");
        assert_eq!(inst.calculus.dim_omega1(), core.calculus.dim_omega1(), "{name}");
        assert_eq!(inst.calculus.t2().dim(), core.calculus.t2().dim(), "{name}");
        assert_eq!(inst.exterior2.s2().dim(), core.exterior2.s2().dim(), "{name}");
        assert_eq!(inst.gram, core.gram, "{name}");
    }
}

#[test]
fn dims_on_z2() {
    let o = ncjet(&["dims", fixture_path("z2").to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0);
    let r = &stdout_json(&o)["result"];
    assert_eq!(r["omega1"], 2);
    assert_eq!(r["s2"], 0);
    assert_eq!(r["jets"][2], 4);
    assert_eq!(r["defect"], 0);
}

#[test]
fn skew_bracket_on_truncated_cubic() {
    let o = ncjet(&[
        "bracket-table",
        fixture_path("trunc3").to_str().unwrap(),
        "--projector",
        "skew",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let r = &stdout_json(&o)["result"];
    // basis is x∂, x²∂
    assert_eq!(r["basis"][0], serde_json::json!([["0", "0", "0"], ["0", "1", "0"], ["0", "0", "2"]]));
    assert_eq!(r["table"][0][1]["coords"], serde_json::json!(["0", "1"]));
    assert_eq!(r["table"][1][0]["coords"], serde_json::json!(["0", "-1"]));
    assert_eq!(r["closed"], true);
}

#[test]
fn custom_projector_matches_skew() {
    let dir = tempfile::tempdir().unwrap();
    let p = temp_file(
        &dir,
        "skew.json",
        r#"[[0,0,0,0],[0,1,-1,0],[0,-1,1,0],[0,0,0,0]]"#,
    );
    let path = fixture_path("trunc3");
    let custom = ncjet(&["bracket-table", path.to_str().unwrap(), "--projector", &format!("custom:{p}"), "--json"]);
    let skew = ncjet(&["bracket-table", path.to_str().unwrap(), "--projector", "skew", "--json"]);
    assert_eq!(code(&custom), 0);
    assert_eq!(stdout_json(&custom)["result"]["table"], stdout_json(&skew)["result"]["table"]);
}

#[test]
fn reports_are_deterministic() {
    for sub in ["vector-fields", "dims", "check"] {
        for json in [true, false] {
            let path = fixture_path("trunc4");
            let mut args = vec![sub, path.to_str().unwrap()];
            if json {
                args.push("--json");
            }
            let a = ncjet(&args);
            let b = ncjet(&args);
            assert_eq!(code(&a), 0);
            assert_eq!(a.stdout, b.stdout, "{sub} json={json}");
        }
    }
}

#[test]
fn json_report_round_trips() {
    for name in ["trunc3", "clifford1", "m2"] {
        let o = ncjet(&["validate", fixture_path(name).to_str().unwrap(), "--json"]);
        assert_eq!(code(&o), 0);
        let v = stdout_json(&o);
        assert_eq!(v["subcommand"], "validate");
        let file: InstanceFile = serde_json::from_value(v["instance"].clone()).unwrap();
        let original = parse_instance(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap();
        assert_eq!(file, original);
        build_instance(file).unwrap();
    }
}

#[test]
fn diffops_and_symbol() {
    let path = fixture_path("trunc3");
    let o = ncjet(&["diffops", path.to_str().unwrap(), "--order", "2", "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["result"]["dims"], serde_json::json!([3, 5, 7]));

    let dir = tempfile::tempdir().unwrap();
    // (x∂)² on the monomial basis: x^k ↦ k² x^k
    let op = temp_file(&dir, "op.json", r#"[[0,0,0],[0,1,0],[0,0,4]]"#);
    let o = ncjet(&["symbol", path.to_str().unwrap(), "--operator", &op, "--json"]);
    assert_eq!(code(&o), 0);
    let r = &stdout_json(&o)["result"];
    assert_eq!(r["order"], 2);
    assert_eq!(r["symbol"]["zero"], false);

    let first = temp_file(&dir, "xd.json", r#"[[0,0,0],[0,1,0],[0,0,2]]"#);
    let o = ncjet(&["symbol", path.to_str().unwrap(), "--operator", &first, "--json"]);
    assert_eq!(stdout_json(&o)["result"]["order"], 1);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = temp_file(&dir, "broken.json", "{ not json");
    let o = ncjet(&["dims", &broken]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_kind(&o), "parse");

    let float = temp_file(
        &dir,
        "float.json",
        r#"{"algebra": {"clifford": [1.5]}, "calculus": "universal"}"#,
    );
    assert_eq!(code(&ncjet(&["dims", &float])), 2);
    assert_eq!(code(&ncjet(&["dims", "/nonexistent/instance.json"])), 2);
    let z2 = fixture_path("z2");
    assert_eq!(code(&ncjet(&["dims", z2.to_str().unwrap(), z2.to_str().unwrap()])), 2);
    assert_eq!(code(&ncjet(&["dims", z2.to_str().unwrap(), "--projector", "half"])), 2);
}

#[test]
fn validation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let short = temp_file(
        &dir,
        "short.json",
        r#"{"algebra": {"truncated_polynomial": 2}, "calculus": {"relations": [[1, 0, 0]]}}"#,
    );
    let o = ncjet(&["validate", &short]);
    assert_eq!(code(&o), 3);
    assert_eq!(error_kind(&o), "validation");
    let not_group = temp_file(
        &dir,
        "table.json",
        r#"{"algebra": {"group": [[0, 1], [1, 1]]}, "calculus": "universal"}"#,
    );
    assert_eq!(code(&ncjet(&["validate", &not_group])), 3);
    let not_kernel = temp_file(
        &dir,
        "kernel.json",
        r#"{"algebra": {"truncated_polynomial": 2}, "calculus": {"relations": [["1/2", 0, 0, 0]]}}"#,
    );
    assert_eq!(code(&ncjet(&["validate", &not_kernel])), 3);
}

#[test]
fn precondition_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let zero = temp_file(
        &dir,
        "zero.json",
        r#"{"algebra": {"group": [[0, 1], [1, 0]]}, "calculus": "universal", "exterior2": "zero", "gram": "canonical"}"#,
    );
    let o = ncjet(&["bracket-table", &zero]);
    assert_eq!(code(&o), 4);
    assert_eq!(error_kind(&o), "precondition");
    // no gram for the orthogonal projector
    assert_eq!(code(&ncjet(&["bracket-table", fixture_path("trunc3").to_str().unwrap()])), 4);
    // ∂³ on Q[x]/(x^4) is beyond order 2
    let op = temp_file(&dir, "d3.json", r#"[[0,0,0,6],[0,0,0,0],[0,0,0,0],[0,0,0,0]]"#);
    let o = ncjet(&["symbol", fixture_path("trunc4").to_str().unwrap(), "--operator", &op]);
    assert_eq!(code(&o), 4);
}

#[test]
fn named_modules() {
    let dir = tempfile::tempdir().unwrap();
    // A² over Q[Z/2] as a named module
    let inst = temp_file(
        &dir,
        "mods.json",
        r#"{"algebra": {"group": [[0, 1], [1, 0]]}, "calculus": "universal",
            "modules": {"E": {"action": [
                [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
                [[0,1,0,0],[1,0,0,0],[0,0,0,1],[0,0,1,0]]]}}}"#,
    );
    let o = ncjet(&["dims", &inst, "--module", "E", "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["result"]["jets"][1], 8);
    let o = ncjet(&["diffops", &inst, "--module", "E", "--module", "A", "--order", "0", "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["result"]["dims"], serde_json::json!([4]));
    assert_eq!(code(&ncjet(&["check", &inst])), 0);
    assert_eq!(code(&ncjet(&["dims", &inst, "--module", "F"])), 3);
}
