use std::process::Command;

use catdiv_cli::{render, run, CliError, Status};
use serde_json::{json, Value};

fn result(args: &[&str]) -> Value {
    run(args.iter().copied()).unwrap_or_else(|e| panic!("{args:?}: {e}")).result
}

fn arg(v: &Value) -> String {
    v.to_string()
}

#[test]
fn k0_example() {
    let r = result(&["k0", "--primes", "2", "--bound", "8"]);
    assert_eq!(r["group"], "Z");
    assert_eq!(r["generator_class"], json!(["1/8"]));
    let classes: Vec<&str> = r["map"].as_array().unwrap().iter().map(|e| e["class"].as_str().unwrap()).collect();
    assert_eq!(classes, ["1", "1/2", "1/4", "1/8"]);
}

#[test]
fn dim_example() {
    let r = result(&["dim", "--object", r#"{"dim":3,"level":6}"#, "--primes", "2,3"]);
    assert_eq!(r["dim"], "1/2");
    assert_eq!(r["dim_exact"], json!({"num": 1, "den": 2}));
}

#[test]
fn act_example() {
    let r = result(&["act", "--t", "1/2", "--point", r#"{"2":[0,1]}"#]);
    assert_eq!(r["image"], json!({"2": [1, 1]}));
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "--suite", "cantor", "--seed", "7", "--format", "json"];
    let a = render(&run(args).unwrap());
    let b = render(&run(args).unwrap());
    assert_eq!(a, b);
    let c = render(&run(["verify", "--suite", "cantor", "--seed", "8", "--format", "json"]).unwrap());
    assert_ne!(a, c, "the seed is part of the report");
}

#[test]
fn burnside_suite_passes_at_default_bounds() {
    let report = run(["verify", "--suite", "burnside"]).unwrap();
    assert_eq!(report.status, Status::Ok);
    assert_eq!(report.result["failed"], 0);
}

#[test]
fn negative_controls_are_reported_as_failures() {
    for suite in ["cantor", "loccat", "cross"] {
        let report = run(["verify", "--suite", suite, "--negative-controls", "--depth-bound", "2", "--level-bound", "12"]).unwrap();
        let items = report.result["items"].as_array().unwrap();
        let controls: Vec<&Value> = items.iter().filter(|i| i["negative_control"] == true).collect();
        assert!(!controls.is_empty(), "{suite}");
        for c in controls {
            assert_eq!(c["passed"], false, "{suite}: {}", c["name"]);
            assert!(!c["counterexample"].is_null());
        }
        assert_eq!(report.status, Status::Ok, "{suite}");
    }
}

#[test]
fn lsb_encoding_requires_the_flag() {
    let args = ["act", "--t", "1/2", "--point", "{}", "--encoding", "lsb"];
    assert!(matches!(run(args), Err(CliError::Parse(_))));
    let r = run(args.iter().copied().chain(["--negative-controls"])).unwrap().result;
    assert_eq!(r["image"], json!({"2": [1]}));
}

#[test]
fn emitted_values_parse_back() {
    // morphisms: normalize its own output
    let x = json!({"dim": 1, "level": 2, "field": "Q"});
    let y = json!({"dim": 3, "level": 6, "field": "Q"});
    let iso = result(&["iso", "--x", &arg(&x), "--y", &arg(&y)]);
    assert_eq!(iso["isomorphic"], true);
    let n = result(&["normalize", "--morphism", &arg(&iso["iso"])]);
    let n2 = result(&["normalize", "--morphism", &arg(&n["normal_form"])]);
    assert_eq!(n["normal_form"], n2["normal_form"]);
    assert_eq!(result(&["dim", "--object", &arg(&iso["x"])])["dim"], "1/2");

    // points, torsion elements and clopens
    let a = result(&["act", "--t", "5/12", "--point", r#"{"2":[1],"3":[2,2]}"#]);
    let back = result(&["act", "--t", &arg(&a["t"]), "--point", &arg(&a["image"])]);
    assert_eq!(back["point"], a["image"]);
    let u = json!({"depth": {"2": 2}, "prefixes": [[0, 1], [1, 0]]});
    let c = result(&["clopen", "complement", "--a", &arg(&u)]);
    let cc = result(&["clopen", "complement", "--a", &arg(&c["result"])]);
    assert_eq!(cc["result"], u);
    let t = result(&["clopen", "translate", "--a", &arg(&u), "--t", "1/4"]);
    assert!(t["result"]["prefixes"].is_array());

    // orbit witnesses
    let o = result(&["orbit", "--x", r#"{"2":[1,0,1]}"#, "--y", r#"{"2":[0,1]}"#]);
    assert_eq!(o["verified"], true);
    let moved = result(&["act", "--t", &arg(&o["witness"]["t"]), "--point", r#"{"2":[1,0,1]}"#]);
    assert_eq!(moved["image"], json!({"2": [0, 1]}));

    // spans
    let p = result(&["burnside", "pmap", "--m", "2", "--n", "6"]);
    let span = json!({"left": p, "right": p});
    let composite = result(&["burnside", "compose", "--g", &arg(&span), "--f", &arg(&span)]);
    let again = result(&["burnside", "compose", "--g", &arg(&composite), "--f", &arg(&span)]);
    assert!(again["left"]["table"].is_array());

    // sheaves
    let h = result(&["sheaf", "hom", "--f", r#"{"stalk_dim":1,"level":2}"#, "--g", r#"{"stalk_dim":2,"level":4}"#]);
    assert_eq!(h["hom"]["stabilized"], true);
    assert_eq!(result(&["sheaf", "dim", "--sheaf", &arg(&h["g"])])["dim"], "1/2");
}

#[test]
fn compare_matches_localized_model() {
    let r = result(&["sheaf", "compare", "--x", r#"{"dim":2,"level":3}"#, "--y", r#"{"dim":1,"level":2}"#]);
    assert_eq!(r["agree"], true);
}

#[test]
fn finite_fields_are_supported() {
    let r = result(&["--field", "F3", "verify", "--suite", "loccat", "--level-bound", "12"]);
    assert_eq!(r["failed"], 0);
    let x = json!({"dim": 1, "level": 1, "field": "F3"});
    assert!(run(["iso", "--x", &arg(&x), "--y", &arg(&x)]).is_err(), "field tag mismatch with --field Q");
}

#[test]
fn simplex_and_validate() {
    let r = result(&["burnside", "simplex", "--chain", "1:2,2:4,4:8"]);
    let diamonds = r["diamonds"].as_array().unwrap();
    assert_eq!(diamonds.len(), 1);
    assert_eq!(diamonds[0]["pullback"], true);
    let v = result(&["burnside", "validate", "--level-bound", "12"]);
    assert!(v["diamonds"].as_u64().unwrap() > 0);
    assert_eq!(v["failures"], json!([]));
}

fn binary(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_catdiv")).args(args).env_remove("CATDIV_LEVEL_BOUND").output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    let (code, out, _) = binary(&["k0", "--primes", "2", "--bound", "8", "--format", "json"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["status"], "ok");

    let (code, _, err) = binary(&["k0", "--bound", "5"]);
    assert_eq!(code, 2);
    assert_eq!(serde_json::from_str::<Value>(&err).unwrap()["kind"], "parse");

    // equal dimensions, but the needed level 8 is above the bound
    let (code, _, err) =
        binary(&["iso", "--level-bound", "4", "--x", r#"{"dim":1,"level":8}"#, "--y", r#"{"dim":1,"level":8}"#]);
    assert_eq!(code, 3, "{err}");
    assert_eq!(serde_json::from_str::<Value>(&err).unwrap()["kind"], "bound-exhausted");

    let (code, _, err) = binary(&["sheaf", "hom", "--f", r#"{"stalk_dim":1,"level":4}"#, "--g", r#"{"stalk_dim":1}"#, "--depth", "1"]);
    assert_eq!(code, 4, "{err}");

    let (code, out, _) = binary(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify"));
}

#[test]
fn env_overrides_bounds() {
    let out = Command::new(env!("CARGO_BIN_EXE_catdiv"))
        .args(["k0", "--bound", "4", "--format", "json"])
        .env("CATDIV_LEVEL_BOUND", "7")
        .env("CATDIV_SEED", "11")
        .output()
        .unwrap();
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["level_bound"], 7);
    assert_eq!(report["config"]["seed"], 11);
}
