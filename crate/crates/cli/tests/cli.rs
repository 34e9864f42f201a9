use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn pcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn strs(v: &Value) -> Vec<Vec<String>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|row| {
            row.as_array()
                .unwrap()
                .iter()
                .map(|s| s.as_str().unwrap().to_string())
                .collect()
        })
        .collect()
}

fn construct_to(seed: &str, p: &str, dir: &tempfile::TempDir) -> String {
    let out = dir.path().join(format!("{seed}.{p}.trace.json"));
    let out = out.to_string_lossy().into_owned();
    let r = pcm(&["construct", "--p", p, &fixture(seed), "--out", &out]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    out
}

#[test]
fn check_certified_chain_nodes() {
    let out = pcm(&["check", "--p", "2", &fixture("w10.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["kind"], "pmono");
    assert_eq!(v["payload"]["max_sum"], "0");
    assert_eq!(v["meta"]["p"], 2);
}

#[test]
fn check_negative_identity_emits_witness() {
    let out = pcm(&["check", "--p", "1", &fixture("negid.json")]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["payload"]["verdict"], false);
    assert_eq!(v["payload"]["max_sum"], "4");
    assert_eq!(v["payload"]["witness"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_rational_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"dim": 1, "points": [{"x": ["1/0"], "xs": ["0"]}]}"#,
    )
    .unwrap();
    let out = pcm(&["check", "--p", "1", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("points[0].x[0]"));
    std::fs::write(&bad, "{\"dim\": 1,\n\"points\": [").unwrap();
    let out = pcm(&["check", "--p", "1", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&pcm(&["check", &fixture("bw.json")])), 2);
    assert_eq!(code(&pcm(&["nonsense"])), 2);
    let out = pcm(&[
        "vertices",
        "--p",
        "2",
        "--z0",
        "1,0,0",
        &fixture("bw_final.json"),
    ]);
    assert_eq!(code(&out), 2);
    let out = pcm(&[
        "construct",
        "--p",
        "2",
        "--engine",
        "nope",
        &fixture("bw.json"),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn construct_square_example_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = construct_to("bw.json", "2", &dir);
    let first = std::fs::read(&a).unwrap();
    let again = pcm(&["construct", "--p", "2", &fixture("bw.json")]);
    assert_eq!(again.stdout, first);
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["kind"], "trace");
    assert_eq!(
        v["payload"]["final_f"]["points"].as_array().unwrap().len(),
        6
    );
    assert_eq!(v["payload"]["steps"].as_array().unwrap().len(), 4);
    let expected: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("bw_final.json")).unwrap()).unwrap();
    let mut got: Vec<Value> = v["payload"]["final_f"]["points"]
        .as_array()
        .unwrap()
        .clone();
    let mut want: Vec<Value> = expected["points"].as_array().unwrap().clone();
    got.sort_by_key(|p| p.to_string());
    want.sort_by_key(|p| p.to_string());
    assert_eq!(got, want);
}

#[test]
fn construct_three_cyclic_example() {
    let out = pcm(&["construct", "--p", "3", &fixture("mx3.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        json(&out)["payload"]["final_f"]["points"]
            .as_array()
            .unwrap()
            .len(),
        8
    );
}

#[test]
fn construct_monotone_variant() {
    let out = pcm(&["construct", "--p", "1", &fixture("bw.json")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["payload"]["engine"], "monotone");
    assert_eq!(v["meta"]["p"], 1);
}

#[test]
fn construct_order_flag() {
    let input = json(&pcm(&["construct", "--p", "2", &fixture("r3.json")]));
    let lex = json(&pcm(&[
        "construct",
        "--p",
        "2",
        "--order",
        "lex",
        &fixture("r3.json"),
    ]));
    assert_eq!(
        input["payload"]["order"][0],
        serde_json::json!(["-1", "-1", "-1"])
    );
    assert_ne!(input["payload"]["final_f"], lex["payload"]["final_f"]);
    let expanded = json(&pcm(&[
        "construct",
        "--p",
        "2",
        "--engine",
        "expanded",
        &fixture("r3.json"),
    ]));
    assert_eq!(expanded["payload"]["final_f"], input["payload"]["final_f"]);
}

#[test]
fn construct_rejects_printed_last_seed() {
    let out = pcm(&["construct", "--p", "2", &fixture("bizarre_printed.json")]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["kind"], "pmono");
    assert!(!v["payload"]["witness"].is_null());
    let out = pcm(&["construct", "--p", "2", &fixture("bizarre.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        json(&out)["payload"]["final_f"]["points"]
            .as_array()
            .unwrap()
            .len(),
        10
    );
}

#[test]
fn domain_at_origin_is_excluded() {
    let out = pcm(&[
        "domain",
        "--p",
        "2",
        "--z0",
        "0,0",
        &fixture("bw_final.json"),
    ]);
    assert_eq!(code(&out), 0);
    let v = &json(&out)["payload"];
    assert_eq!(v["member"], false);
    assert_eq!(v["in_hull"], true);
    assert!(v["lambda"].is_array());
    assert_eq!(v["lambda"].as_array().unwrap().len(), 4);
}

#[test]
fn vertices_at_first_seed_point() {
    let out = pcm(&[
        "vertices",
        "--p",
        "2",
        "--z0",
        "1,0",
        &fixture("bw_final.json"),
    ]);
    assert_eq!(code(&out), 0);
    let v = &json(&out)["payload"]["vrep"];
    assert_eq!(strs(&v["vertices"]), vec![vec!["0", "-1"], vec!["0", "1"]]);
    assert_eq!(strs(&v["rays"]), vec![vec!["1", "-1"], vec!["1", "1"]]);
}

#[test]
fn fiber_outside_hull_is_feasible() {
    let out = pcm(&[
        "fiber",
        "--p",
        "2",
        "--z0",
        "2,2",
        &fixture("bw_final.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["payload"]["feasible"], true);
}

#[test]
fn scalar_commands() {
    let dir = tempfile::tempdir().unwrap();
    let trace = construct_to("r3.json", "2", &dir);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(trace).unwrap()).unwrap();
    let final_path = dir.path().join("r3_final.json");
    std::fs::write(&final_path, v["payload"]["final_f"].to_string()).unwrap();
    let out = pcm(&[
        "mtilde",
        "--p",
        "2",
        "--z0",
        "0,0,0",
        "--z1",
        "-1,-1,-1",
        final_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["payload"]["value"], "7");
    let out = pcm(&[
        "ntilde",
        "--p",
        "2",
        "--z1",
        "1,0,0",
        "--zps",
        "-4,0,12",
        final_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["kind"], "scalar");
    let out = pcm(&[
        "ntilde",
        "--p",
        "2",
        "--z1",
        "9,9,9",
        "--zps",
        "-4,0,12",
        final_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn chain_check_certifies_w() {
    let out = pcm(&["chain-check", "--p", "2", &fixture("w10.json")]);
    assert_eq!(code(&out), 0);
    let v = &json(&out)["payload"];
    assert_eq!(v["verdict"], true);
    assert!(v["perpendicularity"]
        .as_array()
        .unwrap()
        .iter()
        .all(|s| s == "0"));
    let out = pcm(&["chain-check", "--p", "2", &fixture("bw.json")]);
    assert_eq!(code(&out), 1);
    assert!(json(&out)["payload"]["reason"].is_string());
}

#[test]
fn falsify_reports() {
    let out = pcm(&[
        "falsify",
        "--p",
        "2",
        &fixture("w10.json"),
        "--budget",
        "200",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no violation found (not a proof)"));
    assert_eq!(json(&out)["payload"]["found"], false);

    let mut doc: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("bw_final.json")).unwrap()).unwrap();
    doc["points"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!({"x": ["0", "0"], "xs": ["0", "0"]}));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("augmented.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = pcm(&["falsify", "--p", "2", "--seed", "3", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = &json(&out)["payload"];
    assert_eq!(v["found"], true);
    assert_eq!(v["cycle"].as_array().unwrap().len(), 3);
}

#[test]
fn render_domain_and_range() {
    let dir = tempfile::tempdir().unwrap();
    let bw = construct_to("bw.json", "2", &dir);
    let svg = dir.path().join("bw.svg");
    let out = pcm(&[
        "render",
        &bw,
        "--what",
        "domain",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml"));
    assert_eq!(text.matches("class=\"vertex\"").count(), 4);
    assert_eq!(text.matches("class=\"edge\"").count(), 4);
    let again = pcm(&["render", &bw, "--what", "domain"]);
    assert_eq!(again.stdout, text.as_bytes());

    let mx3 = construct_to("mx3.json", "3", &dir);
    let out = pcm(&["render", &mx3, "--what", "range", "--bbox", "-3,-3,3,3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("<g class=\"fiber\"").count(), 5);
    assert_eq!(text.matches("class=\"apex\"").count(), 8);

    let r3 = construct_to("r3.json", "2", &dir);
    assert_eq!(code(&pcm(&["render", &r3])), 2);
    assert_eq!(code(&pcm(&["render", &fixture("bw.json")])), 2);
}

#[test]
fn trace_document_round_trips() {
    let out = pcm(&["construct", "--p", "2", &fixture("bwp.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let mut again = serde_json::to_string_pretty(&v).unwrap();
    again.push('\n');
    assert_eq!(again, text);
    assert_eq!(
        v["payload"]["final_f"]["points"].as_array().unwrap().len(),
        8
    );
}
