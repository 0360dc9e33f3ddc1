use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn torelli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torelli")).args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = torelli(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("torelli-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn basis_counts_lyndon_words() {
    let (code, v) = json_of(&["basis", "2", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "basis");
    assert_eq!(v["payload"]["count"], 20);
    assert_eq!(v["payload"]["witt_dimension"], 20);
    assert_eq!(v["payload"]["words"][0]["word"], "x1x1y1");
}

#[test]
fn identity_gluing_is_a_sphere() {
    let (code, v) = json_of(&["heegaard", "--endo", "identity", "--g", "2"]);
    assert_eq!(code, 0);
    let p = &v["payload"];
    assert_eq!(p["h"], "identity");
    assert_eq!(p["relators"], serde_json::json!(["y1", "y2"]));
    assert_eq!(p["divisors"], serde_json::json!([1, 1]));
    assert_eq!(p["homology_sphere"], true);
}

#[test]
fn odd_degree_image_is_everything() {
    let (code, v) = json_of(&["eta-image", "2", "1"]);
    assert_eq!(code, 0);
    assert!(v["payload"]["divisors"].as_array().unwrap().iter().all(|d| d == 1));
    let (_, v) = json_of(&["eta-image", "1", "2"]);
    assert_eq!(v["payload"]["divisors"], serde_json::json!([2]));
}

#[test]
fn dk_reports_rank_and_basis() {
    let (code, v) = json_of(&["dk", "2", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["rank"], 4);
    assert_eq!(v["payload"]["expected_rank"], 4);
    assert_eq!(v["payload"]["basis"].as_array().unwrap().len(), 4);
}

#[test]
fn non_members_exit_with_witness() {
    let (code, v) = json_of(&["johnson", "--endo", "twist_x1", "--k", "2"]);
    assert_eq!(code, 2);
    let p = &v["payload"];
    assert_eq!(p["member"], false);
    assert_eq!(p["filtration"], "J");
    assert_eq!(p["witness"]["generator"], "y1");
    let (code, v) = json_of(&["lagrangian", "--endo", "twist_y1", "--k", "1"]);
    assert_eq!(code, 2);
    assert_eq!(v["payload"]["witness"]["condition"], "abelianization");
}

#[test]
fn membership_is_a_query() {
    let (code, v) = json_of(&["membership", "--endo", "twist_x1", "--k", "3"]);
    assert_eq!(code, 0);
    let reports = v["payload"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["member"], false);
    assert_eq!(reports[1]["member"], true);
}

#[test]
fn usage_and_malformed_input_codes() {
    assert_eq!(torelli(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(torelli(&["basis", "two", "3"]).status.code(), Some(64));
    assert_eq!(torelli(&["basis", "0", "3"]).status.code(), Some(64));
    assert_eq!(torelli(&["johnson", "--endo", "not_an_entry", "--k", "2"]).status.code(), Some(65));
    assert_eq!(torelli(&["decompose", "--tree", "(y1,(y2", "--g", "3"]).status.code(), Some(65));
    let bad = temp_file("bad.json", "{\"g\": 2, \"images\": {\"x1\": \"x1 z7\"}}");
    assert_eq!(torelli(&["johnson", "--endo", bad.to_str().unwrap(), "--k", "2"]).status.code(), Some(65));
    let garbage = temp_file("garbage.json", "not json");
    assert_eq!(torelli(&["heegaard", "--endo", garbage.to_str().unwrap()]).status.code(), Some(65));
    assert_eq!(torelli(&["--help"]).status.code(), Some(0));
}

#[test]
fn endomorphism_files_are_accepted() {
    let (_, cat) = json_of(&["catalog", "2"]);
    let entry = cat["payload"]["entries"].as_array().unwrap().iter().find(|e| e["name"] == "sep_twist_1").unwrap().clone();
    let mut endo = entry["endo"].clone();
    endo.as_object_mut().unwrap().remove("inverse_images");
    let sep = temp_file("sep.json", &endo.to_string());
    let path = sep.to_str().unwrap();
    let (code, from_file) = json_of(&["johnson", "--endo", path, "--k", "2"]);
    assert_eq!(code, 0, "{from_file}");
    let (_, named) = json_of(&["johnson", "--endo", "sep_twist_1", "--k", "2"]);
    assert_eq!(from_file["payload"]["value"], named["payload"]["value"]);
    assert_eq!(from_file["payload"]["zero"], false);
    let (code, tr) = json_of(&["trace", "--endo", path, "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(tr["payload"]["zero"], true);
}

#[test]
fn decompose_reports_sign_and_bracket() {
    let (code, v) = json_of(&["decompose", "--tree", "((y1,y2),(y1,y2))", "--g", "3"]);
    assert_eq!(code, 0);
    let p = &v["payload"];
    assert_eq!(p["tripod"], "(y1,y2,x3)");
    assert!(p["sign"] == 1 || p["sign"] == -1);
    let (code, _) = json_of(&["decompose", "--tree", "((y1,y2),(y1,y2))", "--g", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn catalog_and_discover() {
    let (code, v) = json_of(&["catalog", "2"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = v["payload"]["entries"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["identity", "r_g", "twist_x1", "meridian_sum_1_2_plus", "sep_twist_2", "boundary_conj"] {
        assert!(names.contains(&n), "{n}");
    }
    let (code, v) = json_of(&["discover", "--g", "2", "--entries", "twist_x1,twist_y1", "--max-length", "2", "--k", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["enumerated"], 4 + 4 * 3);
    for hit in v["payload"]["hits"].as_array().unwrap() {
        assert!(!hit["word"].as_str().unwrap().contains("twist_y1"));
    }
}

#[test]
fn output_is_byte_stable() {
    let args = ["eta-image", "2", "2", "--format", "json"];
    assert_eq!(torelli(&args).stdout, torelli(&args).stdout);
    let args = ["catalog", "3"];
    assert_eq!(torelli(&args).stdout, torelli(&args).stdout);
    let timed = torelli(&["basis", "1", "2", "--format", "json", "--timing"]);
    let v: Value = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(v["timing_ms"].is_number());
    let plain: Value = serde_json::from_slice(&torelli(&["basis", "1", "2", "--format", "json"]).stdout).unwrap();
    assert!(plain.get("timing_ms").is_none());
}
