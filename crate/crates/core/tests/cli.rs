//! The `latcode` binary: document shapes, exit codes and determinism.

mod common;

use std::path::PathBuf;

use serde_json::{json, Value};

use common::{fixture, latcode, strings};

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn scratch(name: &str, contents: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

const IDENTITY: &str = r#"{
    "n": 2,
    "coding": {"generator": [["1", "0"], ["0", "1"]], "quantizer": {"type": "Zn", "n": 2}},
    "shaping": {"generator": [["1", "0"], ["0", "1"]], "quantizer": {"type": "Zn", "n": 2}}
}"#;

#[test]
fn info_reports_paper_rates() {
    let four = latcode(&["info", "--config", &path("example4")]);
    assert_eq!(four.code, 0);
    assert!((four.json["rate_bits_per_dim"].as_f64().unwrap() - 2.40).abs() < 0.005);
    let five = latcode(&["info", "--config", &path("example5")]);
    assert!((five.json["rate_bits_per_dim"].as_f64().unwrap() - 3.01).abs() < 0.005);
    assert_eq!(five.json["encoder"], "full");
}

#[test]
fn identity_pair_is_trivial() {
    let cfg = scratch("identity.json", IDENTITY);
    let info = latcode(&["info", "--config", &cfg]);
    assert_eq!(info.json["M"], json!(1));
    assert_eq!(info.json["rate_bits_per_dim"], json!(0.0));
    let test = latcode(&["selftest", "--config", &cfg]);
    assert_eq!(test.code, 0, "{}", test.stdout);
}

#[test]
fn encode_then_index() {
    let cfg = path("example1");
    let enc = latcode(&["encode", "--config", &cfg, "--b", "2,7"]);
    assert_eq!(enc.code, 0);
    let x = strings(&enc.json["x"]).join(",");
    let idx = latcode(&["index", "--config", &cfg, "--x", &x]);
    assert_eq!(idx.json["b"], json!([2, 7]));
    let idx = latcode(&["index", "--config", &cfg, "--x", "-2/9,-8/9"]);
    assert_eq!(idx.code, 0);
}

#[test]
fn prepared_scheme_file_roundtrips() {
    let prep = latcode(&["prepare", "--config", &path("example4"), "--t", "1"]);
    assert_eq!(prep.code, 0);
    assert_eq!(prep.json["t"], json!(1));
    assert_eq!(prep.json["cofactors"], json!([16, -9, -4]));
    assert_eq!(prep.json["ranges"], json!([73, 1, 2]));
    let scheme = scratch("example4-scheme.json", &prep.stdout);
    let enc = latcode(&["encode", "--config", &path("example4"), "--scheme", &scheme, "--b", "40,0,1"]);
    assert_eq!(enc.code, 0);
    let x = strings(&enc.json["x"]).join(",");
    let idx = latcode(&["index", "--config", &path("example4"), "--scheme", &scheme, "--x", &x]);
    assert_eq!(idx.json["b"], json!([40, 0, 1]));

    let mut tampered: Value = serde_json::from_str(&prep.stdout).unwrap();
    tampered["Hc_prime"][0][0] = json!("1");
    let bad = scratch("example4-tampered.json", &tampered.to_string());
    let out = latcode(&["encode", "--config", &path("example4"), "--scheme", &bad, "--b", "0,0,0"]);
    assert_eq!(out.code, 3);
    assert_eq!(out.json["error"]["kind"], "inconsistency");
}

#[test]
fn exit_codes() {
    let missing = latcode(&["info", "--config", "/no/such/file.json"]);
    assert_eq!(missing.code, 2);
    assert_eq!(missing.json["error"]["kind"], "config");

    let garbled = scratch("garbled.json", "{\"n\": 2, \"coding\": ");
    assert_eq!(latcode(&["info", "--config", &garbled]).code, 2);

    let cfg = path("example1");
    let out_of_range = latcode(&["encode", "--config", &cfg, "--b", "3,0"]);
    assert_eq!(out_of_range.code, 2);
    let non_member = latcode(&["index", "--config", &cfg, "--x", "1/2,0"]);
    assert_eq!(non_member.code, 2);
    assert_eq!(non_member.json["error"]["kind"], "membership");

    let not_nested = r#"{
        "n": 2,
        "coding": {"generator": [["1", "0"], ["0", "1"]]},
        "shaping": {"generator": [["1/2", "0"], ["0", "1"]], "quantizer": {"type": "brute"}}
    }"#;
    let cfg = scratch("not-nested.json", not_nested);
    let info = latcode(&["info", "--config", &cfg]);
    assert_eq!(info.code, 3);
    assert_eq!(info.json["sublattice"], json!(false));

    let guard = latcode(&["selftest", "--config", &path("example5")]);
    assert_eq!(guard.code, 4);
    assert_eq!(latcode(&["selftest", "--config", &path("example1"), "--ranges", "6,6"]).code, 1);
}

#[test]
fn output_is_deterministic() {
    let args = ["shapegain", "--config", &path("example4"), "--samples", "2000", "--seed", "3"];
    let a = latcode(&args);
    let b = latcode(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let c = latcode(&["shapegain", "--config", &path("example4"), "--samples", "2000", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
    let info = ["selftest", "--config", &path("example5"), "--samples", "50"];
    assert_eq!(latcode(&info).stdout, latcode(&info).stdout);
}

#[test]
fn codebook_entries_and_cyclic_generator() {
    let book = latcode(&["codebook", "--config", &path("example6"), "--messages"]);
    assert_eq!(book.json["entries"].as_array().unwrap().len(), 24);
    assert_eq!(book.json["entries"][0], json!({"b": [0, 0], "x": ["0", "0"]}));
    let cyc = latcode(&["cyclic", "--config", &path("example1")]);
    assert_eq!(cyc.json["cyclic"], json!(true));
    let hom = latcode(&["homcheck", "--config", &path("example1")]);
    assert!(hom.json["failing_rows"].as_array().unwrap().iter().all(|r| r["row"].as_u64().unwrap() >= 1));
}

#[test]
fn build_commands_emit_lattice_documents() {
    let parity = "[[0,1,2,0,0,0,0,0],[0,0,0,1,0,0,0,0],[4,0,0,0,4,0,0,0],[0,0,4,0,0,3,0,0],[4,0,0,3,0,0,2,0],[0,3,0,0,2,0,0,1]]";
    let a = latcode(&["build", "constr-a-check", "--p", "5", "--n", "8", "--parity", parity]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    let fixture: Value = serde_json::from_str(&std::fs::read_to_string(fixture("example3")).unwrap()).unwrap();
    assert_eq!(a.json["check"], fixture["coding"]["check"]);
    assert_eq!(a.json["volume"], "15625/48");

    let code = latcode(&["build", "constr-a", "--p", "2", "--n", "3", "--basis", "[[1,1,1]]"]);
    assert_eq!(code.json["volume"], "4");

    let conv = latcode(&["build", "conv", "--polys", "1,3", "--blocklen", "8"]);
    assert_eq!(conv.json["order"], json!([0, 2, 4, 1, 3, 5, 6, 7]));

    let bad = latcode(&["build", "constr-d", "--kronecker", "3", "--d1-cols", "1", "--d2-cols", "2"]);
    assert_eq!(bad.code, 3);
}
