#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use lattice_codes::arith::{rat, Rational};
use lattice_codes::config::PairConfig;
use lattice_codes::lattice::CodePair;
use rand::Rng;
use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn config(name: &str) -> PairConfig {
    PairConfig::from_path(&fixture(name)).expect("fixture parses")
}

pub fn pair(name: &str) -> CodePair {
    config(name).pair().expect("fixture is a valid pair")
}

pub struct Run {
    pub code: i32,
    pub json: Value,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the `latcode` binary with `--json`; parses whichever stream carries
/// the document.
pub fn latcode(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_latcode"))
        .arg("--json")
        .args(args)
        .output()
        .expect("latcode runs");
    let stdout = String::from_utf8(out.stdout).expect("utf-8");
    let stderr = String::from_utf8(out.stderr).expect("utf-8");
    let text = if stdout.trim().is_empty() { &stderr } else { &stdout };
    let json = serde_json::from_str(text.trim()).unwrap_or(Value::Null);
    Run { code: out.status.code().unwrap_or(-1), json, stdout, stderr }
}

pub fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|e| match e {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
        .collect()
}

/// A rational with numerator in `-span*den..=span*den` and denominator in `1..=8`.
pub fn random_rational<R: Rng>(rng: &mut R, span: i64) -> Rational {
    let den = rng.gen_range(1..=8);
    rat(rng.gen_range(-span * den..=span * den), den)
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, span: i64) -> Vec<Rational> {
    (0..n).map(|_| random_rational(rng, span)).collect()
}
