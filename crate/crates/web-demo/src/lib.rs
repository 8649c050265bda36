//! Browser bindings for two-dimensional nested lattice codes. Every export
//! returns a JSON string; failures come back as `{"error": "..."}`.

use lattice_codes::arith::{int, rat, Rational};
use lattice_codes::lattice::{encode_mod, enumerate_codebook, verify_rectangular, CodePair, Lattice, Ranges};
use lattice_codes::matrix::RMatrix;
use lattice_codes::quantizer::QuantizerSpec;
use lattice_codes::shaping::{hom_check, HypercubeScheme, HOM_EXHAUSTIVE_CAP};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

type Outcome = Result<Value, String>;

fn finish(v: Outcome) -> String {
    match v {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn floats(v: &[Rational]) -> Value {
    json!(v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>())
}

fn columns(m: &RMatrix) -> Value {
    Value::Array(m.columns().iter().map(|c| floats(c)).collect())
}

fn example1() -> Result<CodePair, String> {
    let check = RMatrix::from_rows(vec![vec![rat(1, 1), rat(-1, 4)], vec![rat(-3, 2), rat(3, 2)]])
        .map_err(|e| e.to_string())?;
    let coding = Lattice::from_check(check, QuantizerSpec::BruteForce).map_err(|e| e.to_string())?;
    let shaping = Lattice::from_generator(
        RMatrix::from_i64(&[&[4, 0], &[4, 8]]),
        QuantizerSpec::scaled(QuantizerSpec::Checkerboard { n: 2 }, rat(4, 1)),
    )
    .map_err(|e| e.to_string())?;
    CodePair::new(coding, shaping).map_err(|e| e.to_string())
}

/// Encodes every message of the 36-point example code with ranges
/// `(m1, m2)`, reporting whether the map is a bijection onto the codebook.
#[wasm_bindgen]
pub fn example1_encoding(m1: u32, m2: u32) -> String {
    finish((|| {
        let pair = example1()?;
        let ranges = Ranges::from_u64(&[m1 as u64, m2 as u64]).map_err(|e| e.to_string())?;
        if ranges.product() != *pair.message_count() {
            return Err(format!("M1·M2 must be {}", pair.message_count()));
        }
        let basis = pair.coding().generator().clone();
        let report = verify_rectangular(&pair, &basis, &ranges, 10_000).map_err(|e| e.to_string())?;
        let encoded = ranges
            .iter()
            .map(|b| {
                let x = encode_mod(&pair, &basis, &ranges, &b).map_err(|e| e.to_string())?;
                Ok(json!({"b": [b[0].to_i64(), b[1].to_i64()], "x": floats(&x)}))
            })
            .collect::<Result<Vec<_>, String>>()?;
        let book = enumerate_codebook(&pair, 10_000).map_err(|e| e.to_string())?;
        Ok(json!({
            "ranges": [m1, m2],
            "rectangular": report.is_rectangular(),
            "distinct": report.distinct,
            "encoded": encoded,
            "codebook": book.iter().map(|p| floats(p)).collect::<Vec<_>>(),
            "shaping_basis": columns(pair.shaping().generator()),
        }))
    })())
}

/// Hypercube code of side `k` for the lower-triangular coding generator
/// `[[a, 0], [b, c]]`.
#[wasm_bindgen]
pub fn hypercube_code(a: i32, b: i32, c: i32, k: u32) -> String {
    finish((|| {
        let g = RMatrix::from_i64(&[&[a as i64, 0], &[b as i64, c as i64]]);
        let coding = Lattice::from_generator(g, QuantizerSpec::BruteForce).map_err(|e| e.to_string())?;
        let scheme = HypercubeScheme::new(&coding, rat(k as i64, 1)).map_err(|e| e.to_string())?;
        if scheme.pair().message_count() > &int(4096) {
            return Err("more than 4096 codewords".into());
        }
        let hom = hom_check(scheme.pair(), scheme.basis(), scheme.ranges(), HOM_EXHAUSTIVE_CAP)
            .map_err(|e| e.to_string())?;
        let words = scheme
            .ranges()
            .iter()
            .map(|b| {
                let x = scheme.encode(&b).map_err(|e| e.to_string())?;
                Ok(json!({"b": [b[0].to_i64(), b[1].to_i64()], "x": floats(&x)}))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(json!({
            "K": k,
            "ranges": scheme.ranges().as_slice().iter().map(|m| m.to_i64()).collect::<Vec<_>>(),
            "codewords": words,
            "shaping_basis": columns(scheme.shaping_basis()),
            "homomorphic": hom.verified,
        }))
    })())
}

fn named_lattice(name: &str) -> Result<Lattice, String> {
    match name {
        "Z2" => Lattice::from_generator(RMatrix::identity(2), QuantizerSpec::Integer { n: 2 }).map_err(|e| e.to_string()),
        "4D2" => Ok(example1()?.shaping().clone()),
        "coding" => Ok(example1()?.coding().clone()),
        other => Err(format!("unknown lattice {other:?}")),
    }
}

/// Nearest point of a named planar lattice to `(x, y)`, snapped to 1/64.
/// Names: `Z2`, `4D2`, `coding` (the example's coding lattice).
#[wasm_bindgen]
pub fn quantize_point(lattice: &str, x: f64, y: f64) -> String {
    finish((|| {
        let lat = named_lattice(lattice)?;
        if !x.is_finite() || !y.is_finite() {
            return Err("coordinates must be finite".into());
        }
        let snap = |v: f64| rat((v * 64.0).round() as i64, 64);
        let point = vec![snap(x), snap(y)];
        let q = lat.quantize(&point).map_err(|e| e.to_string())?;
        Ok(json!({"input": floats(&point), "nearest": floats(&q), "basis": columns(lat.generator())}))
    })())
}
