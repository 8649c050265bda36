//! JSON documents: lattice pairs and prepared full-matrix schemes.
//!
//! Index vectors and column indices in documents are as users write them:
//! `t` is 1-based.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::{Integer, Rational};
use crate::error::{Error, Result};
use crate::full::{build_scheme_with_solution, feasible_columns, FullScheme};
use crate::lattice::{CodePair, Lattice, Ranges};
use crate::matrix::RMatrix;
use crate::quantizer::QuantizerSpec;
use crate::serial;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub n: usize,
    pub coding: CodingConfig,
    pub shaping: ShapingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoding: Option<EncodingConfig>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodingConfig {
    #[serde(default, with = "serial::opt_matrix", skip_serializing_if = "Option::is_none")]
    pub generator: Option<RMatrix>,
    #[serde(default, with = "serial::opt_matrix", skip_serializing_if = "Option::is_none")]
    pub check: Option<RMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantizer: Option<QuantizerSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapingConfig {
    #[serde(with = "serial::matrix")]
    pub generator: RMatrix,
    pub quantizer: QuantizerSpec,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingConfig {
    #[serde(default, with = "serial::opt_matrix", skip_serializing_if = "Option::is_none")]
    pub basis: Option<RMatrix>,
    #[serde(default, with = "serial::opt_integer_vec", skip_serializing_if = "Option::is_none")]
    pub ranges: Option<Vec<Integer>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl PairConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    fn check_dim(&self, what: &str, m: &RMatrix) -> Result<()> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::Config(format!(
                "{what} is {}x{}, expected {n}x{n}",
                m.rows(),
                m.cols(),
                n = self.n
            )));
        }
        Ok(())
    }

    pub fn coding_lattice(&self) -> Result<Lattice> {
        let q = self.coding.quantizer.clone().unwrap_or(QuantizerSpec::BruteForce);
        match (&self.coding.generator, &self.coding.check) {
            (Some(g), Some(h)) => {
                self.check_dim("coding generator", g)?;
                self.check_dim("coding check", h)?;
                Lattice::from_parts(g.clone(), h.clone(), q)
            }
            (Some(g), None) => {
                self.check_dim("coding generator", g)?;
                Lattice::from_generator(g.clone(), q)
            }
            (None, Some(h)) => {
                self.check_dim("coding check", h)?;
                Lattice::from_check(h.clone(), q)
            }
            (None, None) => Err(Error::Config("coding lattice needs a generator or a check matrix".into())),
        }
    }

    pub fn shaping_lattice(&self) -> Result<Lattice> {
        self.check_dim("shaping generator", &self.shaping.generator)?;
        Lattice::from_generator(self.shaping.generator.clone(), self.shaping.quantizer.clone())
    }

    pub fn pair(&self) -> Result<CodePair> {
        CodePair::new(self.coding_lattice()?, self.shaping_lattice()?)
    }

    pub fn ranges(&self) -> Result<Option<Ranges>> {
        self.encoding
            .as_ref()
            .and_then(|e| e.ranges.clone())
            .map(|r| Ranges::new(r).map_err(|e| Error::Config(e.to_string())))
            .transpose()
    }
}

/// A prepared full-matrix scheme, as written by `prepare`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemeDoc {
    pub t: usize,
    #[serde(with = "serial::integer_vec")]
    pub r: Vec<Integer>,
    #[serde(with = "serial::integer_vec")]
    pub m: Vec<Integer>,
    #[serde(with = "serial::integer_vec")]
    pub cofactors: Vec<Integer>,
    #[serde(with = "serial::integer_vec")]
    pub ranges: Vec<Integer>,
    #[serde(with = "serial::integer_vec")]
    pub u: Vec<Integer>,
    #[serde(rename = "Gc_prime", with = "serial::matrix")]
    pub basis: RMatrix,
    #[serde(rename = "Hc_prime", with = "serial::matrix")]
    pub check: RMatrix,
    #[serde(default)]
    pub feasible_t: Vec<usize>,
}

impl SchemeDoc {
    pub fn from_scheme(scheme: &FullScheme) -> Result<Self> {
        Ok(Self {
            t: scheme.t() + 1,
            r: scheme.solution().to_vec(),
            m: scheme.scale_factors().to_vec(),
            cofactors: scheme.cofactors().to_vec(),
            ranges: scheme.ranges().as_slice().to_vec(),
            u: scheme.u().to_vec(),
            basis: scheme.basis().clone(),
            check: scheme.check().clone(),
            feasible_t: feasible_columns(scheme.pair())?.into_iter().map(|t| t + 1).collect(),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        read_json(path)
    }

    /// Rebuilds the scheme from `(t, r)` and checks it against the stored
    /// matrices and ranges.
    pub fn rebuild(&self, pair: &CodePair) -> Result<FullScheme> {
        if self.t == 0 {
            return Err(Error::Config("scheme column t is 1-based".into()));
        }
        let scheme = build_scheme_with_solution(pair, self.t - 1, self.r.clone())?;
        if scheme.basis() != &self.basis
            || scheme.check() != &self.check
            || scheme.ranges().as_slice() != self.ranges.as_slice()
        {
            return Err(Error::Inconsistency(
                "scheme file does not match the lattice pair".into(),
            ));
        }
        Ok(scheme)
    }
}

/// Parses `"1,2,-3"`-style integer lists.
pub fn parse_integer_list(s: &str) -> Result<Vec<Integer>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Integer>()
                .map_err(|_| Error::Config(format!("not an integer: {t:?}")))
        })
        .collect()
}

/// Parses `"1/2,-3,4/9"`-style rational lists.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|t| crate::arith::parse_rational(t.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    const EXAMPLE: &str = r#"{
        "n": 2,
        "coding": {"check": [["1", "-1/4"], ["-3/2", "3/2"]]},
        "shaping": {
            "generator": [[4, 0], [4, 8]],
            "quantizer": {"type": "scaled", "K": "4", "base": {"type": "Dn", "n": 2}}
        },
        "encoding": {"ranges": [3, 12]}
    }"#;

    #[test]
    fn parses_pair_document() {
        let cfg = PairConfig::from_json(EXAMPLE).unwrap();
        let pair = cfg.pair().unwrap();
        assert_eq!(pair.message_count(), &int(36));
        assert_eq!(cfg.ranges().unwrap().unwrap().as_slice(), &[int(3), int(12)]);
    }

    #[test]
    fn unknown_fields_and_bad_shapes_are_config_errors() {
        assert!(matches!(PairConfig::from_json(r#"{"n": 2, "bogus": 1}"#), Err(Error::Config(_))));
        let mut cfg = PairConfig::from_json(EXAMPLE).unwrap();
        cfg.n = 3;
        assert!(matches!(cfg.pair(), Err(Error::Config(_))));
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_integer_list("1, -2").unwrap(), vec![int(1), int(-2)]);
        assert_eq!(parse_rational_list("1/2,3").unwrap(), vec![rat(1, 2), rat(3, 1)]);
        assert!(parse_integer_list("1,x").is_err());
    }
}
