//! One front for the three ways a pair can be encoded.

use crate::arith::{Integer, Rational};
use crate::config::EncodingConfig;
use crate::error::{Error, Result};
use crate::full::{build_scheme, FullScheme};
use crate::lattice::{encode_mod, index_mod, CodePair, Ranges};
use crate::matrix::RMatrix;
use crate::triangular::{derive_ranges, TriangularScheme};

#[derive(Clone, Debug)]
pub enum Encoder {
    Triangular(TriangularScheme),
    Full(FullScheme),
    /// Caller-chosen basis and ranges, indexed by parallelotope decomposition.
    Generic { pair: CodePair, basis: RMatrix, ranges: Ranges },
}

/// Explicit choices that override the automatic selection.
#[derive(Clone, Debug, Default)]
pub struct EncoderChoice {
    /// 1-based column for the full-matrix basis change.
    pub t: Option<usize>,
    pub ranges: Option<Ranges>,
}

impl Encoder {
    /// Selection order: explicit `t`, explicit ranges, the document's
    /// encoding section, triangular ranges, then the first feasible
    /// full-matrix basis change.
    pub fn select(pair: &CodePair, doc: Option<&EncodingConfig>, choice: &EncoderChoice) -> Result<Self> {
        let doc = doc.cloned().unwrap_or_default();
        if let Some(t) = choice.t.or(if choice.ranges.is_none() { doc.t } else { None }) {
            if t == 0 || t > pair.n() {
                return Err(Error::Config(format!("t = {t} outside 1..={}", pair.n())));
            }
            return Ok(Self::Full(build_scheme(pair, Some(t - 1))?));
        }
        let ranges = match &choice.ranges {
            Some(r) => Some(r.clone()),
            None => doc.ranges.clone().map(Ranges::new).transpose()?,
        };
        if let Some(ranges) = ranges {
            if ranges.len() != pair.n() {
                return Err(Error::Config(format!(
                    "{} ranges given for dimension {}",
                    ranges.len(),
                    pair.n()
                )));
            }
            let basis = doc.basis.clone().unwrap_or_else(|| pair.coding().generator().clone());
            if !pair.coding().is_basis(&basis) {
                return Err(Error::Structure("encoding basis does not generate the coding lattice".into()));
            }
            return Ok(Self::Generic { pair: pair.clone(), basis, ranges });
        }
        match derive_ranges(pair) {
            Ok(s) => Ok(Self::Triangular(s)),
            Err(Error::Structure(_)) => Ok(Self::Full(build_scheme(pair, None)?)),
            Err(e) => Err(e),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Triangular(_) => "triangular",
            Self::Full(_) => "full",
            Self::Generic { .. } => "generic",
        }
    }

    pub fn pair(&self) -> &CodePair {
        match self {
            Self::Triangular(s) => s.pair(),
            Self::Full(s) => s.pair(),
            Self::Generic { pair, .. } => pair,
        }
    }

    pub fn basis(&self) -> &RMatrix {
        match self {
            Self::Triangular(s) => s.basis(),
            Self::Full(s) => s.basis(),
            Self::Generic { basis, .. } => basis,
        }
    }

    pub fn ranges(&self) -> &Ranges {
        match self {
            Self::Triangular(s) => s.ranges(),
            Self::Full(s) => s.ranges(),
            Self::Generic { ranges, .. } => ranges,
        }
    }

    pub fn encode(&self, b: &[Integer]) -> Result<Vec<Rational>> {
        match self {
            Self::Triangular(s) => s.encode(b),
            Self::Full(s) => s.encode(b),
            Self::Generic { pair, basis, ranges } => encode_mod(pair, basis, ranges, b),
        }
    }

    pub fn index(&self, x: &[Rational]) -> Result<Vec<Integer>> {
        match self {
            Self::Triangular(s) => s.index(x),
            Self::Full(s) => s.index(x),
            Self::Generic { pair, basis, ranges } => index_mod(pair, basis, ranges, x),
        }
    }
}
