//! Nearest-point quantizers.
//!
//! Every quantizer returns a nearest lattice point and resolves ties the same
//! way: among equidistant points the lexicographically smallest vector wins.
//! This makes `y - Q(y)` a well-defined coset representative, which the
//! encoders rely on for bijectivity.

mod brute;
mod float;
mod trellis;

use serde::{Deserialize, Serialize};

use num_traits::{One, Signed, Zero};

use crate::arith::{
    better_candidate, dist_sq, floor, rat, round_half_down, scale, Integer, Rational,
};
use crate::error::{Error, Result};
use crate::matrix::RMatrix;

pub use brute::{nearest_set, quantize_bruteforce, BRUTE_FORCE_MAX_DIM};
pub use trellis::TrellisCode;

/// How to quantize to a particular lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum QuantizerSpec {
    /// The integer grid.
    #[serde(rename = "Zn")]
    Integer { n: usize },
    /// Checkerboard lattice: integer vectors with even coordinate sum.
    #[serde(rename = "Dn")]
    Checkerboard { n: usize },
    /// `D8 ∪ (D8 + ½·1)`.
    E8,
    #[serde(rename = "scaled")]
    Scaled {
        base: Box<QuantizerSpec>,
        #[serde(rename = "K", with = "crate::serial::rational")]
        k: Rational,
    },
    /// Cartesian product, blocks in coordinate order.
    #[serde(rename = "product")]
    Product { blocks: Vec<QuantizerSpec> },
    /// `C + 2Z^n` for a terminated binary convolutional code `C`.
    #[serde(rename = "conv")]
    Trellis(TrellisCode),
    /// Sphere-decoding search over the bound generator matrix.
    #[serde(rename = "brute")]
    BruteForce,
    /// Not a nearest-point rule: selects the unique lattice point `λ` with
    /// `y - λ` in `[-K/2, K/2)^n`. The bound generator must be triangular
    /// with diagonal entries `±K`.
    #[serde(rename = "hypercube")]
    Hypercube {
        #[serde(rename = "K", with = "crate::serial::rational")]
        k: Rational,
    },
}

impl QuantizerSpec {
    pub fn scaled(base: QuantizerSpec, k: Rational) -> Self {
        QuantizerSpec::Scaled { base: Box::new(base), k }
    }

    /// Declared dimension, when the spec carries one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            QuantizerSpec::Integer { n } | QuantizerSpec::Checkerboard { n } => Some(*n),
            QuantizerSpec::E8 => Some(8),
            QuantizerSpec::Scaled { base, .. } => base.dim(),
            QuantizerSpec::Product { blocks } => blocks.iter().map(|b| b.dim()).sum(),
            QuantizerSpec::Trellis(code) => Some(code.blocklen),
            QuantizerSpec::BruteForce | QuantizerSpec::Hypercube { .. } => None,
        }
    }

    /// Fundamental volume of the described lattice, for named lattices.
    pub fn volume(&self) -> Option<Rational> {
        match self {
            QuantizerSpec::Integer { .. } | QuantizerSpec::E8 => Some(Rational::one()),
            QuantizerSpec::Checkerboard { .. } => Some(rat(2, 1)),
            QuantizerSpec::Scaled { base, k } => {
                let n = base.dim()?;
                let v = base.volume()?;
                Some(v * num_traits::pow(k.abs(), n))
            }
            QuantizerSpec::Product { blocks } => blocks
                .iter()
                .map(|b| b.volume())
                .try_fold(Rational::one(), |acc, v| Some(acc * v?)),
            QuantizerSpec::Trellis(code) => {
                let free = code.blocklen - code.info_len().ok()?;
                Some(Rational::from_integer(Integer::from(2u8).pow(free as u32)))
            }
            QuantizerSpec::BruteForce | QuantizerSpec::Hypercube { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QuantizerSpec::Integer { n } | QuantizerSpec::Checkerboard { n } if *n == 0 => {
                Err(Error::Parameter("zero-dimensional quantizer".into()))
            }
            QuantizerSpec::Scaled { base, k } => {
                if !k.is_positive() {
                    return Err(Error::Parameter("scale K must be positive".into()));
                }
                base.validate()
            }
            QuantizerSpec::Product { blocks } => {
                if blocks.is_empty() {
                    return Err(Error::Parameter("product of zero blocks".into()));
                }
                for b in blocks {
                    if b.dim().is_none() {
                        return Err(Error::Parameter(
                            "product blocks must have a declared dimension".into(),
                        ));
                    }
                    b.validate()?;
                }
                Ok(())
            }
            QuantizerSpec::Trellis(code) => code.info_len().map(|_| ()),
            QuantizerSpec::Hypercube { k } if !k.is_positive() => {
                Err(Error::Parameter("hypercube side K must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Quantizes `y`. `generator` is the lattice this spec is bound to; only
    /// the brute-force and hypercube kinds read it.
    pub fn quantize(&self, generator: &RMatrix, y: &[Rational]) -> Result<Vec<Rational>> {
        if let Some(n) = self.dim() {
            if y.len() != n {
                return Err(Error::Shape(format!(
                    "quantizer of dimension {n} given a vector of length {}",
                    y.len()
                )));
            }
        }
        match self {
            QuantizerSpec::Integer { .. } => Ok(quantize_integer(y)),
            QuantizerSpec::Checkerboard { .. } => Ok(quantize_dn(y)),
            QuantizerSpec::E8 => Ok(quantize_e8(y)),
            QuantizerSpec::Scaled { base, k } => quantize_scaled(base, k, generator, y),
            QuantizerSpec::Product { blocks } => quantize_product(blocks, generator, y),
            QuantizerSpec::Trellis(code) => code.quantize(y),
            QuantizerSpec::BruteForce => quantize_bruteforce(generator, y),
            QuantizerSpec::Hypercube { k } => quantize_hypercube(generator, k, y),
        }
    }

    /// Floating-point quantization for Monte Carlo work. Exact semantics are
    /// not guaranteed on ties, which have probability zero there.
    pub fn quantize_f64(&self, generator: &RMatrix, y: &[f64]) -> Result<Vec<f64>> {
        float::quantize(self, generator, y)
    }
}

/// Coordinate-wise rounding with ties toward negative infinity.
pub fn quantize_integer(y: &[Rational]) -> Vec<Rational> {
    y.iter()
        .map(|v| Rational::from_integer(round_half_down(v)))
        .collect()
}

/// Nearest point of `D_n`, lexicographically smallest among ties.
///
/// Each coordinate only ever takes a value within one of its floor, so the
/// search runs over four candidates per coordinate with a suffix table of the
/// cheapest completion for each parity.
pub fn quantize_dn(y: &[Rational]) -> Vec<Rational> {
    let n = y.len();
    let candidates: Vec<Vec<(Integer, Rational)>> = y
        .iter()
        .map(|v| {
            let f = floor(v);
            (-1..=2)
                .map(|d| {
                    let z = &f + Integer::from(d);
                    let diff = v - Rational::from_integer(z.clone());
                    (z, &diff * &diff)
                })
                .collect()
        })
        .collect();
    let parity = |z: &Integer| usize::from(z.bit(0));
    // best[i][p]: cheapest cost of coordinates i.. whose sum has parity p
    let mut best: Vec<[Option<Rational>; 2]> = vec![[None, None]; n + 1];
    best[n][0] = Some(Rational::zero());
    for i in (0..n).rev() {
        for p in 0..2 {
            let mut acc: Option<Rational> = None;
            for (z, c) in &candidates[i] {
                if let Some(rest) = &best[i + 1][p ^ parity(z)] {
                    let total = c + rest;
                    if acc.as_ref().is_none_or(|a| &total < a) {
                        acc = Some(total);
                    }
                }
            }
            best[i][p] = acc;
        }
    }
    let mut remaining = best[0][0].clone().expect("even completion always exists");
    let mut need = 0usize;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (z, c) = candidates[i]
            .iter()
            .find(|(z, c)| {
                best[i + 1][need ^ parity(z)]
                    .as_ref()
                    .is_some_and(|rest| &(c + rest) == &remaining)
            })
            .expect("optimal completion exists");
        remaining -= c;
        need ^= parity(z);
        out.push(Rational::from_integer(z.clone()));
    }
    out
}

pub fn quantize_e8(y: &[Rational]) -> Vec<Rational> {
    let half = rat(1, 2);
    let a = quantize_dn(y);
    let shifted: Vec<Rational> = y.iter().map(|v| v - &half).collect();
    let b: Vec<Rational> = quantize_dn(&shifted).into_iter().map(|v| v + &half).collect();
    let da = dist_sq(y, &a);
    let db = dist_sq(y, &b);
    better_candidate((da, a), (db, b)).1
}

pub fn quantize_scaled(
    base: &QuantizerSpec,
    k: &Rational,
    generator: &RMatrix,
    y: &[Rational],
) -> Result<Vec<Rational>> {
    if !k.is_positive() {
        return Err(Error::Parameter("scale K must be positive".into()));
    }
    let inv = k.recip();
    let base_gen = generator.scale(&inv);
    let q = base.quantize(&base_gen, &scale(y, &inv))?;
    Ok(scale(&q, k))
}

pub fn quantize_product(
    blocks: &[QuantizerSpec],
    generator: &RMatrix,
    y: &[Rational],
) -> Result<Vec<Rational>> {
    let total: usize = blocks.iter().map(|b| b.dim().unwrap_or(0)).sum();
    if total != y.len() {
        return Err(Error::Shape(format!(
            "product blocks cover {total} coordinates, vector has {}",
            y.len()
        )));
    }
    let mut out = Vec::with_capacity(y.len());
    let mut start = 0;
    for b in blocks {
        let d = b.dim().unwrap_or(0);
        let sub = if generator.rows() == y.len() {
            generator.block(start, d)
        } else {
            RMatrix::identity(d)
        };
        out.extend(b.quantize(&sub, &y[start..start + d])?);
        start += d;
    }
    Ok(out)
}

/// Lattice point `λ` of the triangular `generator` with `y - λ ∈ [-K/2, K/2)^n`.
pub fn quantize_hypercube(generator: &RMatrix, k: &Rational, y: &[Rational]) -> Result<Vec<Rational>> {
    let n = generator.rows();
    if y.len() != n {
        return Err(Error::Shape(format!(
            "hypercube lattice of dimension {n} given a vector of length {}",
            y.len()
        )));
    }
    let lower = generator.is_lower_triangular();
    if !lower && !generator.is_upper_triangular() {
        return Err(Error::Structure(
            "hypercube selection needs a triangular generator".into(),
        ));
    }
    if generator.diag().iter().any(|d| &d.abs() != k) {
        return Err(Error::Structure(
            "hypercube generator diagonal must be ±K".into(),
        ));
    }
    let half = k / rat(2, 1);
    let mut c = vec![Integer::zero(); n];
    let order: Vec<usize> = if lower { (0..n).collect() } else { (0..n).rev().collect() };
    for &i in &order {
        let mut r = y[i].clone();
        for (j, cj) in c.iter().enumerate() {
            if j != i && !cj.is_zero() {
                r -= generator.get(i, j) * Rational::from_integer(cj.clone());
            }
        }
        let q = floor(&((r + &half) / k));
        c[i] = if generator.get(i, i).is_negative() { -q } else { q };
    }
    generator.mul_int_vec(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rvec;

    #[test]
    fn integer_rounding() {
        let y = vec![rat(2, 5), rat(-2, 5)];
        assert_eq!(quantize_integer(&y), rvec(&[0, 0]));
        assert_eq!(quantize_integer(&[rat(1, 2), rat(-1, 2)]), rvec(&[0, -1]));
    }

    #[test]
    fn dn_examples() {
        let y = vec![rat(3, 5), rat(3, 5), rat(0, 1), rat(0, 1)];
        assert_eq!(quantize_dn(&y), rvec(&[1, 1, 0, 0]));
        // ties resolved to the lexicographically smallest point
        assert_eq!(quantize_dn(&rvec(&[1, 0])), rvec(&[0, 0]));
        assert_eq!(quantize_dn(&rvec(&[0, 1])), rvec(&[-1, 1]));
        assert_eq!(quantize_dn(&[rat(1, 2), rat(3, 2)]), rvec(&[0, 2]));
    }

    #[test]
    fn e8_example() {
        let mut y = vec![Rational::zero(); 8];
        y[0] = rat(6, 5);
        y[1] = rat(2, 5);
        let mut expect = rvec(&[0; 8]);
        expect[0] = rat(1, 1);
        expect[1] = rat(1, 1);
        assert_eq!(quantize_e8(&y), expect);
    }

    #[test]
    fn scaled_d4() {
        let spec = QuantizerSpec::scaled(QuantizerSpec::Checkerboard { n: 4 }, rat(5, 1));
        let g = RMatrix::identity(4);
        assert_eq!(spec.quantize(&g, &rvec(&[3, 3, 0, 0])).unwrap(), rvec(&[5, 5, 0, 0]));
        let unit = QuantizerSpec::scaled(QuantizerSpec::Checkerboard { n: 4 }, rat(1, 1));
        let y = vec![rat(3, 5), rat(3, 5), rat(0, 1), rat(0, 1)];
        assert_eq!(unit.quantize(&g, &y).unwrap(), quantize_dn(&y));
    }

    #[test]
    fn dimension_mismatch_is_shape_error() {
        let spec = QuantizerSpec::E8;
        assert!(matches!(
            spec.quantize(&RMatrix::identity(8), &rvec(&[1, 2])),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn hypercube_selection() {
        let g = RMatrix::from_i64(&[&[12, 0], &[-6, 12]]);
        let k = rat(12, 1);
        let y = rvec(&[7, 2]);
        let lam = quantize_hypercube(&g, &k, &y).unwrap();
        let diff: Vec<Rational> = y.iter().zip(&lam).map(|(a, b)| a - b).collect();
        assert!(diff.iter().all(|d| d >= &rat(-6, 1) && d < &rat(6, 1)));
        assert_eq!(lam, rvec(&[12, 6]));
    }

    #[test]
    fn spec_json_shape() {
        let spec = QuantizerSpec::Product {
            blocks: vec![
                QuantizerSpec::scaled(QuantizerSpec::Checkerboard { n: 4 }, rat(5, 1)),
                QuantizerSpec::scaled(QuantizerSpec::Checkerboard { n: 4 }, rat(5, 1)),
            ],
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            text,
            r#"{"type":"product","blocks":[{"type":"scaled","base":{"type":"Dn","n":4},"K":"5"},{"type":"scaled","base":{"type":"Dn","n":4},"K":"5"}]}"#
        );
        let back: QuantizerSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(spec.volume(), Some(rat(2 * 625 * 2 * 625, 1)));
    }
}
