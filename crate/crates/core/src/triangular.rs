//! Rectangular encoding when the coding check matrix and the shaping
//! generator are triangular with the same orientation.
//!
//! With `Δ = H_c·G_s` (integral, triangular) a codeword satisfies
//! `H_c x = b + Δ c` for integer `c`, and `M_k = |δ_kk|`.

use num_integer::Integer as _;
use num_traits::{Signed, Zero};

use crate::arith::{is_integral, to_integers, Integer, Rational};
use crate::error::{Error, Result};
use crate::lattice::{encode_mod, CodePair, Ranges};
use crate::matrix::RMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Lower,
    Upper,
}

impl Orientation {
    fn of(m: &RMatrix) -> Option<Self> {
        if m.is_lower_triangular() {
            Some(Self::Lower)
        } else if m.is_upper_triangular() {
            Some(Self::Upper)
        } else {
            None
        }
    }

    /// Processing order for forward substitution.
    fn order(self, n: usize) -> Vec<usize> {
        match self {
            Self::Lower => (0..n).collect(),
            Self::Upper => (0..n).rev().collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TriangularScheme {
    pair: CodePair,
    check: RMatrix,
    basis: RMatrix,
    delta: Vec<Vec<Integer>>,
    ranges: Ranges,
    orientation: Orientation,
}

/// Ranges `M_k = |h_kk · g_kk|` for a pair with triangular `H_c` and `G_s`.
///
/// A diagonal pair counts as lower triangular; when the stored check matrix
/// is not triangular the inverse of the coding generator is tried.
pub fn derive_ranges(pair: &CodePair) -> Result<TriangularScheme> {
    let gs = pair.shaping().generator();
    let orientation = Orientation::of(gs).ok_or_else(|| {
        Error::Structure("shaping generator is not triangular".into())
    })?;
    let mut candidates = vec![pair.coding().check().clone()];
    if let Ok(inv) = pair.coding().generator().inverse() {
        candidates.push(inv);
    }
    let check = candidates
        .into_iter()
        .find(|h| match orientation {
            Orientation::Lower => h.is_lower_triangular(),
            Orientation::Upper => h.is_upper_triangular(),
        })
        .ok_or_else(|| {
            Error::Structure(
                "coding check matrix is not triangular in the orientation of the shaping generator"
                    .into(),
            )
        })?;
    let d = check.mul(gs)?;
    let delta: Vec<Vec<Integer>> = d
        .to_rows()
        .iter()
        .map(|row| to_integers(row))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Inconsistency("H_c·G_s is not an integer matrix".into()))?;
    let ranges = Ranges::new((0..pair.n()).map(|k| delta[k][k].abs()).collect())
        .map_err(|_| Error::Inconsistency("zero diagonal in H_c·G_s".into()))?;
    if &ranges.product() != pair.message_count() {
        return Err(Error::Inconsistency(format!(
            "diagonal ranges multiply to {}, expected {}",
            ranges.product(),
            pair.message_count()
        )));
    }
    let basis = check.inverse()?;
    Ok(TriangularScheme { pair: pair.clone(), check, basis, delta, ranges, orientation })
}

impl TriangularScheme {
    pub fn ranges(&self) -> &Ranges {
        &self.ranges
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn delta(&self) -> &[Vec<Integer>] {
        &self.delta
    }

    /// The coding basis `H_c^{-1}` the ranges refer to.
    pub fn basis(&self) -> &RMatrix {
        &self.basis
    }

    pub fn pair(&self) -> &CodePair {
        &self.pair
    }

    /// `x = G_c b mod Λs`, with `G_c b` found by substitution on `H_c`.
    pub fn encode(&self, b: &[Integer]) -> Result<Vec<Rational>> {
        self.ranges.check(b)?;
        let n = b.len();
        let mut x0 = vec![Rational::zero(); n];
        for k in self.orientation.order(n) {
            let mut acc = Rational::from_integer(b[k].clone());
            for (j, xj) in x0.iter().enumerate() {
                if j != k && !xj.is_zero() {
                    acc -= self.check.get(k, j) * xj;
                }
            }
            x0[k] = acc / self.check.get(k, k);
        }
        self.pair.shaping().reduce(&x0)
    }

    /// Same map as [`encode`](Self::encode), through the generic encoder.
    pub fn encode_generic(&self, b: &[Integer]) -> Result<Vec<Rational>> {
        encode_mod(&self.pair, &self.basis, &self.ranges, b)
    }

    /// Recovers `b` from `H_c x = b + Δc` one coordinate at a time.
    pub fn index(&self, x: &[Rational]) -> Result<Vec<Integer>> {
        if x.len() != self.pair.n() {
            return Err(Error::Shape(format!(
                "vector of length {} for dimension {}",
                x.len(),
                self.pair.n()
            )));
        }
        let bt = self.check.mul_vec(x)?;
        if !is_integral(&bt) {
            return Err(Error::Membership("vector is not in the coding lattice".into()));
        }
        let bt = to_integers(&bt).expect("integral");
        let n = bt.len();
        let mut b = vec![Integer::zero(); n];
        let mut c = vec![Integer::zero(); n];
        let order = self.orientation.order(n);
        for (pos, &k) in order.iter().enumerate() {
            let mut s = bt[k].clone();
            for &i in &order[..pos] {
                s -= &self.delta[k][i] * &c[i];
            }
            let m = &self.ranges.as_slice()[k];
            b[k] = s.mod_floor(m);
            let (q, r) = (&s - &b[k]).div_rem(&self.delta[k][k]);
            if !r.is_zero() {
                return Err(Error::Corruption(format!(
                    "non-integer shaping coefficient at coordinate {}",
                    k + 1
                )));
            }
            c[k] = q;
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, rvec};
    use crate::lattice::Lattice;
    use crate::quantizer::QuantizerSpec;

    fn hypercube_pair() -> CodePair {
        let coding =
            Lattice::from_generator(RMatrix::from_i64(&[&[2, 0], &[-1, 3]]), QuantizerSpec::BruteForce)
                .unwrap();
        let shaping = Lattice::from_generator(
            RMatrix::from_i64(&[&[12, 0], &[-6, 12]]),
            QuantizerSpec::Hypercube { k: rat(12, 1) },
        )
        .unwrap();
        CodePair::new(coding, shaping).unwrap()
    }

    #[test]
    fn ranges_and_roundtrip() {
        let scheme = derive_ranges(&hypercube_pair()).unwrap();
        assert_eq!(scheme.ranges().as_slice(), &[int(6), int(4)]);
        for b in scheme.ranges().iter() {
            let x = scheme.encode(&b).unwrap();
            assert_eq!(x, scheme.encode_generic(&b).unwrap());
            assert_eq!(scheme.index(&x).unwrap(), b);
        }
    }

    #[test]
    fn index_is_shift_invariant() {
        let scheme = derive_ranges(&hypercube_pair()).unwrap();
        let x = scheme.encode(&[int(5), int(3)]).unwrap();
        let shifted: Vec<Rational> = x.iter().zip(&rvec(&[12, -6])).map(|(a, b)| a + b).collect();
        assert_eq!(scheme.index(&shifted).unwrap(), vec![int(5), int(3)]);
    }

    #[test]
    fn non_member_is_rejected() {
        let scheme = derive_ranges(&hypercube_pair()).unwrap();
        assert!(matches!(
            scheme.index(&[rat(1, 7), rat(0, 1)]),
            Err(Error::Membership(_))
        ));
    }

    #[test]
    fn non_triangular_shaping_is_structure_error() {
        let coding = Lattice::from_generator(RMatrix::identity(2), QuantizerSpec::Integer { n: 2 }).unwrap();
        let shaping =
            Lattice::from_generator(RMatrix::from_i64(&[&[1, 1], &[-1, 1]]), QuantizerSpec::BruteForce)
                .unwrap();
        let pair = CodePair::new(coding, shaping).unwrap();
        assert!(matches!(derive_ranges(&pair), Err(Error::Structure(_))));
    }
}
