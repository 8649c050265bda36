//! Homomorphism checks, hypercube shaping and Monte Carlo shaping gain.

use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{is_integral, to_integers, Integer, Rational};
use crate::error::{Error, Result};
use crate::lattice::{encode_mod, CodePair, Lattice, Ranges};
use crate::matrix::RMatrix;
use crate::quantizer::QuantizerSpec;

pub const HOM_EXHAUSTIVE_CAP: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomReport {
    /// Every entry of row `i` of `B⁻¹·G_s` is divisible by `M_i`.
    pub condition_holds: bool,
    /// 0-based row and the first entry in it that is not divisible.
    pub failing_rows: Vec<(usize, Rational)>,
    /// Outcome of the exact identity check; `None` above the cap.
    pub verified: Option<bool>,
    pub counterexample: Option<(Vec<Integer>, Vec<Integer>)>,
}

/// Divisibility condition for the encoding `(basis, ranges)`, plus an exact
/// check of `enc(b ⊞ e_i) = enc(b) ⊕ enc(e_i)` for all `b` and unit `e_i`
/// when `M` is small. Those pairs generate every pair, so passing them
/// certifies the identity everywhere and a failure is a real counterexample.
pub fn hom_check(pair: &CodePair, basis: &RMatrix, ranges: &Ranges, cap: u64) -> Result<HomReport> {
    if &ranges.product() != pair.message_count() || ranges.len() != pair.n() {
        return Err(Error::Parameter(format!(
            "ranges multiply to {}, the code has {} messages",
            ranges.product(),
            pair.message_count()
        )));
    }
    let delta = basis.inverse()?.mul(pair.shaping().generator())?;
    let mut failing_rows = Vec::new();
    for (i, m) in ranges.as_slice().iter().enumerate() {
        let m = Rational::from_integer(m.clone());
        if let Some(bad) = delta.row(i).iter().find(|v| !(*v / &m).is_integer()) {
            failing_rows.push((i, bad.clone()));
        }
    }
    let mut report = HomReport {
        condition_holds: failing_rows.is_empty(),
        failing_rows,
        verified: None,
        counterexample: None,
    };
    if pair.message_count() <= &Integer::from(cap) {
        report.counterexample = generator_counterexample(pair, basis, ranges)?;
        report.verified = Some(report.counterexample.is_none());
    }
    Ok(report)
}

fn unit_vectors(ranges: &Ranges) -> Vec<Vec<Integer>> {
    let n = ranges.len();
    (0..n)
        .filter(|&i| ranges.as_slice()[i] > Integer::from(1))
        .map(|i| {
            let mut e = vec![Integer::zero(); n];
            e[i] = Integer::from(1);
            e
        })
        .collect()
}

fn generator_counterexample(
    pair: &CodePair,
    basis: &RMatrix,
    ranges: &Ranges,
) -> Result<Option<(Vec<Integer>, Vec<Integer>)>> {
    let units: Vec<(Vec<Integer>, Vec<Rational>)> = unit_vectors(ranges)
        .into_iter()
        .map(|e| {
            let x = encode_mod(pair, basis, ranges, &e)?;
            Ok((e, x))
        })
        .collect::<Result<_>>()?;
    for b in ranges.iter() {
        let xb = encode_mod(pair, basis, ranges, &b)?;
        for (e, xe) in &units {
            let lhs = encode_mod(pair, basis, ranges, &ranges.add(&b, e))?;
            if lhs != pair.coset_add(&xb, xe)? {
                return Ok(Some((b, e.clone())));
            }
        }
    }
    Ok(None)
}

/// All `M²` pairs; the first failing pair, if any.
pub fn hom_exhaustive(
    pair: &CodePair,
    basis: &RMatrix,
    ranges: &Ranges,
) -> Result<Option<(Vec<Integer>, Vec<Integer>)>> {
    let table: Vec<(Vec<Integer>, Vec<Rational>)> = ranges
        .iter()
        .map(|b| {
            let x = encode_mod(pair, basis, ranges, &b)?;
            Ok((b, x))
        })
        .collect::<Result<_>>()?;
    for (b1, x1) in &table {
        for (b2, x2) in &table {
            let lhs = encode_mod(pair, basis, ranges, &ranges.add(b1, b2))?;
            if lhs != pair.coset_add(x1, x2)? {
                return Ok(Some((b1.clone(), b2.clone())));
            }
        }
    }
    Ok(None)
}

/// Codebook inside the cube `[-K/2, K/2)^n`, shaped by `G_c·diag(M)`.
#[derive(Clone, Debug)]
pub struct HypercubeScheme {
    k: Rational,
    ranges: Ranges,
    coding_inverse: RMatrix,
    pair: CodePair,
}

impl HypercubeScheme {
    pub fn new(coding: &Lattice, k: Rational) -> Result<Self> {
        let g = coding.generator();
        if !g.is_lower_triangular() && !g.is_upper_triangular() {
            return Err(Error::Structure("hypercube shaping needs a triangular coding generator".into()));
        }
        if k <= Rational::zero() {
            return Err(Error::Parameter("side length K must be positive".into()));
        }
        let ranges: Vec<Integer> = g
            .diag()
            .iter()
            .map(|v| {
                let m = &k / v.abs();
                if m.is_integer() {
                    Ok(m.to_integer())
                } else {
                    Err(Error::Parameter(format!("K / {} is not an integer", v.abs())))
                }
            })
            .collect::<Result<_>>()?;
        let ranges = Ranges::new(ranges)?;
        let shaping_basis = g.mul(&RMatrix::diagonal_int(ranges.as_slice()))?;
        let shaping = Lattice::from_generator(shaping_basis, QuantizerSpec::Hypercube { k: k.clone() })?;
        let pair = CodePair::new(coding.clone(), shaping)?;
        Ok(Self { k, ranges, coding_inverse: g.inverse()?, pair })
    }

    pub fn k(&self) -> &Rational {
        &self.k
    }

    pub fn ranges(&self) -> &Ranges {
        &self.ranges
    }

    pub fn pair(&self) -> &CodePair {
        &self.pair
    }

    pub fn basis(&self) -> &RMatrix {
        self.pair.coding().generator()
    }

    pub fn shaping_basis(&self) -> &RMatrix {
        self.pair.shaping().generator()
    }

    pub fn encode(&self, b: &[Integer]) -> Result<Vec<Rational>> {
        encode_mod(&self.pair, self.basis(), &self.ranges, b)
    }

    /// `b_i = (G_c⁻¹ x)_i mod M_i`.
    pub fn index(&self, x: &[Rational]) -> Result<Vec<Integer>> {
        if x.len() != self.pair.n() {
            return Err(Error::Shape(format!("vector of length {} for dimension {}", x.len(), self.pair.n())));
        }
        let bt = self.coding_inverse.mul_vec(x)?;
        if !is_integral(&bt) {
            return Err(Error::Membership("vector is not in the coding lattice".into()));
        }
        Ok(to_integers(&bt)
            .expect("integral")
            .iter()
            .zip(self.ranges.as_slice())
            .map(|(v, m)| v.mod_floor(m))
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GainEstimate {
    pub gain_db: f64,
    pub half_width_db: f64,
    pub normalized_second_moment: f64,
    pub samples: u64,
}

/// Shaping gain of `lat` over the cube, from `samples` points uniform in its
/// Voronoi cell. Floating point throughout; ChaCha8 seeded by `seed`.
pub fn shaping_gain_mc(lat: &Lattice, samples: u64, seed: u64) -> Result<GainEstimate> {
    if samples < 2 {
        return Err(Error::Parameter("at least two samples are required".into()));
    }
    let n = lat.n();
    let g: Vec<Vec<f64>> = lat
        .generator()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
        .collect();
    let volume = lat.volume().to_f64().unwrap_or(f64::NAN);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    let mut s = vec![0.0; n];
    for _ in 0..samples {
        for v in s.iter_mut() {
            *v = rng.gen::<f64>();
        }
        let y: Vec<f64> = g.iter().map(|row| row.iter().zip(&s).map(|(a, b)| a * b).sum()).collect();
        let q = lat.quantizer().quantize_f64(lat.generator(), &y)?;
        let z = y.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n as f64;
        sum += z;
        sum_sq += z * z;
    }
    let count = samples as f64;
    let mean = sum / count;
    let var = (sum_sq / count - mean * mean).max(0.0) * count / (count - 1.0);
    let nsm = mean / volume.powf(2.0 / n as f64);
    let gain_db = 10.0 * ((1.0 / 12.0) / nsm).log10();
    let half_width_db = 10.0 / std::f64::consts::LN_10 * 1.96 * var.sqrt() / (count.sqrt() * mean);
    Ok(GainEstimate { gain_db, half_width_db, normalized_second_moment: nsm, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, rvec};

    fn example6() -> HypercubeScheme {
        let coding =
            Lattice::from_generator(RMatrix::from_i64(&[&[2, 0], &[-1, 3]]), QuantizerSpec::BruteForce)
                .unwrap();
        HypercubeScheme::new(&coding, rat(12, 1)).unwrap()
    }

    #[test]
    fn hypercube_example() {
        let s = example6();
        assert_eq!(s.ranges().as_slice(), &[int(6), int(4)]);
        assert_eq!(s.shaping_basis(), &RMatrix::from_i64(&[&[12, 0], &[-6, 12]]));
        let mut seen = std::collections::HashSet::new();
        for b in s.ranges().iter() {
            let x = s.encode(&b).unwrap();
            assert!(x.iter().all(|v| v >= &rat(-6, 1) && v < &rat(6, 1)));
            assert_eq!(s.index(&x).unwrap(), b);
            seen.insert(x);
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn hypercube_homomorphism() {
        let s = example6();
        let r = hom_check(s.pair(), s.basis(), s.ranges(), HOM_EXHAUSTIVE_CAP).unwrap();
        assert!(r.condition_holds);
        assert_eq!(r.verified, Some(true));
        assert_eq!(hom_exhaustive(s.pair(), s.basis(), s.ranges()).unwrap(), None);
    }

    #[test]
    fn hypercube_needs_integer_ranges() {
        let coding =
            Lattice::from_generator(RMatrix::from_i64(&[&[2, 0], &[-1, 3]]), QuantizerSpec::BruteForce)
                .unwrap();
        assert!(matches!(HypercubeScheme::new(&coding, rat(8, 1)), Err(Error::Parameter(_))));
    }

    #[test]
    fn integer_lattice_has_no_gain() {
        let lat = Lattice::from_generator(RMatrix::identity(2), QuantizerSpec::Integer { n: 2 }).unwrap();
        let est = shaping_gain_mc(&lat, 20_000, 7).unwrap();
        assert!(est.gain_db.abs() < 3.0 * est.half_width_db.max(1e-3), "{est:?}");
        assert!(shaping_gain_mc(&lat, 0, 7).is_err());
    }

    #[test]
    fn index_rejects_non_members() {
        assert!(matches!(example6().index(&rvec(&[1, 0])), Err(Error::Membership(_))));
    }
}
