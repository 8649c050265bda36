//! Rectangular encoding for arbitrary (full) generator matrices.
//!
//! The coding basis is replaced by `Gc′`: columns `i ≠ t` are `g_i / m_i`
//! (shaping columns divided by the gcd of their coordinates in the coding
//! lattice) and column `t` is a lattice vector `q = H_c⁻¹ r` chosen so that
//! `W = H_c·Gc′` is unimodular. Then `Hc′·G_s` is diagonal except in column
//! `t`, which gives ranges `M_i = m_i` and `M_t = M / Π_{i≠t} m_i`.

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{gcd_vector, is_integral, solve_diophantine, to_integers, Integer, Rational};
use crate::error::{Error, Result};
use crate::lattice::{encode_mod, CodePair, Ranges};
use crate::matrix::RMatrix;

#[derive(Clone, Debug)]
pub struct FullScheme {
    pair: CodePair,
    t: usize,
    m: Vec<Integer>,
    r: Vec<Integer>,
    cofactors: Vec<Integer>,
    basis: RMatrix,
    check: RMatrix,
    ranges: Ranges,
    u: Vec<Integer>,
}

/// `m_i = gcd(H_c g_i)` for each shaping generator column.
pub fn scale_factors(pair: &CodePair) -> Result<Vec<Integer>> {
    pair.shaping()
        .generator()
        .columns()
        .iter()
        .map(|g| {
            let coords = to_integers(&pair.coding().check().mul_vec(g)?).ok_or_else(|| {
                Error::Inconsistency("shaping column outside the coding lattice".into())
            })?;
            gcd_vector(&coords)
        })
        .collect()
}

fn coding_frame(pair: &CodePair) -> Result<RMatrix> {
    pair.coding().check().inverse()
}

/// Coefficients of `det W` as a linear form in the free column `t`.
pub fn cofactor_coefficients(pair: &CodePair, m: &[Integer], t: usize) -> Result<Vec<Integer>> {
    let n = pair.n();
    if t >= n {
        return Err(Error::Parameter(format!("column t = {} outside 1..={n}", t + 1)));
    }
    let h = pair.coding().check();
    let cols: Vec<Vec<Rational>> = pair
        .shaping()
        .generator()
        .columns()
        .iter()
        .zip(m)
        .enumerate()
        .map(|(i, (g, mi))| {
            if i == t {
                Ok(vec![Rational::zero(); n])
            } else {
                let w = h.mul_vec(g)?;
                Ok(w.iter().map(|v| v / Rational::from_integer(mi.clone())).collect())
            }
        })
        .collect::<Result<_>>()?;
    let w = RMatrix::from_columns(&cols)?;
    to_integers(&w.subdeterminants(t)?)
        .ok_or_else(|| Error::Inconsistency("fractional cofactor in W".into()))
}

/// Every column index (0-based) whose cofactors admit `det W = ±1`.
pub fn feasible_columns(pair: &CodePair) -> Result<Vec<usize>> {
    let m = scale_factors(pair)?;
    let mut out = Vec::new();
    for t in 0..pair.n() {
        let cof = cofactor_coefficients(pair, &m, t)?;
        if cof.iter().any(|c| !c.is_zero()) && gcd_vector(&cof)?.is_one() {
            out.push(t);
        }
    }
    Ok(out)
}

/// Builds the scheme for column `t` (0-based), or the first feasible column.
pub fn build_scheme(pair: &CodePair, t: Option<usize>) -> Result<FullScheme> {
    let m = scale_factors(pair)?;
    let columns: Vec<usize> = match t {
        Some(t) => vec![t],
        None => (0..pair.n()).collect(),
    };
    for &t in &columns {
        let cof = cofactor_coefficients(pair, &m, t)?;
        let solution = solve_diophantine(&cof, &Integer::one())
            .or_else(|| solve_diophantine(&cof, &-Integer::one()));
        if let Some(r) = solution {
            return assemble(pair, t, m, r, cof);
        }
    }
    Err(Error::BasisChange(match t {
        Some(t) => format!("no unimodular basis change replaces column {}", t + 1),
        None => "no column admits a unimodular basis change".into(),
    }))
}

/// Builds the scheme from a caller-supplied solution `r`.
pub fn build_scheme_with_solution(pair: &CodePair, t: usize, r: Vec<Integer>) -> Result<FullScheme> {
    let m = scale_factors(pair)?;
    let cof = cofactor_coefficients(pair, &m, t)?;
    if r.len() != pair.n() {
        return Err(Error::Shape(format!("solution of length {} for dimension {}", r.len(), pair.n())));
    }
    let d: Integer = cof.iter().zip(&r).map(|(c, v)| c * v).sum();
    if !d.abs().is_one() {
        return Err(Error::BasisChange(format!("solution gives det W = {d}, not ±1")));
    }
    assemble(pair, t, m, r, cof)
}

fn assemble(
    pair: &CodePair,
    t: usize,
    m: Vec<Integer>,
    r: Vec<Integer>,
    cofactors: Vec<Integer>,
) -> Result<FullScheme> {
    let gs = pair.shaping().generator();
    let q = coding_frame(pair)?.mul_int_vec(&r)?;
    let cols: Vec<Vec<Rational>> = gs
        .columns()
        .into_iter()
        .zip(&m)
        .enumerate()
        .map(|(i, (g, mi))| {
            if i == t {
                q.clone()
            } else {
                g.iter().map(|v| v / Rational::from_integer(mi.clone())).collect()
            }
        })
        .collect();
    let basis = RMatrix::from_columns(&cols)?;
    let w = pair.coding().check().mul(&basis)?;
    if !w.is_unimodular() {
        return Err(Error::Inconsistency("W = H_c·Gc′ is not unimodular".into()));
    }
    let check = basis.inverse()?;
    let others: Integer = m.iter().enumerate().filter(|&(i, _)| i != t).map(|(_, v)| v).product();
    let (mt, rem) = pair.message_count().div_rem(&others);
    if !rem.is_zero() || !mt.is_positive() {
        return Err(Error::Inconsistency(format!(
            "M = {} is not divisible by the other scale factors {others}",
            pair.message_count()
        )));
    }
    let mut range_values = m.clone();
    range_values[t] = mt.clone();
    let ranges = Ranges::new(range_values)?;
    let u = to_integers(&check.mul_vec(&gs.column(t))?)
        .ok_or_else(|| Error::Inconsistency("Hc′·g_t is not integral".into()))?;
    if u[t].abs() != mt {
        return Err(Error::Inconsistency(format!("u_t = {} differs from M_t = {mt}", u[t])));
    }
    Ok(FullScheme { pair: pair.clone(), t, m, r, cofactors, basis, check, ranges, u })
}

impl FullScheme {
    pub fn pair(&self) -> &CodePair {
        &self.pair
    }

    /// Replaced column, 0-based.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn scale_factors(&self) -> &[Integer] {
        &self.m
    }

    pub fn solution(&self) -> &[Integer] {
        &self.r
    }

    pub fn cofactors(&self) -> &[Integer] {
        &self.cofactors
    }

    /// `Gc′`.
    pub fn basis(&self) -> &RMatrix {
        &self.basis
    }

    /// `Hc′ = Gc′⁻¹`.
    pub fn check(&self) -> &RMatrix {
        &self.check
    }

    pub fn ranges(&self) -> &Ranges {
        &self.ranges
    }

    pub fn u(&self) -> &[Integer] {
        &self.u
    }

    pub fn encode(&self, b: &[Integer]) -> Result<Vec<Rational>> {
        encode_mod(&self.pair, &self.basis, &self.ranges, b)
    }

    pub fn index(&self, x: &[Rational]) -> Result<Vec<Integer>> {
        if x.len() != self.pair.n() {
            return Err(Error::Shape(format!(
                "vector of length {} for dimension {}",
                x.len(),
                self.pair.n()
            )));
        }
        let bt = self.check.mul_vec(x)?;
        if !is_integral(&bt) || !self.pair.coding().contains(x) {
            return Err(Error::Membership("vector is not in the coding lattice".into()));
        }
        let bt = to_integers(&bt).expect("integral");
        let t = self.t;
        let ranges = self.ranges.as_slice();
        let bt_t = bt[t].mod_floor(&ranges[t]);
        let (ct, rem) = (&bt[t] - &bt_t).div_rem(&self.u[t]);
        if !rem.is_zero() {
            return Err(Error::Corruption("non-integer shaping coefficient c_t".into()));
        }
        Ok((0..bt.len())
            .map(|i| {
                if i == t {
                    bt_t.clone()
                } else {
                    (&bt[i] - &self.u[i] * &ct).mod_floor(&ranges[i])
                }
            })
            .collect())
    }
}

/// A codeword whose multiples exhaust the code, if a one-range encoding
/// exists for the coding basis or the modified basis.
pub fn cyclic_generator(pair: &CodePair, cap: u64) -> Result<Option<Vec<Rational>>> {
    if pair.message_count() > &Integer::from(cap) {
        return Err(Error::Resource(format!(
            "{} messages exceed the cap of {cap}",
            pair.message_count()
        )));
    }
    let m = pair.message_count().to_u64().expect("capped");
    if m == 1 {
        return Ok(Some(vec![Rational::zero(); pair.n()]));
    }
    let mut bases = vec![pair.coding().generator().clone()];
    if let Ok(scheme) = build_scheme(pair, None) {
        bases.push(scheme.basis().clone());
    }
    for basis in bases {
        for v in basis.columns() {
            let g = pair.shaping().reduce(&v)?;
            if element_order(pair, &g, m)? == m {
                return Ok(Some(g));
            }
        }
    }
    Ok(None)
}

/// Order of `g` in `Λc/Λs`, stopping once it exceeds `limit`.
pub fn element_order(pair: &CodePair, g: &[Rational], limit: u64) -> Result<u64> {
    let mut x = g.to_vec();
    for k in 1..=limit {
        if x.iter().all(Zero::is_zero) {
            return Ok(k);
        }
        x = pair.coset_add(&x, g)?;
    }
    Ok(limit + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ivec, rat};
    use crate::lattice::Lattice;
    use crate::quantizer::QuantizerSpec;

    pub(crate) fn example4() -> CodePair {
        let h = RMatrix::from_rows(vec![
            vec![rat(1, 1), rat(1, 2), rat(1, 4)],
            vec![rat(-1, 4), rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(-1, 4), rat(1, 1)],
        ])
        .unwrap();
        let coding = Lattice::from_check(h, QuantizerSpec::BruteForce).unwrap();
        let shaping = Lattice::from_generator(
            RMatrix::from_i64(&[&[4, 0, 0], &[-4, 4, 0], &[0, -4, 8]]),
            QuantizerSpec::scaled(QuantizerSpec::Checkerboard { n: 3 }, rat(4, 1)),
        )
        .unwrap();
        CodePair::new(coding, shaping).unwrap()
    }

    #[test]
    fn example4_frame() {
        let pair = example4();
        assert_eq!(pair.message_count(), &int(146));
        let m = scale_factors(&pair).unwrap();
        assert_eq!(m, ivec(&[1, 1, 2]));
        assert_eq!(cofactor_coefficients(&pair, &m, 0).unwrap(), ivec(&[16, -9, -4]));
    }

    #[test]
    fn example4_printed_solution() {
        let scheme = build_scheme_with_solution(&example4(), 0, ivec(&[4, 7, 0])).unwrap();
        let expected = RMatrix::from_rows(vec![
            vec![rat(73, 4), rat(0, 1), rat(0, 1)],
            vec![rat(-32, 1), rat(1, 4), rat(0, 1)],
            vec![rat(-40, 1), rat(1, 4), rat(1, 4)],
        ])
        .unwrap();
        assert_eq!(scheme.check(), &expected);
        assert_eq!(scheme.ranges().as_slice(), ivec(&[73, 1, 2]).as_slice());
    }

    #[test]
    fn example4_roundtrip() {
        let scheme = build_scheme(&example4(), Some(0)).unwrap();
        assert_eq!(scheme.ranges().as_slice(), ivec(&[73, 1, 2]).as_slice());
        for b in scheme.ranges().iter() {
            let x = scheme.encode(&b).unwrap();
            assert_eq!(scheme.index(&x).unwrap(), b);
        }
    }

    #[test]
    fn wrong_solution_is_rejected() {
        assert!(matches!(
            build_scheme_with_solution(&example4(), 0, ivec(&[1, 1, 1])),
            Err(Error::BasisChange(_))
        ));
    }

    #[test]
    fn self_similar_is_degenerate() {
        let coding = Lattice::from_generator(RMatrix::identity(2), QuantizerSpec::Integer { n: 2 }).unwrap();
        let shaping = Lattice::from_generator(
            RMatrix::diagonal(&[rat(3, 1), rat(3, 1)]),
            QuantizerSpec::scaled(QuantizerSpec::Integer { n: 2 }, rat(3, 1)),
        )
        .unwrap();
        let pair = CodePair::new(coding, shaping).unwrap();
        assert_eq!(scale_factors(&pair).unwrap(), ivec(&[3, 3]));
        let scheme = build_scheme(&pair, None).unwrap();
        assert_eq!(scheme.ranges().as_slice(), ivec(&[3, 3]).as_slice());
        assert_eq!(scheme.basis(), pair.coding().generator());
    }

    #[test]
    fn order_of_zero_is_one() {
        let pair = example4();
        assert_eq!(element_order(&pair, &[rat(0, 1), rat(0, 1), rat(0, 1)], 10).unwrap(), 1);
    }
}
