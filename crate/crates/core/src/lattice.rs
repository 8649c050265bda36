//! Lattices, nested lattice pairs and the generic modulo-lattice encoder.
//!
//! A [`Lattice`] carries a generator (basis vectors in columns), a check
//! matrix and the quantizer that realises `Q_Λ`. The check matrix need not be
//! the inverse of the generator: any `H` with `H·G` integral and
//! `|det H · det G| = 1` describes the same membership test `Hx ∈ Z^n`.

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{
    add, floor, is_integral, lex_cmp, rat, sub, to_integers, Integer, Rational,
};
use crate::error::{Error, Result};
use crate::matrix::RMatrix;
use crate::quantizer::QuantizerSpec;

pub const DEFAULT_CODEBOOK_CAP: u64 = 1_000_000;
pub const DEFAULT_SEARCH_CAP: u64 = 10_000;
const DECOMPOSITION_BOX_CAP: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    generator: RMatrix,
    check: RMatrix,
    quantizer: QuantizerSpec,
}

impl Lattice {
    pub fn from_generator(generator: RMatrix, quantizer: QuantizerSpec) -> Result<Self> {
        let check = generator.inverse().map_err(|_| {
            Error::Inconsistency("generator matrix is not full rank".into())
        })?;
        Self::from_parts(generator, check, quantizer)
    }

    pub fn from_check(check: RMatrix, quantizer: QuantizerSpec) -> Result<Self> {
        let generator = check
            .inverse()
            .map_err(|_| Error::Inconsistency("check matrix is not full rank".into()))?;
        Self::from_parts(generator, check, quantizer)
    }

    pub fn from_parts(generator: RMatrix, check: RMatrix, quantizer: QuantizerSpec) -> Result<Self> {
        if !generator.is_square() || !check.is_square() || generator.rows() != check.rows() {
            return Err(Error::Shape(format!(
                "generator {}x{} and check {}x{} must be square of equal size",
                generator.rows(),
                generator.cols(),
                check.rows(),
                check.cols()
            )));
        }
        let dg = generator.det()?;
        if dg.is_zero() {
            return Err(Error::Inconsistency("generator matrix is not full rank".into()));
        }
        let hg = check.mul(&generator)?;
        if !hg.is_integer() || !(check.det()? * &dg).abs().is_one() {
            return Err(Error::Inconsistency(
                "check matrix does not describe the generated lattice".into(),
            ));
        }
        let lattice = Self { generator, check, quantizer };
        lattice.validate_quantizer()?;
        Ok(lattice)
    }

    fn validate_quantizer(&self) -> Result<()> {
        self.quantizer.validate()?;
        if let Some(d) = self.quantizer.dim() {
            if d != self.n() {
                return Err(Error::Shape(format!(
                    "quantizer dimension {d} does not match lattice dimension {}",
                    self.n()
                )));
            }
        }
        if matches!(self.quantizer, QuantizerSpec::BruteForce) {
            return Ok(());
        }
        for col in self.generator.columns() {
            if self.quantize(&col)? != col {
                return Err(Error::Inconsistency(
                    "quantizer lattice does not contain the generator columns".into(),
                ));
            }
        }
        if let Some(v) = self.quantizer.volume() {
            if v != self.volume() {
                return Err(Error::Inconsistency(format!(
                    "quantizer lattice volume {v} differs from generator volume {}",
                    self.volume()
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.generator.rows()
    }

    pub fn generator(&self) -> &RMatrix {
        &self.generator
    }

    pub fn check(&self) -> &RMatrix {
        &self.check
    }

    pub fn quantizer(&self) -> &QuantizerSpec {
        &self.quantizer
    }

    pub fn with_quantizer(&self, quantizer: QuantizerSpec) -> Result<Self> {
        Self::from_parts(self.generator.clone(), self.check.clone(), quantizer)
    }

    pub fn volume(&self) -> Rational {
        self.generator.det().expect("validated square").abs()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.n() && self.check.mul_vec(x).is_ok_and(|v| is_integral(&v))
    }

    pub fn quantize(&self, y: &[Rational]) -> Result<Vec<Rational>> {
        if y.len() != self.n() {
            return Err(Error::Shape(format!(
                "vector of length {} for a lattice of dimension {}",
                y.len(),
                self.n()
            )));
        }
        self.quantizer.quantize(&self.generator, y)
    }

    /// `y mod Λ`: the coset representative `y - Q(y)`.
    pub fn reduce(&self, y: &[Rational]) -> Result<Vec<Rational>> {
        Ok(sub(y, &self.quantize(y)?))
    }

    /// Whether the columns of `basis` form a basis of this lattice.
    pub fn is_basis(&self, basis: &RMatrix) -> bool {
        basis.rows() == self.n()
            && basis.is_square()
            && self.check.mul(basis).is_ok_and(|m| m.is_integer())
            && basis.det().is_ok_and(|d| d.abs() == self.volume())
    }
}

/// `Λs ⊆ Λc` exactly when `H_c · G_s` is an integer matrix.
pub fn is_sublattice(coding: &Lattice, shaping: &Lattice) -> Result<bool> {
    if coding.n() != shaping.n() {
        return Err(Error::Shape(format!(
            "coding dimension {} differs from shaping dimension {}",
            coding.n(),
            shaping.n()
        )));
    }
    Ok(coding.check().mul(shaping.generator())?.is_integer())
}

/// `|det G_s| / |det G_c|`, required to be an integer.
pub fn message_count(coding: &Lattice, shaping: &Lattice) -> Result<Integer> {
    let ratio = shaping.volume() / coding.volume();
    if !ratio.is_integer() || ratio.is_zero() {
        return Err(Error::Inconsistency(format!(
            "volume ratio {ratio} is not a positive integer"
        )));
    }
    Ok(ratio.to_integer())
}

/// Code rate `log2(M) / n`, kept as its exact ingredients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rate {
    pub messages: Integer,
    pub n: usize,
}

impl Rate {
    pub fn log2_messages(&self) -> f64 {
        // BigInt -> f64 is exact enough for any M below 2^1023
        self.messages.to_f64().unwrap_or(f64::INFINITY).log2()
    }

    pub fn bits_per_dim(&self) -> f64 {
        self.log2_messages() / self.n as f64
    }
}

impl std::fmt::Display for Rate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.4}", self.bits_per_dim())
    }
}

/// A coding lattice and a shaping sublattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodePair {
    coding: Lattice,
    shaping: Lattice,
    messages: Integer,
}

impl CodePair {
    pub fn new(coding: Lattice, shaping: Lattice) -> Result<Self> {
        if !is_sublattice(&coding, &shaping)? {
            return Err(Error::Inconsistency(
                "shaping lattice is not a sublattice of the coding lattice".into(),
            ));
        }
        let messages = message_count(&coding, &shaping)?;
        Ok(Self { coding, shaping, messages })
    }

    pub fn n(&self) -> usize {
        self.coding.n()
    }

    pub fn coding(&self) -> &Lattice {
        &self.coding
    }

    pub fn shaping(&self) -> &Lattice {
        &self.shaping
    }

    pub fn message_count(&self) -> &Integer {
        &self.messages
    }

    pub fn rate(&self) -> Rate {
        Rate { messages: self.messages.clone(), n: self.n() }
    }

    fn require_member(&self, x: &[Rational]) -> Result<()> {
        if self.coding.contains(x) {
            Ok(())
        } else {
            Err(Error::Membership("vector is not in the coding lattice".into()))
        }
    }

    /// The group operation on coset leaders: `x + y mod Λs`.
    pub fn coset_add(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
        self.require_member(x)?;
        self.require_member(y)?;
        self.shaping.reduce(&add(x, y))
    }

    /// The codeword representing the coset of `x`.
    pub fn leader(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        self.require_member(x)?;
        self.shaping.reduce(x)
    }

    fn cap_check(&self, cap: u64) -> Result<()> {
        if self.messages > Integer::from(cap) {
            return Err(Error::Resource(format!(
                "{} messages exceed the cap of {cap}",
                self.messages
            )));
        }
        Ok(())
    }
}

/// Per-coordinate message ranges `M_1..M_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranges(Vec<Integer>);

impl Ranges {
    pub fn new(values: Vec<Integer>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|m| !m.is_positive()) {
            return Err(Error::Parameter("ranges must be positive integers".into()));
        }
        Ok(Self(values))
    }

    pub fn from_u64(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Integer::from(v)).collect())
    }

    pub fn as_slice(&self) -> &[Integer] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self) -> Integer {
        self.0.iter().product()
    }

    pub fn contains(&self, b: &[Integer]) -> bool {
        b.len() == self.0.len()
            && b.iter().zip(&self.0).all(|(x, m)| !x.is_negative() && x < m)
    }

    pub fn check(&self, b: &[Integer]) -> Result<()> {
        if self.contains(b) {
            Ok(())
        } else {
            Err(Error::Range(format!(
                "index vector {:?} outside ranges {:?}",
                b.iter().map(ToString::to_string).collect::<Vec<_>>(),
                self.0.iter().map(ToString::to_string).collect::<Vec<_>>()
            )))
        }
    }

    /// Componentwise addition in `Z_M1 × … × Z_Mn`.
    pub fn add(&self, a: &[Integer], b: &[Integer]) -> Vec<Integer> {
        a.iter()
            .zip(b)
            .zip(&self.0)
            .map(|((x, y), m)| num_integer::Integer::mod_floor(&(x + y), m))
            .collect()
    }

    /// All index vectors, first coordinate varying slowest.
    pub fn iter(&self) -> impl Iterator<Item = Vec<Integer>> + '_ {
        let n = self.0.len();
        let mut cur: Option<Vec<Integer>> = Some(vec![Integer::zero(); n]);
        std::iter::from_fn(move || {
            let out = cur.take()?;
            let mut next = out.clone();
            for i in (0..n).rev() {
                next[i] += 1;
                if next[i] < self.0[i] {
                    cur = Some(next);
                    break;
                }
                next[i] = Integer::zero();
            }
            Some(out)
        })
    }

    /// Uniformly random index vector. Each range must fit in a `u64`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<Vec<Integer>> {
        self.0
            .iter()
            .map(|m| {
                let m = m
                    .to_u64()
                    .ok_or_else(|| Error::Resource("range too large to sample".into()))?;
                Ok(Integer::from(rng.gen_range(0..m)))
            })
            .collect()
    }
}

/// `x = basis·b - Q_Λs(basis·b)`.
pub fn encode_mod(
    pair: &CodePair,
    basis: &RMatrix,
    ranges: &Ranges,
    b: &[Integer],
) -> Result<Vec<Rational>> {
    ranges.check(b)?;
    let x0 = basis.mul_int_vec(b)?;
    pair.shaping().reduce(&x0)
}

/// All codewords `Λc ∩ V(Λs)`, sorted lexicographically.
///
/// Closes `{0}` under `⊕` with the coding generator columns; every element of
/// `Λc/Λs` is reached and each coset is represented by its quantizer-selected
/// leader.
pub fn enumerate_codebook(pair: &CodePair, cap: u64) -> Result<Vec<Vec<Rational>>> {
    pair.cap_check(cap)?;
    let m = pair.message_count().to_usize().expect("capped");
    let gens: Vec<Vec<Rational>> = pair
        .coding()
        .generator()
        .columns()
        .into_iter()
        .map(|g| pair.shaping().reduce(&g))
        .collect::<Result<_>>()?;
    let zero = vec![Rational::zero(); pair.n()];
    let mut seen: HashSet<Vec<Rational>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let z = pair.shaping().reduce(&add(&x, g))?;
            if seen.insert(z.clone()) {
                if seen.len() > m {
                    return Err(Error::Inconsistency(
                        "more cosets than the volume ratio allows".into(),
                    ));
                }
                queue.push_back(z);
            }
        }
    }
    if seen.len() != m {
        return Err(Error::Inconsistency(format!(
            "found {} cosets, expected {m}",
            seen.len()
        )));
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort_by(|a, b| lex_cmp(a, b));
    Ok(out)
}

/// Outcome of checking a candidate rectangular encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectReport {
    pub distinct: u64,
    pub total: u64,
    /// First repeated codeword found: earlier index, later index.
    pub collision: Option<(Vec<Integer>, Vec<Integer>)>,
}

impl RectReport {
    pub fn is_rectangular(&self) -> bool {
        self.collision.is_none() && self.distinct == self.total
    }
}

pub fn verify_rectangular(
    pair: &CodePair,
    basis: &RMatrix,
    ranges: &Ranges,
    cap: u64,
) -> Result<RectReport> {
    pair.cap_check(cap)?;
    if &ranges.product() != pair.message_count() || ranges.len() != pair.n() {
        return Err(Error::Parameter(format!(
            "ranges multiply to {}, the code has {} messages",
            ranges.product(),
            pair.message_count()
        )));
    }
    if !pair.coding().is_basis(basis) {
        return Err(Error::Structure(
            "encoding basis does not generate the coding lattice".into(),
        ));
    }
    let mut seen: HashMap<Vec<Rational>, Vec<Integer>> = HashMap::new();
    let mut collision = None;
    let mut total = 0u64;
    for b in ranges.iter() {
        total += 1;
        let x = encode_mod(pair, basis, ranges, &b)?;
        match seen.get(&x) {
            Some(first) => {
                if collision.is_none() {
                    collision = Some((first.clone(), b));
                }
            }
            None => {
                seen.insert(x, b);
            }
        }
    }
    Ok(RectReport { distinct: seen.len() as u64, total, collision })
}

/// Ordered factorizations of `m` into `n` positive factors.
pub fn ordered_factorizations(m: u64, n: usize) -> Vec<Vec<u64>> {
    if n == 0 {
        return if m == 1 { vec![vec![]] } else { vec![] };
    }
    if n == 1 {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for d in (1..=m).filter(|d| m % d == 0) {
        for mut rest in ordered_factorizations(m / d, n - 1) {
            rest.insert(0, d);
            out.push(rest);
        }
    }
    out
}

/// Every ordered factorization of `M` that gives a rectangular encoding with
/// the coding generator.
pub fn search_factorizations(pair: &CodePair, cap: u64) -> Result<Vec<Ranges>> {
    pair.cap_check(cap)?;
    let m = pair.message_count().to_u64().expect("capped");
    let basis = pair.coding().generator();
    let mut found = Vec::new();
    for f in ordered_factorizations(m, pair.n()) {
        let ranges = Ranges::from_u64(&f)?;
        if verify_rectangular(pair, basis, &ranges, cap)?.is_rectangular() {
            found.push(ranges);
        }
    }
    Ok(found)
}

/// All ways to write `y = G·b + P·s` with integer `b` and `s ∈ [0,1)^n`.
pub fn parallelotope_decompositions(
    generator: &RMatrix,
    p: &RMatrix,
    y: &[Rational],
) -> Result<Vec<(Vec<Integer>, Vec<Rational>)>> {
    let g_inv = generator.inverse()?;
    let p_inv = p.inverse()?;
    let a = g_inv.mul(p)?;
    let w = g_inv.mul_vec(y)?;
    let n = y.len();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut volume = Integer::one();
    for i in 0..n {
        let (mut l, mut h) = (w[i].clone(), w[i].clone());
        for v in a.row(i) {
            if v.is_positive() {
                l -= v;
            } else {
                h -= v;
            }
        }
        let l = l.ceil().to_integer();
        let h = floor(&h);
        if h < l {
            return Ok(Vec::new());
        }
        volume *= &h - &l + 1;
        lo.push(l);
        hi.push(h);
    }
    if volume > Integer::from(DECOMPOSITION_BOX_CAP) {
        return Err(Error::Resource("decomposition search box too large".into()));
    }
    let widths: Vec<Integer> = lo.iter().zip(&hi).map(|(l, h)| h - l + 1).collect();
    let mut out = Vec::new();
    for offset in Ranges::new(widths)?.iter() {
        let b: Vec<Integer> = offset.iter().zip(&lo).map(|(o, l)| o + l).collect();
        let rest = sub(y, &generator.mul_int_vec(&b)?);
        let s = p_inv.mul_vec(&rest)?;
        if s.iter().all(|v| !v.is_negative() && v < &Rational::one()) {
            out.push((b, s));
        }
    }
    Ok(out)
}

/// Statistical check that the parallelotope of `p` tiles space under `lat`:
/// every sampled point must decompose in exactly one way.
pub fn fundamental_region_sample_test(p: &RMatrix, lat: &Lattice, trials: usize, seed: u64) -> bool {
    let Ok(dp) = p.det() else { return false };
    if dp.abs() != lat.volume() {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale: i64 = lat
        .generator()
        .to_rows()
        .iter()
        .flatten()
        .chain(p.to_rows().iter().flatten())
        .map(|v| v.abs().ceil().to_integer().to_i64().unwrap_or(1_000))
        .max()
        .unwrap_or(1)
        .max(1);
    (0..trials).all(|_| {
        let y: Vec<Rational> = (0..lat.n())
            .map(|_| {
                let den = rng.gen_range(1..=64i64);
                let num = rng.gen_range(-4 * scale * den..=4 * scale * den);
                rat(num, den)
            })
            .collect();
        parallelotope_decompositions(lat.generator(), p, &y).is_ok_and(|d| d.len() == 1)
    })
}

/// Index of `x` for an arbitrary rectangular encoding: the unique `b` with
/// `basis·b ≡ x (mod Λs)` and `b` inside `ranges`.
pub fn index_mod(pair: &CodePair, basis: &RMatrix, ranges: &Ranges, x: &[Rational]) -> Result<Vec<Integer>> {
    pair.require_member(x)?;
    let m = RMatrix::diagonal_int(ranges.as_slice());
    let p = basis.mul(&m)?;
    let found = parallelotope_decompositions(pair.shaping().generator(), &p, x)?;
    let [(_, s)] = found.as_slice() else {
        return Err(Error::Structure(format!(
            "encoding parallelotope is not a fundamental region ({} decompositions)",
            found.len()
        )));
    };
    let b: Vec<Rational> = s
        .iter()
        .zip(ranges.as_slice())
        .map(|(v, m)| v * Rational::from_integer(m.clone()))
        .collect();
    to_integers(&b).ok_or_else(|| Error::Corruption("fractional index recovered".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rvec};

    fn example1() -> CodePair {
        let h = RMatrix::from_rows(vec![
            vec![rat(1, 1), rat(-1, 4)],
            vec![rat(-3, 2), rat(3, 2)],
        ])
        .unwrap();
        let coding = Lattice::from_check(h, QuantizerSpec::BruteForce).unwrap();
        let shaping = Lattice::from_generator(
            RMatrix::from_i64(&[&[4, 0], &[4, 8]]),
            QuantizerSpec::scaled(QuantizerSpec::Checkerboard { n: 2 }, rat(4, 1)),
        )
        .unwrap();
        CodePair::new(coding, shaping).unwrap()
    }

    #[test]
    fn sublattice_and_count() {
        let pair = example1();
        assert_eq!(pair.message_count(), &int(36));
        assert!(is_sublattice(pair.coding(), pair.shaping()).unwrap());
        assert!(is_sublattice(pair.coding(), pair.coding()).unwrap());
        assert_eq!(message_count(pair.coding(), pair.coding()).unwrap(), int(1));
    }

    #[test]
    fn dimension_mismatch() {
        let a = Lattice::from_generator(RMatrix::identity(2), QuantizerSpec::Integer { n: 2 }).unwrap();
        let b = Lattice::from_generator(RMatrix::identity(3), QuantizerSpec::Integer { n: 3 }).unwrap();
        assert!(matches!(is_sublattice(&a, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn bad_quantizer_binding_is_rejected() {
        let g = RMatrix::from_i64(&[&[4, 0], &[4, 8]]);
        let wrong = QuantizerSpec::scaled(QuantizerSpec::Integer { n: 2 }, rat(4, 1));
        assert!(matches!(
            Lattice::from_generator(g, wrong),
            Err(Error::Inconsistency(_))
        ));
    }

    #[test]
    fn encode_examples() {
        let pair = example1();
        let g = pair.coding().generator().clone();
        let r66 = Ranges::from_u64(&[6, 6]).unwrap();
        assert_eq!(
            encode_mod(&pair, &g, &r66, &[int(1), int(0)]).unwrap(),
            vec![rat(4, 3), rat(4, 3)]
        );
        assert_eq!(
            encode_mod(&pair, &g, &r66, &[int(4), int(0)]).unwrap(),
            vec![rat(4, 3), rat(4, 3)]
        );
        assert_eq!(encode_mod(&pair, &g, &r66, &[int(0), int(0)]).unwrap(), rvec(&[0, 0]));
        assert!(matches!(
            encode_mod(&pair, &g, &r66, &[int(6), int(0)]),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn codebook_contains_printed_point() {
        let book = enumerate_codebook(&example1(), DEFAULT_CODEBOOK_CAP).unwrap();
        assert_eq!(book.len(), 36);
        assert!(book.contains(&vec![rat(-2, 9), rat(-8, 9)]));
        assert!(matches!(
            enumerate_codebook(&example1(), 10),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn coset_add_identity_and_inverse() {
        let pair = example1();
        let x = vec![rat(4, 3), rat(4, 3)];
        let zero = rvec(&[0, 0]);
        assert_eq!(pair.coset_add(&x, &zero).unwrap(), x);
        let neg = pair.leader(&x.iter().map(|v| -v).collect::<Vec<_>>()).unwrap();
        assert_eq!(pair.coset_add(&x, &neg).unwrap(), zero);
        assert!(matches!(
            pair.coset_add(&[rat(1, 7), rat(0, 1)], &zero),
            Err(Error::Membership(_))
        ));
    }

    #[test]
    fn factorizations() {
        assert_eq!(ordered_factorizations(36, 2).len(), 9);
        assert_eq!(ordered_factorizations(1, 3), vec![vec![1, 1, 1]]);
        assert_eq!(ordered_factorizations(12, 3).len(), 18);
    }

    #[test]
    fn ranges_iteration_and_add() {
        let r = Ranges::from_u64(&[2, 3]).unwrap();
        let all: Vec<_> = r.iter().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![int(0), int(1)]);
        assert_eq!(r.add(&[int(1), int(2)], &[int(1), int(2)]), vec![int(0), int(1)]);
        assert!(Ranges::from_u64(&[0, 1]).is_err());
    }

    #[test]
    fn natural_parallelotope_is_fundamental() {
        let pair = example1();
        let g = pair.shaping().generator().clone();
        assert!(fundamental_region_sample_test(&g, pair.shaping(), 50, 1));
        let doubled = g.with_column(0, &rvec(&[8, 8]));
        assert!(!fundamental_region_sample_test(&doubled, pair.shaping(), 50, 1));
    }
}
