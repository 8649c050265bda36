//! Exact scalars and integer number theory.
//!
//! Every lattice computation in this crate runs on [`Rational`] values
//! (arbitrary-precision, always in lowest terms). Vectors are plain
//! `Vec<Rational>`; the helpers here cover the handful of vector operations
//! the encoders need.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;
pub type Rational = BigRational;

pub fn int(v: i64) -> Integer {
    Integer::from(v)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Integer::from(num), Integer::from(den))
}

pub fn rat_int(v: &Integer) -> Rational {
    Rational::from_integer(v.clone())
}

pub fn rvec(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| rat(v, 1)).collect()
}

pub fn ivec(values: &[i64]) -> Vec<Integer> {
    values.iter().map(|&v| int(v)).collect()
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Config(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Integer = p.trim().parse().map_err(|_| bad())?;
            let q: Integer = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: Integer = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Nearest integer, ties resolved toward negative infinity.
pub fn round_half_down(x: &Rational) -> Integer {
    (x - rat(1, 2)).ceil().to_integer()
}

pub fn floor(x: &Rational) -> Integer {
    x.floor().to_integer()
}

pub fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub fn to_integers(v: &[Rational]) -> Option<Vec<Integer>> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], k: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * k).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_sq(a: &[Rational]) -> Rational {
    dot(a, a)
}

pub fn dist_sq(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| {
            let d = x - y;
            acc + &d * &d
        })
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Keeps the better of two candidate nearest points: smaller distance first,
/// then the lexicographically smaller vector.
pub fn better_candidate(
    (d1, p1): (Rational, Vec<Rational>),
    (d2, p2): (Rational, Vec<Rational>),
) -> (Rational, Vec<Rational>) {
    match d1.cmp(&d2) {
        Ordering::Less => (d1, p1),
        Ordering::Greater => (d2, p2),
        Ordering::Equal if lex_cmp(&p2, &p1).is_lt() => (d2, p2),
        Ordering::Equal => (d1, p1),
    }
}

/// Returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: &Integer, b: &Integer) -> (Integer, Integer, Integer) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Integer::one(), Integer::zero());
    let (mut old_t, mut t) = (Integer::zero(), Integer::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Greatest common divisor of the absolute values of `v`.
pub fn gcd_vector(v: &[Integer]) -> Result<Integer> {
    let g = v.iter().fold(Integer::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::Degenerate(
            "gcd of an all-zero vector is undefined".into(),
        ));
    }
    Ok(g)
}

/// Solves `sum(coeffs[i] * r[i]) = target` over the integers.
///
/// Coefficients are folded left to right with the extended Euclidean
/// algorithm, so a solution is found exactly when `gcd(coeffs)` divides
/// `target`. The result is deterministic for a given input.
pub fn solve_diophantine(coeffs: &[Integer], target: &Integer) -> Option<Vec<Integer>> {
    if coeffs.is_empty() {
        return None;
    }
    let mut g = Integer::zero();
    let mut r: Vec<Integer> = Vec::with_capacity(coeffs.len());
    for a in coeffs {
        let (next_g, s, t) = ext_gcd(&g, a);
        for x in r.iter_mut() {
            *x *= &s;
        }
        r.push(t);
        g = next_g;
    }
    if g.is_zero() {
        return target.is_zero().then(|| vec![Integer::zero(); coeffs.len()]);
    }
    if !(target % &g).is_zero() {
        return None;
    }
    let k = target / &g;
    Some(r.into_iter().map(|x| x * &k).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_roundtrip() {
        for s in ["0", "-3", "73/4", "-2/9"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn rounding_ties_go_down() {
        assert_eq!(round_half_down(&rat(1, 2)), int(0));
        assert_eq!(round_half_down(&rat(-1, 2)), int(-1));
        assert_eq!(round_half_down(&rat(3, 5)), int(1));
        assert_eq!(round_half_down(&rat(-7, 5)), int(-1));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_vector(&ivec(&[-6, 9, 15])).unwrap(), int(3));
        assert_eq!(gcd_vector(&ivec(&[1, 123456])).unwrap(), int(1));
        assert!(matches!(
            gcd_vector(&ivec(&[0, 0])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn diophantine_small_cases() {
        let c = ivec(&[16, -9, -4]);
        let r = solve_diophantine(&c, &int(1)).unwrap();
        let lhs: Integer = c.iter().zip(&r).map(|(a, b)| a * b).sum();
        assert_eq!(lhs, int(1));
        // the witness printed alongside the equation
        let w = ivec(&[4, 7, 0]);
        let lhs: Integer = c.iter().zip(&w).map(|(a, b)| a * b).sum();
        assert_eq!(lhs, int(1));

        assert_eq!(solve_diophantine(&ivec(&[2, 4]), &int(1)), None);
        assert_eq!(solve_diophantine(&ivec(&[1]), &int(1)), Some(ivec(&[1])));
        assert_eq!(solve_diophantine(&ivec(&[0, 0]), &int(1)), None);
        assert_eq!(solve_diophantine(&ivec(&[]), &int(1)), None);
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(240, 46), (-54018, 45151), (0, -5), (7, 0)] {
            let (g, s, t) = ext_gcd(&int(a), &int(b));
            assert_eq!(&s * int(a) + &t * int(b), g);
            assert!(!g.is_negative());
        }
    }
}
