//! Exhaustive closest-point search, used as the reference oracle.
//!
//! Fincke–Pohst enumeration over the exact Gram decomposition of the
//! generator. The radius starts at the distance of the Babai rounding point,
//! so the search box always contains every nearest point; ties are kept and
//! resolved lexicographically.

use num_traits::{ToPrimitive, Zero};

use crate::arith::{better_candidate, lex_cmp, round_half_down, Integer, Rational};
use crate::error::{Error, Result};
use crate::matrix::RMatrix;

pub const BRUTE_FORCE_MAX_DIM: usize = 10;
const NODE_BUDGET: u64 = 20_000_000;

struct Search<'a> {
    q: Vec<Vec<Rational>>,
    u: Vec<Rational>,
    generator: &'a RMatrix,
    best: Option<(Rational, Vec<Rational>)>,
    bound: Rational,
    coeffs: Vec<Integer>,
    nodes: u64,
}

pub fn quantize_bruteforce(generator: &RMatrix, y: &[Rational]) -> Result<Vec<Rational>> {
    let n = generator.rows();
    if !generator.is_square() || y.len() != n {
        return Err(Error::Shape(format!(
            "generator {}x{} against vector of length {}",
            generator.rows(),
            generator.cols(),
            y.len()
        )));
    }
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::Resource(format!(
            "brute-force quantizer limited to n <= {BRUTE_FORCE_MAX_DIM}"
        )));
    }
    let u = generator.inverse()?.mul_vec(y)?;
    let babai: Vec<Integer> = u.iter().map(round_half_down).collect();
    let start = generator.mul_int_vec(&babai)?;
    let bound = crate::arith::dist_sq(y, &start);

    let gram = generator.transpose().mul(generator)?;
    let mut search = Search {
        q: fincke_pohst_form(&gram),
        u,
        generator,
        best: None,
        bound,
        coeffs: vec![Integer::zero(); n],
        nodes: 0,
    };
    search.descend(n, Rational::zero())?;
    Ok(search.best.expect("the Babai point lies inside the search radius").1)
}

/// Quadratic-form coefficients with
/// `x^T A x = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2`.
fn fincke_pohst_form(a: &RMatrix) -> Vec<Vec<Rational>> {
    let n = a.rows();
    let mut q = a.to_rows();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j].clone();
            q[i][j] = &q[i][j] / &q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                let t = &q[k][i] * &q[i][l];
                q[k][l] -= t;
            }
        }
    }
    q
}

impl Search<'_> {
    /// Assigns coordinate `level - 1` given everything above it.
    fn descend(&mut self, level: usize, partial: Rational) -> Result<()> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(Error::Resource("brute-force node budget exhausted".into()));
        }
        if level == 0 {
            let point = self.generator.mul_int_vec(&self.coeffs)?;
            let d = partial;
            let cand = (d.clone(), point);
            self.best = Some(match self.best.take() {
                None => cand,
                Some(cur) => better_candidate(cur, cand),
            });
            if d < self.bound {
                self.bound = d;
            }
            return Ok(());
        }
        let i = level - 1;
        let n = self.u.len();
        let mut center = self.u[i].clone();
        for j in i + 1..n {
            let offset = Rational::from_integer(self.coeffs[j].clone()) - &self.u[j];
            center -= &self.q[i][j] * offset;
        }
        let qii = self.q[i][i].clone();
        let slack = &self.bound - &partial;
        if slack < Rational::zero() {
            return Ok(());
        }
        let width = (slack.to_f64().unwrap_or(f64::MAX) / qii.to_f64().unwrap_or(f64::MIN_POSITIVE))
            .sqrt();
        let c = center.to_f64().unwrap_or(0.0);
        let lo = Integer::from((c - width).floor() as i64 - 1);
        let hi = Integer::from((c + width).ceil() as i64 + 1);
        let mut z = lo;
        while z <= hi {
            let off = Rational::from_integer(z.clone()) - &center;
            let next = &partial + &qii * &off * &off;
            if next <= self.bound {
                self.coeffs[i] = z.clone();
                self.descend(level - 1, next)?;
            }
            z += 1;
        }
        Ok(())
    }
}

/// Every lattice point of `generator` at the minimum distance from `y`,
/// sorted lexicographically. Test support for tie handling.
pub fn nearest_set(generator: &RMatrix, y: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    let best = quantize_bruteforce(generator, y)?;
    let d = crate::arith::dist_sq(y, &best);
    let u = generator.inverse()?.mul_vec(y)?;
    let n = y.len();
    // every candidate coefficient lies within this box by the same Gram bound
    let q = fincke_pohst_form(&generator.transpose().mul(generator)?);
    let mut out = Vec::new();
    let mut coeffs = vec![Integer::zero(); n];
    fn walk(
        level: usize,
        partial: Rational,
        q: &[Vec<Rational>],
        u: &[Rational],
        bound: &Rational,
        coeffs: &mut Vec<Integer>,
        out: &mut Vec<Vec<Integer>>,
    ) {
        if level == 0 {
            if &partial == bound {
                out.push(coeffs.clone());
            }
            return;
        }
        let i = level - 1;
        let mut center = u[i].clone();
        for j in i + 1..u.len() {
            center -= &q[i][j] * (Rational::from_integer(coeffs[j].clone()) - &u[j]);
        }
        let slack = (bound - &partial).to_f64().unwrap_or(0.0).max(0.0);
        let width = (slack / q[i][i].to_f64().unwrap_or(1.0)).sqrt();
        let c = center.to_f64().unwrap_or(0.0);
        for z in ((c - width).floor() as i64 - 1)..=((c + width).ceil() as i64 + 1) {
            let off = Rational::from_integer(Integer::from(z)) - &center;
            let next = &partial + &q[i][i] * &off * &off;
            if &next <= bound {
                coeffs[i] = Integer::from(z);
                walk(level - 1, next, q, u, bound, coeffs, out);
            }
        }
    }
    let mut found = Vec::new();
    walk(n, Rational::zero(), &q, &u, &d, &mut coeffs, &mut found);
    for c in found {
        out.push(generator.mul_int_vec(&c)?);
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rvec};

    fn e8_generator() -> RMatrix {
        let mut rows = vec![vec![Rational::zero(); 8]; 8];
        for (i, row) in rows.iter_mut().enumerate() {
            row[0] = rat(1, 2);
            if i >= 1 {
                row[i] = rat(1, 1);
            }
            if i >= 2 {
                row[i - 1] = rat(-1, 1);
            }
        }
        rows[7][7] = rat(2, 1);
        RMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn lattice_points_are_fixed() {
        let g = RMatrix::from_i64(&[&[4, 0], &[4, 8]]);
        assert_eq!(quantize_bruteforce(&g, &rvec(&[8, 0])).unwrap(), rvec(&[8, 0]));
    }

    #[test]
    fn e8_tie_follows_lexicographic_rule() {
        let g = e8_generator();
        let mut y = rvec(&[0; 8]);
        y[0] = rat(1, 1);
        let ties = nearest_set(&g, &y).unwrap();
        assert!(ties.len() > 1);
        let q = quantize_bruteforce(&g, &y).unwrap();
        assert_eq!(q, ties[0]);
        assert_eq!(q, crate::quantizer::quantize_e8(&y));
    }

    #[test]
    fn dimension_guard() {
        let g = RMatrix::identity(11);
        assert!(matches!(
            quantize_bruteforce(&g, &rvec(&[0; 11])),
            Err(Error::Resource(_))
        ));
    }
}
