//! Lattices from codes: Construction A (by basis or by parity checks),
//! two-level Construction D, and terminated convolutional code lattices.
//!
//! Codes are given as lists of codewords over `Z_p`. Coordinates are only
//! ever permuted, never combined, to reach triangular form; `order[p]` is the
//! original coordinate placed at position `p`.

use crate::arith::{rat, Rational};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::RMatrix;
use crate::quantizer::{QuantizerSpec, TrellisCode};

#[derive(Clone, Debug)]
pub struct BuiltLattice {
    pub lattice: Lattice,
    pub triangular: bool,
    pub order: Vec<usize>,
}

fn check_prime(p: u64) -> Result<()> {
    if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
        return Err(Error::Parameter(format!("{p} is not prime")));
    }
    Ok(())
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn reduce_rows(rows: &[Vec<u64>], n: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    rows.iter()
        .map(|r| {
            if r.len() != n {
                Err(Error::Shape(format!("code vector of length {} for n = {n}", r.len())))
            } else {
                Ok(r.iter().map(|v| v % p).collect())
            }
        })
        .collect()
}

/// Rank over `Z_p`.
pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let reduced: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|v| v % p).collect()).collect();
    rref_mod_p(&reduced, p).len()
}

/// Reduced row echelon form over `Z_p` with unit pivots.
fn rref_mod_p(rows: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][c], p);
        for v in m[rank].iter_mut() {
            *v = *v * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for j in 0..cols {
                    m[r][j] = (m[r][j] + p * p - f * m[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m
}

fn leading(v: &[u64]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

fn trailing(v: &[u64]) -> Option<usize> {
    v.iter().rposition(|&x| x != 0)
}

/// Columns sorted by leading position, coordinates reordered so each
/// leading position lands on the diagonal. Leading positions must differ.
fn pivot_order(columns: &[Vec<u64>], n: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut idx: Vec<usize> = (0..columns.len()).collect();
    idx.sort_by_key(|&i| leading(&columns[i]));
    let pivots: Vec<usize> = idx.iter().map(|&i| leading(&columns[i])).collect::<Option<_>>()?;
    if pivots.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let mut order = pivots.clone();
    order.extend((0..n).filter(|j| !pivots.contains(j)));
    Some((idx, order))
}

fn assemble_generator(
    columns: &[(Vec<u64>, i64)],
    order: &[usize],
    fill: i64,
) -> Result<RMatrix> {
    let n = order.len();
    let mut cols: Vec<Vec<Rational>> = columns
        .iter()
        .map(|(c, w)| order.iter().map(|&o| rat(c[o] as i64 * w, 1)).collect())
        .collect();
    for pos in columns.len()..n {
        let mut e = vec![rat(0, 1); n];
        e[pos] = rat(fill, 1);
        cols.push(e);
    }
    RMatrix::from_columns(&cols)
}

/// `C + pZ^n` from `k` independent codewords of length `n`.
pub fn construction_a(p: u64, code_basis: &[Vec<u64>], n: usize) -> Result<BuiltLattice> {
    check_prime(p)?;
    let code = reduce_rows(code_basis, n, p)?;
    if rank_mod_p(&code, p) != code.len() {
        return Err(Error::Rank("code basis is dependent modulo p".into()));
    }
    let (generator, order) = match pivot_order(&code, n) {
        Some((idx, order)) => {
            let cols: Vec<(Vec<u64>, i64)> = idx
                .iter()
                .map(|&i| {
                    let c = &code[i];
                    let inv = inv_mod(c[leading(c).expect("nonzero")], p);
                    (c.iter().map(|v| v * inv % p).collect(), 1)
                })
                .collect();
            (assemble_generator(&cols, &order, p as i64)?, order)
        }
        None => {
            // no permutation separates the leading positions; use the
            // systematic form in the original coordinates
            let cols: Vec<(Vec<u64>, i64)> = rref_mod_p(&code, p).into_iter().map(|c| (c, 1)).collect();
            (systematic_generator(&cols, n, p as i64)?, (0..n).collect())
        }
    };
    let triangular = generator.is_lower_triangular();
    let lattice = Lattice::from_generator(generator, QuantizerSpec::BruteForce)?;
    Ok(BuiltLattice { lattice, triangular, order })
}

fn systematic_generator(columns: &[(Vec<u64>, i64)], n: usize, fill: i64) -> Result<RMatrix> {
    let pivots: Vec<usize> = columns.iter().filter_map(|(c, _)| leading(c)).collect();
    let mut cols: Vec<Vec<Rational>> = columns
        .iter()
        .map(|(c, w)| c.iter().map(|&v| rat(v as i64 * w, 1)).collect())
        .collect();
    for j in (0..n).filter(|j| !pivots.contains(j)) {
        let mut e = vec![rat(0, 1); n];
        e[j] = rat(fill, 1);
        cols.push(e);
    }
    RMatrix::from_columns(&cols)
}

/// Check matrix with each parity row divided by `p`, placed at the row of
/// its last nonzero position, and unit rows elsewhere.
pub fn construction_a_check(p: u64, parity_rows: &[Vec<u64>], n: usize) -> Result<BuiltLattice> {
    check_prime(p)?;
    let parity = reduce_rows(parity_rows, n, p)?;
    if rank_mod_p(&parity, p) != parity.len() {
        return Err(Error::Rank("parity checks are dependent modulo p".into()));
    }
    let mut rows: Vec<Option<Vec<Rational>>> = vec![None; n];
    let mut triangular = true;
    let mut leftovers = Vec::new();
    for r in &parity {
        let pos = trailing(r).ok_or_else(|| Error::Rank("zero parity row".into()))?;
        let scaled: Vec<Rational> = r.iter().map(|&v| rat(v as i64, p as i64)).collect();
        if rows[pos].is_none() {
            rows[pos] = Some(scaled);
        } else {
            triangular = false;
            leftovers.push(scaled);
        }
    }
    // rows sharing a trailing position go to the free unit slots in order
    for row in leftovers {
        let slot = rows.iter().position(Option::is_none).expect("rank bounds the row count");
        rows[slot] = Some(row);
    }
    let h: Vec<Vec<Rational>> = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.unwrap_or_else(|| {
                let mut e = vec![rat(0, 1); n];
                e[i] = rat(1, 1);
                e
            })
        })
        .collect();
    let check = RMatrix::from_rows(h)?;
    let lattice = Lattice::from_check(check, QuantizerSpec::BruteForce)
        .map_err(|_| Error::Rank("parity checks give a singular check matrix".into()))?;
    let triangular = triangular && lattice.check().is_lower_triangular();
    Ok(BuiltLattice { lattice, triangular, order: (0..n).collect() })
}

/// `D2 + 2·D1 + 4Z^n` from explicit nested binary bases: every `D2` vector
/// must also be listed in `D1`.
pub fn construction_d(n: usize, d1: &[Vec<u64>], d2: &[Vec<u64>]) -> Result<BuiltLattice> {
    let d1 = reduce_rows(d1, n, 2)?;
    let d2 = reduce_rows(d2, n, 2)?;
    if rank_mod_p(&d1, 2) != d1.len() {
        return Err(Error::Rank("D1 basis is dependent".into()));
    }
    let joint: Vec<Vec<u64>> = d1.iter().chain(&d2).cloned().collect();
    if rank_mod_p(&joint, 2) != d1.len() {
        return Err(Error::Structure("D2 is not contained in D1".into()));
    }
    if let Some(missing) = d2.iter().position(|v| !d1.contains(v)) {
        return Err(Error::Structure(format!(
            "D2 vector {} is not among the listed D1 vectors",
            missing + 1
        )));
    }
    let mut columns: Vec<(Vec<u64>, i64)> = d2.iter().map(|c| (c.clone(), 1)).collect();
    columns.extend(d1.iter().filter(|c| !d2.contains(c)).map(|c| (c.clone(), 2)));
    let plain: Vec<Vec<u64>> = columns.iter().map(|(c, _)| c.clone()).collect();
    let (idx, order) = pivot_order(&plain, n).ok_or_else(|| {
        Error::Structure("code vectors share a leading position; no permutation gives triangular form".into())
    })?;
    let sorted: Vec<(Vec<u64>, i64)> = idx.iter().map(|&i| columns[i].clone()).collect();
    let generator = assemble_generator(&sorted, &order, 4)?;
    let triangular = generator.is_lower_triangular();
    let lattice = Lattice::from_generator(generator, QuantizerSpec::BruteForce)?;
    Ok(BuiltLattice { lattice, triangular, order })
}

/// Columns (1-based) of the `levels`-fold Kronecker power of `[1 0; 1 1]`.
pub fn kronecker_columns(levels: u32, columns: &[usize]) -> Result<Vec<Vec<u64>>> {
    if levels > 16 {
        return Err(Error::Resource("Kronecker power too large".into()));
    }
    let n = 1usize << levels;
    columns
        .iter()
        .map(|&c| {
            if c == 0 || c > n {
                return Err(Error::Parameter(format!("column {c} outside 1..={n}")));
            }
            let j = c - 1;
            // entry (i, j) is 1 exactly when the bits of j are a subset of those of i
            Ok((0..n).map(|i| u64::from(i & j == j)).collect())
        })
        .collect()
}

pub fn conv_block_generator(code: &TrellisCode) -> Result<Vec<Vec<u64>>> {
    Ok(code
        .block_generator()?
        .into_iter()
        .map(|r| r.into_iter().map(u64::from).collect())
        .collect())
}

/// Construction A (`p = 2`) on a terminated convolutional code, with the
/// trellis quantizer bound in the permuted coordinates.
pub fn conv_lattice(polys: &[String], blocklen: usize) -> Result<(BuiltLattice, TrellisCode)> {
    let code = TrellisCode { polys: polys.to_vec(), blocklen, order: None };
    let rows = conv_block_generator(&code)?;
    let built = construction_a(2, &rows, blocklen)?;
    let code = code.with_order(built.order.clone());
    let lattice = built.lattice.with_quantizer(QuantizerSpec::Trellis(code.clone()))?;
    Ok((BuiltLattice { lattice, ..built }, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conv_lattice_matches_printed_generator() {
        let (built, code) = conv_lattice(&["1".into(), "3".into()], 8).unwrap();
        assert_eq!(built.order, vec![0, 2, 4, 1, 3, 5, 6, 7]);
        assert_eq!(code.order.as_deref(), Some(&[0, 2, 4, 1, 3, 5, 6, 7][..]));
        let expected = RMatrix::from_i64(&[
            &[1, 0, 0, 0, 0, 0, 0, 0],
            &[0, 1, 0, 0, 0, 0, 0, 0],
            &[0, 0, 1, 0, 0, 0, 0, 0],
            &[1, 0, 0, 2, 0, 0, 0, 0],
            &[1, 1, 0, 0, 2, 0, 0, 0],
            &[0, 1, 1, 0, 0, 2, 0, 0],
            &[0, 0, 0, 0, 0, 0, 2, 0],
            &[0, 0, 1, 0, 0, 0, 0, 2],
        ]);
        assert_eq!(built.lattice.generator(), &expected);
        assert!(built.triangular);
    }

    #[test]
    fn empty_code_is_scaled_integers() {
        let built = construction_a(3, &[], 4).unwrap();
        assert_eq!(built.lattice.generator(), &RMatrix::identity(4).scale(&rat(3, 1)));
        let d = construction_d(4, &[], &[]).unwrap();
        assert_eq!(d.lattice.generator(), &RMatrix::identity(4).scale(&rat(4, 1)));
        let h = construction_a_check(5, &[], 3).unwrap();
        assert_eq!(h.lattice.check(), &RMatrix::identity(3));
    }

    #[test]
    fn dependent_code_is_rank_error() {
        let rows = vec![vec![1, 1, 0], vec![2, 2, 0]];
        assert!(matches!(construction_a(3, &rows, 3), Err(Error::Rank(_))));
        assert!(matches!(construction_a(4, &rows, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn construction_a_determinant_and_membership() {
        let rows = vec![vec![0, 1, 2, 3], vec![1, 0, 4, 4]];
        let built = construction_a(5, &rows, 4).unwrap();
        assert_eq!(built.lattice.volume(), rat(25, 1));
        for r in &rows {
            let permuted: Vec<Rational> = built.order.iter().map(|&o| rat(r[o] as i64, 1)).collect();
            assert!(built.lattice.contains(&permuted));
        }
    }

    #[test]
    fn shared_leading_positions_fall_back_to_systematic_form() {
        let rows = vec![vec![1, 1, 0, 0], vec![1, 0, 1, 0]];
        let built = construction_a(2, &rows, 4).unwrap();
        assert_eq!(built.lattice.volume(), rat(4, 1));
        for r in &rows {
            let v: Vec<Rational> = r.iter().map(|&x| rat(x as i64, 1)).collect();
            assert!(built.lattice.contains(&v));
        }
    }

    #[test]
    fn kronecker_columns_of_polar_kernel() {
        let cols = kronecker_columns(3, &[2, 5]).unwrap();
        assert_eq!(cols[0], vec![0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(cols[1], vec![0, 0, 0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn construction_d_nesting_violation() {
        let d1 = kronecker_columns(3, &[2, 3]).unwrap();
        let d2 = kronecker_columns(3, &[1]).unwrap();
        assert!(matches!(construction_d(8, &d1, &d2), Err(Error::Structure(_))));
    }
}
