use num_traits::ToPrimitive;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::matrix::RMatrix;

use super::QuantizerSpec;

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(super) fn quantize(spec: &QuantizerSpec, generator: &RMatrix, y: &[f64]) -> Result<Vec<f64>> {
    match spec {
        QuantizerSpec::Integer { .. } => Ok(y.iter().map(|v| v.round()).collect()),
        QuantizerSpec::Checkerboard { .. } => Ok(dn(y)),
        QuantizerSpec::E8 => Ok(e8(y)),
        QuantizerSpec::Scaled { base, k } => {
            let base_gen = generator.scale(&k.recip());
            let k = to_f64(k);
            let inner: Vec<f64> = y.iter().map(|v| v / k).collect();
            let q = quantize(base, &base_gen, &inner)?;
            Ok(q.into_iter().map(|v| v * k).collect())
        }
        QuantizerSpec::Product { blocks } => {
            let mut out = Vec::with_capacity(y.len());
            let mut start = 0;
            for b in blocks {
                let d = b.dim().unwrap_or(0);
                let sub = if generator.rows() == y.len() {
                    generator.block(start, d)
                } else {
                    RMatrix::identity(d)
                };
                out.extend(quantize(b, &sub, &y[start..start + d])?);
                start += d;
            }
            Ok(out)
        }
        QuantizerSpec::Trellis(code) => trellis(code, y),
        QuantizerSpec::BruteForce | QuantizerSpec::Hypercube { .. } => {
            let exact: Vec<Rational> = y
                .iter()
                .map(|&v| Rational::from_float(v).ok_or_else(|| Error::Parameter("non-finite input".into())))
                .collect::<Result<_>>()?;
            Ok(spec.quantize(generator, &exact)?.iter().map(to_f64).collect())
        }
    }
}

/// Round every coordinate; on odd parity re-round the worst coordinate the
/// other way.
fn dn(y: &[f64]) -> Vec<f64> {
    let mut r: Vec<f64> = y.iter().map(|v| v.round()).collect();
    let sum: f64 = r.iter().sum();
    if (sum as i64).rem_euclid(2) == 1 {
        let (idx, _) = y
            .iter()
            .zip(&r)
            .map(|(v, q)| (v - q).abs())
            .enumerate()
            .fold((0, -1.0), |acc, (i, e)| if e > acc.1 { (i, e) } else { acc });
        r[idx] += if y[idx] > r[idx] { 1.0 } else { -1.0 };
    }
    r
}

fn e8(y: &[f64]) -> Vec<f64> {
    let a = dn(y);
    let shifted: Vec<f64> = y.iter().map(|v| v - 0.5).collect();
    let b: Vec<f64> = dn(&shifted).into_iter().map(|v| v + 0.5).collect();
    let d = |p: &[f64]| y.iter().zip(p).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
    if d(&b) < d(&a) {
        b
    } else {
        a
    }
}

fn trellis(code: &super::TrellisCode, y: &[f64]) -> Result<Vec<f64>> {
    let taps = code.taps()?;
    let k = taps.len();
    let m = code.memory()?;
    let info = code.info_len()?;
    let order: Vec<usize> = code.order.clone().unwrap_or_else(|| (0..code.blocklen).collect());
    let mut target = vec![0.0; code.blocklen];
    for (p, &t) in order.iter().enumerate() {
        target[t] = y[p];
    }
    let n_states = 1usize << m;
    let mask = n_states - 1;
    let mut metric = vec![f64::INFINITY; n_states];
    let mut paths: Vec<Vec<f64>> = vec![Vec::new(); n_states];
    metric[0] = 0.0;
    for s in 0..code.blocklen / k {
        let inputs: &[u64] = if s < info { &[0, 1] } else { &[0] };
        let mut next_metric = vec![f64::INFINITY; n_states];
        let mut next_paths: Vec<Vec<f64>> = vec![Vec::new(); n_states];
        for state in 0..n_states {
            if !metric[state].is_finite() {
                continue;
            }
            for &u in inputs {
                let reg = ((state as u64) << 1) | u;
                let mut cost = metric[state];
                let mut path = paths[state].clone();
                for &t in &taps {
                    let bit = f64::from((reg & t).count_ones() % 2);
                    let v = target[path.len()];
                    let lifted = bit + 2.0 * ((v - bit) / 2.0).round();
                    cost += (v - lifted) * (v - lifted);
                    path.push(lifted);
                }
                let ns = (reg as usize) & mask;
                if cost < next_metric[ns] {
                    next_metric[ns] = cost;
                    next_paths[ns] = path;
                }
            }
        }
        metric = next_metric;
        paths = next_paths;
    }
    let best = &paths[0];
    Ok(order.iter().map(|&t| best[t]).collect())
}
