use std::cmp::Ordering;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{rat, round_half_down, Rational};
use crate::error::{Error, Result};

/// A zero-tail terminated binary feedforward convolutional code, viewed as
/// the lattice `C + 2Z^n`.
///
/// Polynomials are octal strings with the least significant bit holding the
/// `D^0` coefficient, so `"3"` is `1 + D`. Trellis position `s*k + j` carries
/// output `j` of time step `s`. `order[p]` names the trellis position stored
/// at output coordinate `p`; it defaults to the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrellisCode {
    pub polys: Vec<String>,
    pub blocklen: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

struct Survivor {
    metric: Rational,
    values: Vec<Rational>,
}

impl TrellisCode {
    pub fn new(polys: &[&str], blocklen: usize) -> Self {
        Self {
            polys: polys.iter().map(|p| p.to_string()).collect(),
            blocklen,
            order: None,
        }
    }

    pub fn with_order(mut self, order: Vec<usize>) -> Self {
        self.order = Some(order);
        self
    }

    pub fn taps(&self) -> Result<Vec<u64>> {
        if self.polys.is_empty() {
            return Err(Error::Parameter("no generator polynomials".into()));
        }
        self.polys
            .iter()
            .map(|p| {
                u64::from_str_radix(p.trim(), 8)
                    .map_err(|_| Error::Parameter(format!("bad octal polynomial {p:?}")))
            })
            .collect()
    }

    pub fn memory(&self) -> Result<usize> {
        let taps = self.taps()?;
        Ok(taps
            .iter()
            .map(|&t| if t == 0 { 0 } else { 63 - t.leading_zeros() as usize })
            .max()
            .unwrap_or(0))
    }

    /// Number of free input bits after reserving the zero tail.
    pub fn info_len(&self) -> Result<usize> {
        let k = self.taps()?.len();
        let m = self.memory()?;
        if self.blocklen % k != 0 {
            return Err(Error::Parameter(format!(
                "block length {} is not a multiple of {k} outputs",
                self.blocklen
            )));
        }
        let steps = self.blocklen / k;
        if steps < m {
            return Err(Error::Parameter(format!(
                "block length {} cannot hold a memory-{m} termination",
                self.blocklen
            )));
        }
        if let Some(order) = &self.order {
            let mut seen = vec![false; self.blocklen];
            if order.len() != self.blocklen || order.iter().any(|&p| p >= self.blocklen) {
                return Err(Error::Parameter("coordinate order is not a permutation".into()));
            }
            for &p in order {
                if std::mem::replace(&mut seen[p], true) {
                    return Err(Error::Parameter("coordinate order repeats an index".into()));
                }
            }
        }
        Ok(steps - m)
    }

    fn order_vec(&self) -> Vec<usize> {
        self.order.clone().unwrap_or_else(|| (0..self.blocklen).collect())
    }

    /// Block generator: one row per free input bit, in trellis coordinates.
    pub fn block_generator(&self) -> Result<Vec<Vec<u8>>> {
        let taps = self.taps()?;
        let k = taps.len();
        let m = self.memory()?;
        let info = self.info_len()?;
        let mut rows = Vec::with_capacity(info);
        for i in 0..info {
            let mut row = vec![0u8; self.blocklen];
            for d in 0..=m {
                for (j, &t) in taps.iter().enumerate() {
                    if (t >> d) & 1 == 1 {
                        row[(i + d) * k + j] = 1;
                    }
                }
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Exact Viterbi search for the nearest point of `C + 2Z^n`.
    pub fn quantize(&self, y: &[Rational]) -> Result<Vec<Rational>> {
        if y.len() != self.blocklen {
            return Err(Error::Shape(format!(
                "trellis of length {} given a vector of length {}",
                self.blocklen,
                y.len()
            )));
        }
        let taps = self.taps()?;
        let k = taps.len();
        let m = self.memory()?;
        let info = self.info_len()?;
        let order = self.order_vec();
        let mut target = vec![Rational::zero(); self.blocklen];
        for (p, &t) in order.iter().enumerate() {
            target[t] = y[p].clone();
        }
        let steps = self.blocklen / k;
        let n_states = 1usize << m;
        let state_mask = n_states - 1;

        let mut survivors: Vec<Option<Survivor>> = (0..n_states).map(|_| None).collect();
        survivors[0] = Some(Survivor { metric: Rational::zero(), values: Vec::new() });
        for s in 0..steps {
            let inputs: &[u64] = if s < info { &[0, 1] } else { &[0] };
            let mut next: Vec<Option<Survivor>> = (0..n_states).map(|_| None).collect();
            for (state, surv) in survivors.iter().enumerate() {
                let Some(surv) = surv else { continue };
                for &u in inputs {
                    // register holds u at bit 0, older inputs above it
                    let reg = ((state as u64) << 1) | u;
                    let mut metric = surv.metric.clone();
                    let mut values = surv.values.clone();
                    for &t in &taps {
                        let bit = (reg & t).count_ones() as i64 % 2;
                        let v = &target[values.len()];
                        let b = rat(bit, 1);
                        let lifted = &b + Rational::from_integer(round_half_down(&((v - &b) / rat(2, 1)))) * rat(2, 1);
                        let d = v - &lifted;
                        metric += &d * &d;
                        values.push(lifted);
                    }
                    let ns = (reg as usize) & state_mask;
                    let cand = Survivor { metric, values };
                    let replace = match &next[ns] {
                        None => true,
                        Some(cur) => self.prefers(&cand, cur, &order).is_lt(),
                    };
                    if replace {
                        next[ns] = Some(cand);
                    }
                }
            }
            survivors = next;
        }
        let best = survivors[0].take().expect("terminated trellis ends in state zero");
        Ok(order.iter().map(|&t| best.values[t].clone()).collect())
    }

    /// Orders two survivors of equal length: smaller metric, then the
    /// lexicographically smaller vector in output coordinates.
    fn prefers(&self, a: &Survivor, b: &Survivor, order: &[usize]) -> Ordering {
        a.metric.cmp(&b.metric).then_with(|| {
            let len = a.values.len();
            order
                .iter()
                .filter(|&&t| t < len)
                .map(|&t| a.values[t].cmp(&b.values[t]))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rvec;

    #[test]
    fn block_generator_of_memory_one_code() {
        let code = TrellisCode::new(&["1", "3"], 8);
        assert_eq!(
            code.block_generator().unwrap(),
            vec![
                vec![1, 1, 0, 1, 0, 0, 0, 0],
                vec![0, 0, 1, 1, 0, 1, 0, 0],
                vec![0, 0, 0, 0, 1, 1, 0, 1],
            ]
        );
    }

    #[test]
    fn memory_zero_code_is_identity() {
        let code = TrellisCode::new(&["1"], 4);
        let rows = code.block_generator().unwrap();
        assert_eq!(rows.len(), 4);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.iter().filter(|&&b| b == 1).count(), 1);
            assert_eq!(r[i], 1);
        }
    }

    #[test]
    fn bad_configs() {
        assert!(TrellisCode::new(&["1", "3"], 7).info_len().is_err());
        assert!(TrellisCode::new(&["17", "13"], 4).info_len().is_err());
        assert!(TrellisCode::new(&["9"], 4).taps().is_err());
    }

    #[test]
    fn zero_and_lattice_points_are_fixed() {
        let code = TrellisCode::new(&["1", "3"], 8);
        assert_eq!(code.quantize(&rvec(&[0; 8])).unwrap(), rvec(&[0; 8]));
        let p = rvec(&[1, 1, 2, 1, -2, 0, 0, 2]);
        assert_eq!(code.quantize(&p).unwrap(), p);
    }
}
