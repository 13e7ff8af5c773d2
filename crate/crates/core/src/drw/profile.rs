use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::valuation_p;

/// The weight function `h_i = N_i / p^{n-1}` of a basic top form together with
/// its derived data, in the ordering `i_1, ..., i_d` by `(v_p(h_i), i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightProfile {
    pub p: u64,
    pub n: usize,
    pub numerators: Vec<u64>,
    /// `order[j] = i_{j+1}` (0-based variable indices).
    pub order: Vec<usize>,
    /// `v_j = v_p(h_{i_j})`.
    pub v: Vec<i32>,
    /// `h'_j = h_{i_j} p^{-v_j}`.
    pub hprime: Vec<u64>,
    /// Number of negative valuations.
    pub r: usize,
    /// Number of zero valuations.
    pub s: usize,
}

impl WeightProfile {
    pub fn new(p: u64, n: usize, numerators: &[u64]) -> Result<WeightProfile> {
        if numerators.is_empty() {
            return Err(Error::InvalidWeight("at least one variable is required".into()));
        }
        if n == 0 {
            return Err(Error::InvalidWeight("level n must be >= 1".into()));
        }
        if let Some(i) = numerators.iter().position(|&x| x == 0) {
            return Err(Error::InvalidWeight(format!("weight of X{} vanishes", i + 1)));
        }
        let vals: Vec<i32> = numerators.iter().map(|&x| valuation_p(x, p) as i32 - (n as i32 - 1)).collect();
        let mut order: Vec<usize> = (0..numerators.len()).collect();
        order.sort_by_key(|&i| (vals[i], i));
        let v: Vec<i32> = order.iter().map(|&i| vals[i]).collect();
        let hprime = order
            .iter()
            .map(|&i| numerators[i] / p.pow(valuation_p(numerators[i], p)))
            .collect();
        let r = v.iter().filter(|&&x| x < 0).count();
        let s = v.iter().filter(|&&x| x == 0).count();
        Ok(WeightProfile { p, n, numerators: numerators.to_vec(), order, v, hprime, r, s })
    }

    pub fn d(&self) -> usize {
        self.numerators.len()
    }

    /// Whether the weight is integral, i.e. the form is of `β`-type.
    pub fn is_integral(&self) -> bool {
        self.r == 0
    }

    /// Length of the coefficient ring: `n + v_1` for non-integral weights, `n` otherwise.
    pub fn coeff_len(&self) -> usize {
        if self.is_integral() {
            self.n
        } else {
            (self.n as i32 + self.v[0]) as usize
        }
    }

    /// Sign of the permutation `j -> i_j`.
    pub fn sign(&self) -> i64 {
        let mut inversions = 0;
        for a in 0..self.order.len() {
            for b in a + 1..self.order.len() {
                if self.order[a] > self.order[b] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `prod_j h'_j` as an integer.
    pub fn unit(&self) -> u128 {
        self.hprime.iter().map(|&h| h as u128).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_single_variable() {
        let w = WeightProfile::new(2, 2, &[2]).unwrap();
        assert_eq!((w.v.clone(), w.hprime.clone(), w.r), (vec![0], vec![1], 0));
    }

    #[test]
    fn mixed_profile() {
        let w = WeightProfile::new(2, 2, &[1, 6]).unwrap();
        assert_eq!(w.order, vec![0, 1]);
        assert_eq!(w.v, vec![-1, 0]);
        assert_eq!(w.hprime, vec![1, 3]);
        assert_eq!(w.r, 1);
        assert_eq!(w.coeff_len(), 1);
    }

    #[test]
    fn ties_broken_by_index() {
        let w = WeightProfile::new(2, 2, &[2, 2]).unwrap();
        assert_eq!(w.order, vec![0, 1]);
        let w = WeightProfile::new(3, 2, &[9, 1]).unwrap();
        assert_eq!(w.order, vec![1, 0]);
        assert_eq!(w.sign(), -1);
    }

    #[test]
    fn zero_weight_rejected() {
        assert!(matches!(WeightProfile::new(2, 2, &[0, 1]), Err(Error::InvalidWeight(_))));
    }
}
