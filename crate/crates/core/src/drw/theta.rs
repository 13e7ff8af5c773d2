//! The comparison with `H^d` of the lifted torus: top forms become Laurent
//! monomials `c X^{a} dlog X` with `a_i = N_i p - 1` (stored as exponents of
//! `X^{a} dX_1...dX_d`), and the Cartier operator becomes a trace.

use std::collections::BTreeMap;
use std::fmt;

use crate::drw::form::TopForm;
use crate::drw::profile::WeightProfile;
use crate::error::{Error, Result};
use crate::field::{valuation_p, Field, GaloisField};
use crate::linalg::inv_mod;
use crate::witt::WittVector;

/// A finite sum `sum c_a X^a dX_1 ∧ ... ∧ dX_d` with `c_a ∈ W_n(k)`, taken
/// modulo exact forms. Exponents are nonnegative.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyForm {
    field: Field,
    n: usize,
    d: usize,
    terms: BTreeMap<Vec<u64>, WittVector>,
}

impl PolyForm {
    pub fn zero(field: &Field, n: usize, d: usize) -> PolyForm {
        PolyForm { field: field.clone(), n, d, terms: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u64>, &WittVector)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u64>, c: WittVector) {
        assert_eq!(exps.len(), self.d);
        assert_eq!(c.len(), self.n);
        if c.is_zero() {
            return;
        }
        let s = match self.terms.remove(&exps) {
            Some(old) => &old + &c,
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(exps, s);
        }
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.neg());
        }
        out
    }

    /// Whether the form is exact: `c_a ∈ p^{e(a)} W_n` with
    /// `e(a) = min(n, min_i v_p(a_i + 1))`.
    pub fn is_exact(&self) -> bool {
        let p = self.field.characteristic();
        self.terms.iter().all(|(a, c)| c.valuation() >= exactness_level(p, self.n, a))
    }
}

fn exactness_level(p: u64, n: usize, a: &[u64]) -> usize {
    a.iter().map(|&x| valuation_p(x + 1, p) as usize).min().unwrap_or(0).min(n)
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, c)| {
                let mono: Vec<String> = a.iter().enumerate().map(|(i, e)| format!("X{}^{e}", i + 1)).collect();
                format!("{c}*{} dX", mono.join("*"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyForm[n={}, d={}]({self})", self.n, self.d)
    }
}

fn signed_unit(w: &WeightProfile) -> i64 {
    let modulus = (w.p as u128).pow(w.n as u32);
    let u = (w.unit() % modulus) as i64;
    w.sign() * u
}

/// `θ`: the basic form with weight `N / p^{n-1}` goes to
/// `± (prod h'_j) γ X^{Np - 1} dX`, where `γ = σ^n(β)` for integral weights
/// and `γ = σ^{n+v_1}(α)` (extended by zero coordinates to `W_n`) otherwise.
pub fn theta(f: &TopForm) -> Result<PolyForm> {
    let (k, n, d) = (f.field(), f.n(), f.d());
    let p = f.p();
    let mut out = PolyForm::zero(k, n, d);
    for (w, c) in f.basic_terms() {
        let gamma = if w.is_integral() {
            c.sigma(n as i64)
        } else {
            c.pad(n).sigma(n as i64 + w.v[0] as i64)
        };
        let exps = w
            .numerators
            .iter()
            .map(|&x| x.checked_mul(p).map(|y| y - 1))
            .collect::<Option<Vec<u64>>>()
            .ok_or_else(|| Error::InvalidWeight("exponent overflow".into()))?;
        out.add_term(exps, gamma.mul_int(signed_unit(&w)));
    }
    Ok(out)
}

/// The trace of the lifted Frobenius `X -> X^p`: `c X^{λ + pμ} dX` maps to
/// `σ^{-1}(c) X^μ dX` when every `λ_i = p - 1`, and to zero otherwise.
pub fn trace_lift(g: &PolyForm) -> PolyForm {
    let p = g.field.characteristic();
    let mut out = PolyForm::zero(&g.field, g.n, g.d);
    for (a, c) in &g.terms {
        if a.iter().all(|&x| x % p == p - 1) {
            out.add_term(a.iter().map(|&x| x / p).collect(), c.sigma(-1));
        }
    }
    out
}

/// Recovers a top form from `g` modulo exact forms. Each monomial is solved on
/// its own: the term at `X^{a} dX` with `e = min(n, v_p(a+1)) >= 1` comes from
/// the basic form of weight `(a+1)/p^n`, whose coefficient is determined modulo
/// `p^e` (the exact part of the term is dropped). The result is checked by
/// applying `θ` again.
pub fn theta_inverse(g: &PolyForm) -> Result<TopForm> {
    let (k, n, d) = (&g.field, g.n, g.d);
    let p = k.characteristic();
    let modulus = p.pow(n as u32);
    let mut out = TopForm::zero(k, n, d);
    for (a, c) in &g.terms {
        let e = exactness_level(p, n, a);
        if e == 0 {
            continue;
        }
        let nums: Vec<u64> = a.iter().map(|&x| (x + 1) / p).collect();
        let w = WeightProfile::new(p, n, &nums)?;
        debug_assert_eq!(w.is_integral(), e == n);
        let su = signed_unit(&w).rem_euclid(modulus as i64) as u64;
        let inv = inv_mod(su, modulus).ok_or_else(|| Error::Consistency("weight unit not invertible".into()))?;
        let scaled = c.mul_int(inv as i64);
        let coeff = scaled.truncate(e).sigma(-(e as i64));
        debug_assert_eq!(coeff.len(), w.coeff_len());
        out.add_term(nums, coeff);
    }
    let back = theta(&out)?;
    if !back.sub(g).is_exact() {
        return Err(Error::Consistency(format!("θ(θ^{{-1}}(g)) differs from g by a non-exact form: g = {g}")));
    }
    Ok(out)
}

/// The Cartier operator through the comparison: `θ^{-1} ∘ trace ∘ θ`.
pub fn cartier_prime(f: &TopForm) -> Result<TopForm> {
    theta_inverse(&trace_lift(&theta(f)?))
}

/// Whether two forms are over the same field and level.
pub fn same_shape(a: &PolyForm, b: &PolyForm) -> bool {
    GaloisField::same(&a.field, &b.field) && a.n == b.n && a.d == b.d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drw::ops::cartier;

    #[test]
    fn theta_inverse_inverts_theta() {
        let k = GaloisField::default_for(2, 2).unwrap();
        for n in 1..=3usize {
            for a in 1..=8u64 {
                for b in 1..=8u64 {
                    let w = WeightProfile::new(2, n, &[a, b]).unwrap();
                    let c = WittVector::from_codes(&k, &[3, 1, 2][..w.coeff_len()]).unwrap();
                    let f = TopForm::basic(&k, n, &[a, b], c).unwrap();
                    assert_eq!(theta_inverse(&theta(&f).unwrap()).unwrap(), f);
                }
            }
        }
    }

    #[test]
    fn trace_route_agrees_with_factorwise() {
        let k = GaloisField::default_for(3, 1).unwrap();
        for a in 1..=9u64 {
            for b in 1..=9u64 {
                let w = WeightProfile::new(3, 2, &[a, b]).unwrap();
                let c = WittVector::from_int(&k, 4, w.coeff_len());
                let f = TopForm::basic(&k, 2, &[a, b], c).unwrap();
                assert_eq!(cartier_prime(&f).unwrap(), cartier(&f).unwrap(), "weight ({a},{b})");
            }
        }
    }

    #[test]
    fn non_exact_difference_is_reported() {
        let k = GaloisField::default_for(2, 1).unwrap();
        let mut g = PolyForm::zero(&k, 2, 1);
        g.add_term(vec![1], WittVector::one(&k, 2));
        assert!(!g.is_exact());
        let mut h = PolyForm::zero(&k, 2, 1);
        h.add_term(vec![0], WittVector::one(&k, 2));
        assert!(h.is_exact());
    }
}
