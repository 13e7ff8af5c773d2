//! Exhaustive agreement checks between the three Cartier constructions.

use rayon::prelude::*;
use serde::Serialize;

use crate::drw::form::TopForm;
use crate::drw::ops::{cartier, cartier_prime_table, frobenius_form, restriction_form};
use crate::drw::profile::WeightProfile;
use crate::drw::theta::cartier_prime;
use crate::error::{usage, Result};
use crate::field::{Field, FieldElem, GaloisField};
use crate::witt::{WittVector, MAX_LEN};

/// `V^j[c]` for `j < len` and nonzero `c`: additively generates `W_len(k)`.
pub fn coefficient_span(field: &Field, len: usize) -> Vec<WittVector> {
    let mut out = Vec::new();
    for j in 0..len {
        for c in field.elements().filter(|&c| c != FieldElem::ZERO) {
            let mut coords = vec![FieldElem::ZERO; len];
            coords[j] = c;
            out.push(WittVector::new(field, coords).expect("bounded length"));
        }
    }
    out
}

/// The fields swept for characteristic `p`: the prime field and its quadratic
/// extension.
pub fn sweep_fields(p: u64) -> Result<Vec<Field>> {
    Ok(vec![GaloisField::default_for(p, 1)?, GaloisField::default_for(p, 2)?])
}

/// All numerator tuples in `[1, max]^d`, lexicographically.
pub fn numerator_tuples(d: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=max).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Counterexample {
    pub field: String,
    pub form: String,
    pub cartier: String,
    pub cartier_prime: String,
    pub cartier_prime_table: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CompatReport {
    pub p: u64,
    pub n: usize,
    pub d: usize,
    pub max_numerator: u64,
    pub fields: Vec<String>,
    pub weights: usize,
    pub forms_checked: usize,
    pub nonzero_outputs: usize,
    pub failures: Vec<Counterexample>,
}

impl CompatReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn field_label(k: &Field) -> String {
    format!("F_{}", k.size())
}

fn check_bounds(p: u64, n: usize, d: usize, max_numerator: u64) -> Result<()> {
    if !crate::field::is_prime(p) {
        return usage(format!("{p} is not prime"));
    }
    if n == 0 || n >= MAX_LEN || d == 0 || d > 4 || max_numerator == 0 {
        return usage(format!("need 1 <= n < {MAX_LEN}, 1 <= d <= 4, max_numerator >= 1"));
    }
    match max_numerator.checked_pow(d as u32) {
        Some(c) if c <= 1_000_000 => Ok(()),
        _ => usage("sweep too large: max_numerator^d must not exceed 10^6"),
    }
}

fn render(r: &Result<TopForm>) -> String {
    match r {
        Ok(f) => f.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

/// Checks `cartier = cartier_prime = cartier_prime_table` on every basic form
/// with numerators in `[1, max_numerator]^d` and coefficients in
/// [`coefficient_span`] over each of `fields`; also checks that nonzero
/// outputs have weight `N / p`.
pub fn verify_compatibility_over(p: u64, n: usize, d: usize, max_numerator: u64, fields: &[Field]) -> Result<CompatReport> {
    check_bounds(p, n, d, max_numerator)?;
    if fields.iter().any(|k| k.characteristic() != p) {
        return usage("sweep fields must have characteristic p");
    }
    let tuples = numerator_tuples(d, max_numerator);
    let per_weight: Vec<(usize, usize, Vec<Counterexample>)> = tuples
        .par_iter()
        .map(|nums| {
            let w = WeightProfile::new(p, n, nums).expect("positive numerators");
            let (mut checked, mut nonzero, mut fails) = (0, 0, Vec::new());
            for k in fields {
                for c in coefficient_span(k, w.coeff_len()) {
                    let f = TopForm::basic(k, n, nums, c).expect("coefficient of matching length");
                    let a = cartier(&f);
                    let b = cartier_prime(&f);
                    let t = cartier_prime_table(&f);
                    checked += 1;
                    let agree = matches!((&a, &b, &t), (Ok(x), Ok(y), Ok(z)) if x == y && y == z);
                    let weight_ok = match &a {
                        Ok(x) => x.terms().all(|(m, _)| m.iter().zip(nums).all(|(&o, &i)| o * p == i)),
                        Err(_) => false,
                    };
                    if agree && !a.as_ref().map(TopForm::is_zero).unwrap_or(true) {
                        nonzero += 1;
                    }
                    if !(agree && weight_ok) {
                        fails.push(Counterexample {
                            field: field_label(k),
                            form: f.to_string(),
                            cartier: render(&a),
                            cartier_prime: render(&b),
                            cartier_prime_table: render(&t),
                        });
                    }
                }
            }
            (checked, nonzero, fails)
        })
        .collect();
    let mut report = CompatReport {
        p,
        n,
        d,
        max_numerator,
        fields: fields.iter().map(field_label).collect(),
        weights: tuples.len(),
        forms_checked: 0,
        nonzero_outputs: 0,
        failures: Vec::new(),
    };
    for (c, z, f) in per_weight {
        report.forms_checked += c;
        report.nonzero_outputs += z;
        report.failures.extend(f);
    }
    Ok(report)
}

/// [`verify_compatibility_over`] on the fields of [`sweep_fields`].
pub fn verify_compatibility(p: u64, n: usize, d: usize, max_numerator: u64) -> Result<CompatReport> {
    verify_compatibility_over(p, n, d, max_numerator, &sweep_fields(p)?)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RelationsReport {
    pub p: u64,
    pub n: usize,
    pub d: usize,
    pub forms_checked: usize,
    /// `C ∘ F = R` on level `n + 1` forms.
    pub cf_eq_r_failures: Vec<String>,
    /// `C` kills forms led by `dV^{n-1}`.
    pub cartier_kill_failures: Vec<String>,
    /// `R` kills a basic form of level `n + 1` exactly when it lies in `V^n + dV^n`.
    pub restriction_kill_failures: Vec<String>,
}

impl RelationsReport {
    pub fn passed(&self) -> bool {
        self.cf_eq_r_failures.is_empty() && self.cartier_kill_failures.is_empty() && self.restriction_kill_failures.is_empty()
    }
}

/// Exhaustive check of `CF = R`, `C(dV^{n-1}…) = 0` and `Ker R = V^n + dV^n` on
/// basic forms of level `n + 1` (resp. `n`) with numerators up to
/// `max_numerator`, over the sweep fields.
pub fn verify_relations(p: u64, n: usize, d: usize, max_numerator: u64) -> Result<RelationsReport> {
    check_bounds(p, n + 1, d, max_numerator)?;
    let fields = sweep_fields(p)?;
    let tuples = numerator_tuples(d, max_numerator);
    let parts: Vec<(usize, Vec<String>, Vec<String>, Vec<String>)> = tuples
        .par_iter()
        .map(|nums| {
            let (mut checked, mut cfr, mut ck, mut rk) = (0, Vec::new(), Vec::new(), Vec::new());
            let hi = WeightProfile::new(p, n + 1, nums).expect("positive numerators");
            let lo = WeightProfile::new(p, n, nums).expect("positive numerators");
            for k in &fields {
                for c in coefficient_span(k, hi.coeff_len()) {
                    checked += 1;
                    // Ker R = V^n + dV^n: the coefficient dies under R, or dV^n leads
                    let expect_zero = hi.v[0] == -(n as i32) || c.valuation() + 1 >= c.len();
                    let f = TopForm::basic(k, n + 1, nums, c).expect("matching length");
                    let lhs = frobenius_form(&f).and_then(|g| cartier(&g));
                    let rhs = restriction_form(&f);
                    match (&lhs, &rhs) {
                        (Ok(a), Ok(b)) if a == b => {}
                        _ => cfr.push(format!("{} on {f}: C(F f) = {}, R f = {}", field_label(k), render(&lhs), render(&rhs))),
                    }
                    match &rhs {
                        Ok(r) if r.is_zero() == expect_zero => {}
                        _ => rk.push(format!("{} on {f}: R f = {}", field_label(k), render(&rhs))),
                    }
                }
                if lo.v[0] == 1 - n as i32 {
                    for c in coefficient_span(k, lo.coeff_len()) {
                        checked += 1;
                        let f = TopForm::basic(k, n, nums, c).expect("matching length");
                        match cartier(&f) {
                            Ok(g) if g.is_zero() => {}
                            other => ck.push(format!("{} on {f}: C f = {}", field_label(k), render(&other))),
                        }
                    }
                }
            }
            (checked, cfr, ck, rk)
        })
        .collect();
    let mut report = RelationsReport {
        p,
        n,
        d,
        forms_checked: 0,
        cf_eq_r_failures: vec![],
        cartier_kill_failures: vec![],
        restriction_kill_failures: vec![],
    };
    for (c, a, b, r) in parts {
        report.forms_checked += c;
        report.cf_eq_r_failures.extend(a);
        report.cartier_kill_failures.extend(b);
        report.restriction_kill_failures.extend(r);
    }
    Ok(report)
}
