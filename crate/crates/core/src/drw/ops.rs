//! Cartier, Frobenius and restriction on top forms.

use crate::drw::form::{Factor, Placement, TopForm};
use crate::drw::profile::WeightProfile;
use crate::error::{usage, Result};
use crate::witt::WittVector;

/// The Cartier operator, factor by factor: `C(F^v d[X]^h) = F^{v-1} d[X]^h`
/// (with `F^{-1} d = dV`), `C(dV^m) = dV^{m+1}`, and `C(λ ω) = σ^{-1}(λ) C(ω)`;
/// the coefficient inside the leading `dV^m` becomes its restriction. The
/// product is then renormalized by the general assembler.
pub fn cartier(f: &TopForm) -> Result<TopForm> {
    let (k, n, d) = (f.field(), f.n(), f.d());
    let mut acc = TopForm::zero(k, n, d);
    for (w, c) in f.basic_terms() {
        if w.v[0] == 1 - n as i32 {
            continue;
        }
        let factors: Vec<Factor> = Factor::of_profile(&w)
            .into_iter()
            .map(|fac| match fac {
                Factor::DV { depth, var, hprime } => Factor::DV { depth: depth + 1, var, hprime },
                Factor::Fd { v: 0, var, hprime } => Factor::DV { depth: 1, var, hprime },
                Factor::Fd { v, var, hprime } => Factor::Fd { v: v - 1, var, hprime },
            })
            .collect();
        let placement = if w.is_integral() {
            Placement::scalar(c.sigma(-1))
        } else {
            if c.len() < 2 {
                continue;
            }
            Placement::inner(0, c.restriction()?)
        };
        acc = acc.add(&TopForm::assemble(k, n, &factors, placement)?)?;
    }
    Ok(acc)
}

/// The Cartier operator by the explicit case table on basic forms:
/// (1) zero when `v_1 = 1 - n`; (2) `α`-type goes to weight `h/p` with
/// coefficient `R(α)`; (3) `β`-type goes to weight `h/p`, staying `β`-type with
/// `σ^{-1}(β)` when `s = 0`, and otherwise becoming `σ^{-1}(β) · dV[X_{i_1}]...`,
/// rewritten through the scalar rule.
pub fn cartier_prime_table(f: &TopForm) -> Result<TopForm> {
    let (k, n, d) = (f.field(), f.n(), f.d());
    let p = f.p();
    let mut acc = TopForm::zero(k, n, d);
    for (w, c) in f.basic_terms() {
        if w.v[0] == 1 - n as i32 {
            continue;
        }
        let nums: Vec<u64> = w.numerators.iter().map(|&x| x / p).collect();
        let term = if !w.is_integral() {
            TopForm::basic(k, n, &nums, c.restriction()?)?
        } else if w.s == 0 {
            TopForm::basic(k, n, &nums, c.sigma(-1))?
        } else {
            let shape = WeightProfile::new(p, n, &nums)?;
            debug_assert_eq!(shape.v[0], -1);
            TopForm::basic(k, n, &nums, WittVector::one(k, n - 1))?.scalar_canonicalize(&c.sigma(-1))?
        };
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// `F: W_{n+1}Ω^d -> W_nΩ^d`, factor by factor: `F dV^m = dV^{m-1}` (with
/// `F dV = d`), `F F^v d = F^{v+1} d`, and `F` on the scalar.
pub fn frobenius_form(f: &TopForm) -> Result<TopForm> {
    let (k, n1, d) = (f.field(), f.n(), f.d());
    if n1 < 2 {
        return usage("Frobenius needs a form of level >= 2");
    }
    let n = n1 - 1;
    let mut acc = TopForm::zero(k, n, d);
    for (w, c) in f.basic_terms() {
        let factors: Vec<Factor> = Factor::of_profile(&w)
            .into_iter()
            .map(|fac| match fac {
                Factor::DV { depth: 1, var, hprime } => Factor::Fd { v: 0, var, hprime },
                Factor::DV { depth, var, hprime } => Factor::DV { depth: depth - 1, var, hprime },
                Factor::Fd { v, var, hprime } => Factor::Fd { v: v + 1, var, hprime },
            })
            .collect();
        let placement = if w.is_integral() {
            Placement::scalar(c.frobenius()?)
        } else if w.v[0] == -1 {
            // F dV(α[X]^h) = d(α [X]^h) = α d[X]^h
            Placement::scalar(c)
        } else {
            Placement::inner(0, c)
        };
        acc = acc.add(&TopForm::assemble(k, n, &factors, placement)?)?;
    }
    Ok(acc)
}

/// `R: W_{n+1}Ω^d -> W_nΩ^d`: the factors are kept (so `dV^n` dies) and `R` is
/// applied to the coefficient.
pub fn restriction_form(f: &TopForm) -> Result<TopForm> {
    let (k, n1, d) = (f.field(), f.n(), f.d());
    if n1 < 2 {
        return usage("restriction needs a form of level >= 2");
    }
    let n = n1 - 1;
    let mut acc = TopForm::zero(k, n, d);
    for (w, c) in f.basic_terms() {
        let factors = Factor::of_profile(&w);
        if !w.is_integral() && (-w.v[0]) as usize >= n {
            continue;
        }
        let placement = if w.is_integral() {
            Placement::scalar(c.restriction()?)
        } else {
            Placement::inner(0, c.restriction()?)
        };
        acc = acc.add(&TopForm::assemble(k, n, &factors, placement)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaloisField;

    #[test]
    fn cartier_of_integral_unit_weight() {
        // C(d[X]) at level 1 over F_2: weight 1 = p^0, v = 0 -> dV[X] at level 1 = 0
        let k = GaloisField::default_for(2, 1).unwrap();
        let f = TopForm::parse(&k, 1, 1, "W{1} * d[X1]^1").unwrap();
        assert!(cartier(&f).unwrap().is_zero());
        // C(X d X) = C(d[X]^2 / 2)... at level 1, weight 2 -> weight 1
        let g = TopForm::basic(&k, 1, &[2], WittVector::one(&k, 1)).unwrap();
        let cg = cartier(&g).unwrap();
        assert_eq!(cg, TopForm::basic(&k, 1, &[1], WittVector::one(&k, 1)).unwrap());
    }

    #[test]
    fn table_matches_factorwise_on_small_domain() {
        let k = GaloisField::default_for(3, 1).unwrap();
        for n in 1..=3 {
            for a in 1..=9u64 {
                for b in 1..=9u64 {
                    let w = WeightProfile::new(3, n, &[a, b]).unwrap();
                    let c = WittVector::from_int(&k, 2, w.coeff_len());
                    let f = TopForm::basic(&k, n, &[a, b], c).unwrap();
                    assert_eq!(cartier(&f).unwrap(), cartier_prime_table(&f).unwrap(), "n={n} weight=({a},{b})");
                }
            }
        }
    }

    #[test]
    fn cartier_after_frobenius_is_restriction() {
        let k = GaloisField::default_for(2, 2).unwrap();
        for a in 1..=8u64 {
            for b in 1..=8u64 {
                let w = WeightProfile::new(2, 3, &[a, b]).unwrap();
                let c = WittVector::from_codes(&k, &[2, 1, 3][..w.coeff_len()]).unwrap();
                let f = TopForm::basic(&k, 3, &[a, b], c).unwrap();
                let lhs = cartier(&frobenius_form(&f).unwrap()).unwrap();
                let rhs = restriction_form(&f).unwrap();
                assert_eq!(lhs, rhs, "weight=({a},{b})");
            }
        }
    }
}
