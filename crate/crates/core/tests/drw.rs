use std::collections::BTreeMap;

use drwk::drw::verify::{coefficient_span, numerator_tuples};
use drwk::drw::{
    cartier, cartier_prime, cartier_prime_table, frobenius_form, restriction_form, theta, theta_inverse, trace_lift,
    verify_compatibility, PolyForm, TopForm, WeightProfile,
};
use drwk::witt::WittVector;
use drwk::{Field, FieldElem, GaloisField};
use proptest::prelude::*;

fn field(p: u64, m: usize) -> Field {
    GaloisField::default_for(p, m).unwrap()
}

fn w(k: &Field, codes: &[u64]) -> WittVector {
    WittVector::from_codes(k, codes).unwrap()
}

#[test]
fn weight_profiles() {
    let a = WeightProfile::new(2, 2, &[2]).unwrap();
    assert_eq!((a.v, a.hprime, a.r), (vec![0], vec![1], 0));
    let b = WeightProfile::new(2, 2, &[1, 6]).unwrap();
    assert_eq!((b.order, b.v, b.hprime, b.r), (vec![0, 1], vec![-1, 0], vec![1, 3], 1));
    let c = WeightProfile::new(2, 2, &[2, 2]).unwrap();
    assert_eq!(c.order, vec![0, 1]);
    assert!(WeightProfile::new(2, 2, &[0]).is_err());
}

#[test]
fn cartier_table_cases_at_level_two() {
    let k = field(2, 2);
    let alpha = w(&k, &[2]);
    let beta = w(&k, &[2, 3]);
    // -v_1 = n - 1: killed
    let f = TopForm::basic(&k, 2, &[1], alpha).unwrap();
    for c in [cartier(&f), cartier_prime(&f), cartier_prime_table(&f)] {
        assert!(c.unwrap().is_zero());
    }
    // v = 0: β d[X] -> σ^{-1}(β) dV[X] = dV(R(β)[X])
    let f = TopForm::basic(&k, 2, &[2], beta.clone()).unwrap();
    let want = TopForm::basic(&k, 2, &[1], beta.restriction().unwrap()).unwrap();
    for c in [cartier(&f), cartier_prime(&f), cartier_prime_table(&f)] {
        assert_eq!(c.unwrap(), want);
    }
    // v = 1: β F d[X] -> σ^{-1}(β) d[X]
    let f = TopForm::basic(&k, 2, &[4], beta.clone()).unwrap();
    let want = TopForm::basic(&k, 2, &[2], beta.sigma(-1)).unwrap();
    for c in [cartier(&f), cartier_prime(&f), cartier_prime_table(&f)] {
        assert_eq!(c.unwrap(), want);
    }
}

#[test]
fn theta_examples() {
    let k = field(2, 2);
    let b = k.generator();
    let f = TopForm::basic(&k, 1, &[1], WittVector::teichmuller(&k, b, 1)).unwrap();
    let g = theta(&f).unwrap();
    let terms: Vec<_> = g.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
    assert_eq!(terms, vec![(vec![1], WittVector::teichmuller(&k, k.mul(b, b), 1))]);
    // d = 2, n = 2: β d[X1] F d[X2], h = (1, 2)
    let beta = w(&k, &[2, 1]);
    let f = TopForm::basic(&k, 2, &[2, 4], beta.clone()).unwrap();
    let g = theta(&f).unwrap();
    let terms: Vec<_> = g.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
    assert_eq!(terms, vec![(vec![3, 7], beta.sigma(2))]);
}

#[test]
fn trace_lift_examples() {
    let k = field(2, 1);
    let mut g = PolyForm::zero(&k, 1, 1);
    g.add_term(vec![1], WittVector::one(&k, 1));
    g.add_term(vec![0], WittVector::one(&k, 1));
    g.add_term(vec![3], WittVector::one(&k, 1));
    let t: Vec<Vec<u64>> = trace_lift(&g).terms().map(|(e, _)| e.clone()).collect();
    assert_eq!(t, vec![vec![0], vec![1]]);
    let k = field(3, 1);
    let mut g = PolyForm::zero(&k, 1, 2);
    g.add_term(vec![2, 2], WittVector::one(&k, 1));
    g.add_term(vec![0, 0], WittVector::one(&k, 1));
    let t: Vec<Vec<u64>> = trace_lift(&g).terms().map(|(e, _)| e.clone()).collect();
    assert_eq!(t, vec![vec![0, 0]]);
}

#[test]
fn theta_inverse_round_trips_every_small_basic_form() {
    for p in [2u64, 3] {
        let k = field(p, 2);
        for n in 1..=2 {
            for nums in numerator_tuples(2, p.pow(n as u32)) {
                let len = WeightProfile::new(p, n, &nums).unwrap().coeff_len();
                for c in coefficient_span(&k, len) {
                    let f = TopForm::basic(&k, n, &nums, c).unwrap();
                    assert_eq!(theta_inverse(&theta(&f).unwrap()).unwrap(), f);
                }
            }
        }
    }
}

#[test]
fn compatibility_sweeps() {
    let r = verify_compatibility(2, 2, 1, 8).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
    let r = verify_compatibility(3, 2, 2, 9).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
    assert!(r.nonzero_outputs > 0);
    assert!(verify_compatibility(4, 2, 1, 8).is_err());
}

/// The classical Cartier operator on `Ω^d_{k[X]}`, on `c X^a dX_1...dX_d`:
/// `c^{1/p} X^{(a+1)/p - 1}` when every `a_i ≡ -1 mod p`, else zero.
fn classical_cartier(k: &Field, form: &BTreeMap<Vec<u64>, FieldElem>) -> BTreeMap<Vec<u64>, FieldElem> {
    let p = k.characteristic();
    form.iter()
        .filter(|(a, _)| a.iter().all(|&x| (x + 1) % p == 0))
        .map(|(a, &c)| (a.iter().map(|&x| (x + 1) / p - 1).collect(), k.frobenius(c, -1)))
        .collect()
}

/// A level-one basic form of weight `N` is `β ∏_j F^{v_j} d[X_{i_j}]^{h'_j}`
/// with the factors sorted by `(v_j, i_j)`; each factor is `h'_j X^{N_i - 1} dX`.
fn classical_of(f: &TopForm) -> BTreeMap<Vec<u64>, FieldElem> {
    let k = f.field();
    let p = k.characteristic();
    let mut out = BTreeMap::new();
    for (nums, c) in f.terms() {
        let val = |x: u64| (0..).take_while(|&e| x.is_multiple_of(p.pow(e + 1))).count() as u32;
        let mut order: Vec<usize> = (0..nums.len()).collect();
        order.sort_by_key(|&i| (val(nums[i]), i));
        let inversions = (0..order.len()).flat_map(|a| (a + 1..order.len()).map(move |b| (a, b))).filter(|&(a, b)| order[a] > order[b]).count();
        let unit: i64 = nums.iter().map(|&x| (x / p.pow(val(x))) as i64).product();
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        let coeff = k.mul(k.from_int(sign * unit), c.coord(0));
        out.insert(nums.iter().map(|&x| x - 1).collect(), coeff);
    }
    out.retain(|_, c| *c != FieldElem::ZERO);
    out
}

#[test]
fn level_one_cartier_is_the_classical_one() {
    for p in [2u64, 3, 5] {
        for m in 1..=2 {
            let k = field(p, m);
            for d in 1..=2 {
                for nums in numerator_tuples(d, p * p) {
                    for c in k.elements().filter(|&c| c != FieldElem::ZERO) {
                        let f = TopForm::basic(&k, 1, &nums, WittVector::teichmuller(&k, c, 1)).unwrap();
                        let got = classical_of(&cartier(&f).unwrap());
                        assert_eq!(got, classical_cartier(&k, &classical_of(&f)), "{f}");
                    }
                }
            }
        }
    }
}

#[test]
fn cf_equals_r_and_restriction_kills_v_n() {
    let k = field(2, 2);
    let f = TopForm::parse(&k, 3, 1, "dV^2(W{3}*[X1]^1)").unwrap();
    assert!(restriction_form(&f).unwrap().is_zero());
    let g = TopForm::parse(&k, 3, 2, "W{0,0,1} * d[X1]^1 * F^1 d[X2]^1").unwrap();
    assert!(restriction_form(&g).unwrap().is_zero());
    let h = TopForm::parse(&k, 3, 2, "W{1,2,3} * d[X1]^1 * F^1 d[X2]^3").unwrap();
    assert_eq!(cartier(&frobenius_form(&h).unwrap()).unwrap(), restriction_form(&h).unwrap());
    assert!(!restriction_form(&h).unwrap().is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn cartier_is_sigma_inverse_semilinear(p in prop::sample::select(vec![2u64, 3]), n in 1usize..=3, a in 1u64..=27, b in 1u64..=27, cs in prop::collection::vec(0u64..81, 6), ls in prop::collection::vec(0u64..81, 3)) {
        let k = field(p, 2);
        let nums = [a, b];
        let len = WeightProfile::new(p, n, &nums).unwrap().coeff_len();
        let q = k.size();
        let c = w(&k, &cs[..len].iter().map(|x| x % q).collect::<Vec<_>>());
        let lambda = w(&k, &ls[..n].iter().map(|x| x % q).collect::<Vec<_>>());
        let f = TopForm::basic(&k, n, &nums, c).unwrap();
        let lhs = cartier(&f.scalar_canonicalize(&lambda).unwrap()).unwrap();
        let rhs = cartier(&f).unwrap().scalar_canonicalize(&lambda.sigma(-1)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cartier_routes_agree_on_sums(p in prop::sample::select(vec![2u64, 3]), n in 1usize..=3, terms in prop::collection::vec((1u64..=27, 1u64..=27, prop::collection::vec(0u64..81, 3)), 1..4)) {
        let k = field(p, 2);
        let q = k.size();
        let mut f = TopForm::zero(&k, n, 2);
        for (a, b, cs) in &terms {
            let len = WeightProfile::new(p, n, &[*a, *b]).unwrap().coeff_len();
            let c = w(&k, &cs[..len].iter().map(|x| x % q).collect::<Vec<_>>());
            f = f.add(&TopForm::basic(&k, n, &[*a, *b], c).unwrap()).unwrap();
        }
        let c = cartier(&f).unwrap();
        prop_assert_eq!(&c, &cartier_prime(&f).unwrap());
        prop_assert_eq!(&c, &cartier_prime_table(&f).unwrap());
        prop_assert_eq!(TopForm::parse(&k, n, 2, &f.to_string()).unwrap(), f.clone());
        prop_assert_eq!(TopForm::from_json(&f.to_json()).unwrap(), f);
    }
}
