use drwk::witt::{GaloisRing, WittVector};
use drwk::{Field, GaloisField};
use proptest::prelude::*;

fn field(p: u64, m: usize) -> Field {
    GaloisField::default_for(p, m).unwrap()
}

fn all(k: &Field, n: usize) -> Vec<WittVector> {
    let q = k.size();
    (0..q.pow(n as u32))
        .map(|mut c| {
            let codes: Vec<u64> = (0..n)
                .map(|_| {
                    let d = c % q;
                    c /= q;
                    d
                })
                .collect();
            WittVector::from_codes(k, &codes).unwrap()
        })
        .collect()
}

#[test]
fn one_plus_one_is_two_in_w2_f2() {
    let k = field(2, 1);
    let a = WittVector::from_codes(&k, &[1, 0]).unwrap();
    assert_eq!(&a + &a, WittVector::from_codes(&k, &[0, 1]).unwrap());
    assert_eq!(&a + &WittVector::zero(&k, 2), a);
}

#[test]
fn teichmuller_is_multiplicative_over_f4() {
    let k = field(2, 2);
    for n in 1..=3 {
        assert_eq!(WittVector::teichmuller(&k, k.one(), n), WittVector::one(&k, n));
        assert!(WittVector::teichmuller(&k, k.zero(), n).is_zero());
        for a in k.elements() {
            for b in k.elements() {
                let lhs = &WittVector::teichmuller(&k, a, n) * &WittVector::teichmuller(&k, b, n);
                assert_eq!(lhs, WittVector::teichmuller(&k, k.mul(a, b), n));
            }
        }
    }
}

#[test]
fn frobenius_and_verschiebung_relations_over_f4() {
    for k in [field(2, 1), field(2, 2)] {
        let p = k.characteristic() as i64;
        for n in 1..=3 {
            let small = all(&k, n);
            let big = all(&k, n + 1);
            for x in &small {
                let vx = x.verschiebung().unwrap();
                // F V = p
                assert_eq!(vx.frobenius().unwrap(), x.mul_int(p));
                for y in &big {
                    // V(x) y = V(x F(y))
                    assert_eq!(&vx * y, (x * &y.frobenius().unwrap()).verschiebung().unwrap());
                }
            }
            for y in &big {
                // V F = p, F = R σ, R V = V R
                let fy = y.frobenius().unwrap();
                assert_eq!(fy.verschiebung().unwrap(), y.mul_int(p));
                assert_eq!(fy, y.sigma(1).restriction().unwrap());
                if n >= 2 {
                    assert_eq!(y.verschiebung().unwrap().restriction().unwrap(), y.restriction().unwrap().verschiebung().unwrap());
                }
            }
            for a in k.elements() {
                let t = WittVector::teichmuller(&k, a, n + 1);
                assert_eq!(t.frobenius().unwrap(), WittVector::teichmuller(&k, k.pow(a, k.characteristic()), n));
                assert_eq!(t.restriction().unwrap(), WittVector::teichmuller(&k, a, n));
                assert_eq!(t.sigma(1), WittVector::teichmuller(&k, k.pow(a, k.characteristic()), n + 1));
            }
        }
    }
}

#[test]
fn verschiebung_of_one_is_two() {
    let k = field(2, 1);
    let v = WittVector::one(&k, 1).verschiebung().unwrap();
    assert_eq!(v.to_int(), Some(2));
}

#[test]
fn sigma_is_trivial_over_prime_fields() {
    let k = field(3, 1);
    for x in all(&k, 3) {
        assert_eq!(x.sigma(1), x);
    }
    let k = field(3, 2);
    for x in all(&k, 2) {
        assert_eq!(x.sigma(1).sigma(-1), x);
    }
}

#[test]
fn trace_of_one_is_the_degree() {
    let small = field(2, 1);
    for e in 1..=4 {
        let big = field(2, e);
        for n in 1..=3 {
            assert_eq!(WittVector::one(&big, n).trace(&small).unwrap(), WittVector::from_int(&small, e as i64, n));
        }
    }
    let x = WittVector::from_codes(&field(3, 2), &[5, 7]).unwrap();
    assert_eq!(x.trace(&field(3, 2)).unwrap(), x);
    assert!(x.trace(&field(2, 1)).is_err());
}

#[test]
fn mismatched_inputs_are_rejected() {
    let k = field(2, 2);
    let a = WittVector::one(&k, 2);
    let b = WittVector::one(&k, 3);
    assert!(a.add(&b).is_err());
    assert!(a.mul(&WittVector::one(&field(3, 1), 2)).is_err());
    assert!(WittVector::from_codes(&k, &[4]).is_err());
    assert!(WittVector::parse(&k, "W{1,").is_err());
}

#[test]
fn text_and_json_round_trip() {
    let k = field(3, 2);
    for x in all(&k, 2) {
        assert_eq!(WittVector::parse(&k, &x.to_string()).unwrap(), x);
        assert_eq!(WittVector::from_json(&x.to_json()).unwrap(), x);
    }
}

fn config() -> impl Strategy<Value = (u64, usize, usize)> {
    (prop::sample::select(vec![2u64, 3, 5]), 1usize..=2, 1usize..=4)
}

fn vector(k: &Field, n: usize, codes: &[u64]) -> WittVector {
    let q = k.size();
    WittVector::from_codes(k, &codes[..n].iter().map(|c| c % q).collect::<Vec<_>>()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn galois_ring_oracle_agrees((p, m, n) in config(), a in prop::collection::vec(any::<u64>(), 4), b in prop::collection::vec(any::<u64>(), 4)) {
        let k = field(p, m);
        let (x, y) = (vector(&k, n, &a), vector(&k, n, &b));
        let gr = GaloisRing::new(&k, n as u32);
        prop_assert_eq!(gr.from_witt(&(&x + &y)), gr.add(&gr.from_witt(&x), &gr.from_witt(&y)));
        prop_assert_eq!(gr.from_witt(&(&x * &y)), gr.mul(&gr.from_witt(&x), &gr.from_witt(&y)));
    }

    #[test]
    fn restriction_is_a_ring_map((p, m, n) in config(), a in prop::collection::vec(any::<u64>(), 4), b in prop::collection::vec(any::<u64>(), 4)) {
        prop_assume!(n >= 2);
        let k = field(p, m);
        let (x, y) = (vector(&k, n, &a), vector(&k, n, &b));
        let r = |w: &WittVector| w.restriction().unwrap();
        prop_assert_eq!(r(&(&x + &y)), &r(&x) + &r(&y));
        prop_assert_eq!(r(&(&x * &y)), &r(&x) * &r(&y));
    }

    #[test]
    fn inverse_of_units((p, m, n) in config(), a in prop::collection::vec(any::<u64>(), 4)) {
        let k = field(p, m);
        let x = vector(&k, n, &a);
        match x.inverse() {
            Some(y) => prop_assert_eq!(&x * &y, WittVector::one(&k, n)),
            None => prop_assert!(!x.is_unit()),
        }
    }

    #[test]
    fn trace_is_frobenius_invariant(e in 1usize..=3, n in 1usize..=3, a in prop::collection::vec(any::<u64>(), 4)) {
        let small = field(2, 2);
        let big = field(2, 2 * e);
        let x = vector(&big, n, &a);
        let t = x.trace(&small).unwrap();
        prop_assert_eq!(t.sigma(2), t);
    }
}
