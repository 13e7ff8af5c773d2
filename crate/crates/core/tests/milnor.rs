use drwk::milnor::{
    cohomology, degree_of_divisor, field_of_size, gersten_complex, h0, norm_k0, norm_k1, norm_residue, random_rational,
    support, tame_symbol, valuation, weil_reciprocity, Curve, Place, RationalFunction, TameValue,
};
use drwk::poly::Poly;
use drwk::{Error, Field, GaloisField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rf(k: &Field, s: &str) -> RationalFunction {
    RationalFunction::parse(k, s).unwrap()
}

fn k2(f: &RationalFunction, g: &RationalFunction, v: &Place) -> Poly {
    match tame_symbol(&[f.clone(), g.clone()], v).unwrap() {
        TameValue::K1(r) => r.value,
        other => panic!("{other:?}"),
    }
}

fn mul_at(a: &Poly, b: &Poly, v: &Place) -> Poly {
    match v {
        Place::Finite(pi) => a.mul_mod(b, pi),
        Place::Infinity(_) => a.mul(b),
    }
}

#[test]
fn steinberg_pair_is_trivial_everywhere() {
    let k = field_of_size(5).unwrap();
    let l = weil_reciprocity(&rf(&k, "T"), &rf(&k, "1 - T")).unwrap();
    assert!(l.holds);
    assert!(l.entries.iter().all(|e| e.norm == 1), "{l:?}");
}

#[test]
fn t_and_t_minus_one_over_f3() {
    let k = field_of_size(3).unwrap();
    let l = weil_reciprocity(&rf(&k, "T"), &rf(&k, "T - 1")).unwrap();
    let got: Vec<(&str, u64)> = l.entries.iter().map(|e| (e.place.as_str(), e.norm)).collect();
    assert_eq!(got, vec![("(T)", 2), ("(T + 2)", 1), ("inf", 2)]);
    assert_eq!(l.product, 1);
}

#[test]
fn symbols_of_units_and_bad_input() {
    let k = field_of_size(3).unwrap();
    let v = Place::finite(Poly::x(&k)).unwrap();
    assert_eq!(k2(&rf(&k, "T + 1"), &rf(&k, "T^2 + 2"), &v), Poly::one(&k));
    assert!(matches!(tame_symbol(&[rf(&k, "T"), rf(&k, "T"), rf(&k, "T")], &v), Err(Error::Unsupported(_))));
    assert!(tame_symbol(&[rf(&k, "0")], &v).is_err());
    assert!(valuation(&rf(&k, "0"), &v).is_err());
    assert!(Place::finite(Poly::new(&k, vec![k.one(), k.zero(), k.one()])).is_ok());
    assert!(Place::finite(Poly::new(&k, vec![k.from_int(2), k.zero(), k.one()])).is_err());
}

#[test]
fn norms() {
    let f4 = field_of_size(4).unwrap();
    let w = f4.generator();
    assert_eq!(norm_k1(&f4, w, 2).unwrap(), f4.one());
    assert_eq!(norm_k1(&f4, w, 1).unwrap(), w);
    assert!(norm_k1(&f4, w, 3).is_err());
    assert_eq!((norm_k0(1, 3), norm_k0(0, 4), norm_k0(5, 1)), (3, 0, 5));
    // transitivity in F_64 / F_8 / F_2 and F_64 / F_4 / F_2
    let big = GaloisField::default_for(2, 6).unwrap();
    for a in big.elements().skip(1).step_by(7) {
        let direct = norm_k1(&big, a, 6).unwrap();
        let via8 = norm_k1(&big, norm_k1(&big, a, 2).unwrap(), 3).unwrap();
        let via4 = norm_k1(&big, norm_k1(&big, a, 3).unwrap(), 2).unwrap();
        assert_eq!((via8, via4), (direct, direct));
    }
}

#[test]
fn gersten_matrices() {
    let k = field_of_size(2).unwrap();
    let a1 = gersten_complex(Curve::A1, 2, 2, &k, 1).unwrap();
    assert_eq!(a1.columns, vec!["T", "T + 1"]);
    assert_eq!(a1.matrix, vec![vec![1, 0], vec![0, 1]]);
    let p1 = gersten_complex(Curve::P1, 2, 2, &k, 2).unwrap();
    assert_eq!(p1.matrix.last().unwrap(), &vec![-1, -1, -2]);
    assert!(gersten_complex(Curve::P1, 2, 2, &k, 0).is_err());
    assert!(matches!(gersten_complex(Curve::P1, 3, 2, &k, 1), Err(Error::Unsupported(_))));
    for dd in 1..=3 {
        assert_eq!(h0(&gersten_complex(Curve::P1, 2, 3, &k, dd).unwrap()).unwrap(), vec![3]);
        let c = cohomology(&gersten_complex(Curve::A1, 2, 3, &k, dd).unwrap()).unwrap();
        assert!(c.h0_exponents.is_empty() && c.h_minus1_exponents.is_empty());
    }
}

#[test]
fn rational_function_text_round_trips() {
    let k = field_of_size(9).unwrap();
    let f = rf(&k, "(T^2 + 3*T + 1)/(T - 5)^2");
    assert_eq!(rf(&k, &f.to_string()), f);
    assert!(RationalFunction::parse(&k, "T +").is_err());
    assert!(RationalFunction::parse(&k, "9").is_err());
}

fn q0() -> impl Strategy<Value = Field> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]).prop_map(|q| field_of_size(q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reciprocity_and_divisors(k in q0(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_rational(&k, 4, &mut rng);
        let g = random_rational(&k, 4, &mut rng);
        prop_assert!(weil_reciprocity(&f, &g).unwrap().holds);
        prop_assert_eq!(degree_of_divisor(&f).unwrap(), 0);
    }

    #[test]
    fn tame_symbol_is_bilinear(k in q0(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f1, f2, g) = (random_rational(&k, 3, &mut rng), random_rational(&k, 3, &mut rng), random_rational(&k, 3, &mut rng));
        for v in support(&[&f1, &f2, &g]) {
            prop_assert_eq!(k2(&f1.mul(&f2), &g, &v), mul_at(&k2(&f1, &g, &v), &k2(&f2, &g, &v), &v));
            prop_assert_eq!(k2(&g, &f1.mul(&f2), &v), mul_at(&k2(&g, &f1, &v), &k2(&g, &f2, &v), &v));
        }
    }

    #[test]
    fn steinberg_symbols_vanish(k in q0(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_rational(&k, 3, &mut rng);
        let one_minus = RationalFunction::constant(&k, k.one()).sub(&f);
        prop_assume!(!one_minus.is_zero());
        for v in support(&[&f, &one_minus]) {
            let t = k2(&f, &one_minus, &v);
            prop_assert_eq!(t, Poly::one(&k));
        }
    }

    #[test]
    fn residue_norm_is_multiplicative(k in q0(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_rational(&k, 3, &mut rng);
        let g = random_rational(&k, 3, &mut rng);
        for v in support(&[&f, &g]) {
            let TameValue::K1(a) = tame_symbol(&[f.clone(), g.clone()], &v).unwrap() else { unreachable!() };
            let TameValue::K1(b) = tame_symbol(&[g.clone(), f.clone()], &v).unwrap() else { unreachable!() };
            // ∂{f, g} ∂{g, f} = 1
            let prod = norm_residue(&a).unwrap();
            prop_assert_eq!(k.mul(prod, norm_residue(&b).unwrap()), k.one());
        }
    }
}
