use drwk::residue::{check_r5, check_r9, lifting_problem, residue_1d, residue_nd, residue_nd_ordered, ExactPoly, ResidueProblem};
use drwk::Error;
use num_rational::BigRational;
use proptest::prelude::*;

fn ep(s: &str) -> ExactPoly {
    ExactPoly::parse(s).unwrap()
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[test]
fn residue_at_the_origin_evaluates() {
    assert_eq!(residue_1d(&ep("5*T^3 - T + 2/3*Y"), &ep("T"), "T").unwrap(), ep("2/3*Y"));
}

#[test]
fn lifting_residues() {
    for p in [2u32, 3, 5] {
        let g = ep(&format!("T^{p} - Y"));
        assert_eq!(residue_1d(&ep(&format!("T^{}", p - 1)), &g, "T").unwrap(), ep("1"));
        assert_eq!(residue_1d(&ep(&format!("T^{}", 2 * p - 1)), &g, "T").unwrap(), ep("Y"));
        for a in 0..3 * p {
            let r = residue_1d(&ep(&format!("T^{a}")), &g, "T").unwrap();
            assert_eq!(r.is_zero(), a % p != p - 1, "a = {a}");
        }
    }
}

#[test]
fn two_variable_residues() {
    let pr = ResidueProblem::parse("T1*T2", &["T1^2 - Y1", "T2^2 - Y2"]).unwrap();
    assert_eq!(residue_nd(&pr).unwrap(), ep("1"));
    let pr = ResidueProblem::parse("T1", &["T1^2 - Y1", "T2^2 - Y2"]).unwrap();
    assert!(residue_nd(&pr).unwrap().is_zero());
    assert_eq!(residue_nd(&lifting_problem(3, &[5, 8]).unwrap()).unwrap(), ep("Y1*Y2^2"));
}

#[test]
fn bad_sequences_are_rejected() {
    assert!(matches!(ResidueProblem::parse("T1", &["2*T1 - 1"]), Err(Error::Usage(_))));
    let coupled = vec![("T1".to_string(), ep("T1^2 - T2")), ("T2".to_string(), ep("T2 - 1"))];
    assert!(matches!(ResidueProblem::new(ep("T1"), coupled), Err(Error::Unsupported(_))));
    assert!(ResidueProblem::parse("T1", &["Y"]).is_err());
    let pr = lifting_problem(2, &[1, 1]).unwrap();
    assert!(residue_nd_ordered(&pr, &[0, 0]).is_err());
}

#[test]
fn r9_and_r5_examples() {
    let seq = vec![("T".to_string(), ep("T"))];
    assert!(check_r9(&[ep("T^2")], &seq, &[1]).unwrap());
    assert!(check_r9(&[ep("7")], &seq, &[3]).unwrap());
    let pr = lifting_problem(2, &[1]).unwrap();
    assert!(check_r5(&pr, "Y1", &q(0)).unwrap());
    assert!(check_r5(&pr, "Y9", &q(4)).unwrap());
}

#[test]
fn reduction_mod_p_power() {
    let r = residue_nd(&lifting_problem(2, &[3, 1]).unwrap()).unwrap();
    let m = r.reduce_mod(8).unwrap();
    assert_eq!(m.values().copied().collect::<Vec<_>>(), vec![1]);
    assert!(matches!(ep("1/2*Y").reduce_mod(4), Err(Error::Integrality(_))));
}

fn poly(vars: &'static [&'static str], max_deg: u32) -> impl Strategy<Value = ExactPoly> {
    prop::collection::vec((-9i64..=9, prop::collection::vec(0..=max_deg, vars.len())), 0..6).prop_map(move |terms| {
        terms.into_iter().fold(ExactPoly::zero(), |acc, (c, es)| {
            let powers: Vec<(&str, u32)> = vars.iter().copied().zip(es).collect();
            acc.add(&ExactPoly::monomial(q(c), &powers))
        })
    })
}

fn monic(var: &'static str, deg: u32) -> impl Strategy<Value = ExactPoly> {
    prop::collection::vec((-5i64..=5, 0u32..=2), deg as usize).prop_map(move |cs| {
        cs.iter().enumerate().fold(ExactPoly::var_pow(var, deg), |acc, (i, &(c, y))| {
            acc.add(&ExactPoly::monomial(q(c), &[(var, i as u32), ("Y", y)]))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn iteration_order_is_irrelevant(f in poly(&["T1", "T2", "Y"], 4), g1 in monic("T1", 2), g2 in monic("T2", 3)) {
        let pr = ResidueProblem::new(f, vec![("T1".into(), g1), ("T2".into(), g2)]).unwrap();
        prop_assert_eq!(residue_nd_ordered(&pr, &[0, 1]).unwrap(), residue_nd_ordered(&pr, &[1, 0]).unwrap());
    }

    #[test]
    fn linear_and_vanishing_on_the_ideal(f in poly(&["T", "Y"], 4), h in poly(&["T", "Y"], 3), phi in poly(&["T", "Y"], 3), g in monic("T", 2)) {
        let r = |x: &ExactPoly| residue_1d(x, &g, "T").unwrap();
        prop_assert_eq!(r(&f.add(&h.scale(&q(3)))), r(&f).add(&r(&h).scale(&q(3))));
        prop_assert!(r(&g.mul(&phi)).is_zero());
        // integral inputs with monic moduli give integral residues
        prop_assert!(r(&f).is_integral());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn r9_on_random_forms(eta in poly(&["T", "Y"], 4), g in monic("T", 2), k in 1u32..=2) {
        prop_assert!(check_r9(&[eta], &[("T".into(), g)], &[k]).unwrap());
    }

    #[test]
    fn r5_on_random_specializations(f in poly(&["T", "Y"], 4), g in monic("T", 3), y in -4i64..=4) {
        let pr = ResidueProblem::new(f, vec![("T".into(), g)]).unwrap();
        prop_assert!(check_r5(&pr, "Y", &q(y)).unwrap());
    }
}
