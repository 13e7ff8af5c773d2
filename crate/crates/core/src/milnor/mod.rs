//! Milnor K-theory of `F_q(T)` in weights `<= 2`: valuations, tame symbols,
//! norms from residue fields, Weil reciprocity, and the two-term mod `p^n`
//! Gersten complex of `A^1` and `P^1`.

mod rational;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use rational::RationalFunction;

use crate::error::{usage, Error, Result};
use crate::field::{Field, FieldElem, GaloisField};
use crate::linalg::{integer_invariant_factors, ZpnMatrix};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Curve {
    A1,
    P1,
}

impl std::str::FromStr for Curve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Curve> {
        match s.to_ascii_lowercase().as_str() {
            "a1" => Ok(Curve::A1),
            "p1" => Ok(Curve::P1),
            _ => Err(Error::Usage(format!("unknown curve `{s}` (expected a1 or p1)"))),
        }
    }
}

/// A closed point: a monic irreducible `π`, or `∞` (uniformizer `1/T`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Place {
    Finite(Poly),
    Infinity(Field),
}

impl Place {
    pub fn finite(pi: Poly) -> Result<Place> {
        if !pi.is_monic() || pi.deg() == 0 || !pi.is_irreducible() {
            return usage(format!("`{pi}` is not a monic irreducible polynomial"));
        }
        Ok(Place::Finite(pi))
    }

    pub fn field(&self) -> &Field {
        match self {
            Place::Finite(pi) => pi.field(),
            Place::Infinity(k) => k,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(pi) => pi.deg(),
            Place::Infinity(_) => 1,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(pi) => write!(f, "({pi})"),
            Place::Infinity(_) => write!(f, "inf"),
        }
    }
}

fn multiplicity(mut f: Poly, pi: &Poly) -> i64 {
    let mut v = 0;
    loop {
        let (q, r) = f.divrem(pi);
        if !r.is_zero() {
            return v;
        }
        f = q;
        v += 1;
    }
}

/// Order of vanishing of `f` at `v`.
pub fn valuation(f: &RationalFunction, v: &Place) -> Result<i64> {
    if f.is_zero() {
        return usage("the valuation of 0 is undefined");
    }
    Ok(match v {
        Place::Finite(pi) => multiplicity(f.num().clone(), pi) - multiplicity(f.den().clone(), pi),
        Place::Infinity(_) => f.den().deg() as i64 - f.num().deg() as i64,
    })
}

/// An element of the residue field `k(v) = F_q[T]/(π)` (`F_q` at `∞`),
/// represented by its reduced polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueElem {
    pub place: Place,
    pub value: Poly,
}

impl fmt::Display for ResidueElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.place)
    }
}

/// The residue class of a `v`-unit.
fn reduce_unit(f: &RationalFunction, v: &Place) -> Result<Poly> {
    let k = f.field();
    match v {
        Place::Finite(pi) => {
            let d = f.den().rem(pi).inv_mod(pi).ok_or_else(|| Error::Usage(format!("{f} is not a unit at {v}")))?;
            let n = f.num().rem(pi);
            if n.is_zero() {
                return usage(format!("{f} is not a unit at {v}"));
            }
            Ok(n.mul_mod(&d, pi))
        }
        Place::Infinity(_) => {
            if f.num().deg() != f.den().deg() {
                return usage(format!("{f} is not a unit at infinity"));
            }
            Ok(Poly::constant(k, k.mul(f.num().lead(), k.inv(f.den().lead()).expect("nonzero"))))
        }
    }
}

/// `f = π^{v(f)} · u` with `u` a unit at `v` (`π = 1/T` at `∞`).
fn unit_part(f: &RationalFunction, v: &Place) -> Result<RationalFunction> {
    let a = valuation(f, v)?;
    let pi = match v {
        Place::Finite(pi) => RationalFunction::from_poly(pi.clone()),
        Place::Infinity(k) => RationalFunction::t(k).inv()?,
    };
    f.div(&pi.pow(a)?)
}

/// Result of a tame symbol: weight 1 lands in `K_0 = Z`, weight 2 in `k(v)^*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TameValue {
    K0(i64),
    K1(ResidueElem),
}

/// `∂_v{f} = v(f)`, and `∂_v{f, g}` = class of `(-1)^{ab} f^b g^{-a}`,
/// `a = v(f)`, `b = v(g)`, so that `∂_v{π, u} = ū`.
pub fn tame_symbol(entries: &[RationalFunction], v: &Place) -> Result<TameValue> {
    if entries.iter().any(RationalFunction::is_zero) {
        return usage("symbol entries must be nonzero");
    }
    match entries {
        [f] => Ok(TameValue::K0(valuation(f, v)?)),
        [f, g] => {
            let (a, b) = (valuation(f, v)?, valuation(g, v)?);
            let k = f.field();
            let u0 = unit_part(f, v)?.pow(b)?.mul(&unit_part(g, v)?.pow(-a)?);
            let sign = if (a * b) % 2 == 0 { k.one() } else { k.neg(k.one()) };
            let u = u0.mul(&RationalFunction::constant(k, sign));
            Ok(TameValue::K1(ResidueElem { place: v.clone(), value: reduce_unit(&u, v)? }))
        }
        _ => Err(Error::Unsupported("only symbols of weight 1 and 2 are supported".into())),
    }
}

/// `Nm_{F_{q^e}/F_q}(a) = a^{(q^e - 1)/(q - 1)}` for `a` in `big`, where `q`
/// is the size of a subfield of index `e`.
pub fn norm_k1(big: &Field, a: FieldElem, e: usize) -> Result<FieldElem> {
    if a == FieldElem::ZERO {
        return usage("the norm is defined on nonzero elements");
    }
    if e == 0 || !big.degree().is_multiple_of(e) {
        return usage(format!("F_{} has no subfield of index {e}", big.size()));
    }
    let q = big.characteristic().pow((big.degree() / e) as u32);
    Ok(big.norm_to_subfield(a, big.degree() / e)).inspect(|&n| {
        debug_assert_eq!(n, big.pow(a, (q.pow(e as u32) - 1) / (q - 1)));
    })
}

/// The norm of a residue class to `F_q`: the product of its conjugates
/// `a^{q^i}`, `i < deg π`.
pub fn norm_residue(x: &ResidueElem) -> Result<FieldElem> {
    let k = x.place.field();
    match &x.place {
        Place::Infinity(_) => Ok(x.value.coeff(0)),
        Place::Finite(pi) => {
            let q = k.size();
            let mut acc = Poly::one(k);
            let mut conj = x.value.clone();
            for _ in 0..pi.deg() {
                acc = acc.mul_mod(&conj, pi);
                conj = conj.pow_mod(q, pi);
            }
            if acc.deg() > 0 {
                return Err(Error::Consistency(format!("norm of {x} is not a constant")));
            }
            Ok(acc.coeff(0))
        }
    }
}

/// Pushforward on `K_0`: multiplication by the degree.
pub fn norm_k0(c: i64, e: usize) -> i64 {
    c * e as i64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReciprocityEntry {
    pub place: String,
    pub degree: usize,
    pub tame: String,
    /// Code of the norm in `F_q^*`.
    pub norm: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReciprocityLedger {
    pub f: String,
    pub g: String,
    pub entries: Vec<ReciprocityEntry>,
    pub product: u64,
    pub holds: bool,
}

/// Places in the support of `div(f)` and `div(g)`, finite ones sorted, then `∞`.
pub fn support(fs: &[&RationalFunction]) -> Vec<Place> {
    let mut pis: Vec<Poly> = Vec::new();
    for f in fs {
        for p in [f.num(), f.den()] {
            for (pi, _) in p.factor() {
                if !pis.contains(&pi) {
                    pis.push(pi);
                }
            }
        }
    }
    pis.sort_by_key(Poly::cmp_key);
    let k = fs[0].field().clone();
    pis.into_iter().map(Place::Finite).chain([Place::Infinity(k)]).collect()
}

/// `prod_v Nm_{k(v)/F_q} ∂_v{f, g} = 1` over all places of `P^1`, with the
/// per-place contributions.
pub fn weil_reciprocity(f: &RationalFunction, g: &RationalFunction) -> Result<ReciprocityLedger> {
    if f.is_zero() || g.is_zero() {
        return usage("symbol entries must be nonzero");
    }
    let k = f.field();
    let mut entries = Vec::new();
    let mut product = k.one();
    for v in support(&[f, g]) {
        let TameValue::K1(t) = tame_symbol(&[f.clone(), g.clone()], &v)? else { unreachable!("weight 2") };
        let n = norm_residue(&t)?;
        product = k.mul(product, n);
        entries.push(ReciprocityEntry { place: v.to_string(), degree: v.degree(), tame: t.value.to_string(), norm: n.code() });
    }
    Ok(ReciprocityLedger { f: f.to_string(), g: g.to_string(), entries, product: product.code(), holds: product == k.one() })
}

/// A random nonzero rational function with numerator and denominator of
/// degree `<= max_deg`.
pub fn random_rational(field: &Field, max_deg: usize, rng: &mut impl Rng) -> RationalFunction {
    let q = field.size();
    let poly = |rng: &mut dyn rand::RngCore, monic: bool| loop {
        let d = rng.gen_range(0..=max_deg);
        let mut c: Vec<FieldElem> = (0..=d).map(|_| FieldElem::from_code(rng.gen_range(0..q))).collect();
        if monic {
            c[d] = field.one();
        }
        let p = Poly::new(field, c);
        if !p.is_zero() {
            return p;
        }
    };
    let num = poly(rng, false);
    let den = poly(rng, true);
    RationalFunction::new(num, den).expect("nonzero denominator")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReciprocityCampaign {
    pub q0: u64,
    pub pairs: usize,
    pub failures: Vec<ReciprocityLedger>,
}

/// Weil reciprocity on `pairs` seeded random pairs of degree `<= max_deg`.
pub fn reciprocity_campaign(field: &Field, pairs: usize, max_deg: usize, seed: u64) -> Result<ReciprocityCampaign> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..pairs {
        let f = random_rational(field, max_deg, &mut rng);
        let g = random_rational(field, max_deg, &mut rng);
        let l = weil_reciprocity(&f, &g)?;
        if !l.holds {
            failures.push(l);
        }
    }
    Ok(ReciprocityCampaign { q0: field.size(), pairs, failures })
}

/// The differential `⊕_π K_1 -> ⊕_x K_0` of the Gersten complex, mod `p^n`:
/// columns are the monic irreducibles `π` of degree `<= D` (generators of
/// `K_1(F_q(T)) ⊗ Z/p^n` up to constants, which are `p`-divisible), rows are
/// the places of degree `<= D` and, on `P^1`, the place `∞` with entries
/// `-deg π`.
#[derive(Clone, Debug, Serialize)]
pub struct GerstenComplex {
    pub curve: Curve,
    pub p: u64,
    pub n: u32,
    pub q0: u64,
    pub degree_bound: usize,
    pub columns: Vec<String>,
    pub rows: Vec<String>,
    /// Integer valuations `v_x(π)`.
    pub matrix: Vec<Vec<i64>>,
}

pub fn gersten_complex(curve: Curve, p: u64, n: u32, field: &Field, degree_bound: usize) -> Result<GerstenComplex> {
    if degree_bound == 0 {
        return usage("degree bound must be >= 1");
    }
    if n == 0 || p.checked_pow(n).is_none() {
        return usage("level n out of range");
    }
    if field.characteristic() != p {
        return Err(Error::Unsupported(format!(
            "mod {p}^{n} coefficients need p = char F_q so that constants are p-divisible (q = {})",
            field.size()
        )));
    }
    let count: u64 = (1..=degree_bound).map(|d| field.size().saturating_pow(d as u32)).sum();
    if count > 100_000 {
        return usage("degree bound too large for this field");
    }
    let pis: Vec<Poly> = (1..=degree_bound).flat_map(|d| Poly::monic_irreducibles(field, d)).collect();
    let mut places: Vec<Place> = pis.iter().cloned().map(Place::Finite).collect();
    if curve == Curve::P1 {
        places.push(Place::Infinity(field.clone()));
    }
    let mut matrix = Vec::with_capacity(places.len());
    for x in &places {
        let row = pis
            .iter()
            .map(|pi| valuation(&RationalFunction::from_poly(pi.clone()), x))
            .collect::<Result<Vec<i64>>>()?;
        matrix.push(row);
    }
    Ok(GerstenComplex {
        curve,
        p,
        n,
        q0: field.size(),
        degree_bound,
        columns: pis.iter().map(|pi| pi.to_string()).collect(),
        rows: places.iter().map(|x| x.to_string()).collect(),
        matrix,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cohomology {
    /// `H^0 ≅ ⊕ Z/p^{e}` for `e` in this list (zero summands omitted).
    pub h0_exponents: Vec<u32>,
    /// `H^{-1} ≅ ⊕ Z/p^{e}`.
    pub h_minus1_exponents: Vec<u32>,
}

/// `H^0` = cokernel (integer Smith form, then `⊗ Z/p^n`), and
/// `H^{-1}` = kernel of the differential mod `p^n`.
pub fn cohomology(c: &GerstenComplex) -> Result<Cohomology> {
    let rows = c.matrix.len();
    let modulus = c.p.pow(c.n) as i128;
    let factors = integer_invariant_factors(&c.matrix)?;
    let mut h0 = Vec::new();
    for i in 0..rows {
        let d = factors.get(i).copied().unwrap_or(0);
        let g = if d == 0 { modulus } else { gcd_i128(d.abs(), modulus) };
        let e = crate::field::valuation_p(g as u64, c.p);
        if e > 0 {
            h0.push(e);
        }
    }
    h0.sort_unstable();
    let m = ZpnMatrix::from_rows(c.p, c.n, &c.matrix);
    let mut hm1: Vec<u32> = m.kernel().into_iter().map(|(_, e)| e).filter(|&e| e > 0).collect();
    hm1.sort_unstable();
    Ok(Cohomology { h0_exponents: h0, h_minus1_exponents: hm1 })
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// `H^0` of the Gersten complex: the invariant exponents of `CH_0` with
/// `Z/p^n` coefficients.
pub fn h0(c: &GerstenComplex) -> Result<Vec<u32>> {
    Ok(cohomology(c)?.h0_exponents)
}

/// `Σ_v v(f) deg(v) = 0` over `P^1`.
pub fn degree_of_divisor(f: &RationalFunction) -> Result<i64> {
    let mut total = 0;
    for v in support(&[f]) {
        total += valuation(f, &v)? * v.degree() as i64;
    }
    Ok(total)
}

/// The field `F_{q0}` for a prime power `q0`.
pub fn field_of_size(q0: u64) -> Result<Field> {
    let ps = crate::field::prime_factors(q0);
    if ps.len() != 1 {
        return usage(format!("{q0} is not a prime power"));
    }
    let p = ps[0];
    let m = (0..).take_while(|&k| p.pow(k) < q0).count();
    if p.pow(m as u32) != q0 {
        return usage(format!("{q0} is not a prime power"));
    }
    GaloisField::default_for(p, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        GaloisField::default_for(3, 1).unwrap()
    }

    fn rf(k: &Field, s: &str) -> RationalFunction {
        RationalFunction::parse(k, s).unwrap()
    }

    #[test]
    fn valuations() {
        let k = f3();
        let t = rf(&k, "T");
        let zero = Place::finite(Poly::x(&k)).unwrap();
        assert_eq!(valuation(&t, &zero).unwrap(), 1);
        assert_eq!(valuation(&t, &Place::Infinity(k.clone())).unwrap(), -1);
        let pi = Place::finite(Poly::new(&k, vec![k.one(), k.zero(), k.one()])).unwrap();
        assert_eq!(valuation(&rf(&k, "(T^2+1)^3/T"), &pi).unwrap(), 3);
    }

    #[test]
    fn hand_checked_ledger() {
        let k = f3();
        let l = weil_reciprocity(&rf(&k, "T"), &rf(&k, "T-1")).unwrap();
        let norms: Vec<u64> = l.entries.iter().map(|e| e.norm).collect();
        // -1 = code 2 in F_3
        assert_eq!(norms, vec![2, 1, 2]);
        assert!(l.holds);
    }

    #[test]
    fn tame_basics() {
        let k = f3();
        let zero = Place::finite(Poly::x(&k)).unwrap();
        assert_eq!(tame_symbol(&[rf(&k, "T")], &zero).unwrap(), TameValue::K0(1));
        match tame_symbol(&[rf(&k, "T"), rf(&k, "T-1")], &zero).unwrap() {
            TameValue::K1(r) => assert_eq!(r.value, Poly::constant(&k, k.neg(k.one()))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn norm_f4() {
        let k = GaloisField::default_for(2, 2).unwrap();
        assert_eq!(norm_k1(&k, k.generator(), 2).unwrap(), k.one());
        assert!(norm_k1(&k, k.zero(), 2).is_err());
    }

    #[test]
    fn gersten_p1() {
        let k = GaloisField::default_for(2, 1).unwrap();
        let c = gersten_complex(Curve::A1, 2, 3, &k, 1).unwrap();
        assert_eq!(c.matrix, vec![vec![1, 0], vec![0, 1]]);
        assert!(h0(&c).unwrap().is_empty());
        let c = gersten_complex(Curve::P1, 2, 3, &k, 2).unwrap();
        let coh = cohomology(&c).unwrap();
        assert_eq!(coh.h0_exponents, vec![3]);
        assert!(coh.h_minus1_exponents.is_empty());
    }
}
