//! Truncated Witt vectors `W_n(F_{p^m})` with coordinate arithmetic.

mod galois_ring;
mod polys;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::field::{Embedding, Field, FieldElem, GaloisField};

pub use galois_ring::{GaloisRing, GrElem};
pub use polys::{ghost, witt_polys, IntPoly, WittPolys, MAX_LEN};

/// A Witt vector `(a_0, ..., a_{n-1})` of length `n >= 1`.
#[derive(Clone)]
pub struct WittVector {
    field: Field,
    coords: Vec<FieldElem>,
}

impl PartialEq for WittVector {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && GaloisField::same(&self.field, &other.field)
    }
}

impl Eq for WittVector {}

impl fmt::Debug for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WittVector {
    /// `W{c0,c1,...}` with each coordinate written as its field code.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{{")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// JSON mirror of a Witt vector: field data plus coordinates as coefficient
/// lists over `F_p`, low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittJson {
    pub p: u64,
    pub m: usize,
    pub modulus: Vec<u64>,
    pub n: usize,
    pub coords: Vec<Vec<u64>>,
}

type IntTable = Arc<(Vec<Vec<u64>>, HashMap<Vec<u64>, u64>)>;

fn int_tables() -> &'static Mutex<HashMap<(u64, usize), IntTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), IntTable>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

const INT_TABLE_LIMIT: u64 = 1 << 16;

/// Evaluates universal polynomials (coefficients mod `p`) at field points.
fn eval_field(trees: &[polys::EvalTree], field: &GaloisField, x: &[FieldElem], y: &[FieldElem]) -> Vec<FieldElem> {
    let n = x.len();
    let mut powers: Vec<Vec<FieldElem>> = vec![Vec::new(); 2 * MAX_LEN];
    for v in 0..2 * MAX_LEN {
        let base = if v < MAX_LEN {
            x.get(v)
        } else {
            y.get(v - MAX_LEN)
        };
        let Some(&base) = base else { continue };
        let max = trees.iter().take(n).map(|t| t.max_exp[v]).max().unwrap_or(0) as usize;
        let mut pw = Vec::with_capacity(max + 1);
        let mut cur = field.one();
        pw.push(cur);
        for _ in 0..max {
            cur = field.mul(cur, base);
            pw.push(cur);
        }
        powers[v] = pw;
    }
    if field.degree() == 1 {
        // prime field: plain modular arithmetic on the codes
        let p = field.characteristic();
        let ints: Vec<Vec<u64>> = powers.iter().map(|v| v.iter().map(|e| e.code()).collect()).collect();
        return trees
            .iter()
            .take(n)
            .map(|t| FieldElem::from_code(t.eval(&ints, 0u64, |c| c % p, |a, b| (a + b) % p, |a, b| a * b % p)))
            .collect();
    }
    trees
        .iter()
        .take(n)
        .map(|t| {
            t.eval(
                &powers,
                FieldElem::ZERO,
                |c| field.from_int(c as i64),
                |a, b| field.add(a, b),
                |a, b| field.mul(a, b),
            )
        })
        .collect()
}

impl WittVector {
    pub fn new(field: &Field, coords: Vec<FieldElem>) -> Result<WittVector> {
        if coords.is_empty() {
            return usage("Witt vectors need length >= 1");
        }
        if coords.len() > MAX_LEN {
            return Err(Error::Unsupported(format!("Witt length {} exceeds {MAX_LEN}", coords.len())));
        }
        if let Some(c) = coords.iter().find(|&&c| !field.contains(c)) {
            return usage(format!("coordinate code {c} does not lie in a field of size {}", field.size()));
        }
        Ok(WittVector { field: field.clone(), coords })
    }

    pub fn from_codes(field: &Field, codes: &[u64]) -> Result<WittVector> {
        WittVector::new(field, codes.iter().map(|&c| FieldElem::from_code(c)).collect())
    }

    pub(crate) fn raw(field: &Field, coords: Vec<FieldElem>) -> WittVector {
        debug_assert!(!coords.is_empty() && coords.len() <= MAX_LEN);
        WittVector { field: field.clone(), coords }
    }

    pub fn zero(field: &Field, n: usize) -> WittVector {
        WittVector::raw(field, vec![FieldElem::ZERO; n])
    }

    pub fn one(field: &Field, n: usize) -> WittVector {
        WittVector::teichmuller(field, field.one(), n)
    }

    /// The Teichmüller lift `[a] = (a, 0, ..., 0)`.
    pub fn teichmuller(field: &Field, a: FieldElem, n: usize) -> WittVector {
        let mut coords = vec![FieldElem::ZERO; n];
        coords[0] = a;
        WittVector::raw(field, coords)
    }

    /// Image of an integer under `Z -> W_n(F_p) -> W_n(k)`.
    pub fn from_int(field: &Field, c: i64, n: usize) -> WittVector {
        let p = field.characteristic();
        let pn = p.pow(n as u32);
        let r = c.rem_euclid(pn as i64) as u64;
        let table = if pn <= INT_TABLE_LIMIT { Some(int_table(field, n)) } else { None };
        match table {
            Some(t) => WittVector::raw(field, t.0[r as usize].iter().map(|&x| FieldElem::from_code(x)).collect()),
            None => {
                // double-and-add
                let mut acc = WittVector::zero(field, n);
                let mut base = WittVector::one(field, n);
                let mut e = r;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = &acc + &base;
                    }
                    base = &base + &base;
                    e >>= 1;
                }
                acc
            }
        }
    }

    /// Inverse of the isomorphism `Z/p^n -> W_n(F_p)`, for vectors whose
    /// coordinates lie in the prime field.
    pub fn to_int(&self) -> Option<u64> {
        let p = self.field.characteristic();
        if self.coords.iter().any(|c| c.code() >= p) {
            return None;
        }
        let n = self.len();
        if p.pow(n as u32) > INT_TABLE_LIMIT {
            return None;
        }
        let t = int_table(&self.field, n);
        t.1.get(&self.coords.iter().map(|c| c.code()).collect::<Vec<_>>()).copied()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> FieldElem {
        self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == FieldElem::ZERO)
    }

    /// Index of the first nonzero coordinate (`n` for zero). Over a perfect
    /// field this is the `p`-adic valuation.
    pub fn valuation(&self) -> usize {
        self.coords.iter().position(|&c| c != FieldElem::ZERO).unwrap_or(self.len())
    }

    pub fn is_unit(&self) -> bool {
        self.coords[0] != FieldElem::ZERO
    }

    fn check_compatible(&self, other: &WittVector) -> Result<()> {
        if !GaloisField::same(&self.field, &other.field) {
            return usage("Witt vectors over different fields");
        }
        if self.len() != other.len() {
            return usage(format!("Witt vectors of lengths {} and {}", self.len(), other.len()));
        }
        Ok(())
    }

    fn polys(&self) -> Arc<WittPolys> {
        witt_polys(self.field.characteristic(), self.len(), 1).expect("length bounded at construction")
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector> {
        self.check_compatible(other)?;
        let w = self.polys();
        let coords = eval_field(&w.sum_trees, &self.field, &self.coords, &other.coords);
        Ok(WittVector::raw(&self.field, coords))
    }

    pub fn mul(&self, other: &WittVector) -> Result<WittVector> {
        self.check_compatible(other)?;
        let w = self.polys();
        let coords = eval_field(&w.prod_trees, &self.field, &self.coords, &other.coords);
        Ok(WittVector::raw(&self.field, coords))
    }

    pub fn neg(&self) -> WittVector {
        if self.field.characteristic() != 2 {
            let f = &self.field;
            return WittVector::raw(f, self.coords.iter().map(|&c| f.neg(c)).collect());
        }
        self.mul_int(-1)
    }

    pub fn sub(&self, other: &WittVector) -> Result<WittVector> {
        self.add(&other.neg())
    }

    pub fn mul_int(&self, c: i64) -> WittVector {
        &WittVector::from_int(&self.field, c, self.len()) * self
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Option<WittVector> {
        if !self.is_unit() {
            return None;
        }
        let f = &self.field;
        let n = self.len();
        let two = WittVector::from_int(f, 2, n);
        let mut y = WittVector::teichmuller(f, f.inv(self.coords[0]).unwrap(), n);
        // Newton: each step doubles the number of correct coordinates.
        let mut correct = 1;
        while correct < n {
            y = &y * &(&two - &(self * &y));
            correct *= 2;
        }
        debug_assert_eq!(&y * self, WittVector::one(f, n));
        Some(y)
    }

    pub fn pow(&self, mut e: u64) -> WittVector {
        let mut r = WittVector::one(&self.field, self.len());
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        r
    }

    /// `W_n` of the field Frobenius raised to `e`: `a_i -> a_i^{p^e}`.
    pub fn sigma(&self, e: i64) -> WittVector {
        let f = &self.field;
        WittVector::raw(f, self.coords.iter().map(|&c| f.frobenius(c, e)).collect())
    }

    /// `V: W_n -> W_{n+1}`, `(a_0, ...) -> (0, a_0, ...)`.
    pub fn verschiebung(&self) -> Result<WittVector> {
        if self.len() + 1 > MAX_LEN {
            return Err(Error::Unsupported(format!("Witt length {} exceeds {MAX_LEN}", self.len() + 1)));
        }
        let mut coords = Vec::with_capacity(self.len() + 1);
        coords.push(FieldElem::ZERO);
        coords.extend_from_slice(&self.coords);
        Ok(WittVector::raw(&self.field, coords))
    }

    /// `R: W_{n+1} -> W_n`, dropping the last coordinate.
    pub fn restriction(&self) -> Result<WittVector> {
        if self.len() < 2 {
            return usage("restriction of a length-1 Witt vector has length 0");
        }
        Ok(self.truncate(self.len() - 1))
    }

    /// `F = R ∘ σ: W_{n+1} -> W_n`.
    pub fn frobenius(&self) -> Result<WittVector> {
        if self.len() < 2 {
            return usage("Frobenius of a length-1 Witt vector has length 0");
        }
        Ok(self.sigma(1).truncate(self.len() - 1))
    }

    /// First `k` coordinates, i.e. `R^{n-k}`.
    pub fn truncate(&self, k: usize) -> WittVector {
        assert!(k >= 1 && k <= self.len(), "truncation to length {k} of a length-{} vector", self.len());
        WittVector::raw(&self.field, self.coords[..k].to_vec())
    }

    /// Extends by zero coordinates to length `k`. Not a ring map; this is the
    /// additive section `sum V^j[a_j] -> sum V^j[a_j]` into a longer ring.
    pub fn pad(&self, k: usize) -> WittVector {
        assert!(k >= self.len() && k <= MAX_LEN, "padding to length {k}");
        let mut coords = self.coords.clone();
        coords.resize(k, FieldElem::ZERO);
        WittVector::raw(&self.field, coords)
    }

    /// `R^k ∘ V^k`, keeping the length: `(a_0, ...) -> (0^k, a_0, ...)`.
    pub fn shift(&self, k: usize) -> WittVector {
        let n = self.len();
        let mut coords = vec![FieldElem::ZERO; n];
        for i in 0..n.saturating_sub(k) {
            coords[i + k] = self.coords[i];
        }
        WittVector::raw(&self.field, coords)
    }

    /// Inverse of `V^k` on vectors of valuation `>= k`: drops the first `k`
    /// coordinates (length shrinks by `k`).
    pub fn unshift(&self, k: usize) -> Option<WittVector> {
        if k >= self.len() || self.valuation() < k {
            return None;
        }
        Some(WittVector::raw(&self.field, self.coords[k..].to_vec()))
    }

    /// Moves the coordinates into a larger field along an embedding.
    pub fn embed(&self, e: &Embedding) -> WittVector {
        WittVector::raw(e.target(), self.coords.iter().map(|&c| e.map(c)).collect())
    }

    /// Pulls the coordinates back along an embedding, if they all lie in its image.
    pub fn restrict_field(&self, e: &Embedding) -> Option<WittVector> {
        let coords: Option<Vec<FieldElem>> = self.coords.iter().map(|&c| e.preimage(c)).collect();
        Some(WittVector::raw(e.source(), coords?))
    }

    /// Trace from `W_n(F_{q^e})` to `W_n(F_q)`: the sum of the `e` conjugates
    /// under the `q`-power Frobenius, pulled back to the subfield.
    pub fn trace(&self, target: &Field) -> Result<WittVector> {
        let src = &self.field;
        if target.characteristic() != src.characteristic() || !src.degree().is_multiple_of(target.degree()) {
            return usage(format!(
                "F_{}^{} is not a subfield of F_{}^{}",
                target.characteristic(),
                target.degree(),
                src.characteristic(),
                src.degree()
            ));
        }
        let emb = Embedding::new(target, src)?;
        let step = target.degree() as i64;
        let e = src.degree() / target.degree();
        let mut acc = WittVector::zero(src, self.len());
        for i in 0..e {
            acc = &acc + &self.sigma(step * i as i64);
        }
        acc.restrict_field(&emb)
            .ok_or_else(|| Error::Consistency("trace does not lie in the subring".into()))
    }

    pub fn to_json(&self) -> WittJson {
        let d = self.field.desc();
        WittJson {
            p: d.p,
            m: d.m,
            modulus: d.modulus,
            n: self.len(),
            coords: self.coords.iter().map(|&c| self.field.to_coeffs(c)).collect(),
        }
    }

    pub fn from_json(j: &WittJson) -> Result<WittVector> {
        if j.modulus.len() != j.m + 1 {
            return usage("modulus length does not match m");
        }
        let field = GaloisField::new(j.p, j.modulus.clone())?;
        if j.coords.len() != j.n {
            return usage(format!("expected {} coordinates, found {}", j.n, j.coords.len()));
        }
        let coords = j.coords.iter().map(|c| field.from_coeffs(c)).collect::<Result<Vec<_>>>()?;
        WittVector::new(&field, coords)
    }

    /// Parses `W{c0,c1,...}` (codes) over the given field.
    pub fn parse(field: &Field, s: &str) -> Result<WittVector> {
        let s = s.trim();
        let inner = s
            .strip_prefix("W{")
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected W{{...}}, found `{s}`")))?;
        let codes = inner
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad coordinate `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        WittVector::from_codes(field, &codes)
    }
}

fn int_table(field: &Field, n: usize) -> IntTable {
    let p = field.characteristic();
    if let Some(t) = int_tables().lock().unwrap().get(&(p, n)) {
        return t.clone();
    }
    let fp = GaloisField::prime_field(p).expect("prime");
    let pn = p.pow(n as u32);
    let one = WittVector::one(&fp, n);
    let mut cur = WittVector::zero(&fp, n);
    let mut forward = Vec::with_capacity(pn as usize);
    let mut back = HashMap::with_capacity(pn as usize);
    for k in 0..pn {
        let codes: Vec<u64> = cur.coords.iter().map(|c| c.code()).collect();
        back.insert(codes.clone(), k);
        forward.push(codes);
        cur = cur.add(&one).expect("same field");
    }
    let t = Arc::new((forward, back));
    int_tables().lock().unwrap().insert((p, n), t.clone());
    t
}

macro_rules! binop {
    ($tr:ident, $m:ident, $call:ident) => {
        impl std::ops::$tr<&WittVector> for &WittVector {
            type Output = WittVector;

            /// Panics on mismatched fields or lengths; use the named method for
            /// a checked version.
            fn $m(self, rhs: &WittVector) -> WittVector {
                self.$call(rhs).expect("compatible Witt vectors")
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for &WittVector {
    type Output = WittVector;

    fn neg(self) -> WittVector {
        WittVector::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, m: usize) -> Field {
        GaloisField::default_for(p, m).unwrap()
    }

    #[test]
    fn one_plus_one_in_w2_f2() {
        let k = f(2, 1);
        let one = WittVector::one(&k, 2);
        assert_eq!((&one + &one).to_string(), "W{0,1}");
        assert_eq!((&one + &one).to_int(), Some(2));
    }

    #[test]
    fn int_table_is_a_ring_isomorphism_small() {
        let k = f(3, 1);
        for a in 0..27i64 {
            for b in 0..27i64 {
                let (x, y) = (WittVector::from_int(&k, a, 3), WittVector::from_int(&k, b, 3));
                assert_eq!((&x * &y).to_int(), Some(((a * b) % 27) as u64));
            }
        }
    }

    #[test]
    fn inverse_and_negation() {
        let k = f(2, 2);
        let x = WittVector::from_codes(&k, &[2, 3, 1]).unwrap();
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, WittVector::one(&k, 3));
        assert!((&x + &x.neg()).is_zero());
        assert!(WittVector::from_codes(&k, &[0, 1, 0]).unwrap().inverse().is_none());
    }

    #[test]
    fn parse_print_round_trip() {
        let k = f(3, 2);
        let x = WittVector::from_codes(&k, &[8, 0, 5]).unwrap();
        assert_eq!(WittVector::parse(&k, &x.to_string()).unwrap(), x);
        assert!(WittVector::parse(&k, "W{9}").is_err());
        assert!(WittVector::parse(&k, "V{1}").is_err());
        assert_eq!(WittVector::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn trace_of_one_is_degree() {
        let k = f(2, 1);
        let big = f(2, 4);
        let t = WittVector::one(&big, 3).trace(&k).unwrap();
        assert_eq!(t, WittVector::from_int(&k, 4, 3));
    }
}
