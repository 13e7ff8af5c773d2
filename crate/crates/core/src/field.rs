//! Finite fields `F_{p^m}` presented as `F_p[x]/(f)` for a monic irreducible `f`.
//!
//! Elements are packed into a `u64` as base-`p` digits, low degree first:
//! the element `c_0 + c_1 x + ... + c_{m-1} x^{m-1}` has code
//! `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`. The prime subfield is therefore the
//! set of codes `< p`. Arithmetic goes through the owning [`GaloisField`];
//! elements carry no reference to their field.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::poly::Poly;

/// Shared handle to a field. Values built over the same field share it.
pub type Field = Arc<GaloisField>;

/// An element of some `F_{p^m}`, as its packed digit code.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FieldElem(pub(crate) u64);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);

    pub fn code(self) -> u64 {
        self.0
    }

    pub fn from_code(code: u64) -> FieldElem {
        FieldElem(code)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serializable description of a field: characteristic, degree and the
/// defining modulus (coefficients low degree first, monic, length `m + 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDesc {
    pub p: u64,
    pub m: usize,
    pub modulus: Vec<u64>,
}

const TABLE_LIMIT: u64 = 1 << 16;
const ADD_TABLE_LIMIT: u64 = 256;

struct Tables {
    log: Vec<u32>,
    exp: Vec<u64>,
    add: Option<Vec<u16>>,
}

pub struct GaloisField {
    p: u64,
    m: usize,
    q: u64,
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}[{:?}]", self.p, self.m, self.modulus)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for GaloisField {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// p-adic valuation of a nonzero integer.
pub fn valuation_p(mut n: u64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub(crate) fn checked_pow(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

// Dense polynomial helpers over F_p used to validate moduli before any field
// exists. Coefficients low degree first; trailing zeros trimmed.
mod fp_poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let inv = inv_mod(b[db], p);
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let c = r[r.len() - 1] * inv % p;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - c * bi % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, f, p)
    }

    pub fn powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &b, f, p);
            }
            b = mulmod(&b, &b, f, p);
            e >>= 1;
        }
        rem(&result, f, p)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    /// Rabin's irreducibility test for a monic `f` of degree `m`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let m = f.len() - 1;
        if m == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        // x^{p^k} mod f for k = 0..=m
        let mut frob = vec![rem(&x, f, p)];
        for _ in 0..m {
            let last = frob.last().unwrap().clone();
            frob.push(powmod(&last, p, f, p));
        }
        let sub_x = |mut a: Vec<u64>| {
            if a.len() < 2 {
                a.resize(2, 0);
            }
            a[1] = (a[1] + p - 1) % p;
            trim(&mut a);
            a
        };
        if !sub_x(frob[m].clone()).is_empty() {
            return false;
        }
        for r in super::prime_factors(m as u64) {
            let k = m / r as usize;
            let g = gcd(f, &sub_x(frob[k].clone()), p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

fn default_fields() -> &'static Mutex<HashMap<(u64, usize), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl GaloisField {
    /// Builds `F_p[x]/(modulus)`, checking that `p` is prime and `modulus` is
    /// monic irreducible of degree `>= 1`.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Field> {
        if !is_prime(p) || p >= 1 << 31 {
            return usage(format!("{p} is not a supported prime"));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return usage("field modulus must be monic of degree >= 1");
        }
        if modulus.iter().any(|&c| c >= p) {
            return usage("field modulus coefficients must lie in [0, p)");
        }
        let m = modulus.len() - 1;
        let q = match checked_pow(p, m as u32) {
            Some(q) if q < 1 << 62 => q,
            _ => return usage(format!("field F_{p}^{m} is too large")),
        };
        if !fp_poly::is_irreducible(&modulus, p) {
            return usage(format!("modulus {modulus:?} is reducible over F_{p}"));
        }
        let mut field = GaloisField { p, m, q, modulus, tables: None };
        if q <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(Arc::new(field))
    }

    pub fn from_desc(desc: &FieldDesc) -> Result<Field> {
        if desc.modulus.len() != desc.m + 1 {
            return usage("modulus length does not match the degree m");
        }
        Self::new(desc.p, desc.modulus.clone())
    }

    /// `F_{p^m}` with the default modulus: the monic irreducible whose lower
    /// coefficients, read as a base-`p` number, are smallest. Fields are
    /// cached so repeated requests share one handle.
    pub fn default_for(p: u64, m: usize) -> Result<Field> {
        if m == 0 {
            return usage("field degree must be >= 1");
        }
        if let Some(f) = default_fields().lock().unwrap().get(&(p, m)) {
            return Ok(f.clone());
        }
        if !is_prime(p) {
            return usage(format!("{p} is not prime"));
        }
        let count = match checked_pow(p, m as u32) {
            Some(c) if c < 1 << 62 => c,
            _ => return usage(format!("field F_{p}^{m} is too large")),
        };
        let mut found = None;
        for code in 0..count {
            let mut coeffs = Vec::with_capacity(m + 1);
            let mut c = code;
            for _ in 0..m {
                coeffs.push(c % p);
                c /= p;
            }
            coeffs.push(1);
            if fp_poly::is_irreducible(&coeffs, p) {
                found = Some(coeffs);
                break;
            }
        }
        let field = Self::new(p, found.expect("irreducible polynomials exist in every degree"))?;
        default_fields().lock().unwrap().insert((p, m), field.clone());
        Ok(field)
    }

    pub fn prime_field(p: u64) -> Result<Field> {
        Self::default_for(p, 1)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q;
        let mut gen = None;
        let factors = prime_factors(q - 1);
        for cand in 1..q {
            let g = FieldElem(cand);
            if factors.iter().all(|&r| self.pow_slow(g, (q - 1) / r) != self.one()) {
                gen = Some(g);
                break;
            }
        }
        let g = gen.expect("multiplicative group is cyclic");
        let mut log = vec![0u32; q as usize];
        let mut exp = vec![0u64; 2 * (q as usize - 1)];
        let mut cur = self.one();
        for i in 0..(q - 1) as usize {
            exp[i] = cur.0;
            exp[i + q as usize - 1] = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.mul_slow(cur, g);
        }
        let add = if q <= ADD_TABLE_LIMIT {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = self.add_slow(FieldElem(a), FieldElem(b)).0 as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        Tables { log, exp, add }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn desc(&self) -> FieldDesc {
        FieldDesc { p: self.p, m: self.m, modulus: self.modulus.clone() }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, c: i64) -> FieldElem {
        FieldElem(c.rem_euclid(self.p as i64) as u64)
    }

    /// The class of `x`, a root of the modulus.
    pub fn generator(&self) -> FieldElem {
        if self.m == 1 {
            self.neg(FieldElem(self.modulus[0]))
        } else {
            FieldElem(self.p)
        }
    }

    pub fn contains(&self, a: FieldElem) -> bool {
        a.0 < self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() > self.m {
            return usage(format!("element has {} coefficients, field degree is {}", coeffs.len(), self.m));
        }
        let mut code = 0u64;
        let mut pw = 1u64;
        for &c in coeffs {
            if c >= self.p {
                return usage(format!("coefficient {c} is not reduced mod {}", self.p));
            }
            code += c * pw;
            pw = pw.saturating_mul(self.p);
        }
        Ok(FieldElem(code))
    }

    pub fn to_coeffs(&self, a: FieldElem) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.m);
        let mut c = a.0;
        for _ in 0..self.m {
            out.push(c % self.p);
            c /= self.p;
        }
        out
    }

    pub fn from_code(&self, code: u64) -> Result<FieldElem> {
        if code >= self.q {
            return Err(Error::Usage(format!("element code {code} out of range for field of size {}", self.q)));
        }
        Ok(FieldElem(code))
    }

    fn add_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut r = 0u64;
        let mut pw = 1u64;
        while x > 0 || y > 0 {
            r += ((x % self.p + y % self.p) % self.p) * pw;
            x /= self.p;
            y /= self.p;
            pw = pw.wrapping_mul(self.p);
        }
        FieldElem(r)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        if let Some(Tables { add: Some(t), .. }) = &self.tables {
            return FieldElem(t[(a.0 * self.q + b.0) as usize] as u64);
        }
        self.add_slow(a, b)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut r = 0u64;
        let mut pw = 1u64;
        while x > 0 {
            r += ((self.p - x % self.p) % self.p) * pw;
            x /= self.p;
            pw = pw.wrapping_mul(self.p);
        }
        FieldElem(r)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    fn mul_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        let p = self.p;
        let x = self.to_coeffs(a);
        let y = self.to_coeffs(b);
        let mut prod = vec![0u64; 2 * self.m - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi * yj) % p;
            }
        }
        let r = fp_poly::rem(&prod, &self.modulus, p);
        let mut code = 0u64;
        let mut pw = 1u64;
        for c in r {
            code += c * pw;
            pw = pw.wrapping_mul(p);
        }
        FieldElem(code)
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        match &self.tables {
            Some(t) => FieldElem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.mul_slow(a, b),
        }
    }

    fn pow_slow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut r = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul_slow(r, b);
            }
            b = self.mul_slow(b, b);
            e >>= 1;
        }
        r
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return FieldElem(0);
        }
        match &self.tables {
            Some(t) => {
                let l = (t.log[a.0 as usize] as u128 * e as u128 % (self.q as u128 - 1)) as usize;
                FieldElem(t.exp[l])
            }
            None => self.pow_slow(a, e),
        }
    }

    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return None;
        }
        match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] as usize;
                Some(FieldElem(t.exp[(self.q as usize - 1 - l) % (self.q as usize - 1)]))
            }
            None => Some(self.pow_slow(a, self.q - 2)),
        }
    }

    /// `a^{p^k}` for any integer `k`; negative `k` inverts the Frobenius.
    pub fn frobenius(&self, a: FieldElem, k: i64) -> FieldElem {
        let k = k.rem_euclid(self.m as i64) as u32;
        if k == 0 || a.0 < self.p {
            return a;
        }
        self.pow(a, self.p.pow(k))
    }

    /// Whether `a` lies in the subfield `F_{p^r}`.
    pub fn in_subfield(&self, a: FieldElem, r: usize) -> bool {
        self.frobenius(a, r as i64) == a
    }

    /// Field norm to the subfield `F_{p^r}` (`r | m`), as the product of the
    /// `m / r` conjugates.
    pub fn norm_to_subfield(&self, a: FieldElem, r: usize) -> FieldElem {
        assert!(r > 0 && self.m.is_multiple_of(r), "F_p^{r} is not a subfield of F_p^{}", self.m);
        let mut acc = self.one();
        for i in 0..self.m / r {
            acc = self.mul(acc, self.frobenius(a, (i * r) as i64));
        }
        acc
    }

    /// Absolute trace to `F_p`, returned as an integer in `[0, p)`.
    pub fn trace_to_prime(&self, a: FieldElem) -> u64 {
        let mut acc = self.zero();
        for i in 0..self.m {
            acc = self.add(acc, self.frobenius(a, i as i64));
        }
        debug_assert!(acc.0 < self.p);
        acc.0
    }

    pub fn same(a: &Field, b: &Field) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

/// A field embedding `src -> dst` given by sending the generator of `src` to a
/// root of its modulus in `dst`: the generator itself when the fields coincide,
/// otherwise the root with the smallest code.
#[derive(Clone, Debug)]
pub struct Embedding {
    src: Field,
    dst: Field,
    basis_images: Vec<FieldElem>,
    /// Row-reduced system for pulling elements back, columns = basis images.
    pullback: crate::linalg::FpSolver,
}

impl Embedding {
    pub fn new(src: &Field, dst: &Field) -> Result<Embedding> {
        if src.p != dst.p || !dst.m.is_multiple_of(src.m) {
            return usage(format!(
                "F_{}^{} does not embed in F_{}^{}",
                src.p, src.m, dst.p, dst.m
            ));
        }
        let root = if GaloisField::same(src, dst) {
            dst.generator()
        } else {
            let modulus = Poly::new(dst, src.modulus.iter().map(|&c| dst.from_int(c as i64)).collect());
            let mut roots = modulus.roots();
            roots.sort();
            *roots
                .first()
                .ok_or_else(|| Error::Consistency("irreducible modulus has no root in extension".into()))?
        };
        let mut basis_images = Vec::with_capacity(src.m);
        let mut cur = dst.one();
        for _ in 0..src.m {
            basis_images.push(cur);
            cur = dst.mul(cur, root);
        }
        let columns: Vec<Vec<u64>> = basis_images.iter().map(|&b| dst.to_coeffs(b)).collect();
        let pullback = crate::linalg::FpSolver::from_columns(dst.p, dst.m, &columns);
        Ok(Embedding { src: src.clone(), dst: dst.clone(), basis_images, pullback })
    }

    pub fn source(&self) -> &Field {
        &self.src
    }

    pub fn target(&self) -> &Field {
        &self.dst
    }

    pub fn map(&self, a: FieldElem) -> FieldElem {
        let mut acc = self.dst.zero();
        for (c, &img) in self.src.to_coeffs(a).into_iter().zip(&self.basis_images) {
            if c != 0 {
                acc = self.dst.add(acc, self.dst.mul(self.dst.from_int(c as i64), img));
            }
        }
        acc
    }

    /// The preimage of `b`, if `b` lies in the image of `src`.
    pub fn preimage(&self, b: FieldElem) -> Option<FieldElem> {
        let coeffs = self.pullback.solve(&self.dst.to_coeffs(b))?;
        Some(self.src.from_coeffs(&coeffs).expect("solver returns reduced coefficients"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli_are_least_irreducible() {
        assert_eq!(GaloisField::default_for(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(GaloisField::default_for(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(GaloisField::default_for(2, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(GaloisField::default_for(5, 2).unwrap().modulus(), &[2, 0, 1]);
    }

    #[test]
    fn rejects_reducible_modulus() {
        assert!(GaloisField::new(2, vec![1, 0, 1]).is_err());
        assert!(GaloisField::new(4, vec![1, 1]).is_err());
        assert!(GaloisField::new(3, vec![1, 0, 2]).is_err());
    }

    #[test]
    fn f4_arithmetic() {
        let f = GaloisField::default_for(2, 2).unwrap();
        let w = f.generator();
        let w2 = f.mul(w, w);
        assert_eq!(f.add(w, w2), f.one());
        assert_eq!(f.mul(w, w2), f.one());
        assert_eq!(f.frobenius(w, 1), w2);
        assert_eq!(f.frobenius(w2, -1), w);
    }

    #[test]
    fn table_and_slow_paths_agree() {
        let f = GaloisField::default_for(3, 3).unwrap();
        for a in f.elements() {
            for b in f.elements().step_by(5) {
                assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                assert_eq!(f.add(a, b), f.add_slow(a, b));
            }
        }
    }

    #[test]
    fn frobenius_has_order_m() {
        let f = GaloisField::default_for(5, 3).unwrap();
        for a in f.elements().step_by(7) {
            assert_eq!(f.frobenius(a, 3), a);
            assert_eq!(f.frobenius(f.frobenius(a, 1), -1), a);
        }
    }

    #[test]
    fn large_field_uses_slow_path() {
        let f = GaloisField::default_for(5, 8).unwrap();
        assert!(f.tables.is_none());
        let g = f.generator();
        assert_eq!(f.pow(g, f.size() - 1), f.one());
        let inv = f.inv(g).unwrap();
        assert_eq!(f.mul(g, inv), f.one());
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let f4 = GaloisField::default_for(2, 2).unwrap();
        let f16 = GaloisField::default_for(2, 4).unwrap();
        let e = Embedding::new(&f4, &f16).unwrap();
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(e.map(f4.mul(a, b)), f16.mul(e.map(a), e.map(b)));
                assert_eq!(e.map(f4.add(a, b)), f16.add(e.map(a), e.map(b)));
            }
            assert_eq!(e.preimage(e.map(a)), Some(a));
        }
        let outside = f16.elements().filter(|&b| e.preimage(b).is_none()).count();
        assert_eq!(outside, 12);
    }

    #[test]
    fn norms() {
        let f4 = GaloisField::default_for(2, 2).unwrap();
        assert_eq!(f4.norm_to_subfield(f4.generator(), 1), f4.one());
        assert!(GaloisField::default_for(2, 3).is_ok());
        assert!(Embedding::new(&GaloisField::default_for(2, 2).unwrap(), &GaloisField::default_for(2, 3).unwrap()).is_err());
    }
}
