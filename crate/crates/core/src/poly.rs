//! Dense univariate polynomials over a finite field, with factorization.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{prime_factors, Field, FieldElem};

/// A polynomial over `F_q`, coefficients low degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    field: Field,
    coeffs: Vec<FieldElem>,
}

// Fixed seed: factorization output is sorted, but keeping the random choices
// reproducible makes timings reproducible too.
const EDF_SEED: u64 = 0x5eed_f00d;

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<FieldElem>) -> Poly {
        while coeffs.last() == Some(&FieldElem::ZERO) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, field.one())
    }

    pub fn constant(field: &Field, c: FieldElem) -> Poly {
        Poly::new(field, vec![c])
    }

    pub fn x(field: &Field) -> Poly {
        Poly::monomial(field, field.one(), 1)
    }

    pub fn monomial(field: &Field, c: FieldElem, deg: usize) -> Poly {
        let mut coeffs = vec![FieldElem::ZERO; deg + 1];
        coeffs[deg] = c;
        Poly::new(field, coeffs)
    }

    /// `x - a`.
    pub fn linear(field: &Field, a: FieldElem) -> Poly {
        Poly::new(field, vec![field.neg(a), field.one()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn lead(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == self.field.one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Poly::new(f, coeffs)
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FieldElem) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == FieldElem::ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut result = Poly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let f = &self.field;
        let db = divisor.deg();
        if self.coeffs.len() <= db {
            return (Poly::zero(f), self.clone());
        }
        let inv = f.inv(divisor.lead()).unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![FieldElem::ZERO; r.len() - db];
        for k in (0..q.len()).rev() {
            let c = f.mul(r[k + db], inv);
            q[k] = c;
            if c == FieldElem::ZERO {
                continue;
            }
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                r[k + i] = f.sub(r[k + i], f.mul(c, b));
            }
        }
        r.truncate(db);
        (Poly::new(f, q), Poly::new(f, r))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.divrem(divisor).1
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lead()).unwrap())
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(r0.lead()).unwrap();
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    /// Inverse of `self` modulo `modulus`, if it exists.
    pub fn inv_mod(&self, modulus: &Poly) -> Option<Poly> {
        let (g, s, _) = self.rem(modulus).ext_gcd(modulus);
        if g.degree() == Some(0) {
            Some(s.rem(modulus))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, other: &Poly, modulus: &Poly) -> Poly {
        self.mul(other).rem(modulus)
    }

    pub fn pow_mod(&self, mut e: u64, modulus: &Poly) -> Poly {
        let mut result = Poly::one(&self.field).rem(modulus);
        let mut base = self.rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_mod(&base, modulus);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, modulus);
            }
        }
        result
    }

    pub fn eval(&self, x: FieldElem) -> FieldElem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(FieldElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(f.from_int((i as u64 % f.characteristic()) as i64), c))
            .collect();
        Poly::new(f, coeffs)
    }

    /// Applies `a -> a^{p^k}` to every coefficient.
    pub fn frobenius_coeffs(&self, k: i64) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.frobenius(c, k)).collect())
    }

    /// `g(self(x))` for a polynomial `g`.
    pub fn compose_into(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field);
        for &c in g.coeffs.iter().rev() {
            acc = acc.mul(self).add(&Poly::constant(&self.field, c));
        }
        acc
    }

    /// `x^{q^k} mod modulus`, by repeated q-th powering.
    fn frobenius_power_of_x(&self, k: usize) -> Poly {
        let q = self.field.size();
        let mut cur = Poly::x(&self.field).rem(self);
        for _ in 0..k {
            cur = cur.pow_mod(q, self);
        }
        cur
    }

    /// Rabin's test over `F_q`.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let x = Poly::x(&self.field);
        let q = self.field.size();
        let mut powers = vec![x.rem(self)];
        for _ in 0..d {
            let last = powers.last().unwrap().clone();
            powers.push(last.pow_mod(q, self));
        }
        if !powers[d].sub(&x).rem(self).is_zero() {
            return false;
        }
        prime_factors(d as u64)
            .into_iter()
            .all(|r| self.gcd(&powers[d / r as usize].sub(&x)).degree() == Some(0))
    }

    /// p-th root of a polynomial whose exponents are all multiples of `p`.
    fn pth_root(&self) -> Poly {
        let f = &self.field;
        let p = f.characteristic() as usize;
        let coeffs = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|&c| f.frobenius(c, -1))
            .collect();
        Poly::new(f, coeffs)
    }

    /// Squarefree decomposition of a monic polynomial: pairs `(g, e)` with
    /// `self = prod g^e`, each `g` squarefree, monic, non-constant.
    pub fn squarefree_factorization(&self) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let p = self.field.characteristic() as u32;
        let f = self.monic();
        let df = f.derivative();
        if df.is_zero() {
            for (g, e) in f.pth_root().squarefree_factorization() {
                out.push((g, e * p));
            }
            return out;
        }
        let mut c = f.gcd(&df);
        let mut w = f.divrem(&c).0;
        let mut i = 1u32;
        while w.deg() > 0 {
            let y = w.gcd(&c);
            let z = w.divrem(&y).0;
            if z.deg() > 0 {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = c.divrem(&w).0;
        }
        if c.deg() > 0 {
            for (g, e) in c.pth_root().squarefree_factorization() {
                out.push((g, e * p));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    fn distinct_degree(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut f = self.clone();
        let x = Poly::x(&self.field);
        let q = self.field.size();
        let mut h = x.rem(&f);
        let mut d = 0;
        while f.deg() >= 2 * (d + 1) {
            d += 1;
            h = h.pow_mod(q, &f);
            let g = f.gcd(&h.sub(&x));
            if g.deg() > 0 {
                f = f.divrem(&g).0;
                h = h.rem(&f);
                out.push((g, d));
            }
        }
        if f.deg() > 0 {
            let deg = f.deg();
            out.push((f, deg));
        }
        out
    }

    /// Splits a monic squarefree product of irreducibles of degree `d`.
    fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        let n = self.deg();
        if n == d {
            return vec![self.clone()];
        }
        let field = &self.field;
        let q = field.size();
        loop {
            let a = Poly::new(field, (0..n).map(|_| FieldElem::from_code(rng.gen_range(0..q))).collect());
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let b = if field.characteristic() == 2 {
                // Absolute trace of a in F_{q^d}: sum of a^{2^i}, i < m d.
                let steps = field.degree() * d;
                let mut t = a.rem(self);
                let mut acc = t.clone();
                for _ in 1..steps {
                    t = t.mul_mod(&t, self);
                    acc = acc.add(&t);
                }
                acc
            } else {
                // a^{(q^d - 1)/2} = (a^{1 + q + ... + q^{d-1}})^{(q-1)/2}
                let mut t = a.rem(self);
                let mut prod = t.clone();
                for _ in 1..d {
                    t = t.pow_mod(q, self);
                    prod = prod.mul_mod(&t, self);
                }
                prod.pow_mod((q - 1) / 2, self).sub(&Poly::one(field))
            };
            let g = self.gcd(&b);
            if g.deg() > 0 && g.deg() < n {
                let h = self.divrem(&g).0;
                let mut out = g.equal_degree(d, rng);
                out.extend(h.equal_degree(d, rng));
                return out;
            }
        }
    }

    /// Full factorization into monic irreducibles with multiplicities, sorted.
    /// The leading coefficient is dropped; constants factor as the empty list.
    pub fn factor(&self) -> Vec<(Poly, u32)> {
        let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
        let mut out = Vec::new();
        for (g, e) in self.squarefree_factorization() {
            for (h, d) in g.distinct_degree() {
                for irr in h.equal_degree(d, &mut rng) {
                    out.push((irr, e));
                }
            }
        }
        out.sort_by_key(|a| a.0.cmp_key());
        // merge equal factors that arose from different squarefree layers
        let mut merged: Vec<(Poly, u32)> = Vec::new();
        for (g, e) in out {
            match merged.last_mut() {
                Some((h, k)) if *h == g => *k += e,
                _ => merged.push((g, e)),
            }
        }
        merged
    }

    /// Distinct roots in the coefficient field, sorted by code.
    pub fn roots(&self) -> Vec<FieldElem> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let f = self.monic();
        let x = Poly::x(&self.field);
        let split = f.gcd(&f.frobenius_power_of_x(1).sub(&x));
        if split.deg() == 0 {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
        let mut roots: Vec<FieldElem> = split
            .equal_degree(1, &mut rng)
            .into_iter()
            .map(|l| self.field.neg(l.coeff(0)))
            .collect();
        roots.sort();
        roots
    }

    /// Ordering key: degree first, then coefficient codes from the top.
    pub fn cmp_key(&self) -> (usize, Vec<u64>) {
        (self.coeffs.len(), self.coeffs.iter().rev().map(|c| c.code()).collect())
    }

    /// All monic polynomials of exact degree `d`, in code order.
    pub fn monic_of_degree(field: &Field, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = field.size();
        let count = q.pow(d as u32);
        (0..count).map(move |mut code| {
            let mut coeffs = Vec::with_capacity(d + 1);
            for _ in 0..d {
                coeffs.push(FieldElem::from_code(code % q));
                code /= q;
            }
            coeffs.push(field.one());
            Poly::new(field, coeffs)
        })
    }

    /// All monic irreducibles of degree exactly `d`, in code order.
    pub fn monic_irreducibles(field: &Field, d: usize) -> Vec<Poly> {
        Poly::monic_of_degree(field, d).filter(|f| f.is_irreducible()).collect()
    }
}

impl fmt::Display for Poly {
    /// Writes `c*T^k` terms, coefficients as field codes, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == FieldElem::ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let one = c.code() == 1;
            match (i, one) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => write!(f, "T")?,
                (1, false) => write!(f, "{c}*T")?,
                (_, true) => write!(f, "T^{i}")?,
                (_, false) => write!(f, "{c}*T^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaloisField;

    fn poly(field: &Field, c: &[i64]) -> Poly {
        Poly::new(field, c.iter().map(|&x| field.from_int(x)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let f = GaloisField::default_for(5, 1).unwrap();
        let a = poly(&f, &[1, 2, 3, 4, 1]);
        let b = poly(&f, &[2, 0, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.deg() < 2);
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree d over F_q
        let cases = [(2u64, 1usize, 1usize, 2usize), (2, 1, 3, 2), (2, 1, 4, 3), (3, 1, 2, 3), (2, 2, 2, 6), (3, 2, 2, 36)];
        for (p, m, d, expected) in cases {
            let f = GaloisField::default_for(p, m).unwrap();
            assert_eq!(Poly::monic_irreducibles(&f, d).len(), expected, "p={p} m={m} d={d}");
        }
    }

    #[test]
    fn factor_round_trip() {
        let f = GaloisField::default_for(3, 1).unwrap();
        let g = poly(&f, &[1, 0, 1]); // T^2+1, irreducible over F_3
        let h = poly(&f, &[1, 1]);
        let target = g.pow(2).mul(&h.pow(3)).mul(&poly(&f, &[0, 1]));
        let fac = target.factor();
        let rebuilt = fac.iter().fold(Poly::one(&f), |acc, (g, e)| acc.mul(&g.pow(*e as u64)));
        assert_eq!(rebuilt, target);
        assert_eq!(fac.len(), 3);
        assert!(fac.iter().all(|(g, _)| g.is_irreducible()));
    }

    #[test]
    fn factor_char_two_extension() {
        let f = GaloisField::default_for(2, 2).unwrap();
        let w = f.generator();
        let a = Poly::linear(&f, w);
        let b = Poly::new(&f, vec![w, f.one(), f.one()]);
        let target = a.pow(4).mul(&b);
        let rebuilt = target.factor().iter().fold(Poly::one(&f), |acc, (g, e)| acc.mul(&g.pow(*e as u64)));
        assert_eq!(rebuilt, target);
    }

    #[test]
    fn roots_of_split_polynomial() {
        let f = GaloisField::default_for(2, 4).unwrap();
        let xq = Poly::x(&f).pow(16).sub(&Poly::x(&f));
        assert_eq!(xq.roots().len(), 16);
        let f9 = GaloisField::default_for(3, 2).unwrap();
        let t = Poly::x(&f9).pow(9).sub(&Poly::x(&f9));
        assert_eq!(t.roots().len(), 9);
    }

    #[test]
    fn inverse_mod() {
        let f = GaloisField::default_for(3, 1).unwrap();
        let m = poly(&f, &[1, 0, 1]);
        let a = poly(&f, &[1, 1]);
        let inv = a.inv_mod(&m).unwrap();
        assert_eq!(a.mul_mod(&inv, &m), Poly::one(&f));
    }
}
