//! The Galois ring `GR(p^n, m) = (Z/p^n)[x]/(F)`, an independent model of
//! `W_n(F_{p^m})` used to cross-check coordinate arithmetic.
//!
//! `F` is the Hensel lift of the field modulus that divides `x^{p^m} - x`:
//! starting from the naive lift, Newton iteration on `x^q - x` moves the class
//! of `x` to the Teichmüller root, whose minimal polynomial is `F`.

use crate::field::{Field, FieldElem};
use crate::witt::WittVector;

/// An element: `m` coefficients in `[0, p^n)`, low degree first.
pub type GrElem = Vec<u64>;

#[derive(Clone, Debug)]
pub struct GaloisRing {
    p: u64,
    n: u32,
    modulus: u64,
    m: usize,
    /// Monic, length `m + 1`.
    f: Vec<u64>,
    field: Field,
}

fn mulm(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

impl GaloisRing {
    pub fn new(field: &Field, n: u32) -> GaloisRing {
        let p = field.characteristic();
        let modulus = p.pow(n);
        let m = field.degree();
        let naive = GaloisRing {
            p,
            n,
            modulus,
            m,
            f: field.modulus().to_vec(),
            field: field.clone(),
        };
        let f = naive.teichmuller_modulus();
        GaloisRing { f, ..naive }
    }

    pub fn modulus_poly(&self) -> &[u64] {
        &self.f
    }

    pub fn zero(&self) -> GrElem {
        vec![0; self.m]
    }

    pub fn one(&self) -> GrElem {
        let mut e = self.zero();
        e[0] = 1 % self.modulus;
        e
    }

    pub fn from_int(&self, c: i64) -> GrElem {
        let mut e = self.zero();
        e[0] = c.rem_euclid(self.modulus as i64) as u64;
        e
    }

    pub fn add(&self, a: &GrElem, b: &GrElem) -> GrElem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.modulus).collect()
    }

    pub fn sub(&self, a: &GrElem, b: &GrElem) -> GrElem {
        a.iter().zip(b).map(|(&x, &y)| (x + self.modulus - y) % self.modulus).collect()
    }

    pub fn scale(&self, a: &GrElem, c: u64) -> GrElem {
        a.iter().map(|&x| mulm(x, c, self.modulus)).collect()
    }

    pub fn mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let md = self.modulus;
        let mut prod = vec![0u64; 2 * self.m - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulm(x, y, md)) % md;
            }
        }
        // reduce by the monic modulus
        for k in (self.m..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..self.m {
                prod[k - self.m + i] = (prod[k - self.m + i] + md - mulm(c, self.f[i], md)) % md;
            }
        }
        prod.truncate(self.m);
        prod
    }

    pub fn pow(&self, a: &GrElem, mut e: u64) -> GrElem {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        r
    }

    /// Inverse of `1 - u` for `u` divisible by `p`: `sum_{k<n} u^k`.
    fn inv_one_minus(&self, u: &GrElem) -> GrElem {
        let mut acc = self.one();
        let mut t = self.one();
        for _ in 1..self.n {
            t = self.mul(&t, u);
            acc = self.add(&acc, &t);
        }
        acc
    }

    fn teichmuller_modulus(&self) -> Vec<u64> {
        let q = self.p.pow(self.m as u32);
        let mut x = self.zero();
        if self.m == 1 {
            // the root of the linear modulus
            x[0] = (self.modulus - self.f[0]) % self.modulus;
        } else {
            x[1] = 1;
        }
        // Newton on h(t) = t^q - t: t <- t + (t^q - t) / (1 - q t^{q-1})
        let mut tau = x;
        let mut precision = 1;
        while precision < 2 * self.n {
            let tq1 = self.pow(&tau, q - 1);
            let tq = self.mul(&tq1, &tau);
            let u = self.scale(&tq1, q % self.modulus);
            let step = self.mul(&self.sub(&tq, &tau), &self.inv_one_minus(&u));
            tau = self.add(&tau, &step);
            precision *= 2;
        }
        debug_assert_eq!(self.pow(&tau, q), tau);
        // minimal polynomial prod_{i<m} (X - tau^{p^i}) with coefficients in GR
        let mut poly: Vec<GrElem> = vec![self.one()];
        let mut conj = tau;
        for _ in 0..self.m {
            let mut next = vec![self.zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] = self.add(&next[i + 1], c);
                next[i] = self.sub(&next[i], &self.mul(c, &conj));
            }
            poly = next;
            conj = self.pow(&conj, self.p);
        }
        poly.iter()
            .map(|c| {
                debug_assert!(c[1..].iter().all(|&x| x == 0), "minimal polynomial has constant coefficients");
                c[0]
            })
            .collect()
    }

    /// A lift of a field element with digits in `[0, p)`.
    pub fn lift(&self, a: FieldElem) -> GrElem {
        self.field.to_coeffs(a)
    }

    /// Reduction mod `p`.
    pub fn reduce(&self, a: &GrElem) -> FieldElem {
        let digits: Vec<u64> = a.iter().map(|&x| x % self.p).collect();
        self.field.from_coeffs(&digits).expect("reduced digits")
    }

    /// `sum_i V^i[a_i] -> sum_i p^i a~_i^{p^{n-i}}` for arbitrary lifts `a~_i`.
    /// This is `σ^n` composed with the standard identification, hence a ring
    /// isomorphism `W_n(F_{p^m}) -> GR(p^n, m)`.
    pub fn from_witt(&self, w: &WittVector) -> GrElem {
        assert_eq!(w.len() as u32, self.n, "length mismatch");
        let mut acc = self.zero();
        for (i, &c) in w.coords().iter().enumerate() {
            let e = self.p.pow(self.n - i as u32);
            let term = self.pow(&self.lift(c), e);
            acc = self.add(&acc, &self.scale(&term, self.p.pow(i as u32)));
        }
        acc
    }

    pub fn characteristic_modulus(&self) -> u64 {
        self.modulus
    }

    pub fn check_divides_xq_minus_x(&self) -> bool {
        let q = self.p.pow(self.m as u32);
        let mut x = self.zero();
        if self.m == 1 {
            x[0] = (self.modulus - self.f[0]) % self.modulus;
        } else {
            x[1] = 1;
        }
        self.pow(&x, q) == x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaloisField;

    #[test]
    fn modulus_lifts_field_modulus() {
        for (p, m, n) in [(2u64, 2usize, 3u32), (3, 2, 2), (5, 1, 3), (2, 3, 4)] {
            let k = GaloisField::default_for(p, m).unwrap();
            let gr = GaloisRing::new(&k, n);
            let reduced: Vec<u64> = gr.modulus_poly().iter().map(|&c| c % p).collect();
            assert_eq!(reduced, k.modulus());
            assert!(gr.check_divides_xq_minus_x());
        }
    }

    #[test]
    fn witt_map_respects_ring_operations() {
        let k = GaloisField::default_for(2, 2).unwrap();
        let gr = GaloisRing::new(&k, 3);
        let a = WittVector::from_codes(&k, &[1, 2, 3]).unwrap();
        let b = WittVector::from_codes(&k, &[3, 0, 1]).unwrap();
        assert_eq!(gr.from_witt(&(&a + &b)), gr.add(&gr.from_witt(&a), &gr.from_witt(&b)));
        assert_eq!(gr.from_witt(&(&a * &b)), gr.mul(&gr.from_witt(&a), &gr.from_witt(&b)));
    }
}
