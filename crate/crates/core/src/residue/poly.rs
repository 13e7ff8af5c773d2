use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A multivariate polynomial with rational coefficients over a named,
/// sorted variable list. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

/// Orders `T2 < T10 < Y1` (alphabetic prefix, then numeric suffix).
fn var_order(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, u64) {
        let i = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        (&s[..i], s[i..].parse().unwrap_or(0))
    }
    split(a).cmp(&split(b)).then_with(|| a.cmp(b))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ExactPoly {
    pub fn zero() -> ExactPoly {
        ExactPoly { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn constant(c: BigRational) -> ExactPoly {
        let mut p = ExactPoly::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn from_int(c: i64) -> ExactPoly {
        ExactPoly::constant(rat(c))
    }

    pub fn one() -> ExactPoly {
        ExactPoly::from_int(1)
    }

    /// `name^e`.
    pub fn var_pow(name: &str, e: u32) -> ExactPoly {
        if e == 0 {
            return ExactPoly::one();
        }
        let mut p = ExactPoly { vars: vec![name.to_string()], terms: BTreeMap::new() };
        p.terms.insert(vec![e], BigRational::one());
        p
    }

    pub fn var(name: &str) -> ExactPoly {
        ExactPoly::var_pow(name, 1)
    }

    /// The monomial `c * prod name_i^{e_i}`.
    pub fn monomial(c: BigRational, powers: &[(&str, u32)]) -> ExactPoly {
        powers.iter().fold(ExactPoly::constant(c), |acc, (v, e)| acc.mul(&ExactPoly::var_pow(v, *e)))
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&vec![0; self.vars.len()]).cloned(),
            _ => None,
        }
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Rewrites over the sorted union of both variable lists.
    fn with_vars(&self, vars: &[String]) -> ExactPoly {
        let map: Vec<usize> = self.vars.iter().map(|v| vars.iter().position(|w| w == v).expect("superset")).collect();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = vec![0u32; vars.len()];
            for (i, &x) in e.iter().enumerate() {
                ne[map[i]] = x;
            }
            terms.insert(ne, c.clone());
        }
        ExactPoly { vars: vars.to_vec(), terms }
    }

    fn union_vars(a: &[String], b: &[String]) -> Vec<String> {
        let mut v: Vec<String> = a.iter().chain(b).cloned().collect();
        v.sort_by(|x, y| var_order(x, y));
        v.dedup();
        v
    }

    fn aligned(&self, other: &ExactPoly) -> (ExactPoly, ExactPoly) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let u = ExactPoly::union_vars(&self.vars, &other.vars);
        (self.with_vars(&u), other.with_vars(&u))
    }

    /// Drops variables that no longer occur.
    fn trimmed(mut self) -> ExactPoly {
        let used: Vec<bool> = (0..self.vars.len()).map(|i| self.terms.keys().any(|e| e[i] > 0)).collect();
        if used.iter().all(|&u| u) {
            return self;
        }
        let vars = self.vars.iter().zip(&used).filter(|(_, &u)| u).map(|(v, _)| v.clone()).collect();
        let terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(e, c)| (e.iter().zip(&used).filter(|(_, &u)| u).map(|(&x, _)| x).collect(), c))
            .collect();
        ExactPoly { vars, terms }
    }

    fn insert_add(terms: &mut BTreeMap<Vec<u32>, BigRational>, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match terms.get_mut(&e) {
            Some(old) => {
                *old += c;
                if old.is_zero() {
                    terms.remove(&e);
                }
            }
            None => {
                terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, other: &ExactPoly) -> ExactPoly {
        let (mut a, b) = self.aligned(other);
        for (e, c) in b.terms {
            ExactPoly::insert_add(&mut a.terms, e, c);
        }
        a.trimmed()
    }

    pub fn neg(&self) -> ExactPoly {
        ExactPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &ExactPoly) -> ExactPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> ExactPoly {
        if c.is_zero() {
            return ExactPoly::zero();
        }
        ExactPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &ExactPoly) -> ExactPoly {
        let (a, b) = self.aligned(other);
        let mut terms = BTreeMap::new();
        for (e1, c1) in &a.terms {
            for (e2, c2) in &b.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                ExactPoly::insert_add(&mut terms, e, c1 * c2);
            }
        }
        ExactPoly { vars: a.vars, terms }.trimmed()
    }

    pub fn pow(&self, mut e: u32) -> ExactPoly {
        let mut r = ExactPoly::one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        match self.var_index(var) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Coefficients with respect to `var`: `self = sum_k out[k] var^k`.
    pub fn coeffs_in(&self, var: &str) -> Vec<ExactPoly> {
        let Some(i) = self.var_index(var) else { return vec![self.clone()] };
        let deg = self.degree_in(var) as usize;
        let mut out: Vec<BTreeMap<Vec<u32>, BigRational>> = vec![BTreeMap::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[i] = 0;
            out[e[i] as usize].insert(ne, c.clone());
        }
        out.into_iter().map(|terms| ExactPoly { vars: self.vars.clone(), terms }.trimmed()).collect()
    }

    /// `sum_k c[k] var^k`.
    pub fn from_coeffs_in(var: &str, coeffs: &[ExactPoly]) -> ExactPoly {
        let mut acc = ExactPoly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&c.mul(&ExactPoly::var_pow(var, k as u32)));
            }
        }
        acc
    }

    pub fn derivative(&self, var: &str) -> ExactPoly {
        let Some(i) = self.var_index(var) else { return ExactPoly::zero() };
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                ExactPoly::insert_add(&mut terms, ne, c * rat(e[i] as i64));
            }
        }
        ExactPoly { vars: self.vars.clone(), terms }.trimmed()
    }

    /// Substitutes a rational value for `var`.
    pub fn substitute(&self, var: &str, value: &BigRational) -> ExactPoly {
        let cs = self.coeffs_in(var);
        let mut acc = ExactPoly::zero();
        for c in cs.iter().rev() {
            acc = acc.scale(value).add(c);
        }
        acc
    }

    fn lead(&self) -> Option<(&Vec<u32>, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &ExactPoly) -> Option<ExactPoly> {
        if d.is_zero() {
            return None;
        }
        let (mut rem, d) = self.aligned(d);
        let (de, dc) = {
            let (e, c) = d.lead().expect("nonzero");
            (e.clone(), c.clone())
        };
        let mut q = ExactPoly { vars: rem.vars.clone(), terms: BTreeMap::new() };
        // the lexicographically largest exponent vector leads
        while let Some((e, c)) = rem.lead().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&de).any(|(x, y)| x < y) {
                return None;
            }
            let qe: Vec<u32> = e.iter().zip(&de).map(|(x, y)| x - y).collect();
            let qc = &c / &dc;
            let t = ExactPoly { vars: rem.vars.clone(), terms: BTreeMap::from([(qe.clone(), qc.clone())]) };
            rem = ExactPoly { vars: rem.vars.clone(), terms: rem.sub(&t.mul(&d)).with_vars(&rem.vars).terms };
            ExactPoly::insert_add(&mut q.terms, qe, qc);
        }
        Some(q.trimmed())
    }

    /// Whether all coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Reduces the coefficients modulo `m`; they must have denominators prime to `m`.
    pub fn reduce_mod(&self, m: u64) -> Result<BTreeMap<Vec<u32>, u64>> {
        let mb = BigInt::from(m);
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let den = c.denom();
            if !den.gcd(&mb).is_one() {
                return Err(Error::Integrality(format!("coefficient {c} has a denominator not prime to {m}")));
            }
            let inv = den.modpow(&(BigInt::from(totient(m)) - 1), &mb);
            let v = (c.numer() * inv).mod_floor(&mb).to_u64().expect("reduced below m");
            if v != 0 {
                out.insert(e.clone(), v);
            }
        }
        Ok(out)
    }

    /// Parses `3*T1^2*Y1 - 1/2*Y2 + T1`.
    pub fn parse(s: &str) -> Result<ExactPoly> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut acc = ExactPoly::zero();
        let mut term = String::new();
        let mut sign = 1i64;
        let flush = |acc: &mut ExactPoly, term: &str, sign: i64| -> Result<()> {
            if term.is_empty() {
                return Err(Error::Parse(format!("missing term in `{s}`")));
            }
            let t = parse_term(term)?;
            *acc = acc.add(&t.scale(&rat(sign)));
            Ok(())
        };
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !s[..i].ends_with('^') {
                flush(&mut acc, &term, sign)?;
                term.clear();
                sign = if ch == '-' { -1 } else { 1 };
            } else if ch == '-' && i == 0 {
                sign = -1;
            } else if ch == '+' && i == 0 {
            } else {
                term.push(ch);
            }
        }
        flush(&mut acc, &term, sign)?;
        Ok(acc)
    }
}

fn totient(m: u64) -> u64 {
    let mut result = m;
    for q in crate::field::prime_factors(m) {
        result = result / q * (q - 1);
    }
    result
}

fn parse_term(t: &str) -> Result<ExactPoly> {
    let mut acc = ExactPoly::one();
    for factor in t.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in `{t}`")));
        }
        let first = factor.chars().next().unwrap();
        let p = if first.is_ascii_digit() {
            let (n, d) = match factor.split_once('/') {
                Some((n, d)) => (n, d),
                None => (factor, "1"),
            };
            let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad number `{factor}`")))?;
            let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad number `{factor}`")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{factor}`")));
            }
            ExactPoly::constant(BigRational::new(n, d))
        } else if first.is_ascii_alphabetic() {
            let (name, e) = match factor.split_once('^') {
                Some((v, e)) => (v, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?),
                None => (factor, 1),
            };
            if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Parse(format!("bad variable `{name}`")));
            }
            ExactPoly::var_pow(name, e)
        } else {
            return Err(Error::Parse(format!("unexpected `{factor}`")));
        };
        acc = acc.mul(&p);
    }
    Ok(acc)
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut parts = Vec::new();
            if !a.is_one() || e.iter().all(|&x| x == 0) {
                parts.push(a.to_string());
            }
            for (v, &x) in self.vars.iter().zip(e) {
                match x {
                    0 => {}
                    1 => parts.push(v.clone()),
                    _ => parts.push(format!("{v}^{x}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_print() {
        let p = ExactPoly::parse("3*T1^2*Y1 - 1/2*Y2 + T1 - T1").unwrap();
        assert_eq!(p.to_string(), "3*T1^2*Y1 - 1/2*Y2");
        assert_eq!(ExactPoly::parse(&p.to_string()).unwrap(), p);
        assert!(ExactPoly::parse("3**T").is_err());
        assert!(ExactPoly::parse("1/0").is_err());
    }

    #[test]
    fn exact_division() {
        let a = ExactPoly::parse("T^2 - Y").unwrap();
        let b = ExactPoly::parse("T + Y + 1").unwrap();
        let q = a.mul(&b).exact_div(&b).unwrap();
        assert_eq!(q, a);
        assert!(a.exact_div(&b).is_none());
    }

    #[test]
    fn reduction() {
        let p = ExactPoly::parse("1/3*Y + 5").unwrap();
        let r = p.reduce_mod(4).unwrap();
        assert_eq!(r.get(&vec![1]), Some(&3));
        assert_eq!(r.get(&vec![0]), Some(&1));
        assert!(ExactPoly::parse("1/2").unwrap().reduce_mod(4).is_err());
    }
}
