use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::drw::profile::WeightProfile;
use crate::error::{usage, Error, Result};
use crate::field::{Field, GaloisField};
use crate::witt::{WittVector, MAX_LEN};

/// Kind of a basic top form: `dV`-leading (non-integral weight) or `β`-type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Nonint,
    Int,
}

/// An element of `W_nΩ^d` of `k[X_1..X_d]` in Langer–Zink normal form: a map
/// from weight numerators to the coefficient (`α` of length `n + v_1`, or `β`
/// of length `n`). Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct TopForm {
    field: Field,
    p: u64,
    n: usize,
    d: usize,
    terms: BTreeMap<Vec<u64>, WittVector>,
}

/// One factor of a product of 1-forms, indexed by its variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `dV^depth([X_var]^hprime)`, `depth >= 1`.
    DV { depth: usize, var: usize, hprime: u64 },
    /// `F^v d[X_var]^hprime`, `v >= 0`.
    Fd { v: usize, var: usize, hprime: u64 },
}

impl Factor {
    pub fn var(&self) -> usize {
        match *self {
            Factor::DV { var, .. } | Factor::Fd { var, .. } => var,
        }
    }

    pub fn hprime(&self) -> u64 {
        match *self {
            Factor::DV { hprime, .. } | Factor::Fd { hprime, .. } => hprime,
        }
    }

    /// The canonical factors of a basic form, in profile order.
    pub fn of_profile(w: &WeightProfile) -> Vec<Factor> {
        (0..w.d())
            .map(|j| {
                let (var, hprime) = (w.order[j], w.hprime[j]);
                if w.v[j] < 0 {
                    Factor::DV { depth: (-w.v[j]) as usize, var, hprime }
                } else {
                    Factor::Fd { v: w.v[j] as usize, var, hprime }
                }
            })
            .collect()
    }
}

/// Where the coefficient of an assembled product sits: an outer scalar in
/// `W_n(k)`, and/or an inner coefficient inside the `dV` factor at a position
/// of the factor list (of length `n - depth`).
#[derive(Clone, Debug, Default)]
pub struct Placement {
    pub scalar: Option<WittVector>,
    pub inner: Option<(usize, WittVector)>,
}

impl Placement {
    pub fn scalar(c: WittVector) -> Placement {
        Placement { scalar: Some(c), inner: None }
    }

    pub fn inner(position: usize, c: WittVector) -> Placement {
        Placement { scalar: None, inner: Some((position, c)) }
    }
}

fn permutation_sign(seq: &[usize]) -> i64 {
    let mut inv = 0;
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            if seq[a] > seq[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

impl TopForm {
    pub fn zero(field: &Field, n: usize, d: usize) -> TopForm {
        TopForm { field: field.clone(), p: field.characteristic(), n, d, terms: BTreeMap::new() }
    }

    pub fn check_shape(field: &Field, n: usize, d: usize) -> Result<()> {
        if d == 0 {
            return usage("top forms need at least one variable");
        }
        if n == 0 || n > MAX_LEN {
            return usage(format!("level n must lie in [1, {MAX_LEN}]"));
        }
        let _ = field;
        Ok(())
    }

    /// The basic form with the given numerators and coefficient.
    pub fn basic(field: &Field, n: usize, numerators: &[u64], coeff: WittVector) -> Result<TopForm> {
        TopForm::check_shape(field, n, numerators.len())?;
        let w = WeightProfile::new(field.characteristic(), n, numerators)?;
        if coeff.len() != w.coeff_len() {
            return usage(format!(
                "weight {:?} at level {n} needs a coefficient of length {}, got {}",
                numerators,
                w.coeff_len(),
                coeff.len()
            ));
        }
        if !GaloisField::same(field, coeff.field()) {
            return usage("coefficient lies over a different field");
        }
        let mut f = TopForm::zero(field, n, numerators.len());
        if !coeff.is_zero() {
            f.terms.insert(numerators.to_vec(), coeff);
        }
        Ok(f)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u64>, &WittVector)> {
        self.terms.iter()
    }

    /// Basic summands with their profiles.
    pub fn basic_terms(&self) -> Vec<(WeightProfile, WittVector)> {
        self.terms
            .iter()
            .map(|(nums, c)| (WeightProfile::new(self.p, self.n, nums).expect("stored weights are valid"), c.clone()))
            .collect()
    }

    pub fn kind_of(&self, numerators: &[u64]) -> FormKind {
        let w = WeightProfile::new(self.p, self.n, numerators).expect("valid weight");
        if w.is_integral() {
            FormKind::Int
        } else {
            FormKind::Nonint
        }
    }

    fn compatible(&self, other: &TopForm) -> Result<()> {
        if !GaloisField::same(&self.field, &other.field) || self.n != other.n || self.d != other.d {
            return usage("forms over different fields, levels or dimensions");
        }
        Ok(())
    }

    /// Adds `c` to the coefficient at `numerators` (which must have the right length).
    pub(crate) fn add_term(&mut self, numerators: Vec<u64>, c: WittVector) {
        if c.is_zero() {
            return;
        }
        match self.terms.get(&numerators) {
            Some(old) => {
                let s = old + &c;
                if s.is_zero() {
                    self.terms.remove(&numerators);
                } else {
                    self.terms.insert(numerators, s);
                }
            }
            None => {
                self.terms.insert(numerators, c);
            }
        }
    }

    pub fn add(&self, other: &TopForm) -> Result<TopForm> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> TopForm {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    /// Multiplication by a constant `c ∈ W_n(k)`, folded into the coefficient
    /// slot: `β -> cβ`, and `α -> F^{-v_1}(c) α` by `λ dV^m(x) = dV^m(F^m(λ) x)`.
    pub fn scalar_canonicalize(&self, c: &WittVector) -> Result<TopForm> {
        if c.len() != self.n || !GaloisField::same(c.field(), &self.field) {
            return usage("scalar must lie in W_n(k) over the form's field");
        }
        let mut out = TopForm::zero(&self.field, self.n, self.d);
        for (w, coeff) in self.basic_terms() {
            let factor = if w.is_integral() {
                c.clone()
            } else {
                let m = (-w.v[0]) as usize;
                c.sigma(m as i64).truncate(self.n - m)
            };
            out.add_term(w.numerators.clone(), &factor * &coeff);
        }
        Ok(out)
    }

    /// Builds `placement · prod factors` at level `n` and rewrites it in
    /// normal form: factors are reordered by profile (with the wedge sign) and
    /// the coefficient is moved into the leading slot. Any `dV^m` with
    /// `m >= n` makes the product vanish.
    pub fn assemble(field: &Field, n: usize, factors: &[Factor], placement: Placement) -> Result<TopForm> {
        let d = factors.len();
        TopForm::check_shape(field, n, d)?;
        let p = field.characteristic();
        let mut seen = vec![false; d];
        for f in factors {
            let v = f.var();
            if v >= d || seen[v] {
                return usage(format!("each of the {d} variables must occur in exactly one factor"));
            }
            seen[v] = true;
            if f.hprime() == 0 || f.hprime() % p == 0 {
                return Err(Error::InvalidWeight(format!(
                    "exponent {} of X{} must be a positive integer prime to p",
                    f.hprime(),
                    v + 1
                )));
            }
        }
        if let Some(s) = &placement.scalar {
            if s.len() != n || !GaloisField::same(s.field(), field) {
                return usage(format!("outer scalar must lie in W_{n}(k)"));
            }
        }
        if let Some((pos, c)) = &placement.inner {
            match factors.get(*pos) {
                Some(Factor::DV { depth, .. }) => {
                    if *depth < n && c.len() != n - depth {
                        return usage(format!("coefficient inside dV^{depth} must lie in W_{}(k)", n - depth));
                    }
                }
                _ => return usage("inner coefficient must sit inside a dV factor"),
            }
        }
        let zero = TopForm::zero(field, n, d);
        if factors.iter().any(|f| matches!(f, Factor::DV { depth, .. } if *depth >= n)) {
            return Ok(zero);
        }
        let mut numerators = vec![0u64; d];
        for f in factors {
            let exp = match *f {
                Factor::DV { depth, .. } => (n - 1 - depth) as u32,
                Factor::Fd { v, .. } => (v + n - 1) as u32,
            };
            numerators[f.var()] = p
                .checked_pow(exp)
                .and_then(|pe| pe.checked_mul(f.hprime()))
                .ok_or_else(|| Error::InvalidWeight("weight numerator overflows".into()))?;
        }
        let w = WeightProfile::new(p, n, &numerators)?;
        let listed: Vec<usize> = factors.iter().map(Factor::var).collect();
        let sign = permutation_sign(&listed) * w.sign();
        let mut lambda = placement.scalar.clone().unwrap_or_else(|| WittVector::one(field, n));
        if let Some((pos, c)) = &placement.inner {
            let Factor::DV { depth, .. } = factors[*pos] else { unreachable!() };
            // dV^m(c x) = λ dV^m(x) with F^m(λ) = c, λ = σ^{-m}(c) padded
            lambda = &lambda * &c.sigma(-(depth as i64)).pad(n);
        }
        let coeff = if w.is_integral() {
            lambda
        } else {
            let m = (-w.v[0]) as usize;
            lambda.sigma(m as i64).truncate(n - m)
        };
        let coeff = if sign < 0 { coeff.neg() } else { coeff };
        let mut out = zero;
        out.add_term(numerators, coeff);
        Ok(out)
    }

    /// `sum` of several forms.
    pub fn sum<'a>(field: &Field, n: usize, d: usize, forms: impl IntoIterator<Item = &'a TopForm>) -> Result<TopForm> {
        let mut acc = TopForm::zero(field, n, d);
        for f in forms {
            acc = acc.add(f)?;
        }
        Ok(acc)
    }

    fn fmt_term(w: &WeightProfile, c: &WittVector) -> String {
        let mut parts = Vec::with_capacity(w.d() + 1);
        if w.is_integral() {
            parts.push(c.to_string());
        }
        for (j, f) in Factor::of_profile(w).into_iter().enumerate() {
            parts.push(match f {
                Factor::DV { depth, var, hprime } => {
                    if j == 0 {
                        format!("dV^{depth}({c}*[X{}]^{hprime})", var + 1)
                    } else {
                        format!("dV^{depth}([X{}]^{hprime})", var + 1)
                    }
                }
                Factor::Fd { v: 0, var, hprime } => format!("d[X{}]^{hprime}", var + 1),
                Factor::Fd { v, var, hprime } => format!("F^{v} d[X{}]^{hprime}", var + 1),
            });
        }
        parts.join(" * ")
    }

    /// Parses the textual grammar, e.g.
    /// `dV^2(W{1,0}*[X1]^3) * dV^1([X2]^1) * F^1 d[X3]^5 + W{1,1,0} * d[X1]^1 * ...`.
    /// Products are rewritten into normal form, so any factor order is accepted.
    pub fn parse(field: &Field, n: usize, d: usize, s: &str) -> Result<TopForm> {
        TopForm::check_shape(field, n, d)?;
        let s = s.trim();
        let mut acc = TopForm::zero(field, n, d);
        if s == "0" {
            return Ok(acc);
        }
        for term in split_top(s, '+') {
            let t = parse_product(field, n, term.trim())?;
            if t.d != d {
                return Err(Error::Parse(format!("term `{}` has {} variables, expected {d}", term.trim(), t.d)));
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> FormJson {
        let desc = self.field.desc();
        FormJson {
            p: desc.p,
            m: desc.m,
            modulus: desc.modulus,
            n: self.n,
            d: self.d,
            terms: self
                .basic_terms()
                .into_iter()
                .map(|(w, c)| TermJson {
                    kind: if w.is_integral() { FormKind::Int } else { FormKind::Nonint },
                    numerators: w.numerators.clone(),
                    coeff: c.coords().iter().map(|&x| self.field.to_coeffs(x)).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &FormJson) -> Result<TopForm> {
        if j.modulus.len() != j.m + 1 {
            return usage("modulus length does not match m");
        }
        let field = GaloisField::new(j.p, j.modulus.clone())?;
        let mut acc = TopForm::zero(&field, j.n, j.d);
        TopForm::check_shape(&field, j.n, j.d)?;
        for t in &j.terms {
            let coords = t.coeff.iter().map(|c| field.from_coeffs(c)).collect::<Result<Vec<_>>>()?;
            let coeff = WittVector::new(&field, coords)?;
            let f = TopForm::basic(&field, j.n, &t.numerators, coeff)?;
            if f.d != j.d {
                return usage("term dimension mismatch");
            }
            let w = WeightProfile::new(field.characteristic(), j.n, &t.numerators)?;
            let kind = if w.is_integral() { FormKind::Int } else { FormKind::Nonint };
            if kind != t.kind {
                return usage(format!("weight {:?} is of kind {kind:?}, not {:?}", t.numerators, t.kind));
            }
            acc = acc.add(&f)?;
        }
        Ok(acc)
    }
}

/// JSON mirror of a top form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub p: u64,
    pub m: usize,
    pub modulus: Vec<u64>,
    pub n: usize,
    pub d: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub kind: FormKind,
    pub numerators: Vec<u64>,
    pub coeff: Vec<Vec<u64>>,
}

impl fmt::Display for TopForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.basic_terms().iter().map(|(w, c)| TopForm::fmt_term(w, c)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for TopForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TopForm[n={}, d={}]({self})", self.n, self.d)
    }
}

/// Splits on `sep` outside of brackets.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn perr<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

/// `[Xi]^h` or `[Xi]` -> (0-based var, h).
fn parse_teich_power(s: &str) -> Result<(usize, u64)> {
    let s = s.trim();
    let Some(rest) = s.strip_prefix("[X") else { return perr(format!("expected [Xi]^h, found `{s}`")) };
    let Some(close) = rest.find(']') else { return perr(format!("unclosed bracket in `{s}`")) };
    let var: usize = rest[..close].trim().parse().map_err(|_| Error::Parse(format!("bad variable in `{s}`")))?;
    if var == 0 {
        return perr("variables are numbered from X1");
    }
    let tail = rest[close + 1..].trim();
    let h = if tail.is_empty() {
        1
    } else {
        let Some(e) = tail.strip_prefix('^') else { return perr(format!("expected ^h after `{s}`")) };
        e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?
    };
    Ok((var - 1, h))
}

/// `^k` prefix -> (k, rest); absent -> (1, whole).
fn parse_power_prefix(s: &str) -> Result<(usize, &str)> {
    match s.strip_prefix('^') {
        Some(r) => {
            let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
            let k = r[..end].parse().map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
            Ok((k, &r[end..]))
        }
        None => Ok((1, s)),
    }
}

fn parse_product(field: &Field, n: usize, s: &str) -> Result<TopForm> {
    let mut factors = Vec::new();
    let mut placement = Placement::default();
    for piece in split_top(s, '*') {
        let piece = piece.trim();
        if piece.starts_with("W{") {
            let c = WittVector::parse(field, piece)?;
            if c.len() != n {
                return perr(format!("outer scalar {piece} must have length {n}"));
            }
            placement.scalar = Some(match placement.scalar.take() {
                Some(old) => &old * &c,
                None => c,
            });
        } else if let Some(rest) = piece.strip_prefix("dV") {
            let (depth, rest) = parse_power_prefix(rest)?;
            if depth == 0 {
                return perr("dV^0 is not a valid factor; write d[Xi]^h");
            }
            let rest = rest.trim();
            let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
                return perr(format!("expected dV^m(...), found `{piece}`"));
            };
            let mut coeff = None;
            let mut tp = None;
            for part in split_top(inner, '*') {
                let part = part.trim();
                if part.starts_with("W{") {
                    coeff = Some(WittVector::parse(field, part)?);
                } else {
                    tp = Some(parse_teich_power(part)?);
                }
            }
            let Some((var, hprime)) = tp else { return perr(format!("missing [Xi]^h in `{piece}`")) };
            if let Some(c) = coeff {
                if placement.inner.is_some() {
                    return perr("at most one dV factor may carry a coefficient");
                }
                if depth < n && c.len() != n - depth {
                    return perr(format!("coefficient in `{piece}` must have length {}", n - depth));
                }
                placement.inner = Some((factors.len(), c));
            }
            factors.push(Factor::DV { depth, var, hprime });
        } else if let Some(rest) = piece.strip_prefix('F') {
            let (v, rest) = parse_power_prefix(rest)?;
            let Some(tp) = rest.trim().strip_prefix('d') else { return perr(format!("expected F^v d[Xi]^h, found `{piece}`")) };
            let (var, hprime) = parse_teich_power(tp)?;
            factors.push(Factor::Fd { v, var, hprime });
        } else if let Some(tp) = piece.strip_prefix('d') {
            let (var, hprime) = parse_teich_power(tp)?;
            factors.push(Factor::Fd { v: 0, var, hprime });
        } else {
            return perr(format!("unrecognized factor `{piece}`"));
        }
    }
    if factors.is_empty() {
        return perr(format!("term `{s}` has no differential factors"));
    }
    TopForm::assemble(field, n, &factors, placement)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Field {
        GaloisField::default_for(2, 2).unwrap()
    }

    #[test]
    fn parse_print_round_trip() {
        let k = f4();
        let a = TopForm::parse(&k, 3, 3, "dV^2(W{2}*[X1]^3) * dV^1([X2]^1) * F^1 d[X3]^5").unwrap();
        assert_eq!(a.to_string(), "dV^2(W{2}*[X1]^3) * dV^1([X2]^1) * F^1 d[X3]^5");
        assert_eq!(TopForm::parse(&k, 3, 3, &a.to_string()).unwrap(), a);
        let b = TopForm::parse(&k, 3, 2, "W{1,2,3} * d[X1]^1 * F^2 d[X2]^3").unwrap();
        assert_eq!(b.to_string(), "W{1,2,3} * d[X1]^1 * F^2 d[X2]^3");
        let sum = a.add(&a).unwrap();
        assert!(sum.is_zero(), "char 2: f + f = 0 only if the coefficient has that property");
    }

    #[test]
    fn swapping_factors_flips_sign() {
        let k = GaloisField::default_for(3, 1).unwrap();
        let a = TopForm::parse(&k, 1, 2, "W{1} * d[X1]^1 * d[X2]^2").unwrap();
        let b = TopForm::parse(&k, 1, 2, "W{1} * d[X2]^2 * d[X1]^1").unwrap();
        assert_eq!(a.neg(), b);
    }

    #[test]
    fn scalar_moves_inside_dv() {
        // σ^{-1}(β)·dV[X] = dV(R(β)[X]) at level 2
        let k = f4();
        let beta = WittVector::from_codes(&k, &[2, 3]).unwrap();
        let outer = TopForm::assemble(
            &k,
            2,
            &[Factor::DV { depth: 1, var: 0, hprime: 1 }],
            Placement::scalar(beta.sigma(-1)),
        )
        .unwrap();
        let inner = TopForm::basic(&k, 2, &[1], beta.restriction().unwrap()).unwrap();
        assert_eq!(outer, inner);
    }

    #[test]
    fn deep_dv_vanishes() {
        let k = f4();
        let z = TopForm::parse(&k, 2, 1, "dV^2([X1]^1)").unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let k = f4();
        let a = TopForm::parse(&k, 2, 2, "dV^1(W{3}*[X1]^1) * d[X2]^3 + W{1,1} * F^1 d[X1]^1 * d[X2]^1").unwrap();
        let j = a.to_json();
        assert_eq!(TopForm::from_json(&j).unwrap(), a);
    }

    #[test]
    fn rejects_malformed() {
        let k = f4();
        assert!(TopForm::parse(&k, 2, 1, "dV^1([X1]^2)").is_err());
        assert!(TopForm::parse(&k, 2, 2, "d[X1]^1").is_err());
        assert!(TopForm::parse(&k, 2, 1, "q[X1]").is_err());
        assert!(TopForm::basic(&k, 2, &[1], WittVector::one(&k, 2)).is_err());
    }
}
