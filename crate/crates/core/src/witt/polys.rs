//! Universal Witt addition and multiplication polynomials.
//!
//! `S_k` and `P_k` are found from the ghost identities
//! `w_k(S) = w_k(X) + w_k(Y)` and `w_k(P) = w_k(X) w_k(Y)`. Working modulo
//! `p^{prec}` is enough for the coefficients: if `A = B mod p^a` then
//! `A^{p^t} = B^{p^t} mod p^{a+t}`, so the numerator of `S_k` is known modulo
//! `p^{prec+k}` once the lower `S_j` are known modulo `p^{prec}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest supported truncation length for the universal polynomials.
pub const MAX_LEN: usize = 6;
const NVARS: usize = 2 * MAX_LEN;

pub(crate) type Mono = [u16; NVARS];

/// Variable index of `X_i`.
pub(crate) const fn xv(i: usize) -> usize {
    i
}

/// Variable index of `Y_i`.
pub(crate) const fn yv(i: usize) -> usize {
    MAX_LEN + i
}

/// A polynomial with integer coefficients reduced modulo `p^prec`.
#[derive(Clone, Debug, Default)]
pub struct IntPoly {
    pub(crate) terms: Vec<(Mono, u64)>,
}

impl IntPoly {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates at integer points modulo `modulus`.
    pub fn eval_mod(&self, x: &[u64], y: &[u64], modulus: u64) -> u64 {
        let mut vals = [0u64; NVARS];
        vals[..x.len()].copy_from_slice(x);
        vals[MAX_LEN..MAX_LEN + y.len()].copy_from_slice(y);
        let m = modulus as u128;
        let mut acc: u128 = 0;
        for (mono, c) in &self.terms {
            let mut t = *c as u128 % m;
            for (v, &e) in mono.iter().enumerate() {
                if e > 0 {
                    t = t * pow_mod(vals[v], e as u64, modulus) as u128 % m;
                }
            }
            acc = (acc + t) % m;
        }
        acc as u64
    }
}

pub(crate) fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut r: u128 = 1 % m128;
    let mut b = base as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    r as u64
}

type Work = HashMap<Mono, u64>;

fn work_mul(a: &Work, b: &Work, m: u64) -> Work {
    let mut out: Work = HashMap::with_capacity(a.len() * b.len() / 2 + 1);
    let m128 = m as u128;
    for (ma, &ca) in a {
        for (mb, &cb) in b {
            let mut mono = [0u16; NVARS];
            for v in 0..NVARS {
                mono[v] = ma[v] + mb[v];
            }
            let c = (ca as u128 * cb as u128 % m128) as u64;
            let e = out.entry(mono).or_insert(0);
            *e = ((*e as u128 + c as u128) % m128) as u64;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn work_pow(a: &Work, mut e: u64, m: u64) -> Work {
    let mut result: Work = HashMap::new();
    result.insert([0u16; NVARS], 1 % m);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = work_mul(&result, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = work_mul(&base, &base, m);
        }
    }
    result
}

fn work_add_scaled(acc: &mut Work, a: &Work, scale: u64, m: u64) {
    let m128 = m as u128;
    for (mono, &c) in a {
        let e = acc.entry(*mono).or_insert(0);
        *e = ((*e as u128 + c as u128 * scale as u128) % m128) as u64;
    }
    acc.retain(|_, c| *c != 0);
}

fn var(v: usize) -> Work {
    let mut mono = [0u16; NVARS];
    mono[v] = 1;
    HashMap::from([(mono, 1)])
}

/// Ghost component `w_k` of the variables `vars(0..=k)`.
fn ghost_poly(k: usize, p: u64, m: u64, vars: impl Fn(usize) -> usize) -> Work {
    let mut acc = Work::new();
    for j in 0..=k {
        let term = work_pow(&var(vars(j)), p.pow((k - j) as u32), m);
        work_add_scaled(&mut acc, &term, p.pow(j as u32) % m, m);
    }
    acc
}

fn to_int_poly(w: &Work, modulus: u64) -> IntPoly {
    let mut terms: Vec<(Mono, u64)> =
        w.iter().map(|(m, &c)| (*m, c % modulus)).filter(|(_, c)| *c != 0).collect();
    terms.sort_unstable();
    IntPoly { terms }
}

/// Nested-Horner form of a polynomial: terms sharing an exponent prefix share
/// the partial product, so evaluation costs about one multiplication per term.
#[derive(Debug, Default)]
pub(crate) struct EvalTree {
    nodes: Vec<Node>,
    edges: Vec<(u16, u32)>,
    pub(crate) max_exp: [u16; NVARS],
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Leaf(u64),
    Branch { var: u8, start: u32, len: u32 },
}

impl EvalTree {
    fn build(poly: &IntPoly) -> EvalTree {
        let mut t = EvalTree::default();
        for (mono, _) in &poly.terms {
            for v in 0..NVARS {
                t.max_exp[v] = t.max_exp[v].max(mono[v]);
            }
        }
        if poly.terms.is_empty() {
            t.nodes.push(Node::Leaf(0));
        } else {
            t.add_node(&poly.terms, 0);
        }
        t
    }

    /// Adds the subtree for `terms` (sorted, sharing exponents of variables
    /// `< var`) and returns its index.
    fn add_node(&mut self, terms: &[(Mono, u64)], mut var: usize) -> u32 {
        while var < NVARS && terms.iter().all(|(m, _)| m[var] == terms[0].0[var]) && terms[0].0[var] == 0 {
            var += 1;
        }
        if var == NVARS {
            debug_assert_eq!(terms.len(), 1);
            self.nodes.push(Node::Leaf(terms[0].1));
            return (self.nodes.len() - 1) as u32;
        }
        let mut groups: Vec<(u16, &[(Mono, u64)])> = Vec::new();
        let mut lo = 0;
        while lo < terms.len() {
            let e = terms[lo].0[var];
            let mut hi = lo;
            while hi < terms.len() && terms[hi].0[var] == e {
                hi += 1;
            }
            groups.push((e, &terms[lo..hi]));
            lo = hi;
        }
        let children: Vec<(u16, u32)> = groups.into_iter().map(|(e, g)| (e, self.add_node(g, var + 1))).collect();
        let start = self.edges.len() as u32;
        self.edges.extend(children.iter().copied());
        self.nodes.push(Node::Branch { var: var as u8, start, len: children.len() as u32 });
        (self.nodes.len() - 1) as u32
    }

    /// Evaluates with `powers[v][e] = value_v^e` (codes < p are integers).
    pub(crate) fn eval<T: Copy + PartialEq>(
        &self,
        powers: &[Vec<T>],
        zero: T,
        leaf: impl Fn(u64) -> T + Copy,
        add: impl Fn(T, T) -> T + Copy,
        mul: impl Fn(T, T) -> T + Copy,
    ) -> T {
        self.eval_node((self.nodes.len() - 1) as u32, powers, zero, leaf, add, mul)
    }

    fn eval_node<T: Copy + PartialEq>(
        &self,
        idx: u32,
        powers: &[Vec<T>],
        zero: T,
        leaf: impl Fn(u64) -> T + Copy,
        add: impl Fn(T, T) -> T + Copy,
        mul: impl Fn(T, T) -> T + Copy,
    ) -> T {
        match self.nodes[idx as usize] {
            Node::Leaf(c) => leaf(c),
            Node::Branch { var, start, len } => {
                let mut acc = zero;
                for &(e, child) in &self.edges[start as usize..(start + len) as usize] {
                    if e == 0 {
                        acc = add(acc, self.eval_node(child, powers, zero, leaf, add, mul));
                        continue;
                    }
                    let pw = powers[var as usize][e as usize];
                    if pw == zero {
                        continue;
                    }
                    acc = add(acc, mul(pw, self.eval_node(child, powers, zero, leaf, add, mul)));
                }
                acc
            }
        }
    }
}

/// Witt sum and product polynomials `S_0..S_{n-1}`, `P_0..P_{n-1}` with
/// coefficients modulo `p^prec`.
#[derive(Debug)]
pub struct WittPolys {
    pub p: u64,
    pub prec: u32,
    pub sums: Vec<IntPoly>,
    pub prods: Vec<IntPoly>,
    pub(crate) sum_trees: Vec<EvalTree>,
    pub(crate) prod_trees: Vec<EvalTree>,
}

impl WittPolys {
    fn compute(p: u64, n: usize, prec: u32) -> Result<WittPolys> {
        if n > MAX_LEN {
            return Err(Error::Unsupported(format!("Witt length {n} exceeds the supported maximum {MAX_LEN}")));
        }
        let top = p.checked_pow(prec + n as u32).filter(|&m| m < 1 << 62);
        if top.is_none() {
            return Err(Error::Unsupported(format!("p^{} too large for Witt polynomial coefficients", prec + n as u32)));
        }
        let out_mod = p.pow(prec);
        let mut sums_w: Vec<Work> = Vec::with_capacity(n);
        let mut prods_w: Vec<Work> = Vec::with_capacity(n);
        for k in 0..n {
            let m = p.pow(prec + k as u32);
            let pk = p.pow(k as u32);
            let wx = ghost_poly(k, p, m, xv);
            let wy = ghost_poly(k, p, m, yv);
            let mut s_num = wx.clone();
            work_add_scaled(&mut s_num, &wy, 1, m);
            let mut p_num = work_mul(&wx, &wy, m);
            for j in 0..k {
                let e = p.pow((k - j) as u32);
                let pj = p.pow(j as u32);
                let sj = work_pow(&sums_w[j], e, m);
                work_add_scaled(&mut s_num, &sj, m - pj % m, m);
                let pj_poly = work_pow(&prods_w[j], e, m);
                work_add_scaled(&mut p_num, &pj_poly, m - pj % m, m);
            }
            let divide = |w: Work| -> Result<Work> {
                let mut out = Work::with_capacity(w.len());
                for (mono, c) in w {
                    if c % pk != 0 {
                        return Err(Error::Consistency("Witt polynomial numerator not divisible by p^k".into()));
                    }
                    let c = (c / pk) % out_mod;
                    if c != 0 {
                        out.insert(mono, c);
                    }
                }
                Ok(out)
            };
            sums_w.push(divide(s_num)?);
            prods_w.push(divide(p_num)?);
        }
        let sums: Vec<IntPoly> = sums_w.iter().map(|w| to_int_poly(w, out_mod)).collect();
        let prods: Vec<IntPoly> = prods_w.iter().map(|w| to_int_poly(w, out_mod)).collect();
        let sum_trees = sums.iter().map(EvalTree::build).collect();
        let prod_trees = prods.iter().map(EvalTree::build).collect();
        Ok(WittPolys { p, prec, sums, prods, sum_trees, prod_trees })
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }
}

fn cache() -> &'static Mutex<HashMap<(u64, u32), Arc<WittPolys>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<WittPolys>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached polynomials for at least `n` levels with coefficients mod `p^prec`.
pub fn witt_polys(p: u64, n: usize, prec: u32) -> Result<Arc<WittPolys>> {
    if let Some(w) = cache().lock().unwrap().get(&(p, prec)) {
        if w.len() >= n {
            return Ok(w.clone());
        }
    }
    // Computed outside the lock; concurrent callers may duplicate the work
    // but agree on the result.
    let computed = Arc::new(WittPolys::compute(p, n, prec)?);
    let mut guard = cache().lock().unwrap();
    let entry = guard.entry((p, prec)).or_insert_with(|| computed.clone());
    if entry.len() < n {
        *entry = computed.clone();
    }
    Ok(entry.clone())
}

/// Ghost components `w_i = sum_{j<=i} p^j a_j^{p^{i-j}}` modulo `p^big_n`.
pub fn ghost(lift: &[u64], p: u64, big_n: u32) -> Vec<u64> {
    let m = p.pow(big_n);
    (0..lift.len())
        .map(|i| {
            (0..=i).fold(0u64, |acc, j| {
                let t = pow_mod(lift[j], p.pow((i - j) as u32), m) as u128 * p.pow(j as u32) as u128 % m as u128;
                ((acc as u128 + t) % m as u128) as u64
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_sum_polynomial() {
        // S_1 = X_1 + Y_1 - sum_{0<i<p} binom(p,i)/p X_0^i Y_0^{p-i}
        let w = witt_polys(2, 2, 1).unwrap();
        // over F_2: S_1 = X_1 + Y_1 + X_0 Y_0
        assert_eq!(w.sums[1].len(), 3);
        let w3 = witt_polys(3, 2, 1).unwrap();
        // over F_3: X_1 + Y_1 - X0^2 Y0 - X0 Y0^2
        assert_eq!(w3.sums[1].len(), 4);
    }

    #[test]
    fn ghost_is_additive_on_integer_lifts() {
        let p = 3;
        let n = 3;
        let big_n = (n + 3) as u32;
        let w = witt_polys(p, n, big_n).unwrap();
        let m = p.pow(big_n);
        let a = [5u64, 17, 2];
        let b = [11u64, 4, 40];
        let s: Vec<u64> = (0..n).map(|k| w.sums[k].eval_mod(&a, &b, m)).collect();
        let pr: Vec<u64> = (0..n).map(|k| w.prods[k].eval_mod(&a, &b, m)).collect();
        let (ga, gb) = (ghost(&a, p, big_n), ghost(&b, p, big_n));
        assert_eq!(ghost(&s, p, big_n), (0..n).map(|i| (ga[i] + gb[i]) % m).collect::<Vec<_>>());
        assert_eq!(
            ghost(&pr, p, big_n),
            (0..n).map(|i| (ga[i] as u128 * gb[i] as u128 % m as u128) as u64).collect::<Vec<_>>()
        );
    }
}
