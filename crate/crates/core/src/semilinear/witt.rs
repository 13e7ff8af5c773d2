use serde::Serialize;

use crate::error::{usage, Result};
use crate::field::{Embedding, Field, FieldDesc, FieldElem, GaloisField};
use crate::linalg::{Matrix, ZpnMatrix};
use crate::semilinear::{fixed_points, solve_at, SemilinearMap};
use crate::witt::{GaloisRing, WittVector, MAX_LEN};

/// `⊕_i W_{e_i}(k)` as a `W_n(k)`-module, `1 <= e_i <= n`.
#[derive(Clone, Debug)]
pub struct WnModule {
    field: Field,
    n: usize,
    levels: Vec<usize>,
    /// `Z/p^e`-bases `[σ^{-e}(g^j)]` of `W_e(k)`, `e = 1..=n`, and the
    /// coordinate rings they are read in.
    bases: Vec<Vec<WittVector>>,
    rings: Vec<GaloisRing>,
}

/// `p·y` in `W_e(k)`: `p = VF`.
fn mul_p(y: &WittVector) -> WittVector {
    y.sigma(1).shift(1)
}

/// `z / p` for `z ∈ pW_e(k)` (top coordinate of the quotient chosen zero).
fn div_p(z: &WittVector) -> Option<WittVector> {
    if z.coord(0) != FieldElem::ZERO {
        return None;
    }
    if z.len() == 1 {
        return Some(z.clone());
    }
    Some(z.unshift(1).unwrap_or_else(|| WittVector::zero(z.field(), z.len() - 1)).sigma(-1).pad(z.len()))
}

impl WnModule {
    pub fn new(field: &Field, n: usize, levels: Vec<usize>) -> Result<WnModule> {
        if n == 0 || n > MAX_LEN {
            return usage(format!("module level must lie in [1, {MAX_LEN}]"));
        }
        if levels.iter().any(|&e| e == 0 || e > n) {
            return usage(format!("summand levels must lie in [1, {n}]"));
        }
        let g = field.generator();
        let mut bases = Vec::with_capacity(n);
        let mut rings = Vec::with_capacity(n);
        for e in 1..=n {
            let mut b = Vec::with_capacity(field.degree());
            let mut gj = field.one();
            for _ in 0..field.degree() {
                b.push(WittVector::teichmuller(field, field.frobenius(gj, -(e as i64)), e));
                gj = field.mul(gj, g);
            }
            bases.push(b);
            rings.push(GaloisRing::new(field, e as u32));
        }
        Ok(WnModule { field: field.clone(), n, levels, bases, rings })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn rank(&self) -> usize {
        self.levels.len()
    }

    /// `log_p` of the number of elements.
    pub fn log_size(&self) -> usize {
        self.field.degree() * self.levels.iter().sum::<usize>()
    }

    pub fn zero(&self) -> Vec<WittVector> {
        self.levels.iter().map(|&e| WittVector::zero(&self.field, e)).collect()
    }

    pub fn check(&self, x: &[WittVector]) -> Result<()> {
        if x.len() != self.rank() || x.iter().zip(&self.levels).any(|(c, &e)| c.len() != e || !GaloisField::same(c.field(), &self.field)) {
            return usage("element does not belong to the module");
        }
        Ok(())
    }

    pub fn add(&self, a: &[WittVector], b: &[WittVector]) -> Vec<WittVector> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &[WittVector], b: &[WittVector]) -> Vec<WittVector> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn neg(&self, a: &[WittVector]) -> Vec<WittVector> {
        a.iter().map(WittVector::neg).collect()
    }

    pub fn mul_p(&self, a: &[WittVector]) -> Vec<WittVector> {
        a.iter().map(mul_p).collect()
    }

    pub fn div_p(&self, a: &[WittVector]) -> Option<Vec<WittVector>> {
        a.iter().map(div_p).collect()
    }

    pub fn is_zero(&self, a: &[WittVector]) -> bool {
        a.iter().all(WittVector::is_zero)
    }

    pub fn reduce(&self, a: &[WittVector]) -> Vec<FieldElem> {
        a.iter().map(|x| x.coord(0)).collect()
    }

    /// Teichmüller lift of a vector of `M/pM = k^N`.
    pub fn lift(&self, v: &[FieldElem]) -> Vec<WittVector> {
        v.iter().zip(&self.levels).map(|(&a, &e)| WittVector::teichmuller(&self.field, a, e)).collect()
    }

    /// Every element (only for tiny modules).
    pub fn elements(&self) -> Vec<Vec<WittVector>> {
        let per: Vec<Vec<WittVector>> = self
            .levels
            .iter()
            .map(|&e| {
                let mut out = vec![vec![]];
                for _ in 0..e {
                    out = out
                        .into_iter()
                        .flat_map(|c: Vec<FieldElem>| {
                            self.field.elements().map(move |a| {
                                let mut d = c.clone();
                                d.push(a);
                                d
                            })
                        })
                        .collect();
                }
                out.into_iter().map(|c| WittVector::new(&self.field, c).expect("bounded")).collect()
            })
            .collect();
        let mut out = vec![vec![]];
        for comp in per {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<WittVector>| {
                    comp.iter().map(move |c| {
                        let mut d = prefix.clone();
                        d.push(c.clone());
                        d
                    })
                })
                .collect();
        }
        out
    }

    /// Coordinates in `(Z/p^n)^{N m}` under `ι`: the `Z/p^e`-coordinate `c`
    /// of a level-`e` summand is stored as `p^{n-e} c`.
    pub fn group_coords(&self, x: &[WittVector]) -> Vec<u64> {
        let p = self.field.characteristic();
        let mut out = Vec::with_capacity(self.rank() * self.field.degree());
        for (c, &e) in x.iter().zip(&self.levels) {
            let scale = p.pow((self.n - e) as u32);
            out.extend(self.rings[e - 1].from_witt(c).into_iter().map(|v| v * scale));
        }
        out
    }

    /// `π`: reads `(Z/p^n)^{N m}` modulo `p^{e_i}` in the bases of the summands.
    pub fn from_group_coords(&self, c: &[u64]) -> Vec<WittVector> {
        let m = self.field.degree();
        self.levels
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let mut acc = WittVector::zero(&self.field, e);
                for j in 0..m {
                    let v = c[i * m + j] % self.field.characteristic().pow(e as u32);
                    if v != 0 {
                        acc = &acc + &(&WittVector::from_int(&self.field, v as i64, e) * &self.bases[e - 1][j]);
                    }
                }
                acc
            })
            .collect()
    }

    /// The same module over the degree-`t` extension.
    pub fn extend(&self, t: usize) -> Result<(WnModule, Embedding)> {
        let big = GaloisField::default_for(self.field.characteristic(), self.field.degree() * t)?;
        let e = Embedding::new(&self.field, &big)?;
        Ok((WnModule::new(&big, self.n, self.levels.clone())?, e))
    }
}

/// A `σ^{twist}`-semilinear endomorphism of a [`WnModule`]:
/// `T(x)_i = sum_j a_ij · κ_{ij}(σ^{twist} x_j)` with `a_ij ∈ W_n(k)` acting by
/// restriction, where `κ_{ij}: W_{e_j} -> W_{e_i}` is the restriction if
/// `e_i <= e_j` and multiplication by `p^{e_i - e_j}` (on any lift) otherwise.
#[derive(Clone, Debug)]
pub struct WnSemilinearMap {
    module: WnModule,
    matrix: Vec<Vec<WittVector>>,
    twist: i8,
}

impl WnSemilinearMap {
    pub fn new(module: WnModule, matrix: Vec<Vec<WittVector>>, twist: i8) -> Result<WnSemilinearMap> {
        super::check_twist(twist)?;
        let r = module.rank();
        if matrix.len() != r || matrix.iter().any(|row| row.len() != r) {
            return usage("matrix size must match the module rank");
        }
        if matrix.iter().flatten().any(|a| a.len() != module.n || !GaloisField::same(a.field(), &module.field)) {
            return usage(format!("matrix entries must lie in W_{}(k)", module.n));
        }
        Ok(WnSemilinearMap { module, matrix, twist })
    }

    pub fn module(&self) -> &WnModule {
        &self.module
    }

    pub fn twist(&self) -> i8 {
        self.twist
    }

    pub fn matrix(&self) -> &[Vec<WittVector>] {
        &self.matrix
    }

    pub fn apply(&self, x: &[WittVector]) -> Vec<WittVector> {
        let lv = &self.module.levels;
        let sx: Vec<WittVector> = x.iter().map(|c| c.sigma(self.twist as i64)).collect();
        (0..lv.len())
            .map(|i| {
                let ei = lv[i];
                let mut acc = WittVector::zero(&self.module.field, ei);
                for (j, xj) in sx.iter().enumerate() {
                    let a = &self.matrix[i][j];
                    if a.is_zero() || xj.is_zero() {
                        continue;
                    }
                    let ej = lv[j];
                    let moved = if ei <= ej {
                        xj.truncate(ei)
                    } else {
                        (0..ei - ej).fold(xj.pad(ei), |y, _| mul_p(&y))
                    };
                    acc = &acc + &(&a.truncate(ei) * &moved);
                }
                acc
            })
            .collect()
    }

    pub fn one_minus(&self, x: &[WittVector]) -> Vec<WittVector> {
        self.module.sub(x, &self.apply(x))
    }

    /// The induced map on `M/pM = k^N`.
    pub fn reduce_mod_p(&self) -> SemilinearMap {
        let lv = &self.module.levels;
        let k = &self.module.field;
        let a = (0..lv.len())
            .map(|i| (0..lv.len()).map(|j| if lv[i] <= lv[j] { self.matrix[i][j].coord(0) } else { k.zero() }).collect())
            .collect();
        SemilinearMap::new(k, a, self.twist).expect("reduction of a valid map")
    }

    pub fn extend(&self, t: usize) -> Result<(WnSemilinearMap, Embedding)> {
        let (module, e) = self.module.extend(t)?;
        let matrix = self.matrix.iter().map(|r| r.iter().map(|a| a.embed(&e)).collect()).collect();
        Ok((WnSemilinearMap { module, matrix, twist: self.twist }, e))
    }

    /// `ι ∘ f ∘ π` as a matrix over `Z/p^n`, for an additive `f: M -> M`.
    fn group_matrix(&self, f: impl Fn(&[WittVector]) -> Vec<WittVector>) -> ZpnMatrix {
        let md = &self.module;
        let p = md.field.characteristic();
        let dim = md.rank() * md.field.degree();
        let mut a = ZpnMatrix::zeros(p, md.n as u32, dim, dim);
        for k in 0..dim {
            let mut u = vec![0u64; dim];
            u[k] = 1;
            let col = md.group_coords(&f(&md.from_group_coords(&u)));
            for (i, v) in col.into_iter().enumerate() {
                a.set(i, k, v);
            }
        }
        a
    }
}

/// `log_p |im A|` over `Z/p^n`.
fn image_log_size(a: &ZpnMatrix) -> u32 {
    a.smith().diag_exponents.iter().map(|&e| a.n - e).sum()
}

fn columns_matrix(p: u64, n: u32, rows: usize, cols: &[Vec<u64>]) -> ZpnMatrix {
    let mut a = ZpnMatrix::zeros(p, n, rows, cols.len().max(1));
    for (j, c) in cols.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            a.set(i, j, v);
        }
    }
    a
}

#[derive(Clone, Debug, Serialize)]
pub struct WittFixedPoints {
    /// Generators of `M^{1-T}` (element coordinates as codes).
    #[serde(serialize_with = "ser_elems")]
    pub generators: Vec<Vec<WittVector>>,
    /// `M^{1-T} ≅ ⊕ Z/p^{k}` for `k` in this list.
    pub invariants: Vec<u32>,
    pub log_size: u32,
}

fn ser_elems<S: serde::Serializer>(v: &[Vec<WittVector>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        let codes: Vec<Vec<u64>> = x.iter().map(|c| c.coords().iter().map(|e| e.code()).collect()).collect();
        seq.serialize_element(&codes)?;
    }
    seq.end()
}

/// `M^{1-T}` as a `Z/p^n`-module: `ker(ι (1-T) π)` pushed forward along `π`,
/// with its invariant factors read from the Smith form of `ι π (ker)`.
pub fn witt_fixed_points(t: &WnSemilinearMap) -> WittFixedPoints {
    let md = &t.module;
    let p = md.field.characteristic();
    let dim = md.rank() * md.field.degree();
    let a = t.group_matrix(|x| t.one_minus(x));
    let mut generators = Vec::new();
    let mut cols = Vec::new();
    for (g, _) in a.kernel() {
        let x = md.from_group_coords(&g);
        debug_assert!(md.is_zero(&t.one_minus(&x)));
        if !md.is_zero(&x) {
            cols.push(md.group_coords(&x));
            generators.push(x);
        }
    }
    let b = columns_matrix(p, md.n as u32, dim, &cols);
    let mut invariants: Vec<u32> = b.smith().diag_exponents.iter().filter(|&&e| e < b.n).map(|&e| b.n - e).collect();
    invariants.sort_unstable();
    let log_size = invariants.iter().sum();
    WittFixedPoints { generators, invariants, log_size }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WittSolve {
    Solved { ext_degree: usize, field: FieldDesc, solution: Vec<Vec<u64>>, iterations: usize },
    UnsolvableUpToBound { max_ext: usize },
}

/// Successive approximation: solve `(1-T) m'_k ≡ m_k` mod `p` by the field
/// solver, set `(1-T) m'_k = m_k + p m_{k+1}`, and return
/// `x = sum_k (-p)^k m'_k`, so that `(1-T) x = m ± p^{K} m_K`; at most `n`
/// rounds are needed since `p^n M = 0`. Extension degrees are tried in order.
pub fn solve_one_minus_t_witt(t: &WnSemilinearMap, m: &[WittVector], max_ext: usize) -> Result<WittSolve> {
    t.module.check(m)?;
    if max_ext == 0 {
        return usage("max_ext must be >= 1");
    }
    'ext: for deg in 1..=max_ext {
        let (big, e) = t.extend(deg)?;
        let md = &big.module;
        let rhs: Vec<WittVector> = m.iter().map(|c| c.embed(&e)).collect();
        let bar = big.reduce_mod_p();
        let mut cur = rhs.clone();
        let mut x = md.zero();
        let mut scale = 0usize;
        let mut iterations = 0;
        while !md.is_zero(&cur) && scale < md.n {
            let Some((_, xbar)) = solve_at(&bar, &md.reduce(&cur), 1)? else { continue 'ext };
            iterations += 1;
            // lift relative to the current right-hand side, so T = 0 finishes at once
            let k = &md.field;
            let diff: Vec<FieldElem> = xbar.iter().zip(md.reduce(&cur)).map(|(&a, b)| k.sub(a, b)).collect();
            let mk = md.add(&cur, &md.lift(&diff));
            let err = md.sub(&big.one_minus(&mk), &cur);
            let mut term = (0..scale).fold(mk, |y, _| md.mul_p(&y));
            if scale % 2 == 1 {
                term = md.neg(&term);
            }
            x = md.add(&x, &term);
            cur = md.div_p(&err).expect("error term lies in pM");
            scale += 1;
        }
        assert!(iterations <= md.n);
        assert_eq!(big.one_minus(&x), rhs, "solution verifies by substitution");
        return Ok(WittSolve::Solved {
            ext_degree: deg,
            field: md.field.desc(),
            solution: x.iter().map(|c| c.coords().iter().map(|e| e.code()).collect()).collect(),
            iterations,
        });
    }
    Ok(WittSolve::UnsolvableUpToBound { max_ext })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientIdentity {
    pub ext_degree: usize,
    /// `log_p |M^{1-T}|`.
    pub log_fixed: u32,
    /// `log_p |(pM)^{1-T}|`.
    pub log_fixed_pm: u32,
    /// `dim_{F_p} (M/p)^{1-T}`.
    pub dim_fixed_mod_p: usize,
    /// `dim_{F_p}` of the reduction of `M^{1-T}`.
    pub dim_reduction: usize,
    /// Whether `M^{1-T}/(pM)^{1-T} -> (M/p)^{1-T}` is bijective.
    pub holds: bool,
}

/// Compares `M^{1-T}/(pM)^{1-T}` with `(M/p)^{1-T}` over the degree-`deg`
/// extension: the reduction of `M^{1-T}` is an `F_p`-subspace of
/// `(M/p)^{1-T}` with kernel `(pM)^{1-T}`; the identity is equality.
pub fn witt_quotient_identity(t: &WnSemilinearMap, deg: usize) -> Result<QuotientIdentity> {
    let (big, _) = t.extend(deg)?;
    let md = &big.module;
    let fixed = witt_fixed_points(&big);
    let bar = big.reduce_mod_p();
    let dim_fixed_mod_p = fixed_points(&bar).len();
    let fp = GaloisField::prime_field(md.field.characteristic())?;
    let reduced: Vec<Vec<FieldElem>> = fixed
        .generators
        .iter()
        .map(|g| md.reduce(g).into_iter().flat_map(|a| md.field.to_coeffs(a)).map(FieldElem::from_code).collect())
        .collect();
    let dim_reduction = if reduced.is_empty() { 0 } else { Matrix::from_columns(&fp, reduced[0].len(), &reduced).rank() };
    // (pM)^{1-T} = M^{1-T} ∩ pM: the kernel of reduction on M^{1-T}
    let log_fixed_pm = fixed.log_size - dim_reduction as u32;
    let reduced_fixed = fixed.generators.iter().all(|g| bar.one_minus(&md.reduce(g)).iter().all(|&c| c == FieldElem::ZERO));
    Ok(QuotientIdentity {
        ext_degree: deg,
        log_fixed: fixed.log_size,
        log_fixed_pm,
        dim_fixed_mod_p,
        dim_reduction,
        holds: reduced_fixed && dim_reduction == dim_fixed_mod_p,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WittSemisimpleReport {
    /// `log_p |M_ss|` over the base field.
    pub log_size_ss: u32,
    /// `(t, log_p |M_ss ⊗ W_n(k_t)|, log_p |W_n(k_t)·M^{1-T}(k_t)|)`.
    pub profile: Vec<(usize, u32, u32)>,
    /// First extension degree at which the fixed points generate `M_ss`.
    pub generated_at: Option<usize>,
}

fn stable_image(t: &WnSemilinearMap) -> (u32, Vec<Vec<u64>>) {
    let md = &t.module;
    let dim = md.rank() * md.field.degree();
    let mut power: Box<dyn Fn(&[WittVector]) -> Vec<WittVector>> = Box::new(|x: &[WittVector]| t.apply(x));
    let mut size = u32::MAX;
    let length: usize = md.levels.iter().sum();
    for _ in 0..=length + 1 {
        let a = t.group_matrix(&power);
        let s = image_log_size(&a);
        if s == size {
            let cols = (0..dim).map(|j| (0..dim).map(|i| a.get(i, j)).collect()).collect();
            return (s, cols);
        }
        size = s;
        power = Box::new(move |x: &[WittVector]| t.apply(&power(x)));
    }
    unreachable!("image chain of a module of finite length stabilizes")
}

/// Computes `M_ss = Im T^L` and, over extensions of degree `1..=max_ext`,
/// compares it with the `W_n(k_t)`-span of the fixed points.
pub fn witt_semisimple_check(t: &WnSemilinearMap, max_ext: usize) -> Result<WittSemisimpleReport> {
    if max_ext == 0 {
        return usage("max_ext must be >= 1");
    }
    let (log_size_ss, _) = stable_image(t);
    let mut profile = Vec::new();
    let mut generated_at = None;
    for deg in 1..=max_ext {
        let (big, _) = t.extend(deg)?;
        let md = &big.module;
        let p = md.field.characteristic();
        let dim = md.rank() * md.field.degree();
        let (ss, ss_cols) = stable_image(&big);
        let fixed = witt_fixed_points(&big);
        let mut span_cols = Vec::new();
        for g in &fixed.generators {
            for b in &md.bases[md.n - 1] {
                let bg: Vec<WittVector> = g.iter().map(|c| &b.truncate(c.len()) * c).collect();
                span_cols.push(md.group_coords(&bg));
            }
        }
        let span = image_log_size(&columns_matrix(p, md.n as u32, dim, &span_cols));
        let joint: Vec<Vec<u64>> = ss_cols.iter().chain(&span_cols).cloned().collect();
        let contained = image_log_size(&columns_matrix(p, md.n as u32, dim, &joint)) == ss;
        profile.push((deg, ss, span));
        if generated_at.is_none() && contained && span == ss {
            generated_at = Some(deg);
        }
    }
    Ok(WittSemisimpleReport { log_size_ss, profile, generated_at })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Field {
        GaloisField::default_for(2, 2).unwrap()
    }

    #[test]
    fn group_coordinates_round_trip() {
        let k = f4();
        let md = WnModule::new(&k, 3, vec![3, 3]).unwrap();
        let x = vec![WittVector::from_codes(&k, &[1, 2, 3]).unwrap(), WittVector::from_codes(&k, &[2, 0, 1]).unwrap()];
        assert_eq!(md.from_group_coords(&md.group_coords(&x)), x);
        // lower summands sit in p^{n-e} (Z/p^n)^m
        let md = WnModule::new(&k, 3, vec![1]).unwrap();
        let c = md.group_coords(&[WittVector::from_codes(&k, &[3]).unwrap()]);
        assert!(c.iter().all(|&v| v % 4 == 0));
    }

    #[test]
    fn identity_fixes_witt_of_prime_field() {
        let k = GaloisField::default_for(3, 1).unwrap();
        let md = WnModule::new(&k, 2, vec![2]).unwrap();
        let t = WnSemilinearMap::new(md, vec![vec![WittVector::one(&k, 2)]], 1).unwrap();
        let f = witt_fixed_points(&t);
        assert_eq!(f.invariants, vec![2]);
    }

    #[test]
    fn sigma_on_w2_f4() {
        let k = f4();
        let md = WnModule::new(&k, 2, vec![2]).unwrap();
        let t = WnSemilinearMap::new(md.clone(), vec![vec![WittVector::one(&k, 2)]], 1).unwrap();
        // fixed points W_2(F_2) = Z/4
        assert_eq!(witt_fixed_points(&t).invariants, vec![2]);
        for m in md.elements() {
            match solve_one_minus_t_witt(&t, &m, 4).unwrap() {
                WittSolve::Solved { iterations, .. } => assert!(iterations <= 2),
                other => panic!("{other:?}"),
            }
        }
        assert!(witt_quotient_identity(&t, 1).unwrap().holds);
        let ss = witt_semisimple_check(&t, 2).unwrap();
        assert_eq!(ss.generated_at, Some(1));
    }

    #[test]
    fn zero_map() {
        let k = f4();
        let md = WnModule::new(&k, 2, vec![2, 1]).unwrap();
        let z = WittVector::zero(&k, 2);
        let t = WnSemilinearMap::new(md.clone(), vec![vec![z.clone(), z.clone()], vec![z.clone(), z]], -1).unwrap();
        assert_eq!(witt_fixed_points(&t).log_size, 0);
        let m = vec![WittVector::from_codes(&k, &[1, 2]).unwrap(), WittVector::from_codes(&k, &[3]).unwrap()];
        match solve_one_minus_t_witt(&t, &m, 1).unwrap() {
            WittSolve::Solved { solution, iterations, .. } => {
                assert_eq!(solution, vec![vec![1, 2], vec![3]]);
                assert_eq!(iterations, 1);
            }
            other => panic!("{other:?}"),
        }
    }
}
