//! Frobenius-semilinear maps `T(x) = A σ^e(x)` on `k^N` and on finite
//! `W_n(k)`-modules `⊕ W_{e_i}(k)`: fixed points, semisimple parts, and
//! solutions of `(1 - T) x = c` over finite extensions.

mod witt;

use serde::Serialize;

pub use witt::{
    solve_one_minus_t_witt, witt_fixed_points, witt_quotient_identity, witt_semisimple_check, QuotientIdentity,
    WittFixedPoints, WittSemisimpleReport, WittSolve, WnModule, WnSemilinearMap,
};

use crate::error::{usage, Result};
use crate::field::{Embedding, Field, FieldDesc, FieldElem, GaloisField};
use crate::linalg::Matrix;

/// Default bound on extension degrees searched.
pub const DEFAULT_MAX_EXT: usize = 6;

/// `T(x) = A · σ^{twist}(x)` on `k^N`, `twist = ±1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearMap {
    field: Field,
    matrix: Vec<Vec<FieldElem>>,
    twist: i8,
}

fn check_twist(twist: i8) -> Result<()> {
    if twist != 1 && twist != -1 {
        return usage("twist must be +1 or -1");
    }
    Ok(())
}

impl SemilinearMap {
    pub fn new(field: &Field, matrix: Vec<Vec<FieldElem>>, twist: i8) -> Result<SemilinearMap> {
        check_twist(twist)?;
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return usage("matrix must be square");
        }
        if matrix.iter().flatten().any(|&a| !field.contains(a)) {
            return usage("matrix entry outside the field");
        }
        Ok(SemilinearMap { field: field.clone(), matrix, twist })
    }

    /// From integer element codes.
    pub fn from_codes(field: &Field, rows: &[Vec<u64>], twist: i8) -> Result<SemilinearMap> {
        let m = rows.iter().map(|r| r.iter().map(|&c| field.from_code(c)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        SemilinearMap::new(field, m, twist)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn twist(&self) -> i8 {
        self.twist
    }

    pub fn matrix(&self) -> &[Vec<FieldElem>] {
        &self.matrix
    }

    pub fn apply(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let k = &self.field;
        let sv: Vec<FieldElem> = v.iter().map(|&x| k.frobenius(x, self.twist as i64)).collect();
        self.matrix
            .iter()
            .map(|row| row.iter().zip(&sv).fold(k.zero(), |acc, (&a, &x)| k.add(acc, k.mul(a, x))))
            .collect()
    }

    /// `(1 - T)(v)`.
    pub fn one_minus(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let k = &self.field;
        v.iter().zip(self.apply(v)).map(|(&a, b)| k.sub(a, b)).collect()
    }

    /// The same map over `F_{p^{m t}}`, with the embedding of `k`.
    pub fn extend(&self, t: usize) -> Result<(SemilinearMap, Embedding)> {
        let big = GaloisField::default_for(self.field.characteristic(), self.field.degree() * t)?;
        let e = Embedding::new(&self.field, &big)?;
        let matrix = self.matrix.iter().map(|r| r.iter().map(|&a| e.map(a)).collect()).collect();
        Ok((SemilinearMap { field: big, matrix, twist: self.twist }, e))
    }

    fn fp_coords(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        v.iter().flat_map(|&x| self.field.to_coeffs(x)).map(FieldElem::from_code).collect()
    }

    fn from_fp_coords(&self, c: &[FieldElem]) -> Vec<FieldElem> {
        let m = self.field.degree();
        c.chunks(m)
            .map(|ch| self.field.from_coeffs(&ch.iter().map(|x| x.code()).collect::<Vec<_>>()).expect("digits below p"))
            .collect()
    }

    /// `1 - T` as an `F_p`-matrix on the `F_p`-coordinates (modulus basis).
    fn linearized_one_minus(&self) -> Matrix {
        let (n, m) = (self.dim(), self.field.degree());
        let fp = GaloisField::prime_field(self.field.characteristic()).expect("prime");
        let mut cols = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let mut digits = vec![0u64; m];
                digits[j] = 1;
                let mut v = vec![self.field.zero(); n];
                v[i] = self.field.from_coeffs(&digits).expect("basis digit");
                cols.push(self.fp_coords(&self.one_minus(&v)));
            }
        }
        Matrix::from_columns(&fp, n * m, &cols)
    }
}

/// An `F_p`-basis of `V^{1-T} = {v : T v = v}`.
pub fn fixed_points(t: &SemilinearMap) -> Vec<Vec<FieldElem>> {
    t.linearized_one_minus().kernel().iter().map(|c| t.from_fp_coords(c)).collect()
}

/// A `k`-basis of `V_ss = ⋂ Im T^j`. `Im T^j` is the column space of
/// `A σ^e(A) ... σ^{(j-1)e}(A)`, and the chain is stable after `N` steps.
pub fn semisimple_part(t: &SemilinearMap) -> Vec<Vec<FieldElem>> {
    let n = t.dim();
    if n == 0 {
        return Vec::new();
    }
    let a = Matrix::from_rows(&t.field, &t.matrix);
    let mut prod = a.clone();
    let mut rank = prod.rank();
    for j in 1..=n {
        let next = prod.mul(&a.frobenius(j as i64 * t.twist as i64));
        let r = next.rank();
        prod = next;
        if r == rank {
            break;
        }
        rank = r;
    }
    prod.column_space()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FieldSolve {
    Solved { ext_degree: usize, field: FieldDesc, solution: Vec<u64> },
    UnsolvableUpToBound { max_ext: usize },
}

/// Smallest `t <= max_ext` such that `(1 - T) x = c` has a solution over
/// `F_{p^{m t}}`, with one such solution (as element codes of that field),
/// verified by substitution.
pub fn solve_one_minus_t_field(t: &SemilinearMap, c: &[FieldElem], max_ext: usize) -> Result<FieldSolve> {
    if max_ext == 0 {
        return usage("max_ext must be >= 1");
    }
    if c.len() != t.dim() {
        return usage("right-hand side has the wrong length");
    }
    for deg in 1..=max_ext {
        if let Some((big, x)) = solve_at(t, c, deg)? {
            return Ok(FieldSolve::Solved {
                ext_degree: deg,
                field: big.field.desc(),
                solution: x.iter().map(|e| e.code()).collect(),
            });
        }
    }
    Ok(FieldSolve::UnsolvableUpToBound { max_ext })
}

/// A solution over the degree-`deg` extension, with the extended map.
pub(crate) fn solve_at(t: &SemilinearMap, c: &[FieldElem], deg: usize) -> Result<Option<(SemilinearMap, Vec<FieldElem>)>> {
    let (big, e) = t.extend(deg)?;
    let rhs: Vec<FieldElem> = c.iter().map(|&x| e.map(x)).collect();
    let m = big.linearized_one_minus();
    Ok(m.solve(&big.fp_coords(&rhs)).map(|sol| {
        let x = big.from_fp_coords(&sol);
        assert_eq!(big.one_minus(&x), rhs, "solution verifies by substitution");
        (big, x)
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizationReport {
    pub field: FieldDesc,
    pub twist: i8,
    pub dim: usize,
    pub dim_ss: usize,
    /// `(t, dim_{F_p} of the fixed points over F_{p^{m t}})`.
    pub profile: Vec<(usize, usize)>,
    /// Whether `t | t'` implies `dim(t) <= dim(t')` throughout the profile.
    pub monotone_along_divisors: bool,
    pub bounded_by_dim_ss: bool,
    /// First `t` with `dim(t) = dim_ss`.
    pub reached_at: Option<usize>,
}

impl StabilizationReport {
    pub fn passed(&self) -> bool {
        self.monotone_along_divisors && self.bounded_by_dim_ss && self.reached_at.is_some()
    }
}

/// Fixed-point dimensions over the extensions of degree `1..=max_ext`,
/// compared with `dim_k V_ss`. A fixed vector over a subfield stays fixed over
/// any extension, so the dimension can only grow along divisibility.
pub fn dim_stabilization(t: &SemilinearMap, max_ext: usize) -> Result<StabilizationReport> {
    if max_ext == 0 {
        return usage("max_ext must be >= 1");
    }
    let dim_ss = semisimple_part(t).len();
    let mut profile = Vec::with_capacity(max_ext);
    for deg in 1..=max_ext {
        let (big, _) = t.extend(deg)?;
        profile.push((deg, fixed_points(&big).len()));
    }
    let monotone = profile
        .iter()
        .all(|&(a, da)| profile.iter().all(|&(b, db)| b % a != 0 || da <= db));
    Ok(StabilizationReport {
        field: t.field.desc(),
        twist: t.twist,
        dim: t.dim(),
        dim_ss,
        bounded_by_dim_ss: profile.iter().all(|&(_, d)| d <= dim_ss),
        reached_at: profile.iter().find(|&&(_, d)| d == dim_ss).map(|&(t, _)| t),
        monotone_along_divisors: monotone,
        profile,
    })
}
