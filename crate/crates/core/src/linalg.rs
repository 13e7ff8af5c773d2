//! Exact linear algebra: matrices over `F_q`, Smith forms over `Z/p^n` and `Z`.

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem, GaloisField};

/// Dense row-major matrix over a finite field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, data: vec![FieldElem::ZERO; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<FieldElem>]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { field: field.clone(), rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn from_columns(field: &Field, rows: usize, columns: &[Vec<FieldElem>]) -> Matrix {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<FieldElem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == FieldElem::ZERO)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == FieldElem::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(FieldElem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        let f = &self.field;
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o = f.add(*o, b);
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let f = &self.field;
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o = f.sub(*o, b);
        }
        out
    }

    /// Entrywise `a -> a^{p^k}`.
    pub fn frobenius(&self, k: i64) -> Matrix {
        let f = &self.field;
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = f.frobenius(*x, k);
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != FieldElem::ZERO) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    let t = m.get(r, j);
                    m.set(r, j, m.get(pr, j));
                    m.set(pr, j, t);
                }
            }
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in c..m.cols {
                m.set(r, j, f.mul(m.get(r, j), inv));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == FieldElem::ZERO {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<FieldElem>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![FieldElem::ZERO; self.cols];
            v[free] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(row, free));
            }
            basis.push(v);
        }
        basis
    }

    /// A basis of the column space, taken from the original columns.
    pub fn column_space(&self) -> Vec<Vec<FieldElem>> {
        let (_, pivots) = self.rref();
        pivots.into_iter().map(|c| self.column(c)).collect()
    }

    /// Some solution of `A x = b`, if any.
    pub fn solve(&self, b: &[FieldElem]) -> Option<Vec<FieldElem>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let f = &self.field;
        let mut aug = Matrix::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![FieldElem::ZERO; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols);
        }
        Some(x)
    }
}

/// Canonical basis of the span of `vectors`: the nonzero rows of its RREF.
pub fn span_basis(field: &Field, dim: usize, vectors: &[Vec<FieldElem>]) -> Vec<Vec<FieldElem>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(field, vectors);
    debug_assert_eq!(m.cols(), dim);
    let (r, pivots) = m.rref();
    (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(field: &Field, dim: usize, basis: &[Vec<FieldElem>], v: &[FieldElem]) -> bool {
    if basis.is_empty() {
        return v.iter().all(|&x| x == FieldElem::ZERO);
    }
    Matrix::from_columns(field, dim, basis).solve(v).is_some()
}

/// Solver for `sum_j x_j col_j = b` over `F_p`, with integer coordinates.
#[derive(Clone, Debug)]
pub struct FpSolver {
    matrix: Matrix,
}

impl FpSolver {
    pub fn from_columns(p: u64, rows: usize, columns: &[Vec<u64>]) -> FpSolver {
        let fp = GaloisField::prime_field(p).expect("prime characteristic");
        let cols: Vec<Vec<FieldElem>> =
            columns.iter().map(|c| c.iter().map(|&x| FieldElem::from_code(x)).collect()).collect();
        FpSolver { matrix: Matrix::from_columns(&fp, rows, &cols) }
    }

    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let rhs: Vec<FieldElem> = b.iter().map(|&x| FieldElem::from_code(x)).collect();
        self.matrix.solve(&rhs).map(|x| x.into_iter().map(|e| e.code()).collect())
    }
}

fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    inv_mod_u64(a, m)
}

/// Matrix over `Z/p^n`, entries in `[0, p^n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpnMatrix {
    pub p: u64,
    pub n: u32,
    pub modulus: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

/// Smith form `U A V = D` over `Z/p^n`. Diagonal entries are `p^{e_i}`, with
/// `e_i = n` standing for zero.
#[derive(Clone, Debug)]
pub struct ZpnSmith {
    pub diag_exponents: Vec<u32>,
    pub u: ZpnMatrix,
    pub v: ZpnMatrix,
}

impl ZpnMatrix {
    pub fn zeros(p: u64, n: u32, rows: usize, cols: usize) -> ZpnMatrix {
        let modulus = p.pow(n);
        ZpnMatrix { p, n, modulus, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: u32, size: usize) -> ZpnMatrix {
        let mut m = ZpnMatrix::zeros(p, n, size, size);
        for i in 0..size {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u64, n: u32, rows: &[Vec<i64>]) -> ZpnMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = ZpnMatrix::zeros(p, n, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x.rem_euclid(m.modulus as i64) as u64);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.modulus;
    }

    fn mulm(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        let mut x = a;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn mul(&self, other: &ZpnMatrix) -> ZpnMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = ZpnMatrix::zeros(self.p, self.n, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = (out.get(i, j) + self.mulm(a, other.get(k, j))) % self.modulus;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0u64, |acc, j| (acc + self.mulm(self.get(i, j), v[j])) % self.modulus))
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_dst += c * row_src
    fn add_row(&mut self, dst: usize, src: usize, c: u64) {
        for j in 0..self.cols {
            let v = (self.get(dst, j) + self.mulm(c, self.get(src, j))) % self.modulus;
            self.set(dst, j, v);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: u64) {
        for i in 0..self.rows {
            let v = (self.get(i, dst) + self.mulm(c, self.get(i, src))) % self.modulus;
            self.set(i, dst, v);
        }
    }

    fn scale_row(&mut self, r: usize, c: u64) {
        for j in 0..self.cols {
            let v = self.mulm(c, self.get(r, j));
            self.set(r, j, v);
        }
    }

    /// Smith normal form with transforms. Over the local ring `Z/p^n` each
    /// pivot is an entry of least valuation, which divides everything left.
    pub fn smith(&self) -> ZpnSmith {
        let mut d = self.clone();
        let mut u = ZpnMatrix::identity(self.p, self.n, self.rows);
        let mut v = ZpnMatrix::identity(self.p, self.n, self.cols);
        let k = self.rows.min(self.cols);
        let mut exps = Vec::with_capacity(k);
        for t in 0..k {
            let mut best: Option<(u32, usize, usize)> = None;
            for i in t..d.rows {
                for j in t..d.cols {
                    let val = d.valuation(d.get(i, j));
                    if val < d.n && best.is_none_or(|(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
            let Some((val, bi, bj)) = best else {
                exps.extend(std::iter::repeat_n(self.n, k - t));
                break;
            };
            d.swap_rows(t, bi);
            u.swap_rows(t, bi);
            d.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let pv = self.p.pow(val);
            let unit = d.get(t, t) / pv;
            let uinv = inv_mod_u64(unit, self.modulus).expect("unit part is invertible");
            d.scale_row(t, uinv);
            u.scale_row(t, uinv);
            debug_assert_eq!(d.get(t, t), pv);
            for i in 0..d.rows {
                if i == t {
                    continue;
                }
                let a = d.get(i, t);
                if a == 0 {
                    continue;
                }
                let c = self.modulus - (a / pv) % self.modulus;
                d.add_row(i, t, c);
                u.add_row(i, t, c);
            }
            for j in 0..d.cols {
                if j == t {
                    continue;
                }
                let a = d.get(t, j);
                if a == 0 {
                    continue;
                }
                let c = self.modulus - (a / pv) % self.modulus;
                d.add_col(j, t, c);
                v.add_col(j, t, c);
            }
            exps.push(val);
        }
        ZpnSmith { diag_exponents: exps, u, v }
    }

    /// Generators of the kernel `{x : A x = 0}` with their orders as
    /// exponents of `p`; the kernel is the direct sum of the cyclic groups.
    pub fn kernel(&self) -> Vec<(Vec<u64>, u32)> {
        let s = self.smith();
        let mut out = Vec::new();
        for j in 0..self.cols {
            let e = s.diag_exponents.get(j).copied().unwrap_or(self.n);
            // D x = 0 in coordinate j: p^e x_j = 0, so x_j in p^{n-e}
            if e == 0 {
                continue;
            }
            let scale = self.p.pow(self.n - e);
            let gen: Vec<u64> = (0..self.cols).map(|i| self.mulm(s.v.get(i, j), scale)).collect();
            out.push((gen, e));
        }
        out
    }

    /// Invariant exponents of the cokernel `(Z/p^n)^rows / im A`; each entry
    /// `e > 0` contributes a summand `Z/p^e`.
    pub fn cokernel_exponents(&self) -> Vec<u32> {
        let s = self.smith();
        let mut out: Vec<u32> = s.diag_exponents.iter().copied().filter(|&e| e > 0).collect();
        out.extend(std::iter::repeat_n(self.n, self.rows.saturating_sub(s.diag_exponents.len())));
        out.sort_unstable();
        out
    }
}

/// Smith invariant factors of an integer matrix (nonnegative, in divisibility
/// order, zeros included up to `min(rows, cols)`).
pub fn integer_invariant_factors(rows: &[Vec<i64>]) -> Result<Vec<i128>> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let overflow = || Error::Unsupported("integer Smith form overflowed i128".into());
    let k = nr.min(nc);
    let mut out = Vec::with_capacity(k);
    for t in 0..k {
        loop {
            // pivot: nonzero entry of least absolute value
            let mut best: Option<(i128, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(b, _, _)| x.abs() < b) {
                        best = Some((x.abs(), i, j));
                    }
                }
            }
            let Some((_, bi, bj)) = best else {
                out.extend(std::iter::repeat_n(0, k - t));
                return Ok(out);
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let piv = a[t][t];
            let mut clean = true;
            for i in t + 1..nr {
                let q = a[i][t] / piv;
                if q != 0 {
                    for j in t..nc {
                        let sub = q.checked_mul(a[t][j]).ok_or_else(overflow)?;
                        a[i][j] = a[i][j].checked_sub(sub).ok_or_else(overflow)?;
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..nc {
                let q = a[t][j] / piv;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        let sub = q.checked_mul(row[t]).ok_or_else(overflow)?;
                        row[j] = row[j].checked_sub(sub).ok_or_else(overflow)?;
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold any entry not divisible by the pivot into row t
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| a[i][j] % piv != 0));
            if let Some(i) = bad {
                for j in t..nc {
                    a[t][j] = a[t][j].checked_add(a[i][j]).ok_or_else(overflow)?;
                }
                continue;
            }
            out.push(piv.abs());
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_solve_over_f4() {
        let f = GaloisField::default_for(2, 2).unwrap();
        let w = f.generator();
        let one = f.one();
        let m = Matrix::from_rows(&f, &[vec![one, w], vec![w, f.mul(w, w)]]);
        assert_eq!(m.rank(), 1);
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        assert!(m.mul_vec(&ker[0]).iter().all(|&x| x == FieldElem::ZERO));
        assert!(m.solve(&[one, w]).is_some());
        assert!(m.solve(&[one, one]).is_none());
    }

    #[test]
    fn zpn_smith_diagonalizes() {
        let a = ZpnMatrix::from_rows(2, 3, &[vec![2, 4, 0], vec![6, 1, 3]]);
        let s = a.smith();
        let d = s.u.mul(&a).mul(&s.v);
        for i in 0..d.rows {
            for j in 0..d.cols {
                let expected = if i == j && s.diag_exponents[i] < 3 { 2u64.pow(s.diag_exponents[i]) } else { 0 };
                assert_eq!(d.get(i, j), expected);
            }
        }
        assert_eq!(s.diag_exponents, vec![0, 1]);
    }

    #[test]
    fn zpn_kernel_orders() {
        // x -> 2x on Z/8: kernel {0, 4}
        let a = ZpnMatrix::from_rows(2, 3, &[vec![2]]);
        let ker = a.kernel();
        assert_eq!(ker, vec![(vec![4], 1)]);
        let z = ZpnMatrix::from_rows(3, 2, &[vec![0, 0]]);
        assert_eq!(z.kernel().len(), 2);
    }

    #[test]
    fn integer_smith() {
        let inv = integer_invariant_factors(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
        assert_eq!(inv, vec![2, 6, 12]);
        assert_eq!(integer_invariant_factors(&[vec![0, 0]]).unwrap(), vec![0]);
    }
}
