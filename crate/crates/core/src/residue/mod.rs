//! Residue symbols `Res[f dT_1...dT_d; t_1, ..., t_d]` for tensor-split
//! sequences (`t_i` monic in `T_i` alone), computed exactly over `Q[Y]`.
//!
//! One variable at a time, the residue is the trace of `f / g'` on the free
//! module `A[T]/(g)`; with `A = Q[Y]` this is
//! `Tr(M_f adj(M_{g'})) / det(M_{g'})` for the multiplication matrices on the
//! basis `1, T, ..., T^{m-1}`, with the adjugate from Faddeev–LeVerrier.

mod poly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

pub use poly::ExactPoly;

use crate::error::{Error, Result};

/// Reduces `f` modulo the monic `g` (both seen as polynomials in `var`);
/// returns the `m = deg g` coefficients of the remainder.
fn rem_coeffs(f: &ExactPoly, g: &[ExactPoly], var: &str) -> Vec<ExactPoly> {
    let m = g.len() - 1;
    let mut c = f.coeffs_in(var);
    if c.len() < m {
        c.resize(m, ExactPoly::zero());
    }
    for k in (m..c.len()).rev() {
        let lead = std::mem::replace(&mut c[k], ExactPoly::zero());
        if lead.is_zero() {
            continue;
        }
        for i in 0..m {
            if !g[i].is_zero() {
                c[k - m + i] = c[k - m + i].sub(&lead.mul(&g[i]));
            }
        }
    }
    c.truncate(m);
    c
}

type Mat = Vec<Vec<ExactPoly>>;

/// Matrix of multiplication by `h` on `A[T]/(g)`, columns `T^j h mod g`.
fn mult_matrix(h: &ExactPoly, g: &[ExactPoly], var: &str) -> Mat {
    let m = g.len() - 1;
    let mut cols = Vec::with_capacity(m);
    for j in 0..m {
        let t = h.mul(&ExactPoly::var_pow(var, j as u32));
        cols.push(rem_coeffs(&t, g, var));
    }
    (0..m).map(|i| (0..m).map(|j| cols[j][i].clone()).collect()).collect()
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let m = a.len();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| (0..m).fold(ExactPoly::zero(), |acc, k| if a[i][k].is_zero() || b[k][j].is_zero() { acc } else { acc.add(&a[i][k].mul(&b[k][j])) }))
                .collect()
        })
        .collect()
}

fn trace(a: &Mat) -> ExactPoly {
    (0..a.len()).fold(ExactPoly::zero(), |acc, i| acc.add(&a[i][i]))
}

/// `(det A, adj A)` by Faddeev–LeVerrier: `M_1 = I`, `c_{m-1} = -tr A`,
/// `M_k = A M_{k-1} + c_{m-k+1} I`, `c_{m-k} = -tr(A M_k)/k`;
/// `det A = (-1)^m c_0`, `adj A = (-1)^{m+1} M_m`.
fn det_adj(a: &Mat) -> (ExactPoly, Mat) {
    let m = a.len();
    let identity = |c: &ExactPoly| -> Mat {
        (0..m).map(|i| (0..m).map(|j| if i == j { c.clone() } else { ExactPoly::zero() }).collect()).collect()
    };
    let mut mk = identity(&ExactPoly::one());
    let mut c = trace(a).neg();
    for k in 2..=m {
        let am = mat_mul(a, &mk);
        mk = am.iter().enumerate().map(|(i, row)| row.iter().enumerate().map(|(j, x)| if i == j { x.add(&c) } else { x.clone() }).collect()).collect();
        let tr = trace(&mat_mul(a, &mk));
        c = tr.scale(&BigRational::new(BigInt::from(-1), BigInt::from(k as i64)));
    }
    let sign = |e: usize| if e.is_multiple_of(2) { BigRational::one() } else { -BigRational::one() };
    let det = c.scale(&sign(m));
    let adj = mk.iter().map(|row| row.iter().map(|x| x.scale(&sign(m + 1))).collect()).collect();
    (det, adj)
}

/// Coefficients of a monic `g` in `var`, checked: degree `>= 1`, leading
/// coefficient exactly 1, no other occurrence of `var` in the coefficients.
fn monic_coeffs(g: &ExactPoly, var: &str) -> Result<Vec<ExactPoly>> {
    let c = g.coeffs_in(var);
    if c.len() < 2 || g.degree_in(var) == 0 {
        return Err(Error::Usage(format!("`{g}` must have positive degree in {var}")));
    }
    if c.last().and_then(ExactPoly::as_constant) != Some(BigRational::one()) {
        return Err(Error::Usage(format!("`{g}` must be monic in {var}")));
    }
    Ok(c)
}

/// `Res[f dT; g]` for `g` monic in `T = var`, over the polynomial ring in the
/// remaining variables. If `g'` is a zero divisor modulo `g` over the fraction
/// field (inseparable `g`, e.g. a power), the residue is read off as the
/// coefficient of `T^{m-1}` in `f mod g`, the expansion at infinity, which
/// agrees with the trace formula wherever both are defined.
pub fn residue_1d(f: &ExactPoly, g: &ExactPoly, var: &str) -> Result<ExactPoly> {
    let gc = monic_coeffs(g, var)?;
    let m = gc.len() - 1;
    let dg = g.derivative(var);
    let (det, adj) = det_adj(&mult_matrix(&dg, &gc, var));
    let out = if det.is_zero() {
        rem_coeffs(f, &gc, var).pop().expect("m >= 1")
    } else {
        let num = trace(&mat_mul(&mult_matrix(f, &gc, var), &adj));
        num.exact_div(&det)
            .ok_or_else(|| Error::Integrality(format!("Res[{f} d{var}; {g}] does not lie in the polynomial ring")))?
    };
    debug_assert_eq!(out, rem_coeffs(f, &gc, var)[m - 1], "trace and expansion at infinity agree");
    if f.is_integral() && g.is_integral() && !out.is_integral() {
        return Err(Error::Integrality(format!("Res[{f} d{var}; {g}] = {out} is not integral")));
    }
    Ok(out)
}

/// A residue problem with tensor-split sequence: `seq[i] = (T_i, t_i)` with
/// `t_i` monic in `T_i` and free of the other `T_j`.
#[derive(Clone, Debug)]
pub struct ResidueProblem {
    pub f: ExactPoly,
    pub seq: Vec<(String, ExactPoly)>,
}

impl ResidueProblem {
    pub fn new(f: ExactPoly, seq: Vec<(String, ExactPoly)>) -> Result<ResidueProblem> {
        if seq.is_empty() {
            return Err(Error::Usage("the sequence must be nonempty".into()));
        }
        for (i, (v, t)) in seq.iter().enumerate() {
            monic_coeffs(t, v)?;
            for (j, (w, _)) in seq.iter().enumerate() {
                if i != j && (w == v || t.degree_in(w) > 0) {
                    return Err(Error::Unsupported(format!("`{t}` involves {w}: only tensor-split sequences are supported")));
                }
            }
        }
        Ok(ResidueProblem { f, seq })
    }

    /// Parses `f` and the `t_i`; each `t_i` must involve exactly one variable
    /// whose name starts with `T`, which becomes its residue variable.
    pub fn parse(f: &str, seq: &[&str]) -> Result<ResidueProblem> {
        let f = ExactPoly::parse(f)?;
        let mut out = Vec::new();
        for s in seq {
            let t = ExactPoly::parse(s)?;
            let tv: Vec<&String> = t.vars().iter().filter(|v| v.starts_with('T')).collect();
            if tv.len() != 1 {
                return Err(Error::Usage(format!("`{s}` must involve exactly one T-variable")));
            }
            out.push((tv[0].clone(), t));
        }
        ResidueProblem::new(f, out)
    }
}

/// `Res[f dT_1...dT_d; t_1, ..., t_d]`, one variable at a time in the given order.
pub fn residue_nd_ordered(problem: &ResidueProblem, order: &[usize]) -> Result<ExactPoly> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..problem.seq.len()).collect::<Vec<_>>() {
        return Err(Error::Usage("order must be a permutation of the sequence".into()));
    }
    let mut acc = problem.f.clone();
    for &i in order {
        let (v, t) = &problem.seq[i];
        acc = residue_1d(&acc, t, v)?;
    }
    Ok(acc)
}

pub fn residue_nd(problem: &ResidueProblem) -> Result<ExactPoly> {
    let order: Vec<usize> = (0..problem.seq.len()).collect();
    residue_nd_ordered(problem, &order)
}

/// Checks `Res[dη; t^k] = sum_i k_i Res[dt_i ∧ η; ..., t_i^{k_i+1}, ...]`
/// for a `(d-1)`-form `η = sum_i η_i dT_1..(omit i)..dT_d`.
pub fn check_r9(eta: &[ExactPoly], seq: &[(String, ExactPoly)], k: &[u32]) -> Result<bool> {
    let d = seq.len();
    if eta.len() != d || k.len() != d || k.contains(&0) {
        return Err(Error::Usage("need one η-component and one positive power per variable".into()));
    }
    let sign = |i: usize| if i.is_multiple_of(2) { 1 } else { -1 };
    let powered = |bump: Option<usize>| -> Vec<(String, ExactPoly)> {
        seq.iter().enumerate().map(|(j, (v, t))| (v.clone(), t.pow(k[j] + u32::from(bump == Some(j))))).collect()
    };
    // dη = sum_i (-1)^i ∂_i η_i dT
    let d_eta = (0..d).fold(ExactPoly::zero(), |acc, i| acc.add(&eta[i].derivative(&seq[i].0).scale(&BigRational::from_integer(sign(i).into()))));
    let lhs = residue_nd(&ResidueProblem::new(d_eta, powered(None))?)?;
    let mut rhs = ExactPoly::zero();
    for i in 0..d {
        // dt_i ∧ η = (-1)^i t_i' η_i dT
        let form = seq[i].1.derivative(&seq[i].0).mul(&eta[i]).scale(&BigRational::from_integer((sign(i) * k[i] as i64).into()));
        rhs = rhs.add(&residue_nd(&ResidueProblem::new(form, powered(Some(i)))?)?);
    }
    Ok(lhs == rhs)
}

/// Checks that the residue commutes with specializing `var -> value` in the
/// base (the sequence must stay monic, which it does since its leading
/// coefficient is 1).
pub fn check_r5(problem: &ResidueProblem, var: &str, value: &BigRational) -> Result<bool> {
    if problem.seq.iter().any(|(v, _)| v == var) {
        return Err(Error::Usage(format!("{var} is a residue variable, not a base variable")));
    }
    let before = residue_nd(problem)?.substitute(var, value);
    let special = ResidueProblem::new(
        problem.f.substitute(var, value),
        problem.seq.iter().map(|(v, t)| (v.clone(), t.substitute(var, value))).collect(),
    )?;
    Ok(residue_nd(&special)? == before)
}

/// The residue `Res[T^a dT; T^p - Y]` over each variable, i.e. the standard
/// lifting sequence `t_i = T_i^p - Y_i`.
pub fn lifting_problem(p: u64, exps: &[u64]) -> Result<ResidueProblem> {
    let powers: Vec<(String, u32)> = (0..exps.len()).map(|i| (format!("T{}", i + 1), exps[i] as u32)).collect();
    let refs: Vec<(&str, u32)> = powers.iter().map(|(v, e)| (v.as_str(), *e)).collect();
    let f = ExactPoly::monomial(BigRational::one(), &refs);
    let seq = (0..exps.len())
        .map(|i| {
            let t = format!("T{}", i + 1);
            let g = ExactPoly::var_pow(&t, p as u32).sub(&ExactPoly::var(&format!("Y{}", i + 1)));
            (t, g)
        })
        .collect();
    ResidueProblem::new(f, seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn ep(s: &str) -> ExactPoly {
        ExactPoly::parse(s).unwrap()
    }

    #[test]
    fn residue_at_a_simple_zero() {
        let f = ep("3*T^2 + 5*T + 7*Y");
        assert_eq!(residue_1d(&f, &ep("T"), "T").unwrap(), ep("7*Y"));
    }

    #[test]
    fn lifting_residues() {
        for p in [2u64, 3] {
            let one = residue_nd(&lifting_problem(p, &[p - 1]).unwrap()).unwrap();
            assert_eq!(one, ep("1"));
            let y = residue_nd(&lifting_problem(p, &[2 * p - 1]).unwrap()).unwrap();
            assert_eq!(y, ep("Y1"));
            assert!(residue_nd(&lifting_problem(p, &[p]).unwrap()).unwrap().is_zero());
        }
        let two = residue_nd(&lifting_problem(2, &[1, 1]).unwrap()).unwrap();
        assert_eq!(two, ep("1"));
        assert!(residue_nd(&lifting_problem(2, &[1, 0]).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn inseparable_modulus_uses_expansion() {
        // Res[T dT; T^2] = 1, Res[T^2 dT; T^2] = 0
        assert_eq!(residue_1d(&ep("T"), &ep("T^2"), "T").unwrap(), ep("1"));
        assert!(residue_1d(&ep("T^2"), &ep("T^2"), "T").unwrap().is_zero());
    }

    #[test]
    fn r9_small() {
        let seq = vec![("T".to_string(), ep("T"))];
        assert!(check_r9(&[ep("T^2")], &seq, &[1]).unwrap());
        assert!(check_r9(&[ep("5")], &seq, &[2]).unwrap());
        let seq2 = vec![("T".to_string(), ep("T^2 + Y*T + 3"))];
        assert!(check_r9(&[ep("T^3 - 2*Y*T")], &seq2, &[2]).unwrap());
    }

    #[test]
    fn r5_specialization() {
        let pr = lifting_problem(3, &[2]).unwrap();
        assert!(check_r5(&pr, "Y1", &BigRational::zero()).unwrap());
        let pr = lifting_problem(2, &[5]).unwrap();
        assert!(check_r5(&pr, "Y1", &BigRational::from_integer(7.into())).unwrap());
    }
}
