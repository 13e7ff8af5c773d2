//! Parsing of command-line values: fields, Witt vectors, matrices.

use anyhow::Context;
use drwk::witt::{WittJson, WittVector};
use drwk::{Field, FieldElem, GaloisField};

use crate::usage;

/// `p,m` (default modulus) or `p,m,c0,...,cm` (explicit monic modulus).
pub fn field(s: &str) -> anyhow::Result<Field> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| crate::UsageError(format!("bad field `{s}`: expected p,m")))?;
    match parts.as_slice() {
        [p, m] => Ok(GaloisField::default_for(*p, *m as usize)?),
        [p, m, modulus @ ..] if modulus.len() as u64 == m + 1 => Ok(GaloisField::new(*p, modulus.to_vec())?),
        _ => usage(format!("bad field `{s}`: expected p,m or p,m,c0,...,cm")),
    }
}

/// A Witt vector: JSON (`{"p":..,"m":..,"modulus":..,"n":..,"coords":..}`) or
/// `W{c0,c1,...}` over `--field`.
pub fn witt(s: &str, field: Option<&Field>) -> anyhow::Result<WittVector> {
    if s.trim_start().starts_with('{') {
        let j: WittJson = serde_json::from_str(s).context("malformed Witt vector JSON")?;
        return Ok(WittVector::from_json(&j)?);
    }
    match field {
        Some(k) => Ok(WittVector::parse(k, s)?),
        None => usage("W{...} input needs --field"),
    }
}

pub fn element(k: &Field, code: u64) -> anyhow::Result<FieldElem> {
    Ok(k.from_code(code)?)
}

pub fn code_matrix(s: &str) -> anyhow::Result<Vec<Vec<u64>>> {
    serde_json::from_str(s).context("matrix must be a JSON array of arrays of element codes")
}

pub fn code_vector(s: &str) -> anyhow::Result<Vec<u64>> {
    serde_json::from_str(s).context("vector must be a JSON array of element codes")
}

/// Comma-separated list of integers.
pub fn int_list<T: std::str::FromStr>(s: &str) -> anyhow::Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| crate::UsageError(format!("bad integer `{t}` in `{s}`")).into()))
        .collect()
}

/// Twist `+1` or `-1`.
pub fn twist(s: &str) -> anyhow::Result<i8> {
    match s.trim() {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        _ => usage(format!("twist must be +1 or -1, got `{s}`")),
    }
}

pub fn codes(w: &WittVector) -> Vec<u64> {
    w.coords().iter().map(|c| c.code()).collect()
}
