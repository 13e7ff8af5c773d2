use clap::{Args, Subcommand};
use drwk::semilinear::{
    dim_stabilization, fixed_points, semisimple_part, solve_one_minus_t_field, solve_one_minus_t_witt, witt_fixed_points,
    witt_semisimple_check, SemilinearMap, WnModule, WnSemilinearMap, DEFAULT_MAX_EXT,
};
use drwk::witt::WittVector;
use drwk::{Field, FieldElem};
use serde_json::json;

use crate::input;
use crate::Output;

#[derive(Args)]
pub struct MapArgs {
    /// Field `p,m`.
    #[arg(long)]
    field: String,
    /// `+1` (T = A σ) or `-1` (T = A σ^{-1}).
    #[arg(long, allow_hyphen_values = true, default_value = "+1")]
    twist: String,
    /// Square matrix: JSON rows of element codes; for Witt maps, rows of
    /// coordinate-code arrays (`[[[1,0]]]`).
    #[arg(long)]
    matrix: String,
    /// Right-hand side: JSON codes (or coordinate-code arrays for Witt maps).
    #[arg(long)]
    rhs: Option<String>,
    /// Largest extension degree searched.
    #[arg(long, default_value_t = DEFAULT_MAX_EXT)]
    max_ext: usize,
    /// Level n of W_n (Witt commands).
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated levels of the summands (default: all n).
    #[arg(long)]
    levels: Option<String>,
}

#[derive(Subcommand)]
pub enum SemilinearCmd {
    /// F_p-basis of the fixed points.
    Fix(MapArgs),
    /// Basis of the semisimple part.
    Ss(MapArgs),
    /// Solve (1 - T) x = rhs over the smallest extension.
    Solve(MapArgs),
    /// Fixed points of a map on ⊕ W_{e_i}(k).
    Wfix(MapArgs),
    /// Solve (1 - T) x = rhs on ⊕ W_{e_i}(k).
    Wsolve(MapArgs),
    /// Fixed-point dimensions over extensions against dim V_ss.
    Dimcheck(MapArgs),
}

fn field_map(a: &MapArgs) -> anyhow::Result<SemilinearMap> {
    let k = input::field(&a.field)?;
    Ok(SemilinearMap::from_codes(&k, &input::code_matrix(&a.matrix)?, input::twist(&a.twist)?)?)
}

fn witt_map(a: &MapArgs) -> anyhow::Result<WnSemilinearMap> {
    let k = input::field(&a.field)?;
    let Some(n) = a.n else { return crate::usage("Witt commands need --n") };
    let rows: Vec<Vec<Vec<u64>>> = serde_json::from_str(&a.matrix)?;
    let levels = match &a.levels {
        Some(s) => input::int_list(s)?,
        None => vec![n; rows.len()],
    };
    let module = WnModule::new(&k, n, levels)?;
    let matrix = rows
        .iter()
        .map(|r| r.iter().map(|c| WittVector::from_codes(&k, c)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WnSemilinearMap::new(module, matrix, input::twist(&a.twist)?)?)
}

fn basis_codes(b: &[Vec<FieldElem>]) -> Vec<Vec<u64>> {
    b.iter().map(|v| v.iter().map(|e| e.code()).collect()).collect()
}

fn rhs_field(k: &Field, a: &MapArgs) -> anyhow::Result<Vec<FieldElem>> {
    let Some(s) = &a.rhs else { return crate::usage("solve needs --rhs") };
    input::code_vector(s)?.into_iter().map(|c| input::element(k, c)).collect()
}

pub fn run(cmd: SemilinearCmd) -> anyhow::Result<Output> {
    match cmd {
        SemilinearCmd::Fix(a) => {
            let t = field_map(&a)?;
            let b = basis_codes(&fixed_points(&t));
            Ok(Output::one(json!({ "op": "fix", "dim_fp": b.len(), "basis": b }), format!("dim_F_p = {}; basis {:?}", b.len(), b)))
        }
        SemilinearCmd::Ss(a) => {
            let t = field_map(&a)?;
            let b = basis_codes(&semisimple_part(&t));
            Ok(Output::one(json!({ "op": "ss", "dim": b.len(), "basis": b }), format!("dim_k V_ss = {}; basis {:?}", b.len(), b)))
        }
        SemilinearCmd::Solve(a) => {
            let t = field_map(&a)?;
            let c = rhs_field(t.field(), &a)?;
            let r = solve_one_minus_t_field(&t, &c, a.max_ext)?;
            let text = serde_json::to_string(&r)?;
            Ok(Output::one(json!({ "op": "solve", "result": r }), text))
        }
        SemilinearCmd::Wfix(a) => {
            let t = witt_map(&a)?;
            let r = witt_fixed_points(&t);
            let text = format!("M^(1-T) = {} (log_p size {})", invariants_text(&r.invariants, t.module().field().characteristic()), r.log_size);
            Ok(Output::one(json!({ "op": "wfix", "result": r }), text))
        }
        SemilinearCmd::Wsolve(a) => {
            let t = witt_map(&a)?;
            let Some(s) = &a.rhs else { return crate::usage("wsolve needs --rhs") };
            let rows: Vec<Vec<u64>> = serde_json::from_str(s)?;
            let k = t.module().field().clone();
            let m = rows.iter().map(|c| WittVector::from_codes(&k, c)).collect::<Result<Vec<_>, _>>()?;
            let r = solve_one_minus_t_witt(&t, &m, a.max_ext)?;
            let text = serde_json::to_string(&r)?;
            Ok(Output::one(json!({ "op": "wsolve", "result": r }), text))
        }
        SemilinearCmd::Dimcheck(a) => {
            if a.n.is_some() {
                let t = witt_map(&a)?;
                let r = witt_semisimple_check(&t, a.max_ext)?;
                let ok = r.generated_at.is_some();
                let text = format!("{} log_p |M_ss| = {}, generated at {:?}, profile {:?}", pass(ok), r.log_size_ss, r.generated_at, r.profile);
                return Ok(Output::one(json!({ "op": "dimcheck", "passed": ok, "result": r }), text).verdict(ok));
            }
            let t = field_map(&a)?;
            let r = dim_stabilization(&t, a.max_ext)?;
            let ok = r.passed();
            let text = format!("{} dim V_ss = {}, reached at {:?}, profile {:?}", pass(ok), r.dim_ss, r.reached_at, r.profile);
            Ok(Output::one(json!({ "op": "dimcheck", "passed": ok, "result": r }), text).verdict(ok))
        }
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn invariants_text(inv: &[u32], p: u64) -> String {
    if inv.is_empty() {
        return "0".into();
    }
    inv.iter().map(|e| format!("Z/{p}^{e}")).collect::<Vec<_>>().join(" + ")
}
