use clap::{Args, Subcommand};
use drwk::field::Embedding;
use drwk::milnor::{
    cohomology, field_of_size, gersten_complex, norm_k0, norm_k1, tame_symbol, weil_reciprocity, Curve, Place,
    RationalFunction, TameValue,
};
use drwk::{Field, GaloisField};
use serde_json::json;

use crate::Output;

#[derive(Args)]
pub struct Base {
    /// Size of the constant field F_{q0}.
    #[arg(long)]
    q0: u64,
}

#[derive(Args)]
pub struct ComplexArgs {
    #[command(flatten)]
    base: Base,
    /// Coefficients Z/p^n.
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value = "p1")]
    curve: Curve,
    #[arg(long, default_value_t = 2)]
    degree_bound: usize,
}

#[derive(Subcommand)]
pub enum KthCmd {
    /// ∂_v{f} or ∂_v{f, g}.
    Tame {
        #[command(flatten)]
        base: Base,
        /// A rational function such as `(T^2+1)/(T-1)`; integers are element codes.
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: Option<String>,
        /// A monic irreducible polynomial, or `inf`.
        #[arg(long)]
        place: String,
    },
    /// Norm F_{q0^e} -> F_{q0} of an element code, or the K_0 pushforward of `--c`.
    Norm {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        e: usize,
        #[arg(long, conflicts_with = "c")]
        a: Option<u64>,
        #[arg(long)]
        c: Option<i64>,
    },
    /// Weil reciprocity for {f, g}, with the per-place ledger.
    Reciprocity {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// The Gersten differential as a valuation matrix.
    Gersten(ComplexArgs),
    /// Cohomology of the Gersten complex.
    H0(ComplexArgs),
}

fn place(k: &Field, s: &str) -> anyhow::Result<Place> {
    if s.trim() == "inf" {
        return Ok(Place::Infinity(k.clone()));
    }
    let r = RationalFunction::parse(k, s)?;
    if r.den().deg() != 0 {
        return crate::usage(format!("place `{s}` must be a polynomial"));
    }
    Ok(Place::finite(r.num().clone())?)
}

fn exps_text(p: u64, e: &[u32]) -> String {
    if e.is_empty() {
        "0".into()
    } else {
        e.iter().map(|x| format!("Z/{p}^{x}")).collect::<Vec<_>>().join(" + ")
    }
}

pub fn run(cmd: KthCmd) -> anyhow::Result<Output> {
    match cmd {
        KthCmd::Tame { base, f, g, place: v } => {
            let k = field_of_size(base.q0)?;
            let mut entries = vec![RationalFunction::parse(&k, &f)?];
            if let Some(g) = g {
                entries.push(RationalFunction::parse(&k, &g)?);
            }
            let v = place(&k, &v)?;
            Ok(match tame_symbol(&entries, &v)? {
                TameValue::K0(c) => Output::one(json!({ "op": "tame", "place": v.to_string(), "weight": 0, "value": c }), c.to_string()),
                TameValue::K1(r) => {
                    let text = r.value.to_string();
                    Output::one(json!({ "op": "tame", "place": v.to_string(), "weight": 1, "value": text }), format!("{text} in k{v}"))
                }
            })
        }
        KthCmd::Norm { base, e, a, c } => {
            if let Some(c) = c {
                let n = norm_k0(c, e);
                return Ok(Output::one(json!({ "op": "norm", "group": "K0", "value": n }), n.to_string()));
            }
            let Some(a) = a else { return crate::usage("norm needs --a or --c") };
            let small = field_of_size(base.q0)?;
            let big = GaloisField::default_for(small.characteristic(), small.degree() * e)?;
            let n = norm_k1(&big, big.from_code(a)?, e)?;
            let emb = Embedding::new(&small, &big)?;
            let value = emb.preimage(n).expect("the norm lies in the subfield").code();
            Ok(Output::one(json!({ "op": "norm", "group": "K1", "value": value }), value.to_string()))
        }
        KthCmd::Reciprocity { base, f, g } => {
            let k = field_of_size(base.q0)?;
            let l = weil_reciprocity(&RationalFunction::parse(&k, &f)?, &RationalFunction::parse(&k, &g)?)?;
            let mut text: Vec<String> = l.entries.iter().map(|e| format!("{:<16} deg {}  tame {:<12} norm {}", e.place, e.degree, e.tame, e.norm)).collect();
            text.push(format!("{} product = {}", if l.holds { "PASS" } else { "FAIL" }, l.product));
            let ok = l.holds;
            Ok(Output { records: vec![json!({ "op": "reciprocity", "ledger": l })], text, ok })
        }
        KthCmd::Gersten(a) => {
            let k = field_of_size(a.base.q0)?;
            let c = gersten_complex(a.curve, a.p, a.n, &k, a.degree_bound)?;
            let mut text = vec![format!("columns: {}", c.columns.join(" | "))];
            for (r, row) in c.rows.iter().zip(&c.matrix) {
                text.push(format!("{r:>12}: {row:?}"));
            }
            Ok(Output { records: vec![json!({ "op": "gersten", "complex": c })], text, ok: true })
        }
        KthCmd::H0(a) => {
            let k = field_of_size(a.base.q0)?;
            let c = gersten_complex(a.curve, a.p, a.n, &k, a.degree_bound)?;
            let h = cohomology(&c)?;
            let text = format!("H^0 = {}; H^-1 = {}", exps_text(a.p, &h.h0_exponents), exps_text(a.p, &h.h_minus1_exponents));
            Ok(Output::one(json!({ "op": "h0", "cohomology": h }), text))
        }
    }
}
