use clap::{Args, Subcommand};
use drwk::residue::{check_r5, check_r9, residue_nd, ExactPoly, ResidueProblem};
use serde_json::json;

use crate::Output;

#[derive(Args)]
pub struct Problem {
    /// Numerator polynomial, e.g. `T1^3*T2 + 2*Y1`.
    #[arg(long)]
    f: String,
    /// Comma-separated sequence t_1,...,t_d, each monic in its own T-variable.
    #[arg(long)]
    seq: String,
}

#[derive(Subcommand)]
pub enum ResidueCmd {
    /// Res[f dT; t_1, ..., t_d].
    Eval {
        #[command(flatten)]
        problem: Problem,
        /// `q` (exact rationals) or `zP^N` (reduce mod P^N, e.g. `z3^2`).
        #[arg(long, default_value = "q")]
        ring: String,
    },
    /// Residue commutes with specializing a base variable.
    CheckR5 {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        var: String,
        /// A rational value such as `3` or `-2/5`.
        #[arg(long)]
        value: String,
    },
    /// Res[dη; t^k] = Σ k_i Res[dt_i ∧ η; ..., t_i^{k_i+1}, ...].
    CheckR9 {
        /// Comma-separated components η_1,...,η_d.
        #[arg(long)]
        eta: String,
        #[arg(long)]
        seq: String,
        /// Comma-separated positive powers.
        #[arg(long)]
        k: String,
    },
}

enum Ring {
    Q,
    Zpn(u64, u32),
}

fn parse_ring(s: &str) -> anyhow::Result<Ring> {
    if s == "q" {
        return Ok(Ring::Q);
    }
    let parsed = s.strip_prefix('z').and_then(|r| r.split_once('^')).and_then(|(p, n)| Some((p.parse::<u64>().ok()?, n.parse::<u32>().ok()?)));
    match parsed {
        Some((p, n)) if drwk::field::is_prime(p) && n >= 1 && p.checked_pow(n).is_some() => Ok(Ring::Zpn(p, n)),
        _ => crate::usage(format!("ring must be q or zP^N with P prime, got `{s}`")),
    }
}

fn problem(p: &Problem) -> anyhow::Result<ResidueProblem> {
    let seq: Vec<&str> = p.seq.split(',').collect();
    Ok(ResidueProblem::parse(&p.f, &seq)?)
}

fn seq_with_vars(s: &str) -> anyhow::Result<Vec<(String, ExactPoly)>> {
    let seq: Vec<&str> = s.split(',').collect();
    Ok(ResidueProblem::parse("0", &seq)?.seq)
}

fn verdict(check: &str, ok: bool) -> Output {
    Output::one(json!({ "check": check, "holds": ok }), format!("{} {check}", if ok { "PASS" } else { "FAIL" })).verdict(ok)
}

pub fn run(cmd: ResidueCmd) -> anyhow::Result<Output> {
    match cmd {
        ResidueCmd::Eval { problem: p, ring } => {
            let ring = parse_ring(&ring)?;
            let r = residue_nd(&problem(&p)?)?;
            match ring {
                Ring::Q => Ok(Output::one(json!({ "ring": "q", "residue": r.to_string() }), r.to_string())),
                Ring::Zpn(pp, n) => {
                    let m = pp.pow(n);
                    let reduced = r.reduce_mod(m)?;
                    let terms: Vec<_> = reduced
                        .iter()
                        .map(|(e, c)| json!({ "exponents": r.vars().iter().zip(e).map(|(v, x)| (v.clone(), *x)).collect::<Vec<_>>(), "coeff": c }))
                        .collect();
                    let text = reduced
                        .iter()
                        .map(|(e, c)| {
                            let mono: Vec<String> = r
                                .vars()
                                .iter()
                                .zip(e)
                                .filter(|(_, &x)| x > 0)
                                .map(|(v, &x)| if x == 1 { v.clone() } else { format!("{v}^{x}") })
                                .collect();
                            match (mono.is_empty(), *c) {
                                (true, _) => c.to_string(),
                                (false, 1) => mono.join("*"),
                                (false, _) => format!("{c}*{}", mono.join("*")),
                            }
                        })
                        .collect::<Vec<_>>();
                    let text = if text.is_empty() { "0".to_string() } else { text.join(" + ") };
                    Ok(Output::one(json!({ "ring": format!("z{pp}^{n}"), "modulus": m, "residue": text, "terms": terms }), format!("{text} (mod {m})")))
                }
            }
        }
        ResidueCmd::CheckR5 { problem: p, var, value } => {
            let v = ExactPoly::parse(&value)
                .ok()
                .and_then(|c| c.as_constant())
                .ok_or_else(|| crate::UsageError(format!("bad rational `{value}`")))?;
            Ok(verdict("r5", check_r5(&problem(&p)?, &var, &v)?))
        }
        ResidueCmd::CheckR9 { eta, seq, k } => {
            let eta = eta.split(',').map(ExactPoly::parse).collect::<Result<Vec<_>, _>>()?;
            let k: Vec<u32> = crate::input::int_list(&k)?;
            Ok(verdict("r9", check_r9(&eta, &seq_with_vars(&seq)?, &k)?))
        }
    }
}
