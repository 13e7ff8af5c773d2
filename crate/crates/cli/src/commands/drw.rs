use anyhow::Context;
use clap::{Args, Subcommand};
use drwk::drw::{cartier, cartier_prime, cartier_prime_table, theta, verify_compatibility, FormJson, TopForm};
use serde_json::json;

use crate::input;
use crate::Output;

#[derive(Args)]
pub struct FormArgs {
    /// Field `p,m`.
    #[arg(long)]
    field: String,
    /// Level n.
    #[arg(long)]
    n: usize,
    /// Number of variables d.
    #[arg(long)]
    d: usize,
    /// The form, e.g. `W{1,2} * d[X1]^1 * F^1 d[X2]^3`, or its JSON mirror.
    #[arg(long)]
    form: String,
}

#[derive(Subcommand)]
pub enum DrwCmd {
    /// The Cartier operator via the factorwise table.
    Cartier(FormArgs),
    /// The Cartier operator via the trace of the lifted Frobenius; with
    /// `--table`, via the three-case table.
    CartierPrime {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        table: bool,
    },
    /// The comparison map to Laurent-polynomial forms.
    Theta(FormArgs),
    /// Exhaustive agreement of the three Cartier constructions.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Largest numerator (default p^n).
        #[arg(long)]
        max_weight: Option<u64>,
    },
}

fn read_form(a: &FormArgs) -> anyhow::Result<TopForm> {
    let k = input::field(&a.field)?;
    if a.form.trim_start().starts_with('{') {
        let j: FormJson = serde_json::from_str(&a.form).context("malformed form JSON")?;
        let f = TopForm::from_json(&j)?;
        if f.n() != a.n || f.d() != a.d || !drwk::GaloisField::same(f.field(), &k) {
            return crate::usage("JSON form does not match --field/--n/--d");
        }
        return Ok(f);
    }
    Ok(TopForm::parse(&k, a.n, a.d, &a.form)?)
}

fn form_output(op: &str, input: &TopForm, out: &TopForm) -> Output {
    Output::one(json!({ "op": op, "input": input.to_string(), "result": out.to_string(), "result_json": out.to_json() }), out.to_string())
}

pub fn run(cmd: DrwCmd) -> anyhow::Result<Output> {
    match cmd {
        DrwCmd::Cartier(a) => {
            let f = read_form(&a)?;
            Ok(form_output("cartier", &f, &cartier(&f)?))
        }
        DrwCmd::CartierPrime { form, table } => {
            let f = read_form(&form)?;
            let (op, out) = if table { ("cartier-prime-table", cartier_prime_table(&f)?) } else { ("cartier-prime", cartier_prime(&f)?) };
            Ok(form_output(op, &f, &out))
        }
        DrwCmd::Theta(a) => {
            let f = read_form(&a)?;
            let g = theta(&f)?;
            let terms: Vec<_> = g.terms().map(|(e, c)| json!({ "exponents": e, "coeff": input::codes(c) })).collect();
            Ok(Output::one(json!({ "op": "theta", "input": f.to_string(), "result": g.to_string(), "terms": terms }), g.to_string()))
        }
        DrwCmd::Verify { p, n, d, max_weight } => {
            let max = max_weight.unwrap_or_else(|| p.saturating_pow(n as u32));
            let start = std::time::Instant::now();
            let r = verify_compatibility(p, n, d, max)?;
            let ms = start.elapsed().as_millis();
            let mut text = vec![format!(
                "{} p={p} n={n} d={d} max_weight={max}: {} forms over {}, {} nonzero, {} counterexamples ({ms} ms)",
                if r.passed() { "PASS" } else { "FAIL" },
                r.forms_checked,
                r.fields.join(", "),
                r.nonzero_outputs,
                r.failures.len()
            )];
            if let Some(c) = r.failures.first() {
                text.push(format!("reproducer over {}: {}", c.field, c.form));
                text.push(format!("  cartier             = {}", c.cartier));
                text.push(format!("  cartier_prime       = {}", c.cartier_prime));
                text.push(format!("  cartier_prime_table = {}", c.cartier_prime_table));
            }
            let ok = r.passed();
            let record = json!({ "op": "verify", "passed": ok, "report": r, "elapsed_ms": ms });
            Ok(Output { records: vec![record], text, ok })
        }
    }
}
