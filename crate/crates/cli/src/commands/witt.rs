use clap::{Args, Subcommand};
use drwk::witt::WittVector;
use serde_json::json;

use crate::input::{self, codes};
use crate::Output;

#[derive(Args)]
pub struct Operands {
    /// Field `p,m` for `W{...}` inputs.
    #[arg(long)]
    field: Option<String>,
    /// First operand: `W{c0,...}` or JSON.
    #[arg(long)]
    a: String,
}

#[derive(Subcommand)]
pub enum WittCmd {
    /// a + b
    Add {
        #[command(flatten)]
        x: Operands,
        #[arg(long)]
        b: String,
    },
    /// a * b
    Mul {
        #[command(flatten)]
        x: Operands,
        #[arg(long)]
        b: String,
    },
    /// Teichmüller lift of a field element code.
    Teich {
        #[arg(long)]
        field: String,
        #[arg(long)]
        code: u64,
        #[arg(long)]
        n: usize,
    },
    /// F: W_{n+1} -> W_n.
    Frob {
        #[command(flatten)]
        x: Operands,
    },
    /// V: W_n -> W_{n+1}.
    Versch {
        #[command(flatten)]
        x: Operands,
    },
    /// Trace W_n(F_{q^e}) -> W_n(F_q).
    Trace {
        #[command(flatten)]
        x: Operands,
        /// Target field `p,m`.
        #[arg(long)]
        target: String,
    },
}

fn render(op: &str, w: &WittVector) -> Output {
    let int = w.to_int();
    Output::one(json!({ "op": op, "result": w.to_json(), "codes": codes(w), "as_integer": int }), w.to_string())
}

pub fn run(cmd: WittCmd) -> anyhow::Result<Output> {
    let operand = |x: &Operands| -> anyhow::Result<WittVector> {
        let k = x.field.as_deref().map(input::field).transpose()?;
        input::witt(&x.a, k.as_ref())
    };
    let second = |x: &Operands, b: &str| -> anyhow::Result<WittVector> {
        let k = x.field.as_deref().map(input::field).transpose()?;
        input::witt(b, k.as_ref())
    };
    Ok(match cmd {
        WittCmd::Add { x, b } => render("add", &operand(&x)?.add(&second(&x, &b)?)?),
        WittCmd::Mul { x, b } => render("mul", &operand(&x)?.mul(&second(&x, &b)?)?),
        WittCmd::Teich { field, code, n } => {
            let k = input::field(&field)?;
            if n == 0 || n > drwk::witt::MAX_LEN {
                return crate::usage(format!("length must be in 1..={}", drwk::witt::MAX_LEN));
            }
            render("teich", &WittVector::teichmuller(&k, input::element(&k, code)?, n))
        }
        WittCmd::Frob { x } => render("frob", &operand(&x)?.frobenius()?),
        WittCmd::Versch { x } => render("versch", &operand(&x)?.verschiebung()?),
        WittCmd::Trace { x, target } => render("trace", &operand(&x)?.trace(&input::field(&target)?)?),
    })
}
