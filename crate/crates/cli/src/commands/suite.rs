use clap::Args;
use drwk::campaign::{run_suite, DEFAULT_SEED};
use serde_json::json;

use crate::Output;

#[derive(Args)]
pub struct SuiteArgs {
    /// Restrict to these suites (witt, drw, residue, semilinear, kth); repeatable or comma-separated.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Master seed for the randomized campaigns.
    #[arg(long, env = "DRWK_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

pub fn run(a: SuiteArgs) -> anyhow::Result<Output> {
    let reports = run_suite(&a.only, a.seed)?;
    let ok = reports.iter().all(|r| r.passed);
    let mut text: Vec<String> = reports.iter().map(|r| r.line()).collect();
    text.push(format!("{} {}/{} criteria passed (seed {})", if ok { "PASS" } else { "FAIL" }, reports.iter().filter(|r| r.passed).count(), reports.len(), a.seed));
    let mut records: Vec<_> = reports.iter().map(|r| json!({ "criterion": r })).collect();
    records.push(json!({ "summary": { "passed": ok, "seed": a.seed, "criteria": reports.len() } }));
    Ok(Output { records, text, ok })
}
