//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! `DRWK_SEED` overrides the seed of the randomized campaigns.

use std::process::ExitCode;

use drwk::campaign::{criteria, run_criterion, DEFAULT_SEED};

fn main() -> ExitCode {
    let seed = std::env::var("DRWK_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    let mut ok = true;
    for c in criteria() {
        match run_criterion(&c, seed) {
            Ok(r) => {
                println!("{}", r.line());
                for d in &r.details {
                    println!("    {d}");
                }
                ok &= r.passed;
            }
            Err(e) => {
                println!("FAIL {}: {} (error: {e})", c.id, c.title);
                ok = false;
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
