//! Runs every bundled scenario with default parameters and prints the
//! reports, or one scenario given on the command line.
//!
//! `cargo run --release --example scenarios [id]`

use mechlab::scenarios::{list_scenarios, run_scenario, Params};

fn main() -> mechlab::error::Result<()> {
    let ids: Vec<String> = match std::env::args().nth(1) {
        Some(id) => vec![id],
        None => list_scenarios().iter().map(|s| s.id.to_string()).collect(),
    };
    for id in ids {
        let report = run_scenario(&id, &Params::new())?;
        println!("{}", report.render_text());
    }
    Ok(())
}
