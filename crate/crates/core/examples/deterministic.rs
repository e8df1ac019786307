//! Optimal deterministic pricings by branch and bound, with and without
//! symmetry and supermodularity restrictions.
//!
//! `cargo run --example deterministic`

use mechlab::error::Error;
use mechlab::model::{Valuation, ValuationDist};
use mechlab::optimize::{drev, lp_rev, symdrev, Mode, DEFAULT_CAP};

fn main() -> mechlab::error::Result<()> {
    let dist = ValuationDist::uniform(vec![
        Valuation::from_ints(&[4, 0]),
        Valuation::from_ints(&[0, 4]),
        Valuation::from_ints(&[3, 3]),
        Valuation::from_ints(&[1, 1]),
    ])?;
    for (label, r) in [
        ("drev", drev(&dist, Mode::General, DEFAULT_CAP)?),
        ("drev supermodular", drev(&dist, Mode::Supermodular, DEFAULT_CAP)?),
        ("symdrev", symdrev(&dist, Mode::General, DEFAULT_CAP)?),
        ("rev", lp_rev(&dist)?),
    ] {
        println!("{label:<18} {}  {}", r.value, r.to_json()["witness"]);
    }
    match drev(&dist, Mode::General, 10) {
        Err(Error::CapExceeded { required, cap }) => println!("cap {cap} refused a search over {required} candidates"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
