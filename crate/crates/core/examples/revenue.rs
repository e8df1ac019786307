//! Revenue of the standard selling formats against the optimal mechanism.
//!
//! `cargo run --example revenue`

use mechlab::model::{BundlingPartition, Valuation, ValuationDist};
use mechlab::optimize::{brev, lp_rev, partition_rev, srev, symsrev};

fn main() -> mechlab::error::Result<()> {
    let dist = ValuationDist::uniform(vec![
        Valuation::from_ints(&[1, 2, 0]),
        Valuation::from_ints(&[3, 1, 1]),
        Valuation::from_ints(&[2, 2, 2]),
    ])?;
    let blocks = BundlingPartition::parse(3, "1,2|3")?;
    let rows = [
        ("separate", srev(&dist)?),
        ("grand bundle", brev(&dist)?),
        ("one price per good", symsrev(&dist)?),
        ("partition 1,2|3", partition_rev(&dist, &blocks)?),
        ("optimal", lp_rev(&dist)?),
    ];
    for (name, r) in &rows {
        println!("{name:<20} {}", r.value);
    }
    let opt = &rows[4].1;
    println!("optimal menu: {}", opt.to_json()["witness"]);
    assert_eq!(opt.replay(&dist)?, opt.value);
    Ok(())
}
