//! Revenue monotonicity of deterministic pricings: a witness pair of
//! valuations when it fails, Motzkin certificates when it holds.
//!
//! `cargo run --example monotone`

use mechlab::model::{DetPricing, Valuation, ValuationDist};
use mechlab::monotone::{check_det_monotonic, MonotonicityVerdict, Scope};
use mechlab::optimize::{amonrev_relaxed, lp_rev, monrev_relaxed};
use mechlab::rat::rat;

fn main() -> mechlab::error::Result<()> {
    for prices in [[0, 2, 4, 8], [0, 3, 4, 6]] {
        // Halves, so the first row prices {1} at 1, {2} at 2 and both at 4.
        let p = DetPricing::from_finite(2, prices.iter().map(|&n| rat(n, 2)).collect())?;
        match check_det_monotonic(&p, &Scope::Range)? {
            MonotonicityVerdict::Monotonic { certificates } => {
                println!("{prices:?} monotonic, {} certificates", certificates.len())
            }
            MonotonicityVerdict::NotMonotonic { a, b, x, y, .. } => {
                println!("{prices:?} not monotonic between sets {a} and {b}: x = {:?}, y = {:?}", x.0, y.0)
            }
        }
    }

    let dist = ValuationDist::uniform(vec![
        Valuation::from_ints(&[1, 0]),
        Valuation::from_ints(&[2, 1]),
        Valuation::from_ints(&[3, 3]),
    ])?;
    println!("rev                  {}", lp_rev(&dist)?.value);
    println!("payment-monotone     {}", monrev_relaxed(&dist, true)?.value);
    println!("allocation-monotone  {}", amonrev_relaxed(&dist, true)?.value);
    Ok(())
}
