//! Quadratic mechanisms: screens, evaluation and the pricing checks.
//!
//! `cargo run --example quad`

use mechlab::model::Valuation;
use mechlab::quad::{grid_allocation_monotone, pricing_submodularity_violation, two_good_checks, QuadSpec};
use mechlab::rat::{rat, Rat};

fn main() -> mechlab::error::Result<()> {
    let spec = QuadSpec::three_good_example();
    let screens = spec.screens();
    println!("screens {}", screens.to_json());
    println!("allocation monotone necessary: {}", screens.amon_necessary());

    let out = spec.eval(&Valuation::new(vec![rat(1, 2), rat(1, 4), Rat::one()])?)?;
    let q: Vec<String> = out.alloc.0.iter().map(Rat::to_string).collect();
    println!("q = ({}), pays {}, payoff {}", q.join(", "), out.payment, out.payoff);

    println!("grid monotone: {:?}", grid_allocation_monotone(&spec, 4)?);
    println!("pricing submodularity violation: {:?}", pricing_submodularity_violation(&spec, &rat(1, 100)));

    let two = two_good_checks(8);
    println!("two-good payoff supermodularity violation: {:?}", two.supermodularity_violation);
    Ok(())
}
