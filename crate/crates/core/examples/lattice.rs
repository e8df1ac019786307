//! Lattice properties of set pricings and supermodular majorants.
//!
//! `cargo run --example lattice`

use mechlab::lattice::{check_det, check_sym, supermod_majorant_det, supermod_majorant_sym, LatticeProperty};
use mechlab::model::{DetPricing, SymPricing};
use mechlab::rat::Rat;

fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&n| Rat::from_int(n)).collect()
}

fn main() -> mechlab::error::Result<()> {
    // Bitmask order: {}, {1}, {2}, {1,2}, {3}, {1,3}, {2,3}, {1,2,3}.
    let p = DetPricing::from_finite(3, ints(&[0, 2, 4, 4, 0, 4, 5, 5]))?;
    for prop in [
        LatticeProperty::Submodular,
        LatticeProperty::Supermodular,
        LatticeProperty::SeparablySubadditive,
        LatticeProperty::SeparablySuperadditive,
    ] {
        println!("{:<24} {}", prop.name(), check_det(&p, prop, None).to_json());
    }
    let q = supermod_majorant_det(&p)?;
    println!("majorant {}", q.to_json_string());
    assert!(check_det(&q, LatticeProperty::Supermodular, None).holds);

    let levels = SymPricing::from_finite(ints(&[0, 3, 4, 9, 10]))?;
    let sym = supermod_majorant_sym(&levels)?;
    println!("symmetric majorant {} (supermodular: {})", sym.to_json(), check_sym(&sym).holds);
    Ok(())
}
