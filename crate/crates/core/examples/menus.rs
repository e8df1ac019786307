//! Buyer choice under each tie rule, menu revenue, incentive checks and
//! canonical prices.
//!
//! `cargo run --example menus`

use mechlab::eval::{buyer_choice, canonical_det_price, canonical_general_price, revenue, verify_ic_ir, TieRule};
use mechlab::model::{parse_menu, Menu, Allocation, Valuation, ValuationDist};
use mechlab::rat::rat;

fn main() -> mechlab::error::Result<()> {
    let menu = parse_menu(
        r#"{"k":2,"entries":[
            {"q":["1","0"],"s":"1"},
            {"q":["0","1"],"s":"2"},
            {"q":["1/2","1/2"],"s":"3/2"},
            {"q":["1","1"],"s":"4"}]}"#,
    )?;
    let x = Valuation::from_ints(&[1, 2]);
    for rule in TieRule::ALL {
        let c = buyer_choice(&menu, &x, rule)?;
        println!("{:<8} entry {} pays {} (ties {:?})", rule.name(), c.index, c.payment(), c.tie_set);
    }

    let dist = ValuationDist::uniform(vec![x.clone(), Valuation::from_ints(&[3, 0]), Valuation::from_ints(&[1, 1])])?;
    println!("revenue (seller ties): {}", revenue(&menu, &dist, TieRule::SellerFavorable)?);
    let assignment: Vec<_> = dist
        .atoms()
        .iter()
        .map(|a| buyer_choice(&menu, &a.x, TieRule::SellerFavorable).map(|c| (c.alloc().clone(), c.payment().clone())))
        .collect::<Result<_, _>>()?;
    println!("incentive violation: {:?}", verify_ic_ir(&assignment, &dist)?);

    let g = Allocation::new(vec![rat(3, 4), rat(1, 4)])?;
    println!("canonical price of (3/4, 1/4): {}", canonical_general_price(&menu, &g)?);
    let det = Menu::deterministic(2, &[(0b01, rat(2, 1)), (0b10, rat(2, 1)), (0b11, rat(5, 1))])?;
    println!("canonical deterministic pricing: {}", canonical_det_price(&det)?.to_json_string());
    Ok(())
}
