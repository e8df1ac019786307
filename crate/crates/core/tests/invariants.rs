//! Property-based checks of structural invariants against direct oracles.

mod common;

use mechlab::eval::{buyer_choice, canonical_det_price, payoff, pricing_revenue, revenue, verify_ic_ir, TieRule};
use mechlab::lattice::{check_det, LatticeProperty};
use mechlab::model::{
    diagonal_augment, dominance_pairs, parse_instance, subset, DetPricing, Instance, Menu, Valuation,
};
use mechlab::optimize::{brev, drev, lp_rev, myerson_rev, srev, symdrev, Mode, DEFAULT_CAP};
use mechlab::quad::{invert_pd, mat_mul, Matrix};
use mechlab::rat::{ln_upper, rat, Rat};
use mechlab::scenarios::{run_scenario, Params};
use proptest::prelude::*;

fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

/// Submodularity by the definition, over every pair of sets.
fn submodular_oracle(p: &DetPricing) -> bool {
    let n = p.num_sets();
    (0..n).all(|a| {
        (0..n).all(|b| match (p.get(a).finite(), p.get(b).finite()) {
            (Some(pa), Some(pb)) => match (p.get(a | b).finite(), p.get(a & b).finite()) {
                (Some(u), Some(i)) => pa + pb >= u + i,
                _ => false,
            },
            _ => true,
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trips(s in seed(), k in 1usize..=3, n in 1usize..=5) {
        let mut g = common::rng(s);
        let d = common::dist(&mut g, k, n);
        let m = common::fractional_menu(&mut g, k);
        let p = common::sparse_pricing(&mut g, k, 5);
        for inst in [Instance::Dist(d), Instance::Menu(m), Instance::Pricing(p)] {
            prop_assert_eq!(parse_instance(&inst.to_json_string()).unwrap(), inst);
        }
    }

    #[test]
    fn dominance_is_transitive_and_augment_idempotent(s in seed(), k in 1usize..=3, n in 1usize..=6) {
        let mut g = common::rng(s);
        let d = common::dist(&mut g, k, n);
        let pts = d.points();
        let pairs = dominance_pairs(&pts).unwrap();
        for &(i, j) in &pairs {
            prop_assert!(pts[i].le(&pts[j]));
            for &(j2, l) in &pairs {
                if j2 == j && l != i {
                    prop_assert!(pairs.contains(&(i, l)));
                }
            }
        }
        let once = diagonal_augment(&d);
        prop_assert_eq!(diagonal_augment(&once), once);
    }

    #[test]
    fn myerson_matches_threshold_oracle(s in seed(), n in 1usize..=6) {
        let mut g = common::rng(s);
        let y = common::one_good(&mut g, n);
        let d = mechlab::model::ValuationDist::new(
            1,
            y.iter().map(|(v, p)| mechlab::model::Atom { x: Valuation(vec![v.clone()]), p: p.clone() }).collect(),
        ).unwrap();
        prop_assert_eq!(myerson_rev(&d).unwrap().value, common::myerson_oracle(&y));
    }

    #[test]
    fn revenues_are_ordered_and_replay(s in seed(), k in 1usize..=2, n in 1usize..=3) {
        let mut g = common::rng(s);
        let d = common::dist(&mut g, k, n);
        let lp = lp_rev(&d).unwrap();
        let dr = drev(&d, Mode::General, DEFAULT_CAP).unwrap();
        let sd = symdrev(&d, Mode::General, DEFAULT_CAP).unwrap();
        prop_assert!(srev(&d).unwrap().value <= dr.value);
        prop_assert!(brev(&d).unwrap().value <= dr.value);
        prop_assert!(sd.value <= dr.value && dr.value <= lp.value);
        for r in [&lp, &dr, &sd] {
            prop_assert_eq!(r.replay(&d).unwrap(), r.value.clone());
        }
        // No single random pricing beats the deterministic optimum.
        let p = common::nondecreasing_pricing(&mut g, k, 8);
        prop_assert!(pricing_revenue(&p, &d, TieRule::SellerFavorable).unwrap() <= dr.value);
        // Full extraction is an upper bound.
        let welfare: Rat = d.atoms().iter().map(|a| &a.p * &a.x.total()).sum();
        prop_assert!(lp.value <= welfare);
    }

    #[test]
    fn menu_choices_are_optimal_and_ic(s in seed(), k in 1usize..=3, n in 1usize..=5) {
        let mut g = common::rng(s);
        let menu = common::fractional_menu(&mut g, k);
        let d = common::dist(&mut g, k, n);
        let mut assignment = Vec::new();
        for a in d.atoms() {
            let c = buyer_choice(&menu, &a.x, TieRule::SellerFavorable).unwrap();
            let best = payoff(&menu, &a.x).unwrap();
            prop_assert_eq!(&c.payoff, &best);
            for e in menu.entries() {
                prop_assert!(e.alloc.dot(&a.x) - &e.price <= best);
            }
            // Seller-favorable never pays less than any other rule.
            for rule in TieRule::ALL {
                prop_assert!(buyer_choice(&menu, &a.x, rule).unwrap().payment() <= c.payment());
            }
            assignment.push((c.alloc().clone(), c.payment().clone()));
        }
        prop_assert_eq!(verify_ic_ir(&assignment, &d).unwrap(), None);
        let total: Rat = d.atoms().iter().zip(&assignment).map(|(a, (_, s))| &a.p * s).sum();
        prop_assert_eq!(revenue(&menu, &d, TieRule::SellerFavorable).unwrap(), total);
    }

    #[test]
    fn lattice_checks_match_definitions(s in seed(), k in 1usize..=4) {
        let mut g = common::rng(s);
        let menu = common::det_menu(&mut g, k, 6);
        let p = canonical_det_price(&menu).unwrap();
        prop_assert!(p.is_nondecreasing());
        let sub = check_det(&p, LatticeProperty::Submodular, None);
        prop_assert_eq!(sub.holds, submodular_oracle(&p));
        if sub.holds {
            prop_assert!(check_det(&p, LatticeProperty::SeparablySubadditive, None).holds);
        }
        let q = common::nondecreasing_pricing(&mut g, k, 6);
        if check_det(&q, LatticeProperty::Supermodular, None).holds {
            prop_assert!(check_det(&q, LatticeProperty::SeparablySuperadditive, None).holds);
        }
        for m in 0..1u32 << k {
            let want = common::superset_min(&menu, m);
            prop_assert_eq!(p.get(m).finite().cloned(), want, "set {}", subset::show(m));
        }
    }

    #[test]
    fn inverse_of_positive_definite(entries in prop::collection::vec(-3i64..=3, 9), n in 1usize..=3) {
        // A = Bᵀ B + I is positive definite.
        let b: Matrix = (0..n).map(|i| (0..n).map(|j| Rat::from_int(entries[i * 3 + j])).collect()).collect();
        let a: Matrix = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|r| &b[r][i] * &b[r][j]).sum::<Rat>() + Rat::from_int((i == j) as i64)).collect())
            .collect();
        let inv = invert_pd(&a).unwrap();
        let id: Matrix = (0..n).map(|i| (0..n).map(|j| Rat::from_int((i == j) as i64)).collect()).collect();
        prop_assert_eq!(mat_mul(&a, &inv), id);
    }

    #[test]
    fn ln_upper_bounds_ln(num in 0i64..=400, den in 1i64..=40) {
        let x = rat(num + den, den);
        let u = ln_upper(&x, 30);
        prop_assert!(u.to_f64() >= ((num + den) as f64 / den as f64).ln() - 1e-12);
        prop_assert!(ln_upper(&(&x * &rat(2, 1)), 30) > u);
    }
}

#[test]
fn dominated_zero_menu_entry_is_inserted() {
    let menu = Menu::deterministic(2, &[(0b11, rat(3, 1))]).unwrap();
    assert_eq!(menu.entries().len(), 2);
    assert!(menu.entries()[0].alloc.is_zero());
}

#[test]
fn scenario_reruns_agree() {
    for id in ["fig1-left", "majorant-tight", "quad-counterexample", "canonical-convexification"] {
        let a = run_scenario(id, &Params::new()).unwrap();
        let b = run_scenario(id, &Params::new()).unwrap();
        assert_eq!(a.results, b.results);
        let json = a.to_json();
        let text = a.render_text();
        for (c, j) in a.results.iter().zip(json["results"].as_array().unwrap()) {
            assert_eq!(j["value"].as_str().unwrap(), c.value);
            assert!(text.contains(&format!("{} = {}", c.name, c.value)));
        }
    }
}
