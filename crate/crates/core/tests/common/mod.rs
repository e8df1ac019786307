//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use mechlab::lp::{LpOutcome, LpProblem, Relation, Sense};
use mechlab::model::{subset, Atom, DetPricing, ExtPrice, Menu, MenuEntry, Allocation, Valuation, ValuationDist};
use mechlab::rat::{rat, Rat};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn weights(rng: &mut impl Rng, n: usize) -> Vec<Rat> {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| rat(x, total)).collect()
}

/// `n` distinct atoms with coordinates in `{0, 1/2, .., 4}`.
pub fn dist(rng: &mut impl Rng, k: usize, n: usize) -> ValuationDist {
    let mut points: Vec<Valuation> = Vec::new();
    while points.len() < n {
        let x = Valuation((0..k).map(|_| rat(rng.gen_range(0..=8), 2)).collect());
        if !points.contains(&x) {
            points.push(x);
        }
    }
    let ps = weights(rng, n);
    ValuationDist::new(k, points.into_iter().zip(ps).map(|(x, p)| Atom { x, p }).collect()).unwrap()
}

/// One-good distribution with up to `n` distinct support values.
pub fn one_good(rng: &mut impl Rng, n: usize) -> Vec<(Rat, Rat)> {
    let mut vals: Vec<i64> = (1..=12).collect();
    vals.shuffle(rng);
    vals.truncate(n);
    let ps = weights(rng, n);
    vals.into_iter().map(|v| rat(v, 2)).zip(ps).collect()
}

/// `max_t t P[Y >= t]` over every support value, by direct summation.
pub fn myerson_oracle(values: &[(Rat, Rat)]) -> Rat {
    values
        .iter()
        .map(|(t, _)| t * &values.iter().filter(|(v, _)| v >= t).map(|(_, p)| p.clone()).sum::<Rat>())
        .max()
        .unwrap_or_else(Rat::zero)
}

/// Finite, nondecreasing pricing with `p(∅) = 0` and integer prices.
pub fn nondecreasing_pricing(rng: &mut impl Rng, k: usize, hi: i64) -> DetPricing {
    let n = 1usize << k;
    let mut raw: Vec<i64> = (0..n).map(|m| if m == 0 { 0 } else { rng.gen_range(0..=hi) }).collect();
    for m in 0..n {
        for s in 0..n {
            if s & m == s {
                raw[m] = raw[m].max(raw[s]);
            }
        }
    }
    DetPricing::from_finite(k, raw.into_iter().map(Rat::from_int).collect()).unwrap()
}

/// Pricing finite on `∅` and at most `max_sets - 1` random bundles.
pub fn sparse_pricing(rng: &mut impl Rng, k: usize, max_sets: usize) -> DetPricing {
    let n = 1u32 << k;
    let mut masks: Vec<u32> = (1..n).collect();
    masks.shuffle(rng);
    let take = rng.gen_range(1..max_sets).min(masks.len());
    let mut prices = vec![ExtPrice::Infinite; n as usize];
    prices[0] = ExtPrice::zero();
    for &m in &masks[..take] {
        prices[m as usize] = ExtPrice::Finite(rat(rng.gen_range(1..=16), 2));
    }
    DetPricing::new(k, prices).unwrap()
}

/// Deterministic menu offering each nonempty bundle with probability 1/2.
pub fn det_menu(rng: &mut impl Rng, k: usize, hi: i64) -> Menu {
    let mut items: Vec<(u32, Rat)> = Vec::new();
    for m in 1..1u32 << k {
        if rng.gen_bool(0.5) {
            items.push((m, Rat::from_int(rng.gen_range(1..=hi))));
        }
    }
    Menu::deterministic(k, &items).unwrap()
}

/// Menu with allocations in `{0, 1/2, 1}^k`.
pub fn fractional_menu(rng: &mut impl Rng, k: usize) -> Menu {
    let mut entries: Vec<MenuEntry> = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let q = Allocation((0..k).map(|_| rat(rng.gen_range(0..=2), 2)).collect());
        if q.is_zero() || entries.iter().any(|e| e.alloc == q) {
            continue;
        }
        entries.push(MenuEntry { alloc: q, price: rat(rng.gen_range(0..=8), 2) });
    }
    Menu::new(k, entries).unwrap()
}

/// `min p''(target)` over supermodular `p'' >= p` with `p''(∅) = 0`.
pub fn majorant_lp_value(p: &[Rat], k: usize, target: u32) -> Rat {
    let n = 1usize << k;
    let mut lp = LpProblem::new(n, Sense::Min);
    lp.set_objective_coeff(target as usize, Rat::one());
    lp.set_bounds(0, Some(Rat::zero()), Some(Rat::zero()));
    for (m, v) in p.iter().enumerate().skip(1) {
        lp.set_bounds(m, Some(v.clone()), None);
    }
    for a in 0..n {
        for b in a + 1..n {
            let (u, i) = (a | b, a & b);
            if u == a || u == b {
                continue;
            }
            // p(A ∪ B) + p(A ∩ B) - p(A) - p(B) >= 0
            let terms = [(u, Rat::one()), (i, Rat::one()), (a, -Rat::one()), (b, -Rat::one())];
            lp.add_sparse(&terms, Relation::Ge, Rat::zero());
        }
    }
    match lp.solve().unwrap() {
        LpOutcome::Optimal { value, .. } => value,
        o => panic!("majorant LP: {o:?}"),
    }
}

pub fn is_supermodular(p: &[Rat], k: usize) -> bool {
    let n = 1usize << k;
    (0..n).all(|a| (0..n).all(|b| &p[a | b] + &p[a & b] >= &p[a] + &p[b]))
}

pub fn finite(p: &DetPricing) -> Vec<Rat> {
    p.prices().iter().map(|x| x.finite().expect("finite").clone()).collect()
}

/// Cheapest menu price over bundles containing `a`; `None` if none.
pub fn superset_min(menu: &Menu, a: u32) -> Option<Rat> {
    menu.entries()
        .iter()
        .filter_map(|e| e.alloc.as_mask().map(|m| (m, &e.price)))
        .filter(|(m, _)| subset::is_subset(a, *m))
        .map(|(_, p)| p.clone())
        .min()
}
