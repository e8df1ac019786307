//! Acceptance suite: one line per criterion. Runs without the libtest
//! harness so the lines always print; exits nonzero on an unexpected failure.

mod common;

use std::process::ExitCode;

use mechlab::eval::{
    buyer_choice, canonical_det_price, canonical_price_convexification, canonical_price_primal, TieRule,
};
use mechlab::lattice::{check_det, check_sym, harmonic, supermod_majorant_det, supermod_majorant_sym, LatticeProperty};
use mechlab::model::{
    marginal, subset, Allocation, Atom, BundlingPartition, DetPricing, ExtPrice, MarginalMode, Menu, SymPricing,
    Valuation, ValuationDist,
};
use mechlab::monotone::{
    check_det_monotonic, dense_values, motzkin_certificate, payments, product_grid_oracle, scan_pairs,
    structured_allocation_search, verify_certificate, z_feasible, GridCheck, MonotonicityVerdict, Scope,
};
use mechlab::optimize::{
    amonrev_relaxed, brev, drev, largest_level_bought, lp_rev, monrev_relaxed, myerson_rev, partition_rev, srev,
    symdrev, symsrev, Mode, RevenueResult, RevenueWitness, DEFAULT_CAP,
};
use mechlab::quad::{grid_allocation_monotone, invert_pd, pricing_submodularity_violation, QuadSpec};
use mechlab::rat::{ln_upper, rat, Rat};
use mechlab::scenarios::{harmonic_comparison_points, harmonic_dist, non_convex_dist, pair_hitting, run_scenario, Params};
use rand::Rng;

/// Criteria that cannot hold for any implementation; they print FAIL and do
/// not fail the run. See the notes in `majorants`.
const UNATTAINABLE: &[&str] = &["7b"];

struct Line {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, title: &'static str, pass: bool, detail: impl Into<String>) -> Line {
    Line { id, title, pass, detail: detail.into() }
}

fn scenario_ok(id: &str) -> (bool, String) {
    let r = run_scenario(id, &Params::new()).expect("scenario runs");
    let failed: Vec<String> = r.results.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    (failed.is_empty(), if failed.is_empty() { String::new() } else { format!("{id}: {}", failed.join(", ")) })
}

fn pt(c: &[(i64, i64)]) -> Valuation {
    Valuation(c.iter().map(|&(n, d)| rat(n, d)).collect())
}

fn figure_one() -> Line {
    let mut ok = true;
    let mut notes = Vec::new();
    for id in ["fig1-left", "fig1-right", "fig1-bottom"] {
        let (pass, d) = scenario_ok(id);
        ok &= pass;
        if !pass {
            notes.push(d);
        }
    }
    // Direct re-derivation of the headline numbers.
    let left = DetPricing::from_finite(2, vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(4, 1)]).unwrap();
    let menu = Menu::from_det_pricing(&left);
    let s1 = buyer_choice(&menu, &pt(&[(1, 1), (23, 10)]), TieRule::TieFavorable).unwrap().chosen.price;
    let s2 = buyer_choice(&menu, &pt(&[(2, 1), (27, 10)]), TieRule::TieFavorable).unwrap().chosen.price;
    ok &= s1 == rat(2, 1) && s2 == rat(1, 1);
    match check_det_monotonic(&left, &Scope::Range).unwrap() {
        MonotonicityVerdict::NotMonotonic { z, .. } => {
            ok &= z.iter().all(|(_, v)| *v >= rat(2, 1) && *v < rat(3, 1));
        }
        _ => ok = false,
    }
    line("1", "two-good menus", ok, format!("payments 2 and 1 at (1,2.3), (2,2.7) {}", notes.join("; ")))
}

fn harmonic_family() -> Line {
    let h3 = harmonic(3).unwrap();
    let d = harmonic_dist(3, 1000).unwrap();
    let lp = lp_rev(&d).unwrap().value;
    let sd = symdrev(&d, Mode::Supermodular, DEFAULT_CAP).unwrap();
    let levels = match &sd.witness {
        RevenueWitness::Sym { pricing, .. } => pricing.clone(),
        _ => unreachable!(),
    };
    let mm = SymPricing::from_finite(vec![rat(0, 1), rat(1000, 1), rat(1_000_000, 1), rat(1_000_000_000, 1)]).unwrap();
    let mm_rev =
        mechlab::eval::pricing_revenue(&DetPricing::from_symmetric(3, &mm).unwrap(), &d, TieRule::SellerFavorable).unwrap();
    let s = srev(&d).unwrap().value;
    let gap = harmonic_dist(2, 100).unwrap().with_zero_atoms(harmonic_comparison_points(2, 100)).unwrap();
    let amon = amonrev_relaxed(&gap, false).unwrap().value;
    let mon = monrev_relaxed(&gap, false).unwrap().value;
    let ok = lp >= h3
        && lp <= &h3 + &rat(3, 1000)
        && sd.value >= h3
        && mm_rev == h3
        && check_sym(&mm).holds
        && s >= Rat::one()
        && s <= rat(1002, 1000)
        && amon <= rat(102, 100)
        && mon >= rat(3, 2);
    line(
        "2",
        "harmonic valuations",
        ok,
        format!(
            "lp_rev={lp} symdrev_super={} (levels {:?}) M^m revenue={mm_rev} srev={s} amonrev={amon} monrev={mon}",
            sd.value,
            levels.levels()
        ),
    )
}

fn non_supermodular() -> Line {
    let d = non_convex_dist(10_000, 100).unwrap();
    let p = SymPricing::from_finite(vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(10_000, 1)]).unwrap();
    let r = mechlab::eval::pricing_revenue(&DetPricing::from_symmetric(3, &p).unwrap(), &d, TieRule::SellerFavorable)
        .unwrap();
    let s = srev(&d).unwrap().value;
    let ratio = &r / &s;
    line("3", "non-supermodular symmetric pricing", r == rat(7, 12) && ratio > rat(11, 6), format!("revenue={r} srev={s} ratio={ratio}"))
}

fn bound_suite() -> Line {
    let mut g = common::rng(2024);
    let mut failures: Vec<String> = Vec::new();
    let ln4 = ln_upper(&rat(4, 1), 40);
    for inst in 0..100 {
        let k = g.gen_range(2..=3);
        let n = g.gen_range(1..=5);
        let d = common::dist(&mut g, k, n);
        let kr = Rat::from(k);
        let s = srev(&d).unwrap();
        let b = brev(&d).unwrap();
        let ss = symsrev(&d).unwrap();
        let lp = lp_rev(&d).unwrap();
        let mon = monrev_relaxed(&d, true).unwrap();
        let amon = amonrev_relaxed(&d, true).unwrap();
        let dg = drev(&d, Mode::General, DEFAULT_CAP).unwrap();
        let ds = drev(&d, Mode::Supermodular, DEFAULT_CAP).unwrap();
        let sg = symdrev(&d, Mode::General, DEFAULT_CAP).unwrap();
        let sup = symdrev(&d, Mode::Supermodular, DEFAULT_CAP).unwrap();
        let mx = myerson_rev(&marginal(&d, MarginalMode::Max).unwrap()).unwrap().value;
        let k0 = match &sup.witness {
            RevenueWitness::Sym { pricing, .. } => largest_level_bought(pricing, &d).unwrap(),
            _ => unreachable!(),
        };
        let h = harmonic(k).unwrap();
        let min_sb = s.value.clone().min(b.value.clone());
        let pow = Rat::from_int((1 << k) - 1);
        let mut checks = vec![
            ("max(srev,brev) <= monrev", s.value.clone().max(b.value.clone()) <= mon.value),
            ("monrev <= lp_rev", mon.value <= lp.value),
            ("amonrev <= monrev", amon.value <= mon.value),
            ("srev <= amonrev", s.value <= amon.value),
            ("symsrev <= srev", ss.value <= s.value),
            ("symdrev <= drev <= lp_rev", sg.value <= dg.value && dg.value <= lp.value),
            ("supermodular <= general", sup.value <= sg.value && ds.value <= dg.value),
            ("monrev <= k min(srev, brev)", mon.value <= &kr * &min_sb),
            ("max marginal <= min(srev, brev)", mx <= min_sb),
            ("symdrev super <= H(k) symsrev", sup.value <= &h * &ss.value),
            ("symdrev super <= H(k0) symsrev", sup.value <= harmonic(k0.max(1)).unwrap() * &ss.value),
            (
                "symdrev <= 2 ln(2k) H(k) symsrev",
                sg.value <= rat(2, 1) * ln_upper(&Rat::from(2 * k), 40) * &h * &ss.value,
            ),
            ("drev super <= (2^k-1)/k srev", ds.value <= &pow / &kr * &s.value),
            ("drev <= ln4 (2^k-1) srev", dg.value <= &ln4 * &pow * &s.value),
        ];
        for pi in BundlingPartition::all(k) {
            let pr = partition_rev(&d, &pi).unwrap().value;
            checks.push(("monrev <= k partition_rev", mon.value <= &kr * &pr));
        }
        let all: [&RevenueResult; 10] = [&s, &b, &ss, &lp, &mon, &amon, &dg, &ds, &sg, &sup];
        checks.push(("witness replay", all.iter().all(|r| r.replay(&d).unwrap() == r.value)));
        for (name, ok) in checks {
            if !ok {
                failures.push(format!("#{inst} {name}"));
            }
        }
    }
    line("4", "bound suite (100 instances)", failures.is_empty(), format!("{} violations {}", failures.len(), failures.join(", ")))
}

fn diagonal() -> Line {
    let mut g = common::rng(7);
    let mut bad = Vec::new();
    for i in 0..50 {
        let k = g.gen_range(2..=3);
        let n = g.gen_range(1..=5);
        let y = common::one_good(&mut g, n);
        let ye = ValuationDist::new(k, y.iter().map(|(v, p)| Atom { x: Valuation(vec![v.clone(); k]), p: p.clone() }).collect())
            .unwrap();
        let one = ValuationDist::new(1, y.iter().map(|(v, p)| Atom { x: Valuation(vec![v.clone()]), p: p.clone() }).collect())
            .unwrap();
        let my = myerson_rev(&one).unwrap().value;
        let lp = lp_rev(&ye).unwrap().value;
        if my != common::myerson_oracle(&y) || lp != Rat::from(k) * &my {
            bad.push(format!("#{i}: lp_rev={lp} myerson={my}"));
        }
    }
    line("5", "diagonal exactness (50 instances)", bad.is_empty(), bad.join("; "))
}

fn motzkin() -> Line {
    let mut g = common::rng(11);
    let (mut pairs, mut witnesses, mut bad) = (0usize, 0usize, Vec::new());
    for i in 0..500 {
        let k = g.gen_range(2..=4);
        let p = common::sparse_pricing(&mut g, k, 7);
        let canon = canonical_det_price(&Menu::from_det_pricing(&p)).unwrap();
        for (a, b) in scan_pairs(&p, &Scope::Range).unwrap() {
            pairs += 1;
            let feasible = z_feasible(&canon, a, b).unwrap().is_some();
            let cert = motzkin_certificate(&p, a, b).unwrap();
            let certified = cert.as_ref().is_some_and(|c| verify_certificate(&p, a, b, c));
            if feasible == certified || (cert.is_some() && !certified) {
                bad.push(format!("#{i} pair ({a},{b}): feasible={feasible} certified={certified}"));
            }
        }
        if let MonotonicityVerdict::NotMonotonic { x, y, .. } = check_det_monotonic(&p, &Scope::Range).unwrap() {
            witnesses += 1;
            let (sx, sy) = payments(&p, &x, &y, TieRule::TieFavorable).unwrap();
            if !(x.le(&y) && sx > sy) {
                bad.push(format!("#{i} witness {x:?} {y:?} pays {sx}, {sy}"));
            }
        }
    }
    line("6", "Motzkin alternative (500 pricings)", bad.is_empty(), format!("{pairs} pairs, {witnesses} witnesses replayed {}", bad.join("; ")))
}

/// The majorant criterion is split: the per-subset LP minima are not always
/// supermodular themselves, so no supermodular function can match them on
/// every subset (7b). Over masks ∅,{1},{2},{1,2},{3},{1,3},{2,3},K the
/// pricing p = (0,2,4,4,0,4,5,5) has per-subset minima (0,2,4,6,0,4,5,8),
/// which fail supermodularity at {1,3}, {2,3}.
fn majorants() -> Vec<Line> {
    let mut g = common::rng(5);
    let (mut shape_bad, mut min_mismatch) = (Vec::new(), 0usize);
    let mut example = String::new();
    for i in 0..200 {
        let p = common::nondecreasing_pricing(&mut g, 3, 6);
        let q = supermod_majorant_det(&p).unwrap();
        let (pv, qv) = (common::finite(&p), common::finite(&q));
        let bounded = pv.iter().zip(&qv).all(|(a, b)| a <= b && *b <= rat(4, 1) * a);
        if !common::is_supermodular(&qv, 3) || !bounded {
            shape_bad.push(format!("#{i}"));
        }
        let oracle: Vec<Rat> = (0..8).map(|t| common::majorant_lp_value(&pv, 3, t)).collect();
        if oracle != qv {
            min_mismatch += 1;
            if example.is_empty() {
                example = format!("p={pv:?} majorant={qv:?} per-subset minima={oracle:?} (minima supermodular: {})", common::is_supermodular(&oracle, 3));
            }
        }
    }
    let mut tight = Vec::new();
    for k in [2usize, 4] {
        let q = supermod_majorant_det(&pair_hitting(k).unwrap()).unwrap();
        tight.push(q.get(subset::full(k)) == &ExtPrice::Finite(Rat::from_int(1 << (k / 2))));
    }
    let mut sym_bad = 0;
    for _ in 0..200 {
        let k = g.gen_range(1..=6);
        let mut levels = vec![Rat::zero()];
        for _ in 0..k {
            let last = levels.last().unwrap().clone();
            levels.push(last + Rat::from_int(g.gen_range(0..=5)));
        }
        let p = SymPricing::from_finite(levels.clone()).unwrap();
        let q = supermod_majorant_sym(&p).unwrap();
        let kr = Rat::from(k);
        let ok = check_sym(&q).holds
            && q.levels().iter().zip(&levels).all(|(b, a)| {
                let b = b.finite().unwrap();
                a <= b && b / &kr <= *a
            });
        if !ok {
            sym_bad += 1;
        }
    }
    vec![
        line("7a", "majorant supermodular, p <= p' <= 4p (200 pricings)", shape_bad.is_empty(), shape_bad.join(" ")),
        line(
            "7b",
            "majorant equals per-subset LP minima",
            min_mismatch == 0,
            format!("{min_mismatch}/200 differ; first: {example}"),
        ),
        line("7c", "pair-hitting majorant reaches 2^(k/2) for k = 2, 4", tight.iter().all(|&t| t), format!("{tight:?}")),
        line("7d", "symmetric majorant: p'/k <= p <= p' (200 pricings)", sym_bad == 0, format!("{sym_bad} failures")),
    ]
}

fn allocation_directions() -> Line {
    let mut g = common::rng(13);
    let (mut subm, mut nonsubm, mut bad) = (0, 0, Vec::new());
    for i in 0..200 {
        let k = g.gen_range(1..=3);
        let menu = common::det_menu(&mut g, k, 6);
        let canon = canonical_det_price(&menu).unwrap();
        if check_det(&canon, LatticeProperty::Submodular, None).holds {
            subm += 1;
            let values = dense_values(&menu, &rat(1, 2)).unwrap();
            if let Some((x, y)) = product_grid_oracle(&menu, TieRule::TieFavorable, &values, GridCheck::Allocation).unwrap() {
                bad.push(format!("#{i} submodular but {x:?} <= {y:?} loses goods"));
            }
        } else {
            nonsubm += 1;
            match structured_allocation_search(&menu, TieRule::TieFavorable).unwrap() {
                Some((x, y)) => {
                    let qx = buyer_choice(&menu, &x, TieRule::TieFavorable).unwrap();
                    let qy = buyer_choice(&menu, &y, TieRule::TieFavorable).unwrap();
                    if !(x.le(&y) && !qx.alloc().le(qy.alloc())) {
                        bad.push(format!("#{i} reported pair does not replay"));
                    }
                }
                None => bad.push(format!("#{i} non-submodular, no violation found")),
            }
        }
    }
    line("8", "allocation monotonicity vs submodularity (200 menus)", bad.is_empty(), format!("{subm} submodular, {nonsubm} not {}", bad.join("; ")))
}

fn quadratic() -> Line {
    let spec = QuadSpec::three_good_example();
    let inv = invert_pd(spec.a()).unwrap();
    let expected: Vec<Vec<Rat>> =
        [[27, -15, 3], [-15, 35, -15], [3, -15, 27]].iter().map(|r| r.iter().map(|&x| rat(x, 120)).collect()).collect();
    let s = spec.screens();
    let screen_ok = s.amon_necessary() && s.subm_offending.len() == 1 && (s.subm_offending[0].i, s.subm_offending[0].j) == (1, 3);
    let grid_ok = grid_allocation_monotone(&spec, 4).unwrap().is_none();
    let pair_ok = pricing_submodularity_violation(&spec, &rat(1, 100)).is_some_and(|(g, h)| {
        let join: Vec<Rat> = g.iter().zip(&h).map(|(a, b)| a.clone().max(b.clone())).collect();
        let meet: Vec<Rat> = g.iter().zip(&h).map(|(a, b)| a.clone().min(b.clone())).collect();
        // Price ½ yᵀ A^-1 y recomputed from the expected inverse.
        let price = |y: &[Rat]| -> Rat {
            let mut t = Rat::zero();
            for i in 0..3 {
                for j in 0..3 {
                    t += &expected[i][j] * &y[i] * &y[j];
                }
            }
            t / rat(2, 1)
        };
        let in_range = |y: &[Rat]| {
            (0..3).all(|i| {
                let c: Rat = (0..3).map(|j| &expected[i][j] * &y[j]).sum();
                !c.is_negative() && c <= rat(1, 15)
            })
        };
        [&g, &h, &join, &meet].iter().all(|y| in_range(y)) && price(&g) + price(&h) < price(&join) + price(&meet)
    });
    line("9", "quadratic counterexample", inv == expected && screen_ok && grid_ok && pair_ok, format!("inverse={} screens={screen_ok} grid={grid_ok} pair={pair_ok}", inv == expected))
}

fn canonical() -> Line {
    let sep = Menu::deterministic(2, &[(0b01, rat(1, 1)), (0b10, rat(1, 1)), (0b11, rat(2, 1))]).unwrap();
    let half = Allocation(vec![rat(1, 2), rat(1, 2)]);
    let p0 = canonical_price_primal(&sep, &half).unwrap();
    let mut ok = p0 == ExtPrice::Finite(Rat::one()) && canonical_price_convexification(&sep, &half).unwrap() == p0;
    let mut g = common::rng(17);
    let mut bad = Vec::new();
    for i in 0..100 {
        let k = g.gen_range(1..=3);
        let menu = common::fractional_menu(&mut g, k);
        let gq = Allocation((0..k).map(|_| rat(g.gen_range(0..=4), 4)).collect());
        let a = canonical_price_primal(&menu, &gq).unwrap();
        let b = canonical_price_convexification(&menu, &gq).unwrap();
        if a != b {
            bad.push(format!("#{i}: {a} vs {b}"));
        }
    }
    for i in 0..100 {
        let k = g.gen_range(1..=4);
        let menu = common::det_menu(&mut g, k, 8);
        let c = canonical_det_price(&menu).unwrap();
        for m in 0..1u32 << k {
            let expect = common::superset_min(&menu, m).map_or(ExtPrice::Infinite, ExtPrice::Finite);
            if c.get(m) != &expect {
                bad.push(format!("det #{i} set {}", subset::show(m)));
            }
        }
    }
    ok &= bad.is_empty();
    line("10", "canonical pricing", ok, format!("p0(1/2,1/2)={p0} {}", bad.join("; ")))
}

fn main() -> ExitCode {
    let mut lines = vec![figure_one(), harmonic_family(), non_supermodular(), bound_suite(), diagonal(), motzkin()];
    lines.extend(majorants());
    lines.extend([allocation_directions(), quadratic(), canonical()]);
    let mut unexpected = false;
    for l in &lines {
        let known = UNATTAINABLE.contains(&l.id);
        let status = match (l.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (unattainable, see notes)",
            (false, false) => "FAIL",
        };
        println!("criterion {:<3} {status:<6} {}: {}", l.id, l.title, l.detail.trim());
        unexpected |= !l.pass && !known;
    }
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
