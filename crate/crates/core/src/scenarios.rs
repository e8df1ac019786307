//! Named, parameterized reproductions of the worked examples, each with
//! exact or interval expectations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::eval::{buyer_choice, canonical_price_convexification, canonical_price_primal, pricing_revenue, revenue, TieRule};
use crate::lattice::{check_det, check_sym, harmonic, supermod_majorant_det, LatticeProperty};
use crate::model::{
    marginal, subset, Allocation, BundlingPartition, DetPricing, ExtPrice, MarginalMode, Menu, SymPricing,
    Valuation, ValuationDist,
};
use crate::monotone::{
    check_det_monotonic, grid_oracle, payments, product_grid_oracle, structured_allocation_search, GridCheck,
    MonotonicityVerdict, Scope,
};
use crate::optimize::{
    amonrev_relaxed, brev, drev, largest_level_bought, lp_rev, monrev_relaxed, myerson_rev, partition_rev, srev,
    symdrev, symsrev, Mode, RevenueResult, RevenueWitness, DEFAULT_CAP,
};
use crate::quad::{
    grid_allocation_monotone, grid_ultramodular, invert_pd, pricing_submodularity_violation, two_good_checks,
    QuadSpec,
};
use crate::rat::{ln_upper, rat, Rat};

pub type Params = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub value: String,
    pub expect: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub scenario: String,
    pub results: Vec<Check>,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scenario": self.scenario,
            "results": self.results.iter().map(|c| json!({
                "name": c.name, "value": c.value, "expect": c.expect, "pass": c.pass,
            })).collect::<Vec<_>>(),
            "elapsed_ms": self.elapsed_ms,
        })
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("{} ({} ms)\n", self.scenario, self.elapsed_ms);
        for c in &self.results {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "  [{mark}] {} = {}  (expect {})", c.name, c.value, c.expect);
        }
        s
    }
}

pub struct ScenarioInfo {
    pub id: &'static str,
    pub description: &'static str,
    /// The construction being reproduced.
    pub source: &'static str,
    /// Accepted parameter names with their defaults.
    pub params: &'static [(&'static str, &'static str)],
}

const SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo {
        id: "fig1-left",
        description: "menu {1}:1 {2}:2 {1,2}:4 is not monotonic: a higher valuation pays less",
        source: "two-good menu with prices 1, 2, 4 and buyers (1, 23/10), (2, 27/10)",
        params: &[],
    },
    ScenarioInfo {
        id: "fig1-right",
        description: "supermodular menu {1}:1 {2}:1 {1,2}:4 is monotonic but not allocation monotonic",
        source: "two-good menu with prices 1, 1, 4",
        params: &[],
    },
    ScenarioInfo {
        id: "fig1-bottom",
        description: "submodular menu {1}:3/2 {2}:2 {1,2}:3 is monotonic and allocation monotonic",
        source: "two-good menu with prices 3/2, 2, 3",
        params: &[],
    },
    ScenarioInfo {
        id: "harmonic",
        description: "harmonic valuations: optimal revenue near H(k) while separate selling earns near 1",
        source: "permutations of z_m = (M^m,..,M^m,0,..,0) with probability 1/(m M^m) in total",
        params: &[("k", "3"), ("M", "1000")],
    },
    ScenarioInfo {
        id: "harmonic-amon-gap",
        description: "allocation-monotonic revenue stays near 1 while monotonic revenue reaches H(k)",
        source: "harmonic valuations with the zero-probability comparison points y_m",
        params: &[("k", "2"), ("M", "100")],
    },
    ScenarioInfo {
        id: "non-convex-p",
        description: "non-supermodular symmetric pricing (0,1,1,M) beats H(3) times separate revenue",
        source: "(U, 1-U, 0) permutations with U on a midpoint grid, plus (M, M, M)",
        params: &[("M", "10000"), ("G", "100")],
    },
    ScenarioInfo {
        id: "majorant-tight",
        description: "minimal supermodular majorant of the pair-hitting pricing reaches 2^(k/2)",
        source: "p(A) = 1 iff A meets every pair {1,2}, {3,4}, ...",
        params: &[("k", "2")],
    },
    ScenarioInfo {
        id: "quad-counterexample",
        description: "quadratic mechanism that is allocation monotonic with non-submodular pricing",
        source: "A = [[6,3,1],[3,6,3],[1,3,6]], v = (1/15, 1/15, 1/15)",
        params: &[],
    },
    ScenarioInfo {
        id: "canonical-convexification",
        description: "canonical price of a fractional allocation under separate selling",
        source: "separate selling at prices (1, 1), g = (1/2, 1/2)",
        params: &[],
    },
    ScenarioInfo {
        id: "subadd-not-am",
        description: "separably subadditive pricings that are not allocation monotonic",
        source: "symmetric p(1) = 2, p(m) = m otherwise (k = 3); two-good payoff grid checks",
        params: &[],
    },
    ScenarioInfo {
        id: "unit-vectors",
        description: "uniform unit vectors: every revenue notion equals 1",
        source: "X uniform on e_1, .., e_k",
        params: &[("k", "2")],
    },
    ScenarioInfo {
        id: "bound-suite",
        description: "inequality chain between revenue notions on random small instances",
        source: "random distributions, k in {2, 3}, at most 5 atoms",
        params: &[("seed", "0"), ("count", "100")],
    },
];

pub fn list_scenarios() -> &'static [ScenarioInfo] {
    SCENARIOS
}

struct Args<'a> {
    info: &'static ScenarioInfo,
    given: &'a Params,
}

impl Args<'_> {
    fn int(&self, name: &str, lo: u64, hi: u64) -> Result<u64> {
        let default = self.info.params.iter().find(|(n, _)| *n == name).map(|(_, d)| *d).expect("declared param");
        let raw = self.given.get(name).map_or(default, String::as_str);
        let v: u64 = raw
            .parse()
            .map_err(|_| Error::InvalidParam { name: name.to_string(), msg: format!("not an integer: {raw}") })?;
        if v < lo || v > hi {
            return Err(Error::InvalidParam { name: name.to_string(), msg: format!("{v} outside [{lo}, {hi}]") });
        }
        Ok(v)
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, value: String, expect: String, pass: bool) {
        self.0.push(Check { name: name.to_string(), value, expect, pass });
    }

    fn eq(&mut self, name: &str, value: &Rat, expect: &Rat) {
        self.push(name, value.to_string(), format!("= {expect}"), value == expect);
    }

    fn within(&mut self, name: &str, value: &Rat, lo: &Rat, hi: &Rat) {
        self.push(name, value.to_string(), format!("in [{lo}, {hi}]"), lo <= value && value <= hi);
    }

    fn at_least(&mut self, name: &str, value: &Rat, lo: &Rat) {
        self.push(name, value.to_string(), format!(">= {lo}"), value >= lo);
    }

    fn at_most(&mut self, name: &str, value: &Rat, hi: &Rat) {
        self.push(name, value.to_string(), format!("<= {hi}"), value <= hi);
    }

    fn above(&mut self, name: &str, value: &Rat, lo: &Rat) {
        self.push(name, value.to_string(), format!("> {lo}"), value > lo);
    }

    fn text(&mut self, name: &str, value: String, expect: &str) {
        let pass = value == expect;
        self.push(name, value, expect.to_string(), pass);
    }

    fn flag(&mut self, name: &str, value: bool, expect: bool) {
        self.text(name, value.to_string(), if expect { "true" } else { "false" });
    }
}

fn pair(v: &Option<(Valuation, Valuation)>) -> String {
    match v {
        None => "none".to_string(),
        Some((x, y)) => format!("{x:?} <= {y:?}"),
    }
}

fn det2(p1: Rat, p2: Rat, p12: Rat) -> DetPricing {
    DetPricing::from_finite(2, vec![Rat::zero(), p1, p2, p12]).expect("valid two-good pricing")
}

fn point(c: &[(i64, i64)]) -> Valuation {
    Valuation(c.iter().map(|&(n, d)| rat(n, d)).collect())
}

pub fn run_scenario(id: &str, params: &Params) -> Result<Report> {
    let info = SCENARIOS.iter().find(|s| s.id == id).ok_or_else(|| Error::UnknownScenario(id.to_string()))?;
    for name in params.keys() {
        if !info.params.iter().any(|(n, _)| n == name) {
            return Err(Error::InvalidParam { name: name.clone(), msg: format!("not a parameter of {id}") });
        }
    }
    let args = Args { info, given: params };
    let start = Instant::now();
    let mut c = Checks::default();
    match id {
        "fig1-left" => fig1_left(&mut c)?,
        "fig1-right" => fig1_right(&mut c)?,
        "fig1-bottom" => fig1_bottom(&mut c)?,
        "harmonic" => harmonic_scenario(&mut c, args.int("k", 1, 4)? as usize, args.int("M", 2, 1_000_000)? as i64)?,
        "harmonic-amon-gap" => amon_gap(&mut c, args.int("k", 1, 3)? as usize, args.int("M", 2, 1_000_000)? as i64)?,
        "non-convex-p" => non_convex(&mut c, args.int("M", 2, 1_000_000_000)? as i64, args.int("G", 1, 1000)? as i64)?,
        "majorant-tight" => {
            let k = args.int("k", 2, 8)? as usize;
            if k % 2 == 1 {
                return Err(Error::InvalidParam { name: "k".into(), msg: "must be even".into() });
            }
            majorant_tight(&mut c, k)?
        }
        "quad-counterexample" => quad_counterexample(&mut c)?,
        "canonical-convexification" => canonical_convexification(&mut c)?,
        "subadd-not-am" => subadd_not_am(&mut c)?,
        "unit-vectors" => unit_vectors(&mut c, args.int("k", 1, 4)? as usize)?,
        "bound-suite" => bound_suite(&mut c, args.int("seed", 0, u64::MAX)?, args.int("count", 1, 10_000)? as usize)?,
        _ => unreachable!("registered id"),
    }
    Ok(Report { scenario: id.to_string(), results: c.0, elapsed_ms: start.elapsed().as_millis() })
}

fn fig1_left(c: &mut Checks) -> Result<()> {
    let p = det2(rat(1, 1), rat(2, 1), rat(4, 1));
    let menu = Menu::from_det_pricing(&p);
    let x = point(&[(1, 1), (23, 10)]);
    let y = point(&[(2, 1), (27, 10)]);
    let cx = buyer_choice(&menu, &x, TieRule::TieFavorable)?;
    let cy = buyer_choice(&menu, &y, TieRule::TieFavorable)?;
    c.eq("payment at (1, 23/10)", cx.payment(), &rat(2, 1));
    c.eq("payment at (2, 27/10)", cy.payment(), &rat(1, 1));
    c.eq("payoff at (1, 23/10)", &cx.payoff, &rat(3, 10));
    let dist = ValuationDist::uniform(vec![x.clone(), y.clone()])?;
    c.eq("revenue", &revenue(&menu, &dist, TieRule::SellerFavorable)?, &rat(3, 2));
    let v = grid_oracle(&menu, TieRule::TieFavorable, &[x.clone(), y.clone()], GridCheck::Payment)?;
    c.text("payment grid violation", pair(&v), &pair(&Some((x, y))));
    match check_det_monotonic(&p, &Scope::Range)? {
        MonotonicityVerdict::NotMonotonic { a, b, z, x, y } => {
            c.text("verdict", "not-monotonic".into(), "not-monotonic");
            c.text("violating pair", format!("{} {}", subset::show(a), subset::show(b)), "{2} {1}");
            let z2 = z.iter().find(|(i, _)| *i == 1).map_or(Rat::zero(), |(_, v)| v.clone());
            c.push("z_2", z2.to_string(), "in [2, 3)".into(), z2 >= rat(2, 1) && z2 < rat(3, 1));
            let (sx, sy) = payments(&p, &x, &y, TieRule::TieFavorable)?;
            c.push(
                "witness payments",
                format!("s{x:?} = {sx}, s{y:?} = {sy}"),
                "lower point pays more".into(),
                x.le(&y) && sx > sy,
            );
        }
        MonotonicityVerdict::Monotonic { .. } => c.text("verdict", "monotonic".into(), "not-monotonic"),
    }
    Ok(())
}

fn fig1_right(c: &mut Checks) -> Result<()> {
    let p = det2(rat(1, 1), rat(1, 1), rat(4, 1));
    let menu = Menu::from_det_pricing(&p);
    c.flag("supermodular", check_det(&p, LatticeProperty::Supermodular, None).holds, true);
    c.flag("monotonic", check_det_monotonic(&p, &Scope::Range)?.is_monotonic(), true);
    let x = point(&[(1, 1), (23, 10)]);
    let y = point(&[(3, 1), (23, 10)]);
    let v = grid_oracle(&menu, TieRule::TieFavorable, &[x.clone(), y.clone()], GridCheck::Allocation)?;
    c.text("allocation grid violation", pair(&v), &pair(&Some((x, y))));
    let s = structured_allocation_search(&menu, TieRule::TieFavorable)?;
    c.flag("structured search finds violation", s.is_some(), true);
    Ok(())
}

fn fig1_bottom(c: &mut Checks) -> Result<()> {
    let p = det2(rat(3, 2), rat(2, 1), rat(3, 1));
    let menu = Menu::from_det_pricing(&p);
    c.flag("submodular", check_det(&p, LatticeProperty::Submodular, None).holds, true);
    c.flag("monotonic", check_det_monotonic(&p, &Scope::Range)?.is_monotonic(), true);
    let axis: Vec<Rat> = (0..=16).map(|i| rat(i, 4)).collect();
    let values = vec![axis.clone(), axis];
    let pay = product_grid_oracle(&menu, TieRule::TieFavorable, &values, GridCheck::Payment)?;
    c.text("payment grid violation (step 1/4)", pair(&pay), "none");
    let alloc = product_grid_oracle(&menu, TieRule::TieFavorable, &values, GridCheck::Allocation)?;
    c.text("allocation grid violation (step 1/4)", pair(&alloc), "none");
    Ok(())
}

fn binomial(n: usize, m: usize) -> i64 {
    (0..m).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn first_m(k: usize, m: usize, value: &Rat) -> Vec<Rat> {
    (0..k).map(|i| if i < m { value.clone() } else { Rat::zero() }).collect()
}

/// Every distinct coordinate permutation of `v`.
fn permutations(v: &[Rat]) -> Vec<Valuation> {
    let mut out = Vec::new();
    let mut cur = v.to_vec();
    cur.sort();
    loop {
        out.push(Valuation(cur.clone()));
        // Next lexicographic permutation.
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// The harmonic valuation: for each `m`, the permutations of
/// `z_m = (M^m,..,M^m,0,..,0)` (first `m` coordinates) share probability
/// `1/(m M^m)`; the rest of the mass sits at the origin.
pub fn harmonic_dist(k: usize, big: i64) -> Result<ValuationDist> {
    let big = Rat::from_int(big);
    let mut points = Vec::new();
    let mut rest = Rat::one();
    for m in 1..=k {
        let beta = (Rat::from(m) * big.pow(m as u32)).recip();
        rest -= &beta;
        let each = &beta / &Rat::from_int(binomial(k, m));
        for z in permutations(&first_m(k, m, &big.pow(m as u32))) {
            points.push((z, each.clone()));
        }
    }
    points.push((Valuation(vec![Rat::zero(); k]), rest));
    ValuationDist::merged(k, points)
}

/// Zero-probability comparison points: every permutation of
/// `y_m = (M^{m-1},..,M^{m-1},0,..,0)` (first `m` coordinates).
pub fn harmonic_comparison_points(k: usize, big: i64) -> Vec<Valuation> {
    let big = Rat::from_int(big);
    (1..=k).flat_map(|m| permutations(&first_m(k, m, &big.pow(m as u32 - 1)))).collect()
}

fn harmonic_scenario(c: &mut Checks, k: usize, big: i64) -> Result<()> {
    let dist = harmonic_dist(k, big)?;
    let h = harmonic(k)?;
    let m = Rat::from_int(big);
    let lp = lp_rev(&dist)?;
    c.within("lp_rev", &lp.value, &h, &(&h + &(Rat::from(k) / &m)));
    let witness = SymPricing::from_finite((0..=k).map(|i| if i == 0 { Rat::zero() } else { m.pow(i as u32) }).collect())?;
    c.flag("p(m) = M^m supermodular", check_sym(&witness).holds, true);
    let wrev = pricing_revenue(&DetPricing::from_symmetric(k, &witness)?, &dist, TieRule::SellerFavorable)?;
    c.eq("revenue of p(m) = M^m", &wrev, &h);
    let sd = symdrev(&dist, Mode::Supermodular, DEFAULT_CAP)?;
    c.at_least("symdrev (supermodular)", &sd.value, &h);
    let s = srev(&dist)?;
    c.within("srev", &s.value, &Rat::one(), &(Rat::one() + Rat::from_int(2) / &m));
    c.eq("symsrev", &symsrev(&dist)?.value, &s.value);
    Ok(())
}

fn amon_gap(c: &mut Checks, k: usize, big: i64) -> Result<()> {
    let dist = harmonic_dist(k, big)?.with_zero_atoms(harmonic_comparison_points(k, big))?;
    let h = harmonic(k)?;
    let m = Rat::from_int(big);
    let amon = amonrev_relaxed(&dist, false)?;
    c.at_most("amonrev_relaxed", &amon.value, &(Rat::one() + Rat::from(k) / &m));
    let mon = monrev_relaxed(&dist, false)?;
    c.at_least("monrev_relaxed", &mon.value, &h);
    c.eq("amonrev witness replays", &amon.replay(&dist)?, &amon.value);
    c.eq("monrev witness replays", &mon.replay(&dist)?, &mon.value);
    Ok(())
}

/// Atoms `(u, 1-u, 0)` and permutations for `u = (2j-1)/(2G)` with total
/// probability 1/2, `(M, M, M)` with probability `1/(12M)`, the rest at 0.
pub fn non_convex_dist(big: i64, grid: i64) -> Result<ValuationDist> {
    let mut points = Vec::new();
    let mut count = 0i64;
    for j in 1..=grid {
        let u = rat(2 * j - 1, 2 * grid);
        let w = Rat::one() - &u;
        for x in permutations(&[u.clone(), w, Rat::zero()]) {
            points.push(x);
            count += 1;
        }
    }
    let each = rat(1, 2 * count);
    let top = rat(1, 12 * big);
    let rest = Rat::one() - rat(1, 2) - &top;
    let mut atoms: Vec<(Valuation, Rat)> = points.into_iter().map(|x| (x, each.clone())).collect();
    atoms.push((Valuation(vec![Rat::from_int(big); 3]), top));
    atoms.push((Valuation(vec![Rat::zero(); 3]), rest));
    ValuationDist::merged(3, atoms)
}

fn non_convex(c: &mut Checks, big: i64, grid: i64) -> Result<()> {
    let dist = non_convex_dist(big, grid)?;
    let p = SymPricing::from_finite(vec![Rat::zero(), Rat::one(), Rat::one(), Rat::from_int(big)])?;
    c.flag("p supermodular", check_sym(&p).holds, false);
    let r = pricing_revenue(&DetPricing::from_symmetric(3, &p)?, &dist, TieRule::SellerFavorable)?;
    c.eq("revenue of p = (0, 1, 1, M)", &r, &rat(7, 12));
    let s = srev(&dist)?;
    c.eq("symsrev", &symsrev(&dist)?.value, &s.value);
    c.above("revenue / srev", &(&r / &s.value), &harmonic(3)?);
    Ok(())
}

/// `p(A) = 1` when `A` meets each pair `{2l-1, 2l}`, else 0.
pub fn pair_hitting(k: usize) -> Result<DetPricing> {
    let prices = (0..1u32 << k)
        .map(|a| if (0..k / 2).all(|l| a >> (2 * l) & 3 != 0) { Rat::one() } else { Rat::zero() })
        .collect();
    DetPricing::from_finite(k, prices)
}

fn majorant_tight(c: &mut Checks, k: usize) -> Result<()> {
    let p = pair_hitting(k)?;
    let q = supermod_majorant_det(&p)?;
    let full = subset::full(k);
    c.eq("p'(K)", q.get(full).finite().expect("finite"), &Rat::from_int(1 << (k / 2)));
    let product = |a: u32| -> i64 { (0..k / 2).map(|l| (a >> (2 * l) & 3).count_ones() as i64).product() };
    let mismatch = (0..q.num_sets()).find(|&a| q.get(a) != &ExtPrice::Finite(Rat::from_int(product(a))));
    c.text("first set off the product formula", mismatch.map_or("none".into(), subset::show), "none");
    c.flag("p' supermodular", check_det(&q, LatticeProperty::Supermodular, None).holds, true);
    Ok(())
}

fn matrix_string(m: &[Vec<Rat>]) -> String {
    let rows: Vec<String> =
        m.iter().map(|r| format!("[{}]", r.iter().map(Rat::to_string).collect::<Vec<_>>().join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

fn quad_counterexample(c: &mut Checks) -> Result<()> {
    let spec = QuadSpec::three_good_example();
    let expected: Vec<Vec<Rat>> =
        [[27, -15, 3], [-15, 35, -15], [3, -15, 27]].iter().map(|r| r.iter().map(|&x| rat(x, 120)).collect()).collect();
    c.text("A^-1", matrix_string(&invert_pd(spec.a())?), &matrix_string(&expected));
    let s = spec.screens();
    c.flag("allocation-monotonic screen holds", s.amon_necessary(), true);
    let subm: Vec<String> = s.subm_offending.iter().map(|e| format!("({},{})", e.i, e.j)).collect();
    c.text("submodular screen fails at", subm.join(" "), "(1,3)");
    let alloc = grid_allocation_monotone(&spec, 4)?;
    c.text("allocation grid violation on [0, 2v] step v/4", pair(&alloc), "none");
    let ultra = grid_ultramodular(&spec, 4)?;
    c.text("ultramodularity violation on [0, 2v] step v/4", ultra.map_or("none".into(), |(x, g, h)| format!("{x:?} {g} {h}")), "none");
    let at_v = spec.eval(&Valuation(spec.v().to_vec()))?;
    c.text("allocation at v", format!("{:?}", at_v.alloc), &format!("{:?}", Allocation(vec![Rat::one(); 3])));
    match pricing_submodularity_violation(&spec, &rat(1, 100)) {
        Some((g, h)) => {
            let join: Vec<Rat> = g.iter().zip(&h).map(|(a, b)| a.clone().max(b.clone())).collect();
            let meet: Vec<Rat> = g.iter().zip(&h).map(|(a, b)| a.clone().min(b.clone())).collect();
            let gap = spec.price(&join) + spec.price(&meet) - spec.price(&g) - spec.price(&h);
            let inside = [&g, &h, &join, &meet].iter().all(|v| spec.in_allocation_range(v));
            c.push("pricing submodularity gap p(g∨h)+p(g∧h)-p(g)-p(h)", gap.to_string(), "> 0 with all four in range".into(), inside && gap.is_positive());
        }
        None => c.text("pricing submodularity violation", "none".into(), "found"),
    }
    Ok(())
}

fn canonical_convexification(c: &mut Checks) -> Result<()> {
    let menu = Menu::from_det_pricing(&det2(rat(1, 1), rat(1, 1), rat(2, 1)));
    let g = Allocation(vec![rat(1, 2), rat(1, 2)]);
    let primal = canonical_price_primal(&menu, &g)?;
    let conv = canonical_price_convexification(&menu, &g)?;
    c.text("p0(1/2, 1/2) primal", primal.to_string(), "1");
    c.text("p0(1/2, 1/2) convexification", conv.to_string(), "1");
    let single = Menu::deterministic(2, &[(0b01, rat(1, 1))])?;
    let e2 = Allocation(vec![Rat::zero(), Rat::one()]);
    c.text("p0(0, 1) for menu {1}:1", canonical_price_primal(&single, &e2)?.to_string(), "inf");
    c.text("convexification for menu {1}:1", canonical_price_convexification(&single, &e2)?.to_string(), "inf");
    Ok(())
}

fn subadd_not_am(c: &mut Checks) -> Result<()> {
    let sym = SymPricing::from_finite(vec![rat(0, 1), rat(2, 1), rat(2, 1), rat(3, 1)])?;
    let p = DetPricing::from_symmetric(3, &sym)?;
    c.flag("separably subadditive", check_det(&p, LatticeProperty::SeparablySubadditive, None).holds, true);
    c.flag("submodular", check_det(&p, LatticeProperty::Submodular, None).holds, false);
    let menu = Menu::from_det_pricing(&p);
    let v = structured_allocation_search(&menu, TieRule::TieFavorable)?;
    let confirmed = match &v {
        Some((x, y)) => {
            let qx = buyer_choice(&menu, x, TieRule::TieFavorable)?;
            let qy = buyer_choice(&menu, y, TieRule::TieFavorable)?;
            x.le(y) && !qx.alloc().le(qy.alloc())
        }
        None => false,
    };
    c.push("allocation violation", pair(&v), "found and re-verified".into(), confirmed);
    let two = two_good_checks(20);
    c.flag("two-good b nondecreasing (step 1/20)", two.nondecreasing, true);
    c.flag("two-good b nonexpansive", two.nonexpansive, true);
    c.flag("two-good b midpoint convex", two.midpoint_convex, true);
    c.flag("two-good b separably superadditive", two.separably_superadditive, true);
    c.flag("two-good b supermodular", two.supermodularity_violation.is_none(), false);
    Ok(())
}

fn unit_vectors(c: &mut Checks, k: usize) -> Result<()> {
    let dist = ValuationDist::uniform((0..k).map(|i| Valuation((0..k).map(|j| Rat::from(usize::from(i == j))).collect())).collect())?;
    let one = Rat::one();
    c.eq("srev", &srev(&dist)?.value, &one);
    c.eq("brev", &brev(&dist)?.value, &one);
    c.eq("symsrev", &symsrev(&dist)?.value, &one);
    c.eq("max-marginal revenue", &myerson_rev(&marginal(&dist, MarginalMode::Max)?)?.value, &one);
    c.eq("lp_rev", &lp_rev(&dist)?.value, &one);
    c.eq("monrev_relaxed (augmented)", &monrev_relaxed(&dist, true)?.value, &one);
    c.eq("drev", &drev(&dist, Mode::General, DEFAULT_CAP)?.value, &one);
    Ok(())
}

/// A random distribution with `n` atoms whose coordinates are halves in
/// `[0, 4]` and whose probabilities have small integer weights.
pub fn random_dist(rng: &mut impl Rng, k: usize, n: usize) -> Result<ValuationDist> {
    let mut points = Vec::with_capacity(n);
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    for w in weights {
        let x = Valuation((0..k).map(|_| rat(rng.gen_range(0..=8), 2)).collect());
        points.push((x, rat(w, total)));
    }
    ValuationDist::merged(k, points)
}

/// One instance's revenue values, for the inequality chain.
pub struct BoundRow {
    pub k: usize,
    pub srev: RevenueResult,
    pub brev: RevenueResult,
    pub symsrev: RevenueResult,
    pub max_marginal: Rat,
    pub partitions: Vec<Rat>,
    pub lp: RevenueResult,
    pub monrev: RevenueResult,
    pub amonrev: RevenueResult,
    pub drev: RevenueResult,
    pub drev_super: RevenueResult,
    pub symdrev: RevenueResult,
    pub symdrev_super: RevenueResult,
    pub k0: usize,
}

pub fn bound_row(dist: &ValuationDist) -> Result<BoundRow> {
    let k = dist.k();
    let symdrev_super = symdrev(dist, Mode::Supermodular, DEFAULT_CAP)?;
    let k0 = match &symdrev_super.witness {
        RevenueWitness::Sym { pricing, .. } => largest_level_bought(pricing, dist)?,
        _ => k,
    };
    Ok(BoundRow {
        k,
        srev: srev(dist)?,
        brev: brev(dist)?,
        symsrev: symsrev(dist)?,
        max_marginal: myerson_rev(&marginal(dist, MarginalMode::Max)?)?.value,
        partitions: BundlingPartition::all(k)
            .iter()
            .map(|pi| partition_rev(dist, pi).map(|r| r.value))
            .collect::<Result<_>>()?,
        lp: lp_rev(dist)?,
        monrev: monrev_relaxed(dist, true)?,
        amonrev: amonrev_relaxed(dist, true)?,
        drev: drev(dist, Mode::General, DEFAULT_CAP)?,
        drev_super: drev(dist, Mode::Supermodular, DEFAULT_CAP)?,
        symdrev: symdrev(dist, Mode::General, DEFAULT_CAP)?,
        symdrev_super,
        k0,
    })
}

/// Names of the inequalities of the chain that fail on `row`.
pub fn bound_violations(row: &BoundRow, dist: &ValuationDist) -> Result<Vec<&'static str>> {
    let kr = Rat::from(row.k);
    let s = &row.srev.value;
    let b = &row.brev.value;
    let mon = &row.monrev.value;
    let h = harmonic(row.k)?;
    let ln4 = ln_upper(&Rat::from_int(4), 40);
    let ln2k = ln_upper(&Rat::from(2 * row.k), 40);
    let pow = Rat::from_int((1 << row.k) - 1);
    let checks: Vec<(&'static str, bool)> = vec![
        ("srev <= monrev", s <= mon),
        ("brev <= monrev", b <= mon),
        ("monrev <= lp_rev", mon <= &row.lp.value),
        ("amonrev <= monrev", &row.amonrev.value <= mon),
        ("srev <= amonrev", s <= &row.amonrev.value),
        ("symsrev <= srev", &row.symsrev.value <= s),
        ("symdrev <= drev", row.symdrev.value <= row.drev.value),
        ("drev <= lp_rev", row.drev.value <= row.lp.value),
        ("symdrev super <= symdrev", row.symdrev_super.value <= row.symdrev.value),
        ("drev super <= drev", row.drev_super.value <= row.drev.value),
        ("monrev <= k min(srev, brev)", *mon <= &kr * &s.clone().min(b.clone())),
        ("monrev <= k partition_rev", row.partitions.iter().all(|r| *mon <= &kr * r)),
        ("max marginal <= min(srev, brev)", row.max_marginal <= s.clone().min(b.clone())),
        ("symdrev super <= H(k) symsrev", row.symdrev_super.value <= &h * &row.symsrev.value),
        ("symdrev super <= H(k0) symsrev", row.symdrev_super.value <= harmonic(row.k0.max(1))? * &row.symsrev.value),
        ("symdrev <= 2 ln(2k) H(k) symsrev", row.symdrev.value <= Rat::from_int(2) * ln2k * &h * &row.symsrev.value),
        ("drev super <= (2^k - 1)/k srev", row.drev_super.value <= &pow / &kr * s),
        ("drev <= ln 4 (2^k - 1) srev", row.drev.value <= ln4 * &pow * s),
    ];
    let mut bad: Vec<&'static str> = checks.into_iter().filter(|(_, ok)| !ok).map(|(n, _)| n).collect();
    let results = [
        &row.srev,
        &row.brev,
        &row.symsrev,
        &row.lp,
        &row.monrev,
        &row.amonrev,
        &row.drev,
        &row.drev_super,
        &row.symdrev,
        &row.symdrev_super,
    ];
    for r in results {
        if r.replay(dist)? != r.value {
            bad.push("witness replay");
            break;
        }
    }
    Ok(bad)
}

fn bound_suite(c: &mut Checks, seed: u64, count: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally: BTreeMap<&'static str, usize> = BTreeMap::new();
    for _ in 0..count {
        let k = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=5);
        let dist = random_dist(&mut rng, k, n)?;
        for name in bound_violations(&bound_row(&dist)?, &dist)? {
            *tally.entry(name).or_default() += 1;
        }
    }
    c.text("instances", count.to_string(), &count.to_string());
    let total: usize = tally.values().sum();
    let detail: Vec<String> = tally.iter().map(|(n, v)| format!("{n}: {v}")).collect();
    c.push("violations", if detail.is_empty() { "0".into() } else { format!("{total} ({})", detail.join(", ")) }, "0".into(), total == 0);
    Ok(())
}
