//! Revenue functionals over finitely supported valuation distributions.
//!
//! Posted-price functionals scan support thresholds. The general optimum
//! and the monotone relaxations are single LPs over per-atom allocations and
//! payoffs. Deterministic optima run a depth-first branch and bound over
//! per-atom bundle assignments, solving the price LP of each partial
//! assignment.

use num::BigUint;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::eval::{revenue, verify_ic_ir, Assignment, TieRule};
use crate::lp::{LpOutcome, LpProblem, Relation, Sense};
use crate::model::{
    diagonal_augment, dominance_pairs, marginal, subset, Allocation, BundlingPartition, DetPricing, MarginalMode,
    Menu, MenuEntry, SymPricing, Valuation, ValuationDist,
};
use crate::rat::Rat;

/// Default bound on the number of assignments a deterministic search may
/// have to consider.
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    General,
    Supermodular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    /// Payments nondecreasing along dominance pairs.
    Payment,
    /// Allocations nondecreasing along dominance pairs.
    Allocation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RevenueWitness {
    /// One-good posted price.
    PostedPrice(Rat),
    /// Separate per-good prices.
    PerGood(Vec<Rat>),
    /// Grand-bundle price.
    Bundle(Rat),
    /// Same price for every good.
    UniformPrice(Rat),
    /// One price per block of a partition.
    Blocks { blocks: Vec<u32>, prices: Vec<Rat> },
    Menu(Menu),
    /// Per-atom options over the (possibly augmented) point set the LP used.
    Assignment { points: ValuationDist, options: Assignment, constraint: Option<Monotonicity> },
    Det { pricing: DetPricing, bundles: Vec<u32> },
    Sym { pricing: SymPricing, levels: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevenueResult {
    pub value: Rat,
    pub witness: RevenueWitness,
}

fn additive_menu(k: usize, blocks: &[u32], prices: &[Rat]) -> Menu {
    let nb = blocks.len();
    let items: Vec<(u32, Rat)> = (1..1u32 << nb)
        .map(|sel| {
            let mask = subset::members(sel).fold(0, |m, j| m | blocks[j]);
            (mask, subset::members(sel).map(|j| &prices[j]).sum())
        })
        .collect();
    Menu::deterministic(k, &items).expect("disjoint blocks give distinct bundles")
}

impl RevenueResult {
    /// The witness as a menu, when it is one (every witness except a bare
    /// per-atom assignment).
    pub fn menu(&self, k: usize) -> Option<Menu> {
        match &self.witness {
            RevenueWitness::PostedPrice(t) => Some(additive_menu(1, &[1], std::slice::from_ref(t))),
            RevenueWitness::PerGood(ts) => {
                let blocks: Vec<u32> = (0..ts.len()).map(|i| 1 << i).collect();
                Some(additive_menu(k, &blocks, ts))
            }
            RevenueWitness::Bundle(t) => Some(additive_menu(k, &[subset::full(k)], std::slice::from_ref(t))),
            RevenueWitness::UniformPrice(t) => {
                let blocks: Vec<u32> = (0..k).map(|i| 1 << i).collect();
                Some(additive_menu(k, &blocks, &vec![t.clone(); k]))
            }
            RevenueWitness::Blocks { blocks, prices } => Some(additive_menu(k, blocks, prices)),
            RevenueWitness::Menu(m) => Some(m.clone()),
            RevenueWitness::Assignment { .. } => None,
            RevenueWitness::Det { pricing, .. } => Some(Menu::from_det_pricing(pricing)),
            RevenueWitness::Sym { pricing, .. } => {
                Some(Menu::from_det_pricing(&DetPricing::from_symmetric(k, pricing).expect("matching k")))
            }
        }
    }

    /// Re-evaluates the witness on `dist`. Menus are replayed under
    /// seller-favorable tie-breaking; per-atom assignments are re-verified
    /// (IC, IR, no positive transfers, and their monotonicity constraint)
    /// and their expected payment returned.
    pub fn replay(&self, dist: &ValuationDist) -> Result<Rat> {
        if let RevenueWitness::Assignment { points, options, constraint } = &self.witness {
            if let Some(v) = verify_ic_ir(options, points)? {
                return Err(Error::Precondition(format!("witness violates incentive constraints: {v:?}")));
            }
            if let Some(kind) = constraint {
                let pts = points.points();
                for (i, j) in dominance_pairs(&pts)? {
                    let ok = match kind {
                        Monotonicity::Payment => options[i].1 <= options[j].1,
                        Monotonicity::Allocation => options[i].0.le(&options[j].0),
                    };
                    if !ok {
                        return Err(Error::Precondition(format!("witness not monotone on pair ({i},{j})")));
                    }
                }
            }
            let mut total = Rat::zero();
            for a in dist.atoms() {
                let i = points
                    .atoms()
                    .iter()
                    .position(|b| b.x == a.x)
                    .ok_or_else(|| Error::Precondition(format!("atom {:?} missing from witness", a.x)))?;
                total += &a.p * &options[i].1;
            }
            return Ok(total);
        }
        let menu = self.menu(dist.k()).expect("menu witness");
        revenue(&menu, dist, TieRule::SellerFavorable)
    }

    pub fn to_json(&self) -> Value {
        let rats = |v: &[Rat]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>();
        let witness = match &self.witness {
            RevenueWitness::PostedPrice(t) => json!({ "posted_price": t.to_string() }),
            RevenueWitness::PerGood(ts) => json!({ "per_good_prices": rats(ts) }),
            RevenueWitness::Bundle(t) => json!({ "bundle_price": t.to_string() }),
            RevenueWitness::UniformPrice(t) => json!({ "uniform_price": t.to_string() }),
            RevenueWitness::Blocks { blocks, prices } => json!({ "blocks": blocks, "prices": rats(prices) }),
            RevenueWitness::Menu(m) => json!({ "menu": m.to_json() }),
            RevenueWitness::Assignment { points, options, .. } => json!({
                "points": points.to_json(),
                "options": options.iter().map(|(q, s)| json!({ "q": rats(&q.0), "s": s.to_string() })).collect::<Vec<_>>(),
            }),
            RevenueWitness::Det { pricing, bundles } => json!({ "pricing": pricing.to_json(), "bundles": bundles }),
            RevenueWitness::Sym { pricing, levels } => json!({ "levels": pricing.to_json(), "sizes": levels }),
        };
        json!({ "value": self.value.to_string(), "witness": witness })
    }
}

/// Threshold scan over the support: maximizes `t P[X >= t]`, smallest
/// optimal `t` on ties. Returns `(revenue, price)`.
fn best_threshold(values: &[(Rat, Rat)], weight: &dyn Fn(&Rat) -> Rat) -> (Rat, Rat) {
    let mut ts: Vec<&Rat> = values.iter().map(|(v, _)| v).collect();
    ts.sort();
    ts.dedup();
    let mut best = (Rat::zero(), Rat::zero());
    let mut first = true;
    for t in ts {
        let r = weight(t) * t;
        if first || r > best.0 {
            best = (r, t.clone());
            first = false;
        }
    }
    best
}

fn one_good_values(dist: &ValuationDist) -> Vec<(Rat, Rat)> {
    dist.atoms().iter().map(|a| (a.x.0[0].clone(), a.p.clone())).collect()
}

fn tail(values: &[(Rat, Rat)], t: &Rat) -> Rat {
    values.iter().filter(|(v, _)| v >= t).map(|(_, p)| p).sum()
}

/// Optimal one-good revenue by posting the best price.
pub fn myerson_rev(dist: &ValuationDist) -> Result<RevenueResult> {
    if dist.k() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: dist.k() });
    }
    let values = one_good_values(dist);
    let (value, t) = best_threshold(&values, &|t| tail(&values, t));
    Ok(RevenueResult { value, witness: RevenueWitness::PostedPrice(t) })
}

fn posted(dist: &ValuationDist, mode: MarginalMode) -> Result<(Rat, Rat)> {
    let r = myerson_rev(&marginal(dist, mode)?)?;
    match r.witness {
        RevenueWitness::PostedPrice(t) => Ok((r.value, t)),
        _ => unreachable!(),
    }
}

/// Selling each good separately at its best price.
pub fn srev(dist: &ValuationDist) -> Result<RevenueResult> {
    let mut value = Rat::zero();
    let mut prices = Vec::with_capacity(dist.k());
    for i in 0..dist.k() {
        let (v, t) = posted(dist, MarginalMode::Good(i))?;
        value += v;
        prices.push(t);
    }
    Ok(RevenueResult { value, witness: RevenueWitness::PerGood(prices) })
}

/// Selling only the grand bundle.
pub fn brev(dist: &ValuationDist) -> Result<RevenueResult> {
    let (value, t) = posted(dist, MarginalMode::Sum)?;
    Ok(RevenueResult { value, witness: RevenueWitness::Bundle(t) })
}

/// Selling every good separately at one common price.
pub fn symsrev(dist: &ValuationDist) -> Result<RevenueResult> {
    let mut values = Vec::new();
    for i in 0..dist.k() {
        values.extend(dist.atoms().iter().map(|a| (a.x.0[i].clone(), Rat::zero())));
    }
    let weight = |t: &Rat| -> Rat {
        dist.atoms()
            .iter()
            .map(|a| &a.p * &Rat::from(a.x.0.iter().filter(|v| *v >= t).count()))
            .sum()
    };
    let (value, t) = best_threshold(&values, &weight);
    Ok(RevenueResult { value, witness: RevenueWitness::UniformPrice(t) })
}

/// Selling each block of a partition as a separate bundle.
pub fn partition_rev(dist: &ValuationDist, partition: &BundlingPartition) -> Result<RevenueResult> {
    if partition.k() != dist.k() {
        return Err(Error::DimensionMismatch { expected: dist.k(), found: partition.k() });
    }
    let mut value = Rat::zero();
    let mut prices = Vec::new();
    for &b in partition.blocks() {
        let (v, t) = posted(dist, MarginalMode::Bundle(b))?;
        value += v;
        prices.push(t);
    }
    Ok(RevenueResult { value, witness: RevenueWitness::Blocks { blocks: partition.blocks().to_vec(), prices } })
}

/// Column layout of the per-atom LP: `q(x)` in `[0,1]^k` then payoff `b(x) >= 0`.
struct MechLp {
    k: usize,
    lp: LpProblem,
}

impl MechLp {
    fn q(&self, atom: usize, i: usize) -> usize {
        atom * (self.k + 1) + i
    }

    fn b(&self, atom: usize) -> usize {
        atom * (self.k + 1) + self.k
    }

    /// Terms of `s(x) = q(x)·x - b(x)`.
    fn payment_terms(&self, atom: usize, x: &Valuation, sign: &Rat) -> Vec<(usize, Rat)> {
        let mut t: Vec<(usize, Rat)> = (0..self.k).map(|i| (self.q(atom, i), &x.0[i] * sign)).collect();
        t.push((self.b(atom), -sign.clone()));
        t
    }

    fn build(dist: &ValuationDist) -> MechLp {
        let k = dist.k();
        let n = dist.len();
        let mut m = MechLp { k, lp: LpProblem::new(n * (k + 1), Sense::Max) };
        let atoms = dist.atoms();
        let one = Rat::one();
        for (a, atom) in atoms.iter().enumerate() {
            for i in 0..k {
                m.lp.set_bounds(m.q(a, i), Some(Rat::zero()), Some(Rat::one()));
            }
            for (j, c) in m.payment_terms(a, &atom.x, &atom.p) {
                m.lp.set_objective_coeff(j, c);
            }
            // No positive transfers: s(x) >= 0.
            let terms = m.payment_terms(a, &atom.x, &one);
            m.lp.add_sparse(&terms, Relation::Ge, Rat::zero());
        }
        // IC: b(x) - b(y) - q(y)·(x - y) >= 0.
        for (xa, x) in atoms.iter().enumerate() {
            for (ya, y) in atoms.iter().enumerate() {
                if xa == ya {
                    continue;
                }
                let mut terms = vec![(m.b(xa), Rat::one()), (m.b(ya), -Rat::one())];
                for i in 0..k {
                    let d = &y.x.0[i] - &x.x.0[i];
                    if !d.is_zero() {
                        terms.push((m.q(ya, i), d));
                    }
                }
                m.lp.add_sparse(&terms, Relation::Ge, Rat::zero());
            }
        }
        m
    }

    fn options(&self, dist: &ValuationDist, point: &[Rat]) -> Assignment {
        dist.atoms()
            .iter()
            .enumerate()
            .map(|(a, atom)| {
                let q = Allocation((0..self.k).map(|i| point[self.q(a, i)].clone()).collect());
                let s = q.dot(&atom.x) - &point[self.b(a)];
                (q, s)
            })
            .collect()
    }

    fn solve(&self, dist: &ValuationDist) -> Result<(Rat, Assignment)> {
        match self.lp.solve()? {
            LpOutcome::Optimal { value, point } => Ok((value, self.options(dist, &point))),
            o => unreachable!("mechanism LP is feasible and bounded: {o:?}"),
        }
    }
}

fn menu_from_options(k: usize, options: &Assignment) -> Menu {
    let mut entries: Vec<MenuEntry> = Vec::new();
    for (q, s) in options {
        if !entries.iter().any(|e| &e.alloc == q) {
            entries.push(MenuEntry { alloc: q.clone(), price: s.clone() });
        }
    }
    Menu::new(k, entries).expect("IC options form a valid menu")
}

/// Optimal revenue over all IC/IR mechanisms restricted to the support.
pub fn lp_rev(dist: &ValuationDist) -> Result<RevenueResult> {
    let m = MechLp::build(dist);
    let (value, options) = m.solve(dist)?;
    Ok(RevenueResult { value, witness: RevenueWitness::Menu(menu_from_options(dist.k(), &options)) })
}

fn monotone_lp(dist: &ValuationDist, augment: bool, kind: Monotonicity) -> Result<RevenueResult> {
    let points = if augment { diagonal_augment(dist) } else { dist.clone() };
    let mut m = MechLp::build(&points);
    let atoms = points.atoms();
    for (i, j) in dominance_pairs(&points.points())? {
        match kind {
            Monotonicity::Payment => {
                let mut terms = m.payment_terms(j, &atoms[j].x, &Rat::one());
                terms.extend(m.payment_terms(i, &atoms[i].x, &-Rat::one()));
                m.lp.add_sparse(&terms, Relation::Ge, Rat::zero());
            }
            Monotonicity::Allocation => {
                for g in 0..m.k {
                    let terms = [(m.q(j, g), Rat::one()), (m.q(i, g), -Rat::one())];
                    m.lp.add_sparse(&terms, Relation::Ge, Rat::zero());
                }
            }
        }
    }
    let (value, options) = m.solve(&points)?;
    Ok(RevenueResult { value, witness: RevenueWitness::Assignment { points, options, constraint: Some(kind) } })
}

/// LP optimum with payments nondecreasing along every dominance pair of the
/// (optionally diagonally augmented) support. An upper bound on monotone
/// revenue for that point set.
pub fn monrev_relaxed(dist: &ValuationDist, augment: bool) -> Result<RevenueResult> {
    monotone_lp(dist, augment, Monotonicity::Payment)
}

/// As [`monrev_relaxed`] with allocations nondecreasing instead.
pub fn amonrev_relaxed(dist: &ValuationDist, augment: bool) -> Result<RevenueResult> {
    monotone_lp(dist, augment, Monotonicity::Allocation)
}

fn check_cap(choices: u64, n: usize, cap: u64) -> Result<()> {
    let required = BigUint::from(choices).pow(n as u32);
    if required > BigUint::from(cap) {
        return Err(Error::CapExceeded { required: required.to_string(), cap });
    }
    Ok(())
}

/// Depth-first branch and bound over per-atom choices.
///
/// `node_lp(assigned)` returns the price-LP value of a partial assignment
/// (None when infeasible); `upper[i]` bounds what atom `i` can pay.
struct Search<'a> {
    cands: Vec<Vec<usize>>,
    upper: Vec<Rat>,
    node_lp: &'a dyn Fn(&[usize]) -> Result<Option<(Rat, Vec<Rat>)>>,
    best: Option<(Rat, Vec<usize>, Vec<Rat>)>,
    floor: Rat,
}

impl Search<'_> {
    fn run(&mut self, assigned: &mut Vec<usize>) -> Result<()> {
        let Some((val, prices)) = (self.node_lp)(assigned)? else {
            return Ok(());
        };
        let d = assigned.len();
        if d == self.cands.len() {
            let better = match &self.best {
                None => val >= self.floor,
                Some((b, _, _)) => val > *b,
            };
            if better {
                self.best = Some((val, assigned.clone(), prices));
            }
            return Ok(());
        }
        let bound: Rat = &val + &self.upper[d..].iter().sum::<Rat>();
        match &self.best {
            Some((b, _, _)) if bound <= *b => return Ok(()),
            None if bound < self.floor => return Ok(()),
            _ => {}
        }
        for ci in 0..self.cands[d].len() {
            assigned.push(self.cands[d][ci]);
            self.run(assigned)?;
            assigned.pop();
        }
        Ok(())
    }
}

fn positive_atoms(dist: &ValuationDist) -> Vec<usize> {
    (0..dist.len()).filter(|&i| dist.atoms()[i].p.is_positive()).collect()
}

/// Optimal deterministic revenue, over nondecreasing bundle pricings
/// (supermodular ones in [`Mode::Supermodular`]). Each buyer is assigned a
/// bundle within its support, which loses nothing because prices are
/// nondecreasing.
pub fn drev(dist: &ValuationDist, mode: Mode, cap: u64) -> Result<RevenueResult> {
    let k = dist.k();
    let live = positive_atoms(dist);
    check_cap(1 << k, live.len(), cap)?;
    let nsets = 1usize << k;
    let atoms = dist.atoms();

    // Base LP: p(B) for every B, p(∅) = 0, nondecreasing, optional supermodularity.
    let mut base = LpProblem::new(nsets, Sense::Max);
    base.set_bounds(0, Some(Rat::zero()), Some(Rat::zero()));
    for a in 0..nsets as u32 {
        for i in 0..k {
            if a >> i & 1 == 0 {
                base.add_sparse(&[(a as usize | 1 << i, Rat::one()), (a as usize, -Rat::one())], Relation::Ge, Rat::zero());
            }
        }
    }
    if mode == Mode::Supermodular {
        for s in 0..nsets {
            for i in 0..k {
                for j in i + 1..k {
                    if s >> i & 1 == 0 && s >> j & 1 == 0 {
                        let terms = [
                            (s | 1 << i | 1 << j, Rat::one()),
                            (s, Rat::one()),
                            (s | 1 << i, -Rat::one()),
                            (s | 1 << j, -Rat::one()),
                        ];
                        base.add_sparse(&terms, Relation::Ge, Rat::zero());
                    }
                }
            }
        }
    }

    let values: Vec<Vec<Rat>> =
        live.iter().map(|&a| (0..nsets as u32).map(|b| atoms[a].x.value_of(b)).collect()).collect();
    let node_lp = |assigned: &[usize]| -> Result<Option<(Rat, Vec<Rat>)>> {
        let mut lp = base.clone();
        let mut obj = vec![Rat::zero(); nsets];
        for (d, &chosen) in assigned.iter().enumerate() {
            obj[chosen] += &atoms[live[d]].p;
            let v = &values[d];
            for b in 0..nsets {
                if b != chosen {
                    // p(chosen) - p(b) <= x(chosen) - x(b)
                    lp.add_sparse(&[(chosen, Rat::one()), (b, -Rat::one())], Relation::Le, &v[chosen] - &v[b]);
                }
            }
        }
        lp.set_objective(obj)?;
        Ok(match lp.solve()? {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => unreachable!("chosen prices are capped by values"),
        })
    };

    let cands: Vec<Vec<usize>> = live
        .iter()
        .enumerate()
        .map(|(d, &a)| {
            let mut c: Vec<usize> = subset::subsets_of(atoms[a].x.support()).into_iter().map(|m| m as usize).collect();
            c.sort_by(|&p, &q| values[d][q].cmp(&values[d][p]).then(p.cmp(&q)));
            c
        })
        .collect();
    let upper: Vec<Rat> = live.iter().map(|&a| &atoms[a].p * &atoms[a].x.total()).collect();
    let floor = match mode {
        Mode::General => srev(dist)?.value.max(brev(dist)?.value),
        Mode::Supermodular => srev(dist)?.value,
    };
    let mut search = Search { cands, upper, node_lp: &node_lp, best: None, floor };
    search.run(&mut Vec::new())?;
    let (value, chosen, prices) = search.best.expect("separate selling is reachable");
    let mut bundles = vec![0u32; dist.len()];
    for (d, &a) in live.iter().enumerate() {
        bundles[a] = chosen[d] as u32;
    }
    let pricing = DetPricing::from_finite(k, prices)?;
    Ok(RevenueResult { value, witness: RevenueWitness::Det { pricing, bundles } })
}

/// Sum of the `m` largest coordinates, for `m = 0..=k`.
pub fn top_sums(x: &Valuation) -> Vec<Rat> {
    let mut c = x.0.clone();
    c.sort_by(|a, b| b.cmp(a));
    let mut out = vec![Rat::zero()];
    for v in c {
        let last = out.last().expect("nonempty").clone();
        out.push(last + v);
    }
    out
}

/// Optimal symmetric deterministic revenue (price depends only on bundle
/// size), supermodular in [`Mode::Supermodular`].
pub fn symdrev(dist: &ValuationDist, mode: Mode, cap: u64) -> Result<RevenueResult> {
    let k = dist.k();
    let live = positive_atoms(dist);
    check_cap(k as u64 + 1, live.len(), cap)?;
    let atoms = dist.atoms();
    let mut base = LpProblem::new(k + 1, Sense::Max);
    base.set_bounds(0, Some(Rat::zero()), Some(Rat::zero()));
    for m in 1..=k {
        base.add_sparse(&[(m, Rat::one()), (m - 1, -Rat::one())], Relation::Ge, Rat::zero());
        if mode == Mode::Supermodular && m >= 2 {
            let terms = [(m, Rat::one()), (m - 1, Rat::from_int(-2)), (m - 2, Rat::one())];
            base.add_sparse(&terms, Relation::Ge, Rat::zero());
        }
    }
    let tops: Vec<Vec<Rat>> = live.iter().map(|&a| top_sums(&atoms[a].x)).collect();
    let node_lp = |assigned: &[usize]| -> Result<Option<(Rat, Vec<Rat>)>> {
        let mut lp = base.clone();
        let mut obj = vec![Rat::zero(); k + 1];
        for (d, &m) in assigned.iter().enumerate() {
            obj[m] += &atoms[live[d]].p;
            for j in 0..=k {
                if j != m {
                    lp.add_sparse(&[(m, Rat::one()), (j, -Rat::one())], Relation::Le, &tops[d][m] - &tops[d][j]);
                }
            }
        }
        lp.set_objective(obj)?;
        Ok(match lp.solve()? {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => unreachable!("chosen prices are capped by values"),
        })
    };
    let cands: Vec<Vec<usize>> = live
        .iter()
        .map(|&a| {
            let s = subset::len(atoms[a].x.support());
            (0..=s).rev().collect()
        })
        .collect();
    let upper: Vec<Rat> = live.iter().map(|&a| &atoms[a].p * &atoms[a].x.total()).collect();
    let floor = symsrev(dist)?.value;
    let mut search = Search { cands, upper, node_lp: &node_lp, best: None, floor };
    search.run(&mut Vec::new())?;
    let (value, chosen, prices) = search.best.expect("uniform pricing is reachable");
    let mut levels = vec![0usize; dist.len()];
    for (d, &a) in live.iter().enumerate() {
        levels[a] = chosen[d];
    }
    let pricing = SymPricing::from_finite(prices)?;
    Ok(RevenueResult { value, witness: RevenueWitness::Sym { pricing, levels } })
}

/// Largest bundle size bought with positive probability when `p` is offered
/// to `dist` under seller-favorable tie-breaking.
pub fn largest_level_bought(p: &SymPricing, dist: &ValuationDist) -> Result<usize> {
    let menu = Menu::from_det_pricing(&DetPricing::from_symmetric(dist.k(), p)?);
    let mut best = 0;
    for a in dist.atoms().iter().filter(|a| a.p.is_positive()) {
        let c = crate::eval::buyer_choice(&menu, &a.x, TieRule::SellerFavorable)?;
        best = best.max(c.alloc().as_mask().map_or(0, subset::len));
    }
    Ok(best)
}
