//! Buyer behavior against a menu: choice under tie-breaking rules, revenue,
//! incentive checks for per-atom assignments, and canonical pricing.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lp::{LpOutcome, LpProblem, Relation, Sense};
use crate::model::{subset, Allocation, DetPricing, ExtPrice, Menu, MenuEntry, Valuation, ValuationDist};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TieRule {
    /// Highest payment; remaining ties go to the earliest menu entry.
    SellerFavorable,
    /// A coordinatewise-maximal allocation; the lexicographically largest
    /// among several.
    BuyerFavorable,
    /// Highest payment, then as `BuyerFavorable`.
    TieFavorable,
    /// Highest payment, then the largest `sum_i i * g_i` (goods one-based).
    IndexConsistent,
}

impl TieRule {
    pub const ALL: [TieRule; 4] =
        [TieRule::SellerFavorable, TieRule::BuyerFavorable, TieRule::TieFavorable, TieRule::IndexConsistent];

    pub fn name(self) -> &'static str {
        match self {
            TieRule::SellerFavorable => "seller",
            TieRule::BuyerFavorable => "buyer",
            TieRule::TieFavorable => "tie",
            TieRule::IndexConsistent => "index",
        }
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seller" | "seller-favorable" => Ok(TieRule::SellerFavorable),
            "buyer" | "buyer-favorable" => Ok(TieRule::BuyerFavorable),
            "tie" | "tie-favorable" => Ok(TieRule::TieFavorable),
            "index" | "index-consistent" => Ok(TieRule::IndexConsistent),
            _ => Err(Error::InvalidParam {
                name: "rule".into(),
                msg: format!("{s:?} is not one of seller, buyer, tie, index"),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceResult {
    /// Index of the chosen entry in the menu.
    pub index: usize,
    pub chosen: MenuEntry,
    pub payoff: Rat,
    /// Indices of every payoff-maximizing entry, in menu order.
    pub tie_set: Vec<usize>,
}

impl ChoiceResult {
    pub fn payment(&self) -> &Rat {
        &self.chosen.price
    }

    pub fn alloc(&self) -> &Allocation {
        &self.chosen.alloc
    }
}

fn check_dim(menu: &Menu, x: &Valuation) -> Result<()> {
    if menu.k() != x.k() {
        return Err(Error::DimensionMismatch { expected: menu.k(), found: x.k() });
    }
    Ok(())
}

/// `b(x)`: the buyer's best payoff over the menu.
pub fn payoff(menu: &Menu, x: &Valuation) -> Result<Rat> {
    check_dim(menu, x)?;
    Ok(menu.entries().iter().map(|e| e.alloc.dot(x) - &e.price).max().expect("menu is nonempty"))
}

fn index_weight(g: &Allocation) -> Rat {
    g.0.iter().enumerate().map(|(i, c)| c * &Rat::from_int(i as i64 + 1)).sum()
}

/// Keeps the entries of `cands` whose allocation no other candidate
/// strictly dominates, then returns the lexicographically largest.
fn maximal_lex_largest(entries: &[MenuEntry], cands: &[usize]) -> usize {
    let dominated = |i: usize| {
        cands.iter().any(|&j| j != i && entries[i].alloc.le(&entries[j].alloc) && entries[i].alloc != entries[j].alloc)
    };
    cands
        .iter()
        .copied()
        .filter(|&i| !dominated(i))
        .max_by(|&a, &b| entries[a].alloc.cmp(&entries[b].alloc))
        .expect("nonempty candidate set")
}

fn max_price(entries: &[MenuEntry], cands: &[usize]) -> Vec<usize> {
    let top = cands.iter().map(|&i| &entries[i].price).max().expect("nonempty").clone();
    cands.iter().copied().filter(|&i| entries[i].price == top).collect()
}

pub fn buyer_choice(menu: &Menu, x: &Valuation, rule: TieRule) -> Result<ChoiceResult> {
    check_dim(menu, x)?;
    let entries = menu.entries();
    let utils: Vec<Rat> = entries.iter().map(|e| e.alloc.dot(x) - &e.price).collect();
    let best = utils.iter().max().expect("menu is nonempty").clone();
    let tie_set: Vec<usize> = (0..entries.len()).filter(|&i| utils[i] == best).collect();
    let index = match rule {
        TieRule::SellerFavorable => max_price(entries, &tie_set)[0],
        TieRule::BuyerFavorable => maximal_lex_largest(entries, &tie_set),
        TieRule::TieFavorable => maximal_lex_largest(entries, &max_price(entries, &tie_set)),
        TieRule::IndexConsistent => {
            let top = max_price(entries, &tie_set);
            *top.iter().max_by_key(|&&i| index_weight(&entries[i].alloc)).expect("nonempty")
        }
    };
    Ok(ChoiceResult { index, chosen: entries[index].clone(), payoff: best, tie_set })
}

/// Expected payment `sum_x f(x) s(x)`.
pub fn revenue(menu: &Menu, dist: &ValuationDist, rule: TieRule) -> Result<Rat> {
    let mut total = Rat::zero();
    for a in dist.atoms() {
        if a.p.is_zero() {
            if a.x.k() != menu.k() {
                return Err(Error::DimensionMismatch { expected: menu.k(), found: a.x.k() });
            }
            continue;
        }
        let c = buyer_choice(menu, &a.x, rule)?;
        total += &a.p * c.payment();
    }
    Ok(total)
}

/// Revenue of a deterministic pricing (its finite-priced sets as a menu).
pub fn pricing_revenue(p: &DetPricing, dist: &ValuationDist, rule: TieRule) -> Result<Rat> {
    revenue(&Menu::from_det_pricing(p), dist, rule)
}

/// Per-atom `(allocation, payment)`, indexed like the distribution's atoms.
pub type Assignment = Vec<(Allocation, Rat)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IcViolation {
    /// Atom `x` strictly prefers atom `y`'s option; `slack` is the payoff gain.
    Ic { x: usize, y: usize, slack: Rat },
    /// Atom `x` gets negative payoff `-slack`.
    Ir { x: usize, slack: Rat },
    /// Atom `x` is paid `slack` by the seller.
    Npt { x: usize, slack: Rat },
}

impl IcViolation {
    pub fn slack(&self) -> &Rat {
        match self {
            IcViolation::Ic { slack, .. } | IcViolation::Ir { slack, .. } | IcViolation::Npt { slack, .. } => slack,
        }
    }
}

/// Checks IC over all ordered atom pairs and IR/NPT at each atom; returns
/// the most violated constraint, if any (the last one scanned among equals).
pub fn verify_ic_ir(assignment: &[(Allocation, Rat)], dist: &ValuationDist) -> Result<Option<IcViolation>> {
    if assignment.len() != dist.len() {
        return Err(Error::DimensionMismatch { expected: dist.len(), found: assignment.len() });
    }
    let atoms = dist.atoms();
    let mut worst: Option<IcViolation> = None;
    let mut consider = |v: IcViolation| {
        if v.slack().is_positive() && worst.as_ref().is_none_or(|w| v.slack() >= w.slack()) {
            worst = Some(v);
        }
    };
    let payoff = |i: usize, j: usize| assignment[j].0.dot(&atoms[i].x) - &assignment[j].1;
    for i in 0..atoms.len() {
        let own = payoff(i, i);
        consider(IcViolation::Ir { x: i, slack: -own.clone() });
        consider(IcViolation::Npt { x: i, slack: -assignment[i].1.clone() });
        for j in 0..atoms.len() {
            if i != j {
                consider(IcViolation::Ic { x: i, y: j, slack: payoff(i, j) - &own });
            }
        }
    }
    Ok(worst)
}

/// Smallest nondecreasing deterministic pricing extending the menu:
/// `p0(A) = min { price(B) : B in menu, B ⊇ A }`, infinite when no superset
/// is offered.
pub fn canonical_det_price(menu: &Menu) -> Result<DetPricing> {
    let k = menu.k();
    let mut offered: Vec<(u32, Rat)> = Vec::with_capacity(menu.entries().len());
    for (j, e) in menu.entries().iter().enumerate() {
        let mask = e.alloc.as_mask().ok_or(Error::NonDeterministicMenu(j))?;
        offered.push((mask, e.price.clone()));
    }
    let prices = (0..1u32 << k)
        .map(|a| {
            offered
                .iter()
                .filter(|(b, _)| subset::is_subset(a, *b))
                .map(|(_, p)| p.clone())
                .min()
                .map_or(ExtPrice::Infinite, ExtPrice::Finite)
        })
        .collect();
    DetPricing::new(k, prices)
}

/// `sup_{x >= 0} g·x - b(x)` as an LP over `(x, t)`.
pub fn canonical_price_primal(menu: &Menu, g: &Allocation) -> Result<ExtPrice> {
    let k = menu.k();
    if g.k() != k {
        return Err(Error::DimensionMismatch { expected: k, found: g.k() });
    }
    let mut lp = LpProblem::new(k + 1, Sense::Max);
    lp.set_free(k);
    let mut obj = g.0.clone();
    obj.push(-Rat::one());
    lp.set_objective(obj)?;
    for e in menu.entries() {
        // t - g_j·x >= -p_j
        let mut c: Vec<Rat> = e.alloc.0.iter().map(|v| -v.clone()).collect();
        c.push(Rat::one());
        lp.add(c, Relation::Ge, -e.price.clone())?;
    }
    Ok(match lp.solve()? {
        LpOutcome::Optimal { value, .. } => ExtPrice::Finite(value),
        LpOutcome::Unbounded => ExtPrice::Infinite,
        LpOutcome::Infeasible => unreachable!("x = 0 with t = 0 is feasible"),
    })
}

/// Cheapest convex combination of menu entries whose allocation dominates `g`.
pub fn canonical_price_convexification(menu: &Menu, g: &Allocation) -> Result<ExtPrice> {
    let k = menu.k();
    if g.k() != k {
        return Err(Error::DimensionMismatch { expected: k, found: g.k() });
    }
    let entries = menu.entries();
    let mut lp = LpProblem::new(entries.len(), Sense::Min);
    lp.set_objective(entries.iter().map(|e| e.price.clone()).collect())?;
    for i in 0..k {
        lp.add(entries.iter().map(|e| e.alloc.0[i].clone()).collect(), Relation::Ge, g.0[i].clone())?;
    }
    lp.add(vec![Rat::one(); entries.len()], Relation::Eq, Rat::one())?;
    Ok(match lp.solve()? {
        LpOutcome::Optimal { value, .. } => ExtPrice::Finite(value),
        LpOutcome::Infeasible => ExtPrice::Infinite,
        LpOutcome::Unbounded => unreachable!("prices are nonnegative"),
    })
}

/// The canonical price `p0(g)`. Computes both LP formulations and checks
/// that they agree.
pub fn canonical_general_price(menu: &Menu, g: &Allocation) -> Result<ExtPrice> {
    let primal = canonical_price_primal(menu, g)?;
    let convex = canonical_price_convexification(menu, g)?;
    assert_eq!(primal, convex, "canonical price formulations disagree at {g:?}");
    Ok(primal)
}
