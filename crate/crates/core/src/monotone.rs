//! Payment and allocation monotonicity of deterministic mechanisms.
//!
//! A deterministic pricing fails to be monotonic exactly when, for some
//! incomparable offered bundles `A`, `B` with `p(A) > p(B)`, there is `z` on
//! `A \ B` with
//!
//! ```text
//! p(A) - p(A \ C) <= z(C) < p(B ∪ C) - p(B)    for all nonempty C ⊆ A \ B.
//! ```
//!
//! The strict system is decided exactly by LP, and its infeasibility is
//! certified by Motzkin multipliers. Grid oracles refute monotonicity of
//! arbitrary menus on finite point sets.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::eval::{buyer_choice, canonical_det_price, TieRule};
use crate::lattice::ext_ge;
use crate::lp::{strict_feasible, Feasibility, Ineq, LpOutcome, LpProblem, Relation, Sense};
use crate::model::{subset, DetPricing, Menu, Valuation};
use crate::rat::Rat;

/// Largest good count accepted by the exhaustive pair scans.
pub const MAX_SCAN_GOODS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Every finite-priced subset.
    All,
    /// Only the offered bundles of the input pricing.
    Range,
    /// An explicit family of bundles.
    Sets(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// `(C, lambda_C)` with `lambda_C > 0`.
    pub lambda: Vec<(u32, Rat)>,
    /// `(C, mu_C)` with `mu_C > 0`.
    pub mu: Vec<(u32, Rat)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCertificate {
    pub a: u32,
    pub b: u32,
    pub cert: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonotonicityVerdict {
    Monotonic { certificates: Vec<PairCertificate> },
    NotMonotonic { a: u32, b: u32, z: Vec<(usize, Rat)>, x: Valuation, y: Valuation },
}

impl MonotonicityVerdict {
    pub fn is_monotonic(&self) -> bool {
        matches!(self, MonotonicityVerdict::Monotonic { .. })
    }

    pub fn to_json(&self) -> Value {
        let rats = |v: &[Rat]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>();
        let terms = |v: &[(u32, Rat)]| {
            let mut m = serde_json::Map::new();
            for (c, r) in v {
                m.insert(c.to_string(), Value::String(r.to_string()));
            }
            Value::Object(m)
        };
        match self {
            MonotonicityVerdict::Monotonic { certificates } => json!({
                "status": "monotonic",
                "certificates": certificates.iter().map(|c| json!({
                    "pair": [c.a, c.b],
                    "lambda": terms(&c.cert.lambda),
                    "mu": terms(&c.cert.mu),
                })).collect::<Vec<_>>(),
            }),
            MonotonicityVerdict::NotMonotonic { a, b, z, x, y } => {
                let mut zm = serde_json::Map::new();
                for (i, v) in z {
                    zm.insert((i + 1).to_string(), Value::String(v.to_string()));
                }
                json!({
                    "status": "not-monotonic",
                    "pair": [a, b],
                    "z": zm,
                    "x": rats(&x.0),
                    "y": rats(&y.0),
                })
            }
        }
    }
}

fn canonical(p: &DetPricing) -> DetPricing {
    canonical_det_price(&Menu::from_det_pricing(p)).expect("deterministic menu")
}

fn fin(p: &DetPricing, m: u32) -> Option<&Rat> {
    p.get(m).finite()
}

/// Ordered incomparable pairs `(A, B)` of finite-priced scope sets with
/// `p(A) > p(B)`, where `p` is the canonical (nondecreasing) form.
pub fn scan_pairs(p: &DetPricing, scope: &Scope) -> Result<Vec<(u32, u32)>> {
    if p.k() > MAX_SCAN_GOODS {
        return Err(Error::TooLarge { what: "goods", size: p.k(), limit: MAX_SCAN_GOODS });
    }
    let c = canonical(p);
    let family: Vec<u32> = match scope {
        Scope::All => (0..p.num_sets()).collect(),
        Scope::Range => (0..p.num_sets()).filter(|&m| p.get(m).is_finite()).collect(),
        Scope::Sets(s) => s.clone(),
    };
    let family: Vec<u32> = family.into_iter().filter(|&m| c.get(m).is_finite()).collect();
    let mut out = Vec::new();
    for &a in &family {
        for &b in &family {
            let incomparable = a & !b != 0 && b & !a != 0;
            if incomparable && c.get(a) > c.get(b) {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// The system over `z` indexed by the goods of `A \ B` (ascending):
/// weak rows `-z(C) <= -(p(A) - p(A \ C))`, strict rows `z(C) < p(B ∪ C) - p(B)`
/// (omitted when `p(B ∪ C)` is infinite). `p` must be canonical.
pub fn z_system(p: &DetPricing, a: u32, b: u32) -> (Vec<usize>, Vec<Ineq>, Vec<Ineq>) {
    let goods: Vec<usize> = subset::members(a & !b).collect();
    let (pa, pb) = (fin(p, a).expect("finite"), fin(p, b).expect("finite"));
    let mut weak = Vec::new();
    let mut strict = Vec::new();
    for c in subset::subsets_of(a & !b).into_iter().skip(1) {
        let row: Vec<Rat> = goods.iter().map(|&g| if c >> g & 1 == 1 { Rat::one() } else { Rat::zero() }).collect();
        let v = pa - fin(p, a & !c).expect("nondecreasing below a finite price");
        weak.push(Ineq::new(row.iter().map(|r| -r.clone()).collect(), -v));
        if let Some(pbc) = fin(p, b | c) {
            strict.push(Ineq::new(row, pbc - pb));
        }
    }
    (goods, weak, strict)
}

/// A solution `z` of the system for `(A, B)`, if any. `p` must be canonical.
pub fn z_feasible(p: &DetPricing, a: u32, b: u32) -> Result<Option<Vec<(usize, Rat)>>> {
    let (goods, weak, strict) = z_system(p, a, b);
    Ok(match strict_feasible(goods.len(), &weak, &strict)? {
        Feasibility::Feasible(z) => Some(goods.into_iter().zip(z).collect()),
        Feasibility::Infeasible => None,
    })
}

/// Multipliers `lambda, mu >= 0` over nonempty `C ⊆ A \ B`, normalized to
/// total mass one, with `sum lambda_C 1_C = sum mu_C 1_C` and
/// `sum lambda_C v(C) >= sum mu_C w(C)`, where `v(C) = p(A) - p(A \ C)` and
/// `w(C) = p(B ∪ C) - p(B)`. Such multipliers exist iff the strict system
/// has no solution.
pub fn motzkin_certificate(p: &DetPricing, a: u32, b: u32) -> Result<Option<Certificate>> {
    let p = &canonical(p);
    let (pa, pb) = match (fin(p, a), fin(p, b)) {
        (Some(pa), Some(pb)) if pa > pb => (pa, pb),
        _ => return Err(Error::Precondition("need finite p(A) > p(B)".into())),
    };
    if a & !b == 0 || b & !a == 0 {
        return Err(Error::Precondition("A and B must be incomparable".into()));
    }
    let diff = a & !b;
    let cs: Vec<u32> = subset::subsets_of(diff).into_iter().skip(1).collect();
    let nc = cs.len();
    // Columns: lambda_C then mu_C.
    let mut lp = LpProblem::new(2 * nc, Sense::Max);
    let mut value_row = vec![Rat::zero(); 2 * nc];
    for (j, &c) in cs.iter().enumerate() {
        value_row[j] = pa - fin(p, a & !c).expect("finite");
        match fin(p, b | c) {
            Some(pbc) => value_row[nc + j] = -(pbc - pb),
            None => lp.set_bounds(nc + j, Some(Rat::zero()), Some(Rat::zero())),
        }
    }
    for g in subset::members(diff) {
        let row: Vec<Rat> = (0..2 * nc)
            .map(|j| {
                let c = cs[j % nc];
                match (c >> g & 1 == 1, j < nc) {
                    (false, _) => Rat::zero(),
                    (true, true) => Rat::one(),
                    (true, false) => -Rat::one(),
                }
            })
            .collect();
        lp.add(row, Relation::Eq, Rat::zero())?;
    }
    lp.add(value_row, Relation::Ge, Rat::zero())?;
    lp.add(vec![Rat::one(); 2 * nc], Relation::Eq, Rat::one())?;
    Ok(match lp.solve()? {
        LpOutcome::Optimal { point, .. } => {
            let pick = |off: usize| {
                (0..nc).filter(|&j| point[off + j].is_positive()).map(|j| (cs[j], point[off + j].clone())).collect()
            };
            Some(Certificate { lambda: pick(0), mu: pick(nc) })
        }
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("normalized"),
    })
}

/// Re-checks a certificate's defining conditions exactly.
pub fn verify_certificate(p: &DetPricing, a: u32, b: u32, cert: &Certificate) -> bool {
    let p = &canonical(p);
    let (Some(pa), Some(pb)) = (fin(p, a), fin(p, b)) else { return false };
    let nonneg = cert.lambda.iter().chain(&cert.mu).all(|(c, r)| !r.is_negative() && *c != 0 && c & !(a & !b) == 0);
    if !nonneg || cert.lambda.is_empty() || cert.mu.is_empty() {
        return false;
    }
    let balanced = subset::members(a & !b).all(|g| {
        let l: Rat = cert.lambda.iter().filter(|(c, _)| c >> g & 1 == 1).map(|(_, r)| r).sum();
        let m: Rat = cert.mu.iter().filter(|(c, _)| c >> g & 1 == 1).map(|(_, r)| r).sum();
        l == m
    });
    let lv: Rat = cert.lambda.iter().map(|(c, r)| r * &(pa - fin(p, a & !c).expect("finite"))).sum();
    let mut mw = Rat::zero();
    for (c, r) in &cert.mu {
        match fin(p, b | c) {
            Some(pbc) => mw += r * &(pbc - pb),
            None => return false,
        }
    }
    balanced && lv >= mw
}

/// Builds `x <= y` from a solution `z`: `x` is `z` on `A \ B` and `M` on
/// `A ∩ B`; `y` adds `M` on `B \ A`.
pub fn witness_pair(p: &DetPricing, a: u32, b: u32, z: &[(usize, Rat)]) -> (Valuation, Valuation) {
    let big = Rat::one() + p.max_finite() + z.iter().map(|(_, v)| v.abs()).sum::<Rat>();
    let k = p.k();
    let mut x = vec![Rat::zero(); k];
    for (g, v) in z {
        x[*g] = v.clone();
    }
    for g in subset::members(a & b) {
        x[g] = big.clone();
    }
    let mut y = x.clone();
    for g in subset::members(b & !a) {
        y[g] = big.clone();
    }
    (Valuation(x), Valuation(y))
}

/// Payments at `x` and `y` under `rule` on the menu of `p`.
pub fn payments(p: &DetPricing, x: &Valuation, y: &Valuation, rule: TieRule) -> Result<(Rat, Rat)> {
    let menu = Menu::from_det_pricing(&canonical(p));
    Ok((buyer_choice(&menu, x, rule)?.chosen.price, buyer_choice(&menu, y, rule)?.chosen.price))
}

/// Exact monotonicity verdict for a deterministic pricing, with a violating
/// valuation pair or per-pair certificates.
pub fn check_det_monotonic(p: &DetPricing, scope: &Scope) -> Result<MonotonicityVerdict> {
    let c = canonical(p);
    let mut certificates = Vec::new();
    for (a, b) in scan_pairs(p, scope)? {
        if let Some(z) = z_feasible(&c, a, b)? {
            let (x, y) = witness_pair(&c, a, b, &z);
            return Ok(MonotonicityVerdict::NotMonotonic { a, b, z, x, y });
        }
        let cert = motzkin_certificate(&c, a, b)?.expect("alternative holds when the strict system is infeasible");
        certificates.push(PairCertificate { a, b, cert });
    }
    Ok(MonotonicityVerdict::Monotonic { certificates })
}

/// Submodularity required only on pairs with different prices; sufficient
/// for monotonicity. Returns the first failing pair.
pub fn check_sufficient_restricted_submod(p: &DetPricing) -> Option<(u32, u32)> {
    let c = canonical(p);
    for a in 0..c.num_sets() {
        for b in a + 1..c.num_sets() {
            if c.get(a) != c.get(b) && !ext_ge(c.get(a), c.get(b), c.get(a | b), c.get(a & b)) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Decreasing marginal price condition, necessary for monotonicity: for
/// disjoint `A`, `{i}`, `J` with `p(A ∪ i) > p(A ∪ J)`,
/// `p(A ∪ i) + p(A ∪ J) >= p(A ∪ J ∪ i) + p(A)`. Returns the first failing
/// `(A, i, J)` with `i` zero-based.
pub fn check_necessary(p: &DetPricing) -> Option<(u32, usize, u32)> {
    let c = canonical(p);
    let full = subset::full(c.k());
    for a in 0..c.num_sets() {
        for i in 0..c.k() {
            if a >> i & 1 == 1 {
                continue;
            }
            let ai = a | 1 << i;
            for j in subset::subsets_of(full & !ai).into_iter().skip(1) {
                let aj = a | j;
                if c.get(ai) > c.get(aj) && !ext_ge(c.get(ai), c.get(aj), c.get(aj | 1 << i), c.get(a)) {
                    return Some((a, i, j));
                }
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridCheck {
    Payment,
    Allocation,
}

/// Evaluates the menu on every grid point and checks every dominance pair.
/// A returned pair `(x, y)` with `x <= y` refutes the property.
pub fn grid_oracle(
    menu: &Menu,
    rule: TieRule,
    grid: &[Valuation],
    check: GridCheck,
) -> Result<Option<(Valuation, Valuation)>> {
    let choices = grid.iter().map(|x| buyer_choice(menu, x, rule)).collect::<Result<Vec<_>>>()?;
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            if i == j || !grid[i].le(&grid[j]) {
                continue;
            }
            let ok = match check {
                GridCheck::Payment => choices[i].payment() <= choices[j].payment(),
                GridCheck::Allocation => choices[i].alloc().le(choices[j].alloc()),
            };
            if !ok {
                return Ok(Some((grid[i].clone(), grid[j].clone())));
            }
        }
    }
    Ok(None)
}

/// Every point whose coordinates are drawn from `values` (per good).
pub fn product_grid(values: &[Vec<Rat>]) -> Vec<Valuation> {
    let mut out = vec![Vec::new()];
    for vs in values {
        let mut next = Vec::with_capacity(out.len() * vs.len());
        for p in &out {
            for v in vs {
                let mut q: Vec<Rat> = p.clone();
                q.push(v.clone());
                next.push(q);
            }
        }
        out = next;
    }
    out.into_iter().map(Valuation).collect()
}

/// Grid oracle on a product grid (sorted distinct values per good), checking
/// only neighbors one step apart in one coordinate. Any dominance violation
/// on the grid shows up between some such neighbors.
pub fn product_grid_oracle(
    menu: &Menu,
    rule: TieRule,
    values: &[Vec<Rat>],
    check: GridCheck,
) -> Result<Option<(Valuation, Valuation)>> {
    let k = menu.k();
    if values.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: values.len() });
    }
    let dims: Vec<usize> = values.iter().map(Vec::len).collect();
    let total: usize = dims.iter().product();
    let point = |mut idx: usize| -> Valuation {
        let mut c = vec![Rat::zero(); k];
        for g in (0..k).rev() {
            c[g] = values[g][idx % dims[g]].clone();
            idx /= dims[g];
        }
        Valuation(c)
    };
    let mut stride = vec![1usize; k];
    for g in (0..k.saturating_sub(1)).rev() {
        stride[g] = stride[g + 1] * dims[g + 1];
    }
    let choices = (0..total).map(|i| buyer_choice(menu, &point(i), rule)).collect::<Result<Vec<_>>>()?;
    for i in 0..total {
        for g in 0..k {
            if (i / stride[g]) % dims[g] + 1 == dims[g] {
                continue;
            }
            let j = i + stride[g];
            let ok = match check {
                GridCheck::Payment => choices[i].payment() <= choices[j].payment(),
                GridCheck::Allocation => choices[i].alloc().le(choices[j].alloc()),
            };
            if !ok {
                return Ok(Some((point(i), point(j))));
            }
        }
    }
    Ok(None)
}

/// Sorted distinct `t` in `[0, hi]` where two bundles' payoffs along
/// `base + t·1_dir` cross, together with `0`, `hi`, and midpoints of
/// consecutive crossings.
fn path_samples(p: &DetPricing, base: &Valuation, dir: u32, hi: &Rat) -> Vec<Rat> {
    let lines: Vec<(Rat, i64)> = (0..p.num_sets())
        .filter_map(|s| fin(p, s).map(|ps| (base.value_of(s) - ps, subset::len(s & dir) as i64)))
        .collect();
    let mut ts: BTreeSet<Rat> = BTreeSet::new();
    ts.insert(Rat::zero());
    ts.insert(hi.clone());
    for (i, (a1, s1)) in lines.iter().enumerate() {
        for (a2, s2) in &lines[i + 1..] {
            if s1 != s2 {
                let t = (a2 - a1) / Rat::from_int(s1 - s2);
                if !t.is_negative() && t <= *hi {
                    ts.insert(t);
                }
            }
        }
    }
    let sorted: Vec<Rat> = ts.into_iter().collect();
    let mut out = sorted.clone();
    for w in sorted.windows(2) {
        out.push((&w[0] + &w[1]) / Rat::from_int(2));
    }
    out.sort();
    out
}

/// Searches for an allocation-monotonicity violation of a deterministic
/// menu guided by failures of submodularity of its canonical pricing.
///
/// For each pair `(A, B)` with `p(A) + p(B) < p(A ∪ B) + p(A ∩ B)` and each
/// nonempty `C ⊆ A \ B`, follows the paths `M 1_{A∩B} + t 1_C` and
/// `M 1_B + t 1_C` for `t` in `[0, M]`, sampling every payoff crossing and
/// the midpoints between them, and checks all dominance pairs of the samples.
pub fn structured_allocation_search(menu: &Menu, rule: TieRule) -> Result<Option<(Valuation, Valuation)>> {
    let p = canonical_det_price(menu)?;
    let k = p.k();
    let big = Rat::one() + p.max_finite() * Rat::from_int(2);
    let n = p.num_sets();
    for a in 0..n {
        for b in 0..n {
            if a & !b == 0 || b & !a == 0 || ext_ge(p.get(a), p.get(b), p.get(a | b), p.get(a & b)) {
                continue;
            }
            for c in subset::subsets_of(a & !b).into_iter().skip(1) {
                let lower = Valuation((0..k).map(|g| if (a & b) >> g & 1 == 1 { big.clone() } else { Rat::zero() }).collect());
                let upper = Valuation((0..k).map(|g| if b >> g & 1 == 1 { big.clone() } else { Rat::zero() }).collect());
                let mut ts: Vec<Rat> = path_samples(&p, &lower, c, &big);
                ts.extend(path_samples(&p, &upper, c, &big));
                ts.sort();
                ts.dedup();
                let along = |base: &Valuation, t: &Rat| {
                    let mut v = base.0.clone();
                    for g in subset::members(c) {
                        v[g] = &v[g] + t;
                    }
                    Valuation(v)
                };
                let mut grid: Vec<Valuation> = ts.iter().map(|t| along(&lower, t)).collect();
                grid.extend(ts.iter().map(|t| along(&upper, t)));
                if let Some(v) = grid_oracle(menu, rule, &grid, GridCheck::Allocation)? {
                    return Ok(Some(v));
                }
            }
        }
    }
    Ok(None)
}

/// Coordinate values for a dense grid around a deterministic menu: `0`,
/// every multiple of `step` up to one above the largest finite price, and
/// `M` = one plus twice that price.
pub fn dense_values(menu: &Menu, step: &Rat) -> Result<Vec<Vec<Rat>>> {
    let p = canonical_det_price(menu)?;
    let top = p.max_finite() + Rat::one();
    let mut vs = Vec::new();
    let mut t = Rat::zero();
    while t <= top {
        vs.push(t.clone());
        t += step;
    }
    vs.push(Rat::one() + p.max_finite() * Rat::from_int(2));
    vs.dedup();
    Ok(vec![vs; p.k()])
}
