//! Lattice properties of pricing functions (monotonicity, sub/supermodularity,
//! separable sub/superadditivity) and supermodular majorants.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{subset, DetPricing, ExtPrice, SymPricing};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeProperty {
    Nondecreasing,
    Submodular,
    Supermodular,
    SeparablySubadditive,
    SeparablySuperadditive,
}

impl LatticeProperty {
    pub const ALL: [LatticeProperty; 5] = [
        LatticeProperty::Nondecreasing,
        LatticeProperty::Submodular,
        LatticeProperty::Supermodular,
        LatticeProperty::SeparablySubadditive,
        LatticeProperty::SeparablySuperadditive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LatticeProperty::Nondecreasing => "nondecreasing",
            LatticeProperty::Submodular => "submodular",
            LatticeProperty::Supermodular => "supermodular",
            LatticeProperty::SeparablySubadditive => "separably-subadditive",
            LatticeProperty::SeparablySuperadditive => "separably-superadditive",
        }
    }
}

impl fmt::Display for LatticeProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LatticeProperty::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| Error::InvalidParam {
            name: "property".into(),
            msg: format!(
                "{s:?} is not one of nondecreasing, submodular, supermodular, separably-subadditive, separably-superadditive"
            ),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Two subsets, as bitmasks.
    Sets(u32, u32),
    /// A bundle size for symmetric pricings.
    Level(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl PropertyVerdict {
    fn from_witness(witness: Option<Witness>) -> Self {
        PropertyVerdict { holds: witness.is_none(), witness }
    }

    pub fn to_json(&self) -> Value {
        match &self.witness {
            None => json!({ "holds": true }),
            Some(Witness::Sets(a, b)) => json!({ "holds": false, "witness": [a, b] }),
            Some(Witness::Level(m)) => json!({ "holds": false, "witness": m }),
        }
    }
}

/// `a + b >= c + d` in extended arithmetic: any infinity on the left makes it
/// true; otherwise an infinity on the right makes it false.
pub fn ext_ge(a: &ExtPrice, b: &ExtPrice, c: &ExtPrice, d: &ExtPrice) -> bool {
    match (a.add(b), c.add(d)) {
        (ExtPrice::Infinite, _) => true,
        (_, ExtPrice::Infinite) => false,
        (ExtPrice::Finite(l), ExtPrice::Finite(r)) => l >= r,
    }
}

/// Whether the defining inequality of `prop` holds at the pair `(a, b)`.
/// Pairs outside the property's domain (comparable sets for modularity,
/// overlapping sets for separability) hold trivially.
pub fn holds_at(p: &DetPricing, prop: LatticeProperty, a: u32, b: u32) -> bool {
    let z = ExtPrice::zero();
    match prop {
        LatticeProperty::Nondecreasing => !subset::is_subset(a, b) || p.get(b) >= p.get(a),
        LatticeProperty::Submodular => ext_ge(p.get(a), p.get(b), p.get(a | b), p.get(a & b)),
        LatticeProperty::Supermodular => ext_ge(p.get(a | b), p.get(a & b), p.get(a), p.get(b)),
        LatticeProperty::SeparablySubadditive => a & b != 0 || ext_ge(p.get(a), p.get(b), p.get(a | b), &z),
        LatticeProperty::SeparablySuperadditive => a & b != 0 || ext_ge(p.get(a | b), &z, p.get(a), p.get(b)),
    }
}

/// Exhaustive check over pairs of subsets (within `restrict_to` when given),
/// returning the lexicographically first violating pair.
pub fn check_det(p: &DetPricing, prop: LatticeProperty, restrict_to: Option<&[u32]>) -> PropertyVerdict {
    let all: Vec<u32>;
    let family: &[u32] = match restrict_to {
        Some(q) => q,
        None => {
            all = (0..p.num_sets()).collect();
            &all
        }
    };
    let mut sorted = family.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for (ia, &a) in sorted.iter().enumerate() {
        let rest: &[u32] = if prop == LatticeProperty::Nondecreasing { &sorted } else { &sorted[ia + 1..] };
        for &b in rest {
            if a != b && !holds_at(p, prop, a, b) {
                return PropertyVerdict::from_witness(Some(Witness::Sets(a, b)));
            }
        }
    }
    PropertyVerdict::from_witness(None)
}

/// Symmetric supermodularity: `p(m) + p(m-2) >= 2 p(m-1)` for all `m >= 2`
/// (nondecreasing differences), witness the smallest violating `m`.
pub fn check_sym(p: &SymPricing) -> PropertyVerdict {
    let lv = p.levels();
    let bad = (2..lv.len()).find(|&m| !ext_ge(&lv[m], &lv[m - 2], &lv[m - 1], &lv[m - 1]));
    PropertyVerdict::from_witness(bad.map(Witness::Level))
}

/// Replaces each infinite price by `|B| M` with `M` one above the largest
/// finite price, giving a finite pricing with the same finite part.
pub fn finite_cover(p: &DetPricing) -> DetPricing {
    let big = p.max_finite() + Rat::one();
    let prices = (0..p.num_sets())
        .map(|m| match p.get(m) {
            ExtPrice::Finite(r) => r.clone(),
            ExtPrice::Infinite => &big * &Rat::from(subset::len(m)),
        })
        .collect();
    DetPricing::from_finite(p.k(), prices).expect("same shape")
}

/// Supermodular majorant by induction on set size:
/// `p'(A) = max(p(A), max_{i != j in A} p'(A-i) + p'(A-j) - p'(A-i-j))`.
pub fn supermod_majorant_det(p: &DetPricing) -> Result<DetPricing> {
    let vals = p.finite_prices()?;
    let mut order: Vec<u32> = (0..p.num_sets()).collect();
    order.sort_by_key(|&m| (m.count_ones(), m));
    let mut out = vals.clone();
    for a in order {
        let members: Vec<usize> = subset::members(a).collect();
        let mut best = vals[a as usize].clone();
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                let (ai, aj) = (a & !(1 << i), a & !(1 << j));
                let cand = &out[ai as usize] + &out[aj as usize] - &out[(ai & aj) as usize];
                if cand > best {
                    best = cand;
                }
            }
        }
        out[a as usize] = best;
    }
    DetPricing::from_finite(p.k(), out)
}

/// Symmetric majorant with running-maximum differences
/// `d'(m) = max_{n <= m} d(n)`, `p'(m) = sum_{l <= m} d'(l)`.
pub fn supermod_majorant_sym(p: &SymPricing) -> Result<SymPricing> {
    let mut levels = Vec::with_capacity(p.levels().len());
    for (m, v) in p.levels().iter().enumerate() {
        levels.push(v.finite().cloned().ok_or(Error::InfinitePrice(m as u32))?);
    }
    let mut out = vec![Rat::zero()];
    let mut dmax: Option<Rat> = None;
    for m in 1..levels.len() {
        let d = &levels[m] - &levels[m - 1];
        let dm = match dmax {
            Some(prev) if prev > d => prev,
            _ => d,
        };
        out.push(&out[m - 1] + &dm);
        dmax = Some(dm);
    }
    SymPricing::from_finite(out)
}

/// `H(k) = 1 + 1/2 + ... + 1/k`.
pub fn harmonic(k: usize) -> Result<Rat> {
    if k == 0 {
        return Err(Error::InvalidParam { name: "k".into(), msg: "must be at least 1".into() });
    }
    Ok((1..=k).map(|m| Rat::new(1, m as i64)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn det2(p1: Rat, p2: Rat, p12: Rat) -> DetPricing {
        DetPricing::from_finite(2, vec![Rat::zero(), p1, p2, p12]).unwrap()
    }

    fn sym(levels: &[i64]) -> SymPricing {
        SymPricing::from_finite(levels.iter().map(|&v| Rat::from_int(v)).collect()).unwrap()
    }

    #[test]
    fn two_good_examples() {
        let bottom = det2(rat(3, 2), rat(2, 1), rat(3, 1));
        assert!(check_det(&bottom, LatticeProperty::Submodular, None).holds);
        let right = det2(rat(1, 1), rat(1, 1), rat(4, 1));
        assert!(check_det(&right, LatticeProperty::Supermodular, None).holds);
        assert_eq!(check_det(&right, LatticeProperty::Submodular, None).witness, Some(Witness::Sets(0b01, 0b10)));
    }

    #[test]
    fn subadditive_but_not_submodular() {
        let levels = SymPricing::from_finite(vec![rat(0, 1), rat(2, 1), rat(2, 1), rat(3, 1)]).unwrap();
        let p = DetPricing::from_symmetric(3, &levels).unwrap();
        assert_eq!(check_det(&p, LatticeProperty::Submodular, None).witness, Some(Witness::Sets(0b011, 0b101)));
        assert!(check_det(&p, LatticeProperty::SeparablySubadditive, None).holds);
    }

    #[test]
    fn infinite_prices_follow_extended_order() {
        let p = DetPricing::new(2, vec![ExtPrice::zero(), ExtPrice::Finite(rat(1, 1)), ExtPrice::Infinite, ExtPrice::Infinite])
            .unwrap();
        // p({1}) + p({2}) = inf balances p({1,2}) = inf.
        assert!(check_det(&p, LatticeProperty::Submodular, None).holds);
        assert!(check_det(&p, LatticeProperty::Nondecreasing, None).holds);
        let q = DetPricing::new(2, vec![ExtPrice::zero(), ExtPrice::Finite(rat(1, 1)), ExtPrice::Finite(rat(1, 1)), ExtPrice::Infinite])
            .unwrap();
        assert!(!check_det(&q, LatticeProperty::Submodular, None).holds);
        assert!(check_det(&q, LatticeProperty::Supermodular, None).holds);
    }

    #[test]
    fn symmetric_supermodularity() {
        assert_eq!(check_sym(&sym(&[0, 1, 1, 10_000])).witness, Some(Witness::Level(2)));
        assert!(check_sym(&sym(&[0, 1000, 1_000_000, 1_000_000_000])).holds);
        assert!(check_sym(&sym(&[0, 3, 6, 9])).holds);
    }

    #[test]
    fn majorant_examples() {
        let ones = det2(rat(1, 1), rat(1, 1), rat(1, 1));
        assert_eq!(supermod_majorant_det(&ones).unwrap().get(0b11), &ExtPrice::Finite(rat(2, 1)));
        let sup = det2(rat(1, 1), rat(1, 1), rat(4, 1));
        assert_eq!(supermod_majorant_det(&sup).unwrap(), sup);
        assert_eq!(supermod_majorant_sym(&sym(&[0, 1, 1, 1000])).unwrap(), sym(&[0, 1, 2, 1001]));
        assert_eq!(supermod_majorant_sym(&sym(&[0, 5, 6])).unwrap(), sym(&[0, 5, 10]));
        assert_eq!(supermod_majorant_sym(&sym(&[0, 2, 5])).unwrap(), sym(&[0, 2, 5]));
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1).unwrap(), Rat::one());
        assert_eq!(harmonic(2).unwrap(), rat(3, 2));
        assert_eq!(harmonic(3).unwrap(), rat(11, 6));
        assert!(harmonic(0).is_err());
    }
}
