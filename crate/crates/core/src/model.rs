//! Domain types shared by every other module: valuations, finitely supported
//! valuation distributions, menus, deterministic and symmetric pricing
//! functions, and their JSON forms.
//!
//! Subsets of the goods `K = {1..k}` are `u32` bitmasks with bit `i-1`
//! standing for good `i`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Largest good count accepted for subset-indexed objects.
pub const MAX_GOODS: usize = 20;

pub mod subset {
    /// Goods in `mask`, as zero-based indices in increasing order.
    pub fn members(mask: u32) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| mask >> i & 1 == 1)
    }

    pub fn len(mask: u32) -> usize {
        mask.count_ones() as usize
    }

    pub fn is_subset(a: u32, b: u32) -> bool {
        a & !b == 0
    }

    pub fn full(k: usize) -> u32 {
        if k >= 32 {
            u32::MAX
        } else {
            (1u32 << k) - 1
        }
    }

    /// All subsets of `mask` (including empty and `mask` itself), ascending.
    pub fn subsets_of(mask: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(1 << mask.count_ones());
        let mut s = 0u32;
        loop {
            out.push(s);
            if s == mask {
                break;
            }
            s = (s.wrapping_sub(mask)) & mask;
        }
        out
    }

    /// One-based rendering, e.g. `{1,3}`.
    pub fn show(mask: u32) -> String {
        let items: Vec<String> = members(mask).map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", items.join(","))
    }
}

/// Nonnegative price or `+inf`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtPrice {
    Finite(Rat),
    Infinite,
}

impl ExtPrice {
    pub fn zero() -> Self {
        ExtPrice::Finite(Rat::zero())
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtPrice::Finite(r) => Some(r),
            ExtPrice::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtPrice::Finite(_))
    }

    pub fn add(&self, other: &ExtPrice) -> ExtPrice {
        match (self, other) {
            (ExtPrice::Finite(a), ExtPrice::Finite(b)) => ExtPrice::Finite(a + b),
            _ => ExtPrice::Infinite,
        }
    }
}

impl From<Rat> for ExtPrice {
    fn from(r: Rat) -> Self {
        ExtPrice::Finite(r)
    }
}

impl PartialOrd for ExtPrice {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtPrice {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtPrice::Finite(a), ExtPrice::Finite(b)) => a.cmp(b),
            (ExtPrice::Finite(_), ExtPrice::Infinite) => Ordering::Less,
            (ExtPrice::Infinite, ExtPrice::Finite(_)) => Ordering::Greater,
            (ExtPrice::Infinite, ExtPrice::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtPrice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtPrice::Finite(r) => write!(f, "{r}"),
            ExtPrice::Infinite => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtPrice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl serde::Serialize for ExtPrice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_ext(s: &str) -> Option<ExtPrice> {
    if s == "inf" {
        Some(ExtPrice::Infinite)
    } else {
        s.parse().ok().map(ExtPrice::Finite)
    }
}

/// A point of `R_+^k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(pub Vec<Rat>);

impl Valuation {
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        for (i, c) in coords.iter().enumerate() {
            if c.is_negative() {
                return Err(Error::Negative { path: format!("x[{i}]"), value: c.clone() });
            }
        }
        Ok(Valuation(coords))
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Valuation::new(coords.iter().map(|&c| Rat::from_int(c)).collect()).expect("nonnegative")
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    /// `x(A) = sum of x_i over i in A`.
    pub fn value_of(&self, mask: u32) -> Rat {
        subset::members(mask).filter(|&i| i < self.0.len()).map(|i| &self.0[i]).sum()
    }

    pub fn le(&self, other: &Valuation) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn max_coord(&self) -> Rat {
        self.0.iter().cloned().max().unwrap_or_else(Rat::zero)
    }

    pub fn total(&self) -> Rat {
        self.0.iter().sum()
    }

    pub fn is_diagonal(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Goods with strictly positive value.
    pub fn support(&self) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_positive())
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn join(&self, other: &Valuation) -> Valuation {
        Valuation(self.0.iter().zip(&other.0).map(|(a, b)| a.clone().max(b.clone())).collect())
    }

    pub fn meet(&self, other: &Valuation) -> Valuation {
        Valuation(self.0.iter().zip(&other.0).map(|(a, b)| a.clone().min(b.clone())).collect())
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A point of `[0,1]^k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation(pub Vec<Rat>);

impl Allocation {
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        for (i, c) in coords.iter().enumerate() {
            if c.is_negative() || *c > Rat::one() {
                return Err(Error::schema(format!("q[{i}]"), format!("{c} outside [0,1]")));
            }
        }
        Ok(Allocation(coords))
    }

    pub fn zero(k: usize) -> Self {
        Allocation(vec![Rat::zero(); k])
    }

    pub fn from_mask(k: usize, mask: u32) -> Self {
        Allocation((0..k).map(|i| if mask >> i & 1 == 1 { Rat::one() } else { Rat::zero() }).collect())
    }

    /// The subset this allocation represents, if every coordinate is 0 or 1.
    pub fn as_mask(&self) -> Option<u32> {
        let mut mask = 0u32;
        for (i, c) in self.0.iter().enumerate() {
            if *c == Rat::one() {
                mask |= 1 << i;
            } else if !c.is_zero() {
                return None;
            }
        }
        Some(mask)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, x: &Valuation) -> Rat {
        self.0.iter().zip(&x.0).map(|(g, v)| g * v).sum()
    }

    pub fn le(&self, other: &Allocation) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rat::is_zero)
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(mask) = self.as_mask() {
            return write!(f, "{}", subset::show(mask));
        }
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub x: Valuation,
    pub p: Rat,
}

/// Finitely supported distribution over `R_+^k` with exact probabilities.
/// Zero-probability atoms are allowed; they constrain mechanisms without
/// contributing revenue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationDist {
    k: usize,
    atoms: Vec<Atom>,
}

impl ValuationDist {
    pub fn new(k: usize, atoms: Vec<Atom>) -> Result<Self> {
        if k == 0 {
            return Err(Error::schema("k", "must be at least 1"));
        }
        if atoms.is_empty() {
            return Err(Error::schema("atoms", "must be nonempty"));
        }
        let mut seen = std::collections::HashSet::new();
        let mut total = Rat::zero();
        for (j, a) in atoms.iter().enumerate() {
            if a.x.k() != k {
                return Err(Error::schema(
                    format!("atoms[{j}].x"),
                    format!("expected {k} coordinates, found {}", a.x.k()),
                ));
            }
            for (i, c) in a.x.0.iter().enumerate() {
                if c.is_negative() {
                    return Err(Error::Negative { path: format!("atoms[{j}].x[{i}]"), value: c.clone() });
                }
            }
            if a.p.is_negative() {
                return Err(Error::Negative { path: format!("atoms[{j}].p"), value: a.p.clone() });
            }
            if !seen.insert(a.x.clone()) {
                return Err(Error::DuplicateAtom { path: format!("atoms[{j}]") });
            }
            total += &a.p;
        }
        if total != Rat::one() {
            return Err(Error::ProbabilitySum(total));
        }
        Ok(ValuationDist { k, atoms })
    }

    /// Builds a distribution from possibly repeated points, merging equal
    /// valuations by summing their probabilities.
    pub fn merged(k: usize, points: impl IntoIterator<Item = (Valuation, Rat)>) -> Result<Self> {
        let mut order: Vec<Valuation> = Vec::new();
        let mut mass: BTreeMap<Valuation, Rat> = BTreeMap::new();
        for (x, p) in points {
            match mass.get_mut(&x) {
                Some(m) => *m += p,
                None => {
                    order.push(x.clone());
                    mass.insert(x, p);
                }
            }
        }
        let atoms = order
            .into_iter()
            .map(|x| {
                let p = mass[&x].clone();
                Atom { x, p }
            })
            .collect();
        ValuationDist::new(k, atoms)
    }

    pub fn point_mass(x: Valuation) -> Self {
        let k = x.k();
        ValuationDist::new(k, vec![Atom { x, p: Rat::one() }]).expect("valid point mass")
    }

    /// Uniform distribution over distinct points.
    pub fn uniform(points: Vec<Valuation>) -> Result<Self> {
        let k = points.first().map(Valuation::k).unwrap_or(0);
        let p = Rat::new(1, points.len() as i64);
        ValuationDist::new(k, points.into_iter().map(|x| Atom { x, p: p.clone() }).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn points(&self) -> Vec<Valuation> {
        self.atoms.iter().map(|a| a.x.clone()).collect()
    }

    /// Adds zero-probability atoms at the given points, skipping any point
    /// already in the support.
    pub fn with_zero_atoms(&self, extra: impl IntoIterator<Item = Valuation>) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        for x in extra {
            if x.k() != self.k {
                return Err(Error::DimensionMismatch { expected: self.k, found: x.k() });
            }
            if !atoms.iter().any(|a| a.x == x) {
                atoms.push(Atom { x, p: Rat::zero() });
            }
        }
        ValuationDist::new(self.k, atoms)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "atoms": self.atoms.iter().map(|a| json!({
                "x": a.x.0.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "p": a.p.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MenuEntry {
    pub alloc: Allocation,
    pub price: Rat,
}

/// A finite menu. Always contains the entry (zero allocation, zero price).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Menu {
    k: usize,
    entries: Vec<MenuEntry>,
}

impl Menu {
    /// Validates entries and inserts the zero entry at the front if absent.
    pub fn new(k: usize, entries: Vec<MenuEntry>) -> Result<Self> {
        if k == 0 {
            return Err(Error::schema("k", "must be at least 1"));
        }
        let mut seen = std::collections::HashSet::new();
        let mut has_zero = false;
        for (j, e) in entries.iter().enumerate() {
            if e.alloc.k() != k {
                return Err(Error::schema(
                    format!("entries[{j}].q"),
                    format!("expected {k} coordinates, found {}", e.alloc.k()),
                ));
            }
            for (i, c) in e.alloc.0.iter().enumerate() {
                if c.is_negative() || *c > Rat::one() {
                    return Err(Error::schema(format!("entries[{j}].q[{i}]"), format!("{c} outside [0,1]")));
                }
            }
            if e.price.is_negative() {
                return Err(Error::Negative { path: format!("entries[{j}].s"), value: e.price.clone() });
            }
            if !seen.insert(e.alloc.clone()) {
                return Err(Error::DuplicateAtom { path: format!("entries[{j}]") });
            }
            if e.alloc.is_zero() {
                if !e.price.is_zero() {
                    return Err(Error::schema(format!("entries[{j}].s"), "zero allocation must have zero price"));
                }
                has_zero = true;
            }
        }
        let mut entries = entries;
        if !has_zero {
            entries.insert(0, MenuEntry { alloc: Allocation::zero(k), price: Rat::zero() });
        }
        Ok(Menu { k, entries })
    }

    /// Deterministic menu from `(subset, price)` pairs.
    pub fn deterministic(k: usize, items: &[(u32, Rat)]) -> Result<Self> {
        Menu::new(
            k,
            items
                .iter()
                .map(|(m, p)| MenuEntry { alloc: Allocation::from_mask(k, *m), price: p.clone() })
                .collect(),
        )
    }

    /// The menu offering every finite-priced subset at its price.
    pub fn from_det_pricing(p: &DetPricing) -> Self {
        let items: Vec<(u32, Rat)> = (0..p.num_sets())
            .filter_map(|m| p.get(m).finite().map(|r| (m, r.clone())))
            .collect();
        Menu::deterministic(p.k(), &items).expect("det pricing yields a valid menu")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[MenuEntry] {
        &self.entries
    }

    pub fn is_deterministic(&self) -> bool {
        self.entries.iter().all(|e| e.alloc.as_mask().is_some())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "entries": self.entries.iter().map(|e| json!({
                "q": e.alloc.0.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "s": e.price.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Price for every subset of `K`, with `p(empty) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetPricing {
    k: usize,
    prices: Vec<ExtPrice>,
}

impl DetPricing {
    pub fn new(k: usize, prices: Vec<ExtPrice>) -> Result<Self> {
        if k == 0 || k > MAX_GOODS {
            return Err(Error::schema("k", format!("must be in 1..={MAX_GOODS}")));
        }
        if prices.len() != 1 << k {
            return Err(Error::schema("prices", format!("expected {} subsets, found {}", 1 << k, prices.len())));
        }
        if prices[0] != ExtPrice::zero() {
            return Err(Error::schema("prices.0", "price of the empty set must be 0"));
        }
        for (m, p) in prices.iter().enumerate() {
            if let ExtPrice::Finite(r) = p {
                if r.is_negative() {
                    return Err(Error::Negative { path: format!("prices.{m}"), value: r.clone() });
                }
            }
        }
        Ok(DetPricing { k, prices })
    }

    pub fn from_finite(k: usize, prices: Vec<Rat>) -> Result<Self> {
        DetPricing::new(k, prices.into_iter().map(ExtPrice::Finite).collect())
    }

    /// Symmetric pricing `A -> p(|A|)` as a set function.
    pub fn from_symmetric(k: usize, levels: &SymPricing) -> Result<Self> {
        if levels.k() != k {
            return Err(Error::DimensionMismatch { expected: k, found: levels.k() });
        }
        DetPricing::new(k, (0..1u32 << k).map(|m| levels.get(subset::len(m)).clone()).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_sets(&self) -> u32 {
        1 << self.k
    }

    pub fn get(&self, mask: u32) -> &ExtPrice {
        &self.prices[mask as usize]
    }

    pub fn prices(&self) -> &[ExtPrice] {
        &self.prices
    }

    pub fn all_finite(&self) -> bool {
        self.prices.iter().all(ExtPrice::is_finite)
    }

    pub fn finite_prices(&self) -> Result<Vec<Rat>> {
        self.prices
            .iter()
            .enumerate()
            .map(|(m, p)| p.finite().cloned().ok_or(Error::InfinitePrice(m as u32)))
            .collect()
    }

    pub fn max_finite(&self) -> Rat {
        self.prices.iter().filter_map(|p| p.finite().cloned()).max().unwrap_or_else(Rat::zero)
    }

    pub fn is_nondecreasing(&self) -> bool {
        (0..self.num_sets()).all(|a| {
            (0..self.k).all(|i| a >> i & 1 == 1 || self.get(a) <= self.get(a | 1 << i))
        })
    }

    pub fn to_json(&self) -> Value {
        // Keys in numeric mask order, which a map keyed by strings would not keep.
        let mut body = String::from("{");
        for (m, p) in self.prices.iter().enumerate() {
            if m > 0 {
                body.push(',');
            }
            body.push_str(&format!("\"{m}\":\"{p}\""));
        }
        body.push('}');
        let prices: Value = serde_json::from_str(&body).expect("well-formed");
        json!({ "k": self.k, "prices": prices })
    }

    /// Compact serialization with masks in numeric order.
    pub fn to_json_string(&self) -> String {
        let mut s = format!("{{\"k\":{},\"prices\":{{", self.k);
        for (m, p) in self.prices.iter().enumerate() {
            if m > 0 {
                s.push(',');
            }
            s.push_str(&format!("\"{m}\":\"{p}\""));
        }
        s.push_str("}}");
        s
    }
}

/// Symmetric pricing `p(0..=k)` by bundle size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPricing {
    levels: Vec<ExtPrice>,
}

impl SymPricing {
    pub fn new(levels: Vec<ExtPrice>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::schema("levels", "need p(0..=k) with k >= 1"));
        }
        if levels[0] != ExtPrice::zero() {
            return Err(Error::schema("levels[0]", "p(0) must be 0"));
        }
        for (m, p) in levels.iter().enumerate() {
            if let ExtPrice::Finite(r) = p {
                if r.is_negative() {
                    return Err(Error::Negative { path: format!("levels[{m}]"), value: r.clone() });
                }
            }
        }
        Ok(SymPricing { levels })
    }

    pub fn from_finite(levels: Vec<Rat>) -> Result<Self> {
        SymPricing::new(levels.into_iter().map(ExtPrice::Finite).collect())
    }

    pub fn k(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn get(&self, m: usize) -> &ExtPrice {
        &self.levels[m]
    }

    pub fn levels(&self) -> &[ExtPrice] {
        &self.levels
    }

    /// Once a level is infinite every larger level is too.
    pub fn is_canonical_tail(&self) -> bool {
        let first_inf = self.levels.iter().position(|p| !p.is_finite()).unwrap_or(self.levels.len());
        self.levels[first_inf..].iter().all(|p| !p.is_finite())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.levels.iter().map(|p| Value::String(p.to_string())).collect())
    }
}

/// Partition of the goods into disjoint nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundlingPartition {
    k: usize,
    blocks: Vec<u32>,
}

impl BundlingPartition {
    pub fn new(k: usize, blocks: Vec<u32>) -> Result<Self> {
        let mut covered = 0u32;
        for &b in &blocks {
            if b == 0 {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if b & !subset::full(k) != 0 {
                return Err(Error::InvalidPartition(format!("block {} outside K", subset::show(b))));
            }
            if b & covered != 0 {
                return Err(Error::InvalidPartition(format!("block {} overlaps", subset::show(b))));
            }
            covered |= b;
        }
        if covered != subset::full(k) {
            return Err(Error::InvalidPartition("blocks do not cover K".into()));
        }
        Ok(BundlingPartition { k, blocks })
    }

    pub fn singletons(k: usize) -> Self {
        BundlingPartition { k, blocks: (0..k).map(|i| 1 << i).collect() }
    }

    pub fn grand(k: usize) -> Self {
        BundlingPartition { k, blocks: vec![subset::full(k)] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    /// Every partition of `{1..k}` (set partitions, restricted growth order).
    pub fn all(k: usize) -> Vec<BundlingPartition> {
        fn rec(i: usize, k: usize, blocks: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == k {
                out.push(blocks.clone());
                return;
            }
            for b in 0..blocks.len() {
                blocks[b] |= 1 << i;
                rec(i + 1, k, blocks, out);
                blocks[b] &= !(1 << i);
            }
            blocks.push(1 << i);
            rec(i + 1, k, blocks, out);
            blocks.pop();
        }
        let mut out = Vec::new();
        rec(0, k, &mut Vec::new(), &mut out);
        out.into_iter().map(|blocks| BundlingPartition { k, blocks }).collect()
    }

    /// Parses `"1,2|3"` style partitions (one-based goods, `|` between blocks).
    pub fn parse(k: usize, s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in s.split('|') {
            let mut mask = 0u32;
            for g in part.split(',') {
                let g: usize = g
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidPartition(format!("bad good {g:?}")))?;
                if g == 0 || g > k {
                    return Err(Error::InvalidPartition(format!("good {g} outside 1..={k}")));
                }
                mask |= 1 << (g - 1);
            }
            blocks.push(mask);
        }
        BundlingPartition::new(k, blocks)
    }
}

/// Top-level JSON instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Dist(ValuationDist),
    Menu(Menu),
    Pricing(DetPricing),
}

impl Instance {
    pub fn to_json_string(&self) -> String {
        match self {
            Instance::Dist(d) => d.to_json().to_string(),
            Instance::Menu(m) => m.to_json().to_string(),
            Instance::Pricing(p) => p.to_json_string(),
        }
    }
}

fn rat_at(v: &Value, path: &str) -> Result<Rat> {
    match v {
        Value::String(s) => s.parse().map_err(|_| Error::schema(path, format!("invalid rational {s:?}"))),
        _ => Err(Error::schema(path, "expected a rational string")),
    }
}

fn rat_vec_at(v: &Value, path: &str, k: usize) -> Result<Vec<Rat>> {
    let arr = v.as_array().ok_or_else(|| Error::schema(path, "expected an array"))?;
    if arr.len() != k {
        return Err(Error::schema(path, format!("expected {k} coordinates, found {}", arr.len())));
    }
    arr.iter().enumerate().map(|(i, c)| rat_at(c, &format!("{path}[{i}]"))).collect()
}

fn k_at(obj: &serde_json::Map<String, Value>) -> Result<usize> {
    let k = obj
        .get("k")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::schema("k", "expected a positive integer"))?;
    if k == 0 || k as usize > MAX_GOODS {
        return Err(Error::schema("k", format!("must be in 1..={MAX_GOODS}")));
    }
    Ok(k as usize)
}

/// Parses one of the three JSON instance schemas, validating it fully.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let v: Value = serde_json::from_str(text)?;
    let obj = v.as_object().ok_or_else(|| Error::schema("$", "expected an object"))?;
    let k = k_at(obj)?;
    if let Some(atoms) = obj.get("atoms") {
        let arr = atoms.as_array().ok_or_else(|| Error::schema("atoms", "expected an array"))?;
        let mut out = Vec::with_capacity(arr.len());
        for (j, a) in arr.iter().enumerate() {
            let path = format!("atoms[{j}]");
            let x = rat_vec_at(a.get("x").unwrap_or(&Value::Null), &format!("{path}.x"), k)?;
            for (i, c) in x.iter().enumerate() {
                if c.is_negative() {
                    return Err(Error::Negative { path: format!("{path}.x[{i}]"), value: c.clone() });
                }
            }
            let p = rat_at(a.get("p").unwrap_or(&Value::Null), &format!("{path}.p"))?;
            out.push(Atom { x: Valuation(x), p });
        }
        return Ok(Instance::Dist(ValuationDist::new(k, out)?));
    }
    if let Some(entries) = obj.get("entries") {
        let arr = entries.as_array().ok_or_else(|| Error::schema("entries", "expected an array"))?;
        let mut out = Vec::with_capacity(arr.len());
        for (j, e) in arr.iter().enumerate() {
            let path = format!("entries[{j}]");
            let q = rat_vec_at(e.get("q").unwrap_or(&Value::Null), &format!("{path}.q"), k)?;
            let s = rat_at(e.get("s").unwrap_or(&Value::Null), &format!("{path}.s"))?;
            out.push(MenuEntry { alloc: Allocation(q), price: s });
        }
        return Ok(Instance::Menu(Menu::new(k, out)?));
    }
    if let Some(prices) = obj.get("prices") {
        let map = prices.as_object().ok_or_else(|| Error::schema("prices", "expected an object"))?;
        let mut slots: Vec<Option<ExtPrice>> = vec![None; 1 << k];
        for (key, val) in map {
            let path = format!("prices.{key}");
            let mask: u32 = key.parse().map_err(|_| Error::schema(&path, "key must be a decimal bitmask"))?;
            if mask as usize >= slots.len() {
                return Err(Error::schema(&path, format!("bitmask outside 2^{k}")));
            }
            let s = val.as_str().ok_or_else(|| Error::schema(&path, "expected a rational string or \"inf\""))?;
            let p = parse_ext(s).ok_or_else(|| Error::schema(&path, format!("invalid price {s:?}")))?;
            slots[mask as usize] = Some(p);
        }
        if slots[0].is_none() {
            slots[0] = Some(ExtPrice::zero());
        }
        let prices = slots
            .into_iter()
            .enumerate()
            .map(|(m, p)| p.ok_or_else(|| Error::schema(format!("prices.{m}"), "missing subset")))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Instance::Pricing(DetPricing::new(k, prices)?));
    }
    Err(Error::schema("$", "expected one of \"atoms\", \"entries\", \"prices\""))
}

pub fn parse_dist(text: &str) -> Result<ValuationDist> {
    match parse_instance(text)? {
        Instance::Dist(d) => Ok(d),
        _ => Err(Error::schema("$", "expected a valuation distribution")),
    }
}

pub fn parse_menu(text: &str) -> Result<Menu> {
    match parse_instance(text)? {
        Instance::Menu(m) => Ok(m),
        _ => Err(Error::schema("$", "expected a menu")),
    }
}

pub fn parse_pricing(text: &str) -> Result<DetPricing> {
    match parse_instance(text)? {
        Instance::Pricing(p) => Ok(p),
        _ => Err(Error::schema("$", "expected a deterministic pricing")),
    }
}

/// Ordered pairs `(i, j)`, `i != j`, with `points[i] <= points[j]`
/// coordinatewise, in lexicographic index order.
pub fn dominance_pairs(points: &[Valuation]) -> Result<Vec<(usize, usize)>> {
    let k = points.first().map(Valuation::k).unwrap_or(0);
    for p in points {
        if p.k() != k {
            return Err(Error::DimensionMismatch { expected: k, found: p.k() });
        }
    }
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            if points[i] == points[j] {
                return Err(Error::DuplicateAtom { path: format!("points[{j}]") });
            }
            if points[i].le(&points[j]) {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginalMode {
    /// Zero-based good index.
    Good(usize),
    Sum,
    Max,
    /// Sum over the goods of a bundle.
    Bundle(u32),
}

/// One-good pushforward of `dist`, with equal values merged and atoms sorted
/// by value.
pub fn marginal(dist: &ValuationDist, mode: MarginalMode) -> Result<ValuationDist> {
    let k = dist.k();
    let project = |x: &Valuation| -> Result<Rat> {
        Ok(match mode {
            MarginalMode::Good(i) if i < k => x.0[i].clone(),
            MarginalMode::Good(i) => return Err(Error::DimensionMismatch { expected: k, found: i + 1 }),
            MarginalMode::Sum => x.total(),
            MarginalMode::Max => x.max_coord(),
            MarginalMode::Bundle(mask) => x.value_of(mask),
        })
    };
    let mut mass: BTreeMap<Rat, Rat> = BTreeMap::new();
    for a in dist.atoms() {
        *mass.entry(project(&a.x)?).or_insert_with(Rat::zero) += &a.p;
    }
    ValuationDist::new(1, mass.into_iter().map(|(v, p)| Atom { x: Valuation(vec![v]), p }).collect())
}

/// Appends, at probability zero, the diagonal point `(max_i x_i) e` for each
/// non-diagonal support atom, skipping points already present.
pub fn diagonal_augment(dist: &ValuationDist) -> ValuationDist {
    let k = dist.k();
    let extra: Vec<Valuation> = dist
        .atoms()
        .iter()
        .filter(|a| !a.x.is_diagonal())
        .map(|a| Valuation(vec![a.x.max_coord(); k]))
        .collect();
    dist.with_zero_atoms(extra).expect("diagonal points share the dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn v(c: &[(i64, i64)]) -> Valuation {
        Valuation(c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn parses_two_atom_distribution() {
        let d = parse_dist(r#"{"k":2,"atoms":[{"x":["1","23/10"],"p":"1/2"},{"x":["2","27/10"],"p":"1/2"}]}"#)
            .unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.atoms()[0].x, v(&[(1, 1), (23, 10)]));
    }

    #[test]
    fn parses_point_mass_at_zero() {
        let d = parse_dist(r#"{"k":1,"atoms":[{"x":["0"],"p":"1"}]}"#).unwrap();
        assert_eq!(d.atoms(), &[Atom { x: v(&[(0, 1)]), p: Rat::one() }]);
    }

    #[test]
    fn rejects_bad_probability_sum() {
        let e = parse_dist(r#"{"k":1,"atoms":[{"x":["0"],"p":"1/2"},{"x":["1"],"p":"1/3"}]}"#).unwrap_err();
        assert_eq!(e.to_string(), "probabilities sum to 5/6");
    }

    #[test]
    fn path_qualified_errors() {
        let e = parse_dist(r#"{"k":2,"atoms":[{"x":["1","-1"],"p":"1"}]}"#).unwrap_err();
        assert!(e.to_string().starts_with("atoms[0].x[1]"), "{e}");
        let e = parse_dist(r#"{"k":1,"atoms":[{"x":["1"],"p":"1/2"},{"x":["1"],"p":"1/2"}]}"#).unwrap_err();
        assert_eq!(e.to_string(), "atoms[1]: duplicate atom");
        let e = parse_dist(r#"{"k":2,"atoms":[{"x":["1"],"p":"1"}]}"#).unwrap_err();
        assert!(e.to_string().starts_with("atoms[0].x"), "{e}");
        let e = parse_pricing(r#"{"k":2,"prices":{"1":"1","2":"x","3":"inf"}}"#).unwrap_err();
        assert!(e.to_string().starts_with("prices.2"), "{e}");
        let e = parse_pricing(r#"{"k":2,"prices":{"1":"1","3":"inf"}}"#).unwrap_err();
        assert!(e.to_string().starts_with("prices.2"), "{e}");
    }

    #[test]
    fn pricing_json_keeps_numeric_mask_order() {
        let text = r#"{"k":4,"prices":{"0":"0","1":"1","2":"1","3":"2","4":"1","5":"2","6":"2","7":"3","8":"1","9":"2","10":"2","11":"3","12":"2","13":"3","14":"3","15":"inf"}}"#;
        let p = parse_pricing(text).unwrap();
        assert_eq!(p.to_json_string(), text);
        assert_eq!(parse_pricing(&p.to_json().to_string()).unwrap(), p);
    }

    #[test]
    fn menu_gets_zero_entry() {
        let m = parse_menu(r#"{"k":2,"entries":[{"q":["1","0"],"s":"1"}]}"#).unwrap();
        assert_eq!(m.entries().len(), 2);
        assert!(m.entries()[0].alloc.is_zero());
        assert!(parse_menu(r#"{"k":1,"entries":[{"q":["0"],"s":"1"}]}"#).is_err());
        assert!(parse_menu(r#"{"k":1,"entries":[{"q":["3/2"],"s":"1"}]}"#).is_err());
    }

    #[test]
    fn dominance_examples() {
        let a = v(&[(1, 1), (23, 10)]);
        assert_eq!(dominance_pairs(&[a.clone(), v(&[(2, 1), (27, 10)])]).unwrap(), vec![(0, 1)]);
        assert!(dominance_pairs(&[a.clone(), v(&[(2, 1), (17, 10)])]).unwrap().is_empty());
        let chain = [Valuation::from_ints(&[0, 0]), Valuation::from_ints(&[1, 1]), Valuation::from_ints(&[2, 2])];
        assert_eq!(dominance_pairs(&chain).unwrap(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(dominance_pairs(&[Valuation::from_ints(&[0, 0]), Valuation::from_ints(&[0, 0])]).is_err());
        assert!(dominance_pairs(&[Valuation::from_ints(&[0, 0]), Valuation::from_ints(&[0])]).is_err());
    }

    #[test]
    fn marginals_of_unit_vectors() {
        let d = ValuationDist::uniform(vec![Valuation::from_ints(&[1, 0]), Valuation::from_ints(&[0, 1])]).unwrap();
        let one = ValuationDist::point_mass(Valuation::from_ints(&[1]));
        assert_eq!(marginal(&d, MarginalMode::Max).unwrap(), one);
        assert_eq!(marginal(&d, MarginalMode::Sum).unwrap(), one);
        let g = marginal(&d, MarginalMode::Good(0)).unwrap();
        assert_eq!(g.len(), 2);
        let d1 = ValuationDist::uniform(vec![Valuation::from_ints(&[1]), Valuation::from_ints(&[3])]).unwrap();
        assert_eq!(marginal(&d1, MarginalMode::Good(0)).unwrap(), d1);
    }

    #[test]
    fn diagonal_augment_examples() {
        let d = ValuationDist::point_mass(v(&[(1, 1), (23, 10)]));
        let a = diagonal_augment(&d);
        assert_eq!(a.len(), 2);
        assert_eq!(a.atoms()[1], Atom { x: v(&[(23, 10), (23, 10)]), p: Rat::zero() });

        let diag = ValuationDist::point_mass(Valuation::from_ints(&[2, 2]));
        assert_eq!(diagonal_augment(&diag), diag);

        let u = ValuationDist::uniform(vec![Valuation::from_ints(&[1, 0]), Valuation::from_ints(&[0, 1])]).unwrap();
        let a = diagonal_augment(&u);
        assert_eq!(a.len(), 3);
        assert_eq!(a.atoms()[2].x, Valuation::from_ints(&[1, 1]));
    }

    #[test]
    fn partitions_enumerate_bell_numbers() {
        assert_eq!(BundlingPartition::all(1).len(), 1);
        assert_eq!(BundlingPartition::all(3).len(), 5);
        assert_eq!(BundlingPartition::all(4).len(), 15);
        assert!(BundlingPartition::new(3, vec![0b011, 0b110]).is_err());
        assert!(BundlingPartition::new(3, vec![0b011]).is_err());
        assert_eq!(BundlingPartition::parse(3, "1|2,3").unwrap().blocks(), &[0b001, 0b110]);
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(subset::subsets_of(0b101), vec![0, 1, 4, 5]);
        assert_eq!(subset::subsets_of(0), vec![0]);
    }
}
