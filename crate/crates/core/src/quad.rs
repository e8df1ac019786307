//! Quadratic mechanisms: payoff `b(x) = ½ x̃ᵀ A x̃ + Σ [x_i - v_i]_+` with
//! `x̃ = x ∧ v`, whose allocation is `(A x̃)_i` below the truncation and `1`
//! above it.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{Allocation, Valuation};
use crate::rat::Rat;

pub type Matrix = Vec<Vec<Rat>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSpec {
    a: Matrix,
    a_inv: Matrix,
    v: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadOutcome {
    pub alloc: Allocation,
    pub payment: Rat,
    pub payoff: Rat,
}

/// An off-diagonal entry, one-based `(i, j)` with `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Screens {
    /// Off-diagonal entries of `A` that are negative.
    pub amon_offending: Vec<Entry>,
    /// Off-diagonal entries of `A^-1` that are positive.
    pub subm_offending: Vec<Entry>,
}

impl Screens {
    pub fn amon_necessary(&self) -> bool {
        self.amon_offending.is_empty()
    }

    pub fn subm_necessary(&self) -> bool {
        self.subm_offending.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let entries =
            |v: &[Entry]| v.iter().map(|e| json!({ "i": e.i, "j": e.j, "value": e.value.to_string() })).collect::<Vec<_>>();
        json!({
            "amon_necessary": { "holds": self.amon_necessary(), "offending": entries(&self.amon_offending) },
            "subm_necessary": { "holds": self.subm_necessary(), "offending": entries(&self.subm_offending) },
        })
    }
}

fn check_square(a: &Matrix) -> Result<usize> {
    let n = a.len();
    for row in a {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    Ok(n)
}

/// Exact inverse of a symmetric positive definite matrix. Positive
/// definiteness is certified by the leading principal minors, which are the
/// running products of the elimination pivots.
pub fn invert_pd(a: &Matrix) -> Result<Matrix> {
    let n = check_square(a)?;
    for i in 0..n {
        for j in i + 1..n {
            if a[i][j] != a[j][i] {
                return Err(Error::NotSymmetric(i + 1, j + 1));
            }
        }
    }
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let mut minor = Rat::one();
    for c in 0..n {
        // No row swaps: the pivot is the ratio of consecutive leading minors.
        minor = &minor * &m[c][c];
        if !minor.is_positive() {
            return Err(Error::NotPositiveDefinite(c + 1, minor));
        }
        let inv = m[c][c].recip();
        for v in m[c].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec(a: &Matrix, x: &[Rat]) -> Vec<Rat> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(p, brow)| p * &brow[j]).sum()).collect())
        .collect()
}

/// `½ xᵀ M x`.
pub fn half_form(m: &Matrix, x: &[Rat]) -> Rat {
    let mx = mat_vec(m, x);
    x.iter().zip(&mx).map(|(p, q)| p * q).sum::<Rat>() / Rat::from_int(2)
}

/// Off-diagonal sign screens: allocation monotonicity needs `A >= 0` off the
/// diagonal, submodular pricing needs `A^-1 <= 0` off the diagonal.
pub fn screens(a: &Matrix, a_inv: &Matrix) -> Screens {
    let n = a.len();
    let pick = |m: &Matrix, bad: &dyn Fn(&Rat) -> bool| {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if bad(&m[i][j]) {
                    out.push(Entry { i: i + 1, j: j + 1, value: m[i][j].clone() });
                }
            }
        }
        out
    };
    Screens { amon_offending: pick(a, &|v| v.is_negative()), subm_offending: pick(a_inv, &|v| v.is_positive()) }
}

impl QuadSpec {
    pub fn new(a: Matrix, v: Vec<Rat>) -> Result<Self> {
        let n = check_square(&a)?;
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        let a_inv = invert_pd(&a)?;
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_positive() {
                return Err(Error::schema(format!("v[{i}]"), "must be positive"));
            }
        }
        for (i, s) in mat_vec(&a, &v).iter().enumerate() {
            if *s > Rat::one() {
                return Err(Error::schema(format!("v[{i}]"), format!("(A v)_{} = {s} exceeds 1", i + 1)));
            }
        }
        Ok(QuadSpec { a, a_inv, v })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let val: Value = serde_json::from_str(text)?;
        let rat = |x: &Value, path: String| -> Result<Rat> {
            x.as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::schema(path, "expected a rational string"))
        };
        let rows = val.get("A").and_then(Value::as_array).ok_or_else(|| Error::schema("A", "expected a matrix"))?;
        let mut a = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| Error::schema(format!("A[{i}]"), "expected an array"))?;
            a.push(row.iter().enumerate().map(|(j, x)| rat(x, format!("A[{i}][{j}]"))).collect::<Result<Vec<_>>>()?);
        }
        let vs = val.get("v").and_then(Value::as_array).ok_or_else(|| Error::schema("v", "expected an array"))?;
        let v = vs.iter().enumerate().map(|(i, x)| rat(x, format!("v[{i}]"))).collect::<Result<Vec<_>>>()?;
        QuadSpec::new(a, v)
    }

    /// The allocation-monotonic but non-submodular three-good example,
    /// truncated at `v = (1/15, 1/15, 1/15)`.
    pub fn three_good_example() -> Self {
        let r = |rows: [[i64; 3]; 3]| rows.iter().map(|row| row.iter().map(|&x| Rat::from_int(x)).collect()).collect();
        QuadSpec::new(r([[6, 3, 1], [3, 6, 3], [1, 3, 6]]), vec![Rat::new(1, 15); 3]).expect("valid example")
    }

    pub fn k(&self) -> usize {
        self.v.len()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn a_inv(&self) -> &Matrix {
        &self.a_inv
    }

    pub fn v(&self) -> &[Rat] {
        &self.v
    }

    pub fn screens(&self) -> Screens {
        screens(&self.a, &self.a_inv)
    }

    pub fn truncate(&self, x: &Valuation) -> Vec<Rat> {
        x.0.iter().zip(&self.v).map(|(a, b)| a.clone().min(b.clone())).collect()
    }

    pub fn payoff(&self, x: &Valuation) -> Result<Rat> {
        self.eval(x).map(|o| o.payoff)
    }

    pub fn eval(&self, x: &Valuation) -> Result<QuadOutcome> {
        if x.k() != self.k() {
            return Err(Error::DimensionMismatch { expected: self.k(), found: x.k() });
        }
        let xt = self.truncate(x);
        let ax = mat_vec(&self.a, &xt);
        let q: Vec<Rat> =
            (0..self.k()).map(|i| if x.0[i] < self.v[i] { ax[i].clone() } else { Rat::one() }).collect();
        let excess: Rat = x.0.iter().zip(&self.v).filter(|(a, b)| a > b).map(|(a, b)| a - b).sum();
        let payoff = half_form(&self.a, &xt) + excess;
        let alloc = Allocation(q);
        let payment = alloc.dot(x) - &payoff;
        Ok(QuadOutcome { alloc, payment, payoff })
    }

    /// Price of allocation `g` in the image of the truncation box:
    /// `½ gᵀ A^-1 g`.
    pub fn price(&self, g: &[Rat]) -> Rat {
        half_form(&self.a_inv, g)
    }

    /// Whether `A^-1 g` lies in `[0, v]`.
    pub fn in_allocation_range(&self, g: &[Rat]) -> bool {
        mat_vec(&self.a_inv, g).iter().zip(&self.v).all(|(y, v)| !y.is_negative() && y <= v)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "A": self.a.iter().map(|row| row.iter().map(|r| r.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "v": self.v.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Points of `prod_i [0, 2 v_i]` with step `v_i / divisions`, as index
/// tuples mapped to valuations.
struct BoxGrid {
    k: usize,
    n: usize,
    step: Vec<Rat>,
}

impl BoxGrid {
    fn new(spec: &QuadSpec, divisions: i64) -> Self {
        BoxGrid {
            k: spec.k(),
            n: 2 * divisions as usize + 1,
            step: spec.v.iter().map(|v| v / &Rat::from_int(divisions)).collect(),
        }
    }

    fn len(&self) -> usize {
        self.n.pow(self.k as u32)
    }

    fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.k];
        for g in (0..self.k).rev() {
            c[g] = idx % self.n;
            idx /= self.n;
        }
        c
    }

    fn index(&self, c: &[usize]) -> usize {
        c.iter().fold(0, |acc, &x| acc * self.n + x)
    }

    fn point(&self, c: &[usize]) -> Valuation {
        Valuation(c.iter().zip(&self.step).map(|(&i, s)| s * &Rat::from(i)).collect())
    }
}

/// Checks that allocations never decrease between grid neighbors on
/// `[0, 2v]` with step `v / divisions`; returns a violating pair.
pub fn grid_allocation_monotone(spec: &QuadSpec, divisions: i64) -> Result<Option<(Valuation, Valuation)>> {
    let grid = BoxGrid::new(spec, divisions);
    let allocs: Vec<Allocation> =
        (0..grid.len()).map(|i| spec.eval(&grid.point(&grid.coords(i))).map(|o| o.alloc)).collect::<Result<_>>()?;
    for i in 0..grid.len() {
        let c = grid.coords(i);
        for g in 0..grid.k {
            if c[g] + 1 < grid.n {
                let mut d = c.clone();
                d[g] += 1;
                let j = grid.index(&d);
                if !allocs[i].le(&allocs[j]) {
                    return Ok(Some((grid.point(&c), grid.point(&d))));
                }
            }
        }
    }
    Ok(None)
}

/// Checks increasing differences of the payoff along every pair of axis
/// steps: `b(x + d1 + d2) - b(x + d1) >= b(x + d2) - b(x)`. Returns the base
/// point and axes of a violation.
pub fn grid_ultramodular(spec: &QuadSpec, divisions: i64) -> Result<Option<(Valuation, usize, usize)>> {
    let grid = BoxGrid::new(spec, divisions);
    let b: Vec<Rat> = (0..grid.len()).map(|i| spec.payoff(&grid.point(&grid.coords(i)))).collect::<Result<_>>()?;
    for i in 0..grid.len() {
        let c = grid.coords(i);
        for g in 0..grid.k {
            for h in 0..grid.k {
                let mut c1 = c.clone();
                c1[g] += 1;
                let mut c2 = c.clone();
                c2[h] += 1;
                let mut c12 = c1.clone();
                c12[h] += 1;
                if c12.iter().any(|&x| x >= grid.n) {
                    continue;
                }
                let lhs = &b[grid.index(&c12)] - &b[grid.index(&c1)];
                let rhs = &b[grid.index(&c2)] - &b[i];
                if lhs < rhs {
                    return Ok(Some((grid.point(&c), g, h)));
                }
            }
        }
    }
    Ok(None)
}

/// A pair `g, h` in the allocation range with
/// `p(g) + p(h) < p(g ∨ h) + p(g ∧ h)`, searched over the corners of a cube
/// of side `delta` around `A (v/2)`.
pub fn pricing_submodularity_violation(spec: &QuadSpec, delta: &Rat) -> Option<(Vec<Rat>, Vec<Rat>)> {
    let k = spec.k();
    let half: Vec<Rat> = spec.v.iter().map(|v| v / &Rat::from_int(2)).collect();
    let center = mat_vec(&spec.a, &half);
    let corners: Vec<Vec<Rat>> = (0..1u32 << k)
        .map(|m| (0..k).map(|i| if m >> i & 1 == 1 { &center[i] + delta } else { center[i].clone() }).collect())
        .filter(|g: &Vec<Rat>| spec.in_allocation_range(g))
        .collect();
    for g in &corners {
        for h in &corners {
            let join: Vec<Rat> = g.iter().zip(h).map(|(a, b)| a.clone().max(b.clone())).collect();
            let meet: Vec<Rat> = g.iter().zip(h).map(|(a, b)| a.clone().min(b.clone())).collect();
            if !spec.in_allocation_range(&join) || !spec.in_allocation_range(&meet) {
                continue;
            }
            if spec.price(g) + spec.price(h) < spec.price(&join) + spec.price(&meet) {
                return Some((g.clone(), h.clone()));
            }
        }
    }
    None
}

/// The two-good payoff `b(x) = [f(x̃)]_+ + [x_1 - 1]_+ + [x_2 - 1]_+` with
/// `f(x) = (x_1² + x_2² + x_1 + x_2 - x_1 x_2 - 2) / 3` and `x̃ = x ∧ (1, 1)`:
/// separably superadditive but not supermodular.
pub fn two_good_payoff(x1: &Rat, x2: &Rat) -> Rat {
    let one = Rat::one();
    let (t1, t2) = (x1.clone().min(one.clone()), x2.clone().min(one.clone()));
    let f = (&t1 * &t1 + &t2 * &t2 + &t1 + &t2 - &t1 * &t2 - Rat::from_int(2)) / Rat::from_int(3);
    let pos = |r: Rat| if r.is_positive() { r } else { Rat::zero() };
    pos(f) + pos(x1 - &one) + pos(x2 - &one)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwoGoodChecks {
    pub nondecreasing: bool,
    pub nonexpansive: bool,
    pub midpoint_convex: bool,
    pub separably_superadditive: bool,
    /// A base point where the mixed second difference is negative.
    pub supermodularity_violation: Option<(Rat, Rat)>,
}

/// Grid checks of [`two_good_payoff`] on `[0, 2]²` with step `1/divisions`.
pub fn two_good_checks(divisions: i64) -> TwoGoodChecks {
    let n = 2 * divisions as usize + 1;
    let h = Rat::new(1, divisions);
    let coord = |i: usize| &h * &Rat::from(i);
    let b: Vec<Vec<Rat>> = (0..n).map(|i| (0..n).map(|j| two_good_payoff(&coord(i), &coord(j))).collect()).collect();
    let mut out = TwoGoodChecks {
        nondecreasing: true,
        nonexpansive: true,
        midpoint_convex: true,
        separably_superadditive: true,
        supermodularity_violation: None,
    };
    let two = Rat::from_int(2);
    for i in 0..n {
        for j in 0..n {
            for (di, dj) in [(1usize, 0usize), (0, 1)] {
                if i + di < n && j + dj < n {
                    let d = &b[i + di][j + dj] - &b[i][j];
                    out.nondecreasing &= !d.is_negative();
                    out.nonexpansive &= d <= h;
                }
            }
            for (di, dj) in [(1i64, 0i64), (0, 1), (1, 1), (1, -1)] {
                let (i0, j0, i1, j1) = (i as i64 - di, j as i64 - dj, i as i64 + di, j as i64 + dj);
                let inside = |a: i64| a >= 0 && a < n as i64;
                if inside(i0) && inside(j0) && inside(i1) && inside(j1) {
                    let s = &b[i0 as usize][j0 as usize] + &b[i1 as usize][j1 as usize];
                    out.midpoint_convex &= s >= &two * &b[i][j];
                }
            }
            out.separably_superadditive &= b[i][j] >= &b[i][0] + &b[0][j];
            if out.supermodularity_violation.is_none() && i + 1 < n && j + 1 < n {
                let mixed = &b[i + 1][j + 1] - &b[i + 1][j] - &b[i][j + 1] + &b[i][j];
                if mixed.is_negative() {
                    out.supermodularity_violation = Some((coord(i), coord(j)));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| Rat::from_int(x)).collect()).collect()
    }

    fn scaled(rows: &[&[i64]], den: i64) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| rat(x, den)).collect()).collect()
    }

    #[test]
    fn inverses() {
        let a = m(&[&[6, 3, 1], &[3, 6, 3], &[1, 3, 6]]);
        assert_eq!(invert_pd(&a).unwrap(), scaled(&[&[27, -15, 3], &[-15, 35, -15], &[3, -15, 27]], 120));
        let id = m(&[&[1, 0], &[0, 1]]);
        assert_eq!(invert_pd(&id).unwrap(), id);
        assert_eq!(invert_pd(&m(&[&[2, 1], &[1, 2]])).unwrap(), scaled(&[&[2, -1], &[-1, 2]], 3));
        assert!(matches!(invert_pd(&m(&[&[1, 2], &[0, 1]])), Err(Error::NotSymmetric(1, 2))));
        assert!(matches!(invert_pd(&m(&[&[1, 2], &[2, 1]])), Err(Error::NotPositiveDefinite(2, _))));
    }

    #[test]
    fn evaluation() {
        let s = QuadSpec::three_good_example();
        let zero = s.eval(&Valuation::from_ints(&[0, 0, 0])).unwrap();
        assert!(zero.alloc.is_zero() && zero.payment.is_zero() && zero.payoff.is_zero());

        let x = Valuation(vec![rat(1, 30), rat(1, 60), rat(1, 20)]);
        let o = s.eval(&x).unwrap();
        assert_eq!(o.alloc.0, mat_vec(s.a(), &x.0));
        assert_eq!(o.payoff, half_form(s.a(), &x.0));
        assert_eq!(o.payment, half_form(s.a(), &x.0));

        let v = Valuation(s.v().to_vec());
        let o = s.eval(&v).unwrap();
        assert_eq!(o.alloc.0, vec![Rat::one(); 3]);
        assert_eq!(o.payoff, half_form(s.a(), s.v()));
    }

    #[test]
    fn screens_of_examples() {
        let s = QuadSpec::three_good_example().screens();
        assert!(s.amon_necessary());
        assert_eq!(s.subm_offending, vec![Entry { i: 1, j: 3, value: rat(3, 120) }]);
        let d = m(&[&[2, 0], &[0, 3]]);
        let sc = screens(&d, &invert_pd(&d).unwrap());
        assert!(sc.amon_necessary() && sc.subm_necessary());
        let neg = m(&[&[2, -1], &[-1, 2]]);
        let sc = screens(&neg, &invert_pd(&neg).unwrap());
        assert_eq!(sc.amon_offending, vec![Entry { i: 1, j: 2, value: rat(-1, 1) }]);
    }

    #[test]
    fn parse_rejects_bad_specs() {
        assert!(QuadSpec::parse(r#"{"A":[["6","3"],["3","6"]],"v":["1/9","1/9"]}"#).is_ok());
        assert!(QuadSpec::parse(r#"{"A":[["6","3"],["3","6"]],"v":["1","1"]}"#).is_err());
        assert!(QuadSpec::parse(r#"{"A":[["6","3"],["3","6"]],"v":["0","1/9"]}"#).is_err());
        assert!(QuadSpec::parse(r#"{"A":[["6","3"],["3","6"]],"v":["1/9"]}"#).is_err());
    }

    #[test]
    fn three_good_grid_properties() {
        let s = QuadSpec::three_good_example();
        assert_eq!(grid_allocation_monotone(&s, 4).unwrap(), None);
        assert_eq!(grid_ultramodular(&s, 4).unwrap(), None);
        let (g, h) = pricing_submodularity_violation(&s, &rat(1, 100)).unwrap();
        assert!(s.in_allocation_range(&g) && s.in_allocation_range(&h));
    }

    #[test]
    fn two_good_payoff_shape() {
        let c = two_good_checks(20);
        assert!(c.nondecreasing && c.nonexpansive && c.midpoint_convex && c.separably_superadditive);
        assert!(c.supermodularity_violation.is_some());
        assert_eq!(two_good_payoff(&rat(1, 1), &rat(1, 1)), rat(1, 3));
    }
}
