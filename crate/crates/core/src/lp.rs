//! Exact rational linear programming.
//!
//! A dense two-phase primal simplex over [`Rat`], falling back to Bland's
//! rule when degenerate pivots pile up. Intended for desk-scale problems (a
//! few hundred rows), where exactness matters more than speed.

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Largest accepted number of variables or constraints.
pub const SIZE_LIMIT: usize = 4096;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Relation,
    pub rhs: Rat,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    n: usize,
    sense: Sense,
    objective: Vec<Rat>,
    constraints: Vec<Constraint>,
    lower: Vec<Option<Rat>>,
    upper: Vec<Option<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LpProblem {
    /// `n` variables, each with bounds `[0, +inf)` until changed.
    pub fn new(n: usize, sense: Sense) -> Self {
        LpProblem {
            n,
            sense,
            objective: vec![Rat::zero(); n],
            constraints: Vec::new(),
            lower: vec![Some(Rat::zero()); n],
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn set_objective(&mut self, c: Vec<Rat>) -> Result<()> {
        if c.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: c.len() });
        }
        self.objective = c;
        Ok(())
    }

    pub fn set_objective_coeff(&mut self, j: usize, c: Rat) {
        self.objective[j] = c;
    }

    pub fn add(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) -> Result<()> {
        if coeffs.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: coeffs.len() });
        }
        self.constraints.push(Constraint { coeffs, rel, rhs });
        Ok(())
    }

    /// Adds a constraint given as `(variable, coefficient)` terms; repeated
    /// variables accumulate.
    pub fn add_sparse(&mut self, terms: &[(usize, Rat)], rel: Relation, rhs: Rat) {
        let mut coeffs = vec![Rat::zero(); self.n];
        for (j, c) in terms {
            coeffs[*j] += c;
        }
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    pub fn set_bounds(&mut self, j: usize, lower: Option<Rat>, upper: Option<Rat>) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn set_free(&mut self, j: usize) {
        self.set_bounds(j, None, None);
    }

    /// Whether `point` satisfies every bound and constraint exactly.
    pub fn is_feasible_point(&self, point: &[Rat]) -> bool {
        if point.len() != self.n {
            return false;
        }
        for j in 0..self.n {
            if self.lower[j].as_ref().is_some_and(|l| point[j] < *l)
                || self.upper[j].as_ref().is_some_and(|u| point[j] > *u)
            {
                return false;
            }
        }
        self.constraints.iter().all(|c| {
            let lhs: Rat = c.coeffs.iter().zip(point).filter(|(a, _)| !a.is_zero()).map(|(a, x)| a * x).sum();
            match c.rel {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
    }

    pub fn objective_at(&self, point: &[Rat]) -> Rat {
        self.objective.iter().zip(point).filter(|(a, _)| !a.is_zero()).map(|(a, x)| a * x).sum()
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        solve(self)
    }
}

/// How an original variable maps onto nonnegative standard-form columns.
enum VarMap {
    /// `x = offset + col`
    Shift { col: usize, offset: Rat },
    /// `x = offset - col`
    Flip { col: usize, offset: Rat },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Rat], obj_val: &mut Rat) {
        let inv = self.rows[r][c].recip();
        if inv != Rat::one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let nz: Vec<usize> = (0..self.cols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[i][j] -= d;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                obj[j] -= d;
            }
            *obj_val += &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes with reduced costs `obj` (entering when positive).
    /// `allowed` masks columns that may enter. Pivots by largest reduced cost
    /// until a run of degenerate pivots, then by Bland's rule for good.
    fn run(&mut self, obj: &mut [Rat], obj_val: &mut Rat, allowed: &[bool]) -> bool {
        let mut bland = false;
        let mut stalled = 0usize;
        loop {
            let entering = if bland {
                (0..self.cols).find(|&j| allowed[j] && obj[j].is_positive())
            } else {
                let mut best: Option<usize> = None;
                for j in (0..self.cols).filter(|&j| allowed[j] && obj[j].is_positive()) {
                    if best.map_or(true, |b| obj[j] > obj[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, ratio)) => {
                    if ratio.is_zero() {
                        stalled += 1;
                        bland |= stalled > DEGENERATE_STREAK;
                    } else {
                        stalled = 0;
                    }
                    self.pivot(r, c, obj, obj_val)
                }
            }
        }
    }
}

/// Solves `problem` exactly. Deterministic: the same problem always yields
/// the same optimal vertex.
pub fn solve(problem: &LpProblem) -> Result<LpOutcome> {
    let n = problem.n;
    if n > SIZE_LIMIT {
        return Err(Error::TooLarge { what: "variables", size: n, limit: SIZE_LIMIT });
    }
    if problem.constraints.len() > SIZE_LIMIT {
        return Err(Error::TooLarge { what: "constraints", size: problem.constraints.len(), limit: SIZE_LIMIT });
    }
    for j in 0..n {
        if let (Some(l), Some(u)) = (&problem.lower[j], &problem.upper[j]) {
            if l > u {
                return Ok(LpOutcome::Infeasible);
            }
        }
    }

    // Map variables to nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut extra: Vec<(usize, Rat)> = Vec::new();
    for j in 0..n {
        match (&problem.lower[j], &problem.upper[j]) {
            (Some(l), u) => {
                maps.push(VarMap::Shift { col: ncols, offset: l.clone() });
                if let Some(u) = u {
                    extra.push((ncols, u - l));
                }
                ncols += 1;
            }
            (None, Some(u)) => {
                maps.push(VarMap::Flip { col: ncols, offset: u.clone() });
                ncols += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
                ncols += 2;
            }
        }
    }

    // Rows over structural columns: (coeffs, rel, rhs).
    let mut rows: Vec<(Vec<Rat>, Relation, Rat)> = Vec::new();
    for con in &problem.constraints {
        let mut a = vec![Rat::zero(); ncols];
        let mut rhs = con.rhs.clone();
        for (j, cj) in con.coeffs.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            match &maps[j] {
                VarMap::Shift { col, offset } => {
                    a[*col] += cj;
                    rhs -= cj * offset;
                }
                VarMap::Flip { col, offset } => {
                    a[*col] -= cj;
                    rhs -= cj * offset;
                }
                VarMap::Split { pos, neg } => {
                    a[*pos] += cj;
                    a[*neg] -= cj;
                }
            }
        }
        rows.push((a, con.rel, rhs));
    }
    for (col, width) in extra {
        let mut a = vec![Rat::zero(); ncols];
        a[col] = Rat::one();
        rows.push((a, Relation::Le, width));
    }

    // Objective over structural columns, as a maximization.
    let sign = match problem.sense {
        Sense::Max => Rat::one(),
        Sense::Min => -Rat::one(),
    };
    let mut cost = vec![Rat::zero(); ncols];
    let mut cost_const = Rat::zero();
    for (j, cj) in problem.objective.iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        let c = cj * &sign;
        match &maps[j] {
            VarMap::Shift { col, offset } => {
                cost[*col] += &c;
                cost_const += &c * offset;
            }
            VarMap::Flip { col, offset } => {
                cost[*col] -= &c;
                cost_const += &c * offset;
            }
            VarMap::Split { pos, neg } => {
                cost[*pos] += &c;
                cost[*neg] -= &c;
            }
        }
    }

    // Normalize to nonnegative right-hand sides, then add slack/artificial columns.
    let m = rows.len();
    for (a, rel, rhs) in rows.iter_mut() {
        // A `>= 0` row flips to `<= 0` so its slack can start in the basis.
        if rhs.is_negative() || (rhs.is_zero() && *rel == Relation::Ge) {
            for v in a.iter_mut() {
                *v = -v.clone();
            }
            *rhs = -rhs.clone();
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let total = ncols + n_slack + n_art;
    let art_start = ncols + n_slack;
    let mut tab = Tableau { rows: Vec::with_capacity(m), rhs: Vec::with_capacity(m), basis: Vec::with_capacity(m), cols: total };
    let mut s = ncols;
    let mut t = art_start;
    for (a, rel, rhs) in rows {
        let mut row = a;
        row.resize(total, Rat::zero());
        match rel {
            Relation::Le => {
                row[s] = Rat::one();
                tab.basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -Rat::one();
                s += 1;
                row[t] = Rat::one();
                tab.basis.push(t);
                t += 1;
            }
            Relation::Eq => {
                row[t] = Rat::one();
                tab.basis.push(t);
                t += 1;
            }
        }
        tab.rows.push(row);
        tab.rhs.push(rhs);
    }

    // Phase 1: maximize -(sum of artificials). Reduced cost of column j is
    // the sum of artificial rows' entries (for non-artificial j).
    if n_art > 0 {
        let mut obj = vec![Rat::zero(); total];
        let mut val = Rat::zero();
        for i in 0..m {
            if tab.basis[i] >= art_start {
                for j in 0..art_start {
                    if !tab.rows[i][j].is_zero() {
                        obj[j] += &tab.rows[i][j];
                    }
                }
                val -= &tab.rhs[i];
            }
        }
        let allowed: Vec<bool> = (0..total).map(|j| j < art_start).collect();
        tab.run(&mut obj, &mut val, &allowed);
        if val.is_negative() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                if let Some(c) = (0..art_start).find(|&j| !tab.rows[i][j].is_zero()) {
                    let mut dummy = vec![Rat::zero(); total];
                    let mut dv = Rat::zero();
                    tab.pivot(i, c, &mut dummy, &mut dv);
                } else {
                    tab.rows.remove(i);
                    tab.rhs.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
    }

    // Phase 2: reduced costs r_j = c_j - c_B B^-1 A_j.
    let mut obj = vec![Rat::zero(); total];
    obj[..ncols].clone_from_slice(&cost);
    let mut val = Rat::zero();
    for i in 0..tab.rows.len() {
        let b = tab.basis[i];
        if b < ncols && !cost[b].is_zero() {
            let cb = cost[b].clone();
            for j in 0..total {
                if !tab.rows[i][j].is_zero() {
                    obj[j] -= &cb * &tab.rows[i][j];
                }
            }
            val += &cb * &tab.rhs[i];
        }
    }
    let allowed: Vec<bool> = (0..total).map(|j| j < art_start).collect();
    if !tab.run(&mut obj, &mut val, &allowed) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut colval = vec![Rat::zero(); total];
    for (i, &b) in tab.basis.iter().enumerate() {
        colval[b] = tab.rhs[i].clone();
    }
    let point: Vec<Rat> = maps
        .iter()
        .map(|mp| match mp {
            VarMap::Shift { col, offset } => offset + &colval[*col],
            VarMap::Flip { col, offset } => offset - &colval[*col],
            VarMap::Split { pos, neg } => &colval[*pos] - &colval[*neg],
        })
        .collect();
    assert!(problem.is_feasible_point(&point), "simplex returned an infeasible point");
    let value = problem.objective_at(&point);
    debug_assert_eq!(&value * &sign, &val + &cost_const);
    Ok(LpOutcome::Optimal { value, point })
}

/// A linear inequality `coeffs · z ≤ rhs` (or `<` when used as strict).
#[derive(Clone, Debug)]
pub struct Ineq {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

impl Ineq {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Ineq { coeffs, rhs }
    }

    fn lhs(&self, z: &[Rat]) -> Rat {
        self.coeffs.iter().zip(z).filter(|(a, _)| !a.is_zero()).map(|(a, x)| a * x).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rat>),
    Infeasible,
}

/// Decides whether some `z` (free variables) satisfies every `weak`
/// inequality and every `strict` one strictly.
///
/// Maximizes a slack `e` in `[0, 1]` subtracted from each strict row; the
/// system is feasible iff the optimum is positive.
pub fn strict_feasible(n: usize, weak: &[Ineq], strict: &[Ineq]) -> Result<Feasibility> {
    for ineq in weak.iter().chain(strict) {
        if ineq.coeffs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: ineq.coeffs.len() });
        }
    }
    let mut lp = LpProblem::new(n + 1, Sense::Max);
    for j in 0..n {
        lp.set_free(j);
    }
    lp.set_bounds(n, Some(Rat::zero()), Some(Rat::one()));
    lp.set_objective_coeff(n, Rat::one());
    for w in weak {
        let mut c = w.coeffs.clone();
        c.push(Rat::zero());
        lp.add(c, Relation::Le, w.rhs.clone())?;
    }
    for s in strict {
        let mut c = s.coeffs.clone();
        c.push(Rat::one());
        lp.add(c, Relation::Le, s.rhs.clone())?;
    }
    match lp.solve()? {
        LpOutcome::Optimal { value, mut point } if value.is_positive() => {
            point.truncate(n);
            debug_assert!(weak.iter().all(|w| w.lhs(&point) <= w.rhs));
            assert!(strict.iter().all(|s| s.lhs(&point) < s.rhs), "strict slack point fails re-check");
            Ok(Feasibility::Feasible(point))
        }
        LpOutcome::Optimal { .. } | LpOutcome::Infeasible => Ok(Feasibility::Infeasible),
        LpOutcome::Unbounded => unreachable!("slack is bounded"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn single_bounded_variable() {
        let mut lp = LpProblem::new(1, Sense::Max);
        lp.set_objective(vec![r(1)]).unwrap();
        lp.add(vec![r(1)], Relation::Le, r(3)).unwrap();
        assert_eq!(lp.solve().unwrap(), LpOutcome::Optimal { value: r(3), point: vec![r(3)] });
    }

    #[test]
    fn unbounded_sum() {
        let mut lp = LpProblem::new(2, Sense::Max);
        lp.set_objective(vec![r(1), r(1)]).unwrap();
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn contradictory_bounds() {
        let mut lp = LpProblem::new(1, Sense::Max);
        lp.add(vec![r(1)], Relation::Le, r(1)).unwrap();
        lp.add(vec![r(1)], Relation::Ge, r(2)).unwrap();
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut lp = LpProblem::new(2, Sense::Max);
        assert!(lp.add(vec![r(1)], Relation::Le, r(1)).is_err());
    }

    #[test]
    fn minimization_with_equalities_and_free_vars() {
        // min x + 2y  s.t. x + y = 3, x - y >= -1, y free, x in [0, 5]
        let mut lp = LpProblem::new(2, Sense::Min);
        lp.set_objective(vec![r(1), r(2)]).unwrap();
        lp.set_bounds(0, Some(r(0)), Some(r(5)));
        lp.set_free(1);
        lp.add(vec![r(1), r(1)], Relation::Eq, r(3)).unwrap();
        lp.add(vec![r(1), r(-1)], Relation::Ge, r(-1)).unwrap();
        match lp.solve().unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, r(1));
                assert_eq!(point, vec![r(5), r(-2)]);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn degenerate_redundant_equalities() {
        let mut lp = LpProblem::new(2, Sense::Max);
        lp.set_objective(vec![r(1), r(0)]).unwrap();
        lp.add(vec![r(1), r(1)], Relation::Eq, r(1)).unwrap();
        lp.add(vec![r(2), r(2)], Relation::Eq, r(2)).unwrap();
        lp.add(vec![r(1), r(0)], Relation::Le, rat(1, 2)).unwrap();
        assert_eq!(lp.solve().unwrap().value(), Some(&rat(1, 2)));
    }

    #[test]
    fn strict_interval_cases() {
        // weak z >= 2, strict z < 3
        let weak = [Ineq::new(vec![r(-1)], r(-2))];
        let strict = [Ineq::new(vec![r(1)], r(3))];
        match strict_feasible(1, &weak, &strict).unwrap() {
            Feasibility::Feasible(z) => assert!(z[0] >= r(2) && z[0] < r(3)),
            f => panic!("{f:?}"),
        }
        let weak = [Ineq::new(vec![r(-1)], r(-3))];
        assert_eq!(strict_feasible(1, &weak, &strict).unwrap(), Feasibility::Infeasible);
        let strict = [Ineq::new(vec![r(1)], r(0)), Ineq::new(vec![r(-1)], r(0))];
        assert_eq!(strict_feasible(1, &[], &strict).unwrap(), Feasibility::Infeasible);
    }
}
