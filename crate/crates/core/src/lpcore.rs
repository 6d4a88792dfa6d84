//! Exact linear programming over an ordered field.
//!
//! Problems have the form `maximize c·x subject to A x <= b` with free
//! variables. They are solved through their dual
//! `minimize b·y subject to Aᵀ y = c, y >= 0`, which has one row per
//! variable instead of one row per constraint; the problems built by this
//! crate have few variables and many constraints. The dual is solved by a
//! dense two-phase tableau simplex with Bland's rule, and the primal optimum
//! is read off the simplex multipliers of the final basis.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("row has {got} coefficients but the program has {expected} variables")]
    RowLength { got: usize, expected: usize },
    #[error("variable index {index} out of range for {vars} variables")]
    VariableIndex { index: usize, vars: usize },
}

/// One constraint `coefficients · x <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint<S> {
    pub coefficients: Vec<S>,
    pub bound: S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram<S> {
    num_vars: usize,
    constraints: Vec<Constraint<S>>,
    objective: Vec<S>,
}

impl<S: Scalar> LinearProgram<S> {
    /// A program maximizing `objective · x` with no constraints yet.
    pub fn maximize(objective: Vec<S>) -> Self {
        LinearProgram {
            num_vars: objective.len(),
            constraints: Vec::new(),
            objective,
        }
    }

    pub fn add_constraint(&mut self, coefficients: Vec<S>, bound: S) -> Result<(), LpError> {
        if coefficients.len() != self.num_vars {
            return Err(LpError::RowLength {
                got: coefficients.len(),
                expected: self.num_vars,
            });
        }
        self.constraints.push(Constraint { coefficients, bound });
        Ok(())
    }

    /// Adds `Σ coef · x[index] <= bound`; repeated indices accumulate.
    pub fn add_sparse(&mut self, terms: &[(usize, S)], bound: S) -> Result<(), LpError> {
        let mut row = vec![S::zero(); self.num_vars];
        for (index, coef) in terms {
            let slot = row.get_mut(*index).ok_or(LpError::VariableIndex {
                index: *index,
                vars: self.num_vars,
            })?;
            *slot = slot.clone() + coef.clone();
        }
        self.constraints.push(Constraint { coefficients: row, bound });
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint<S>] {
        &self.constraints
    }

    pub fn objective(&self) -> &[S] {
        &self.objective
    }

    /// Replaces the objective, keeping the constraints.
    pub fn with_objective(&self, objective: Vec<S>) -> Result<Self, LpError> {
        if objective.len() != self.num_vars {
            return Err(LpError::RowLength {
                got: objective.len(),
                expected: self.num_vars,
            });
        }
        Ok(LinearProgram {
            num_vars: self.num_vars,
            constraints: self.constraints.clone(),
            objective,
        })
    }

    pub fn objective_value(&self, point: &[S]) -> S {
        dot(&self.objective, point)
    }

    /// True if `point` satisfies every constraint exactly.
    pub fn is_feasible(&self, point: &[S]) -> bool {
        point.len() == self.num_vars
            && self
                .constraints
                .iter()
                .all(|c| dot(&c.coefficients, point) <= c.bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome<S> {
    Optimal { value: S, point: Vec<S> },
    Infeasible,
    Unbounded,
}

impl<S> LpOutcome<S> {
    pub fn optimal(self) -> Option<(S, Vec<S>)> {
        match self {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            _ => None,
        }
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Solves the program exactly. An `Optimal` point satisfies every
/// constraint and attains `value`; when the constraint matrix has full
/// column rank the point is a vertex.
pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> LpOutcome<S> {
    let k = lp.num_vars;
    let m = lp.constraints.len();
    // Dual: one row per primal variable, one column per primal constraint.
    let rows: Vec<Vec<S>> = (0..k)
        .map(|i| lp.constraints.iter().map(|c| c.coefficients[i].clone()).collect())
        .collect();
    let cost: Vec<S> = lp.constraints.iter().map(|c| c.bound.clone()).collect();
    match StandardForm::new(rows, lp.objective.clone(), cost).solve() {
        StandardOutcome::Optimal { value, multipliers } => {
            let point = multipliers;
            assert!(
                lp.is_feasible(&point) && lp.objective_value(&point) == value,
                "simplex multipliers failed primal replay"
            );
            LpOutcome::Optimal { value, point }
        }
        StandardOutcome::Unbounded => LpOutcome::Infeasible,
        StandardOutcome::Infeasible => {
            if primal_feasible(lp, m, k) {
                LpOutcome::Unbounded
            } else {
                LpOutcome::Infeasible
            }
        }
    }
}

/// Farkas test: `A x <= b` is feasible iff `min b·y` over
/// `{Aᵀ y = 0, Σ y <= 1, y >= 0}` is zero.
fn primal_feasible<S: Scalar>(lp: &LinearProgram<S>, m: usize, k: usize) -> bool {
    let mut rows: Vec<Vec<S>> = (0..k)
        .map(|i| {
            let mut r: Vec<S> = lp.constraints.iter().map(|c| c.coefficients[i].clone()).collect();
            r.push(S::zero());
            r
        })
        .collect();
    rows.push(vec![S::one(); m + 1]);
    let mut rhs = vec![S::zero(); k];
    rhs.push(S::one());
    let mut cost: Vec<S> = lp.constraints.iter().map(|c| c.bound.clone()).collect();
    cost.push(S::zero());
    match StandardForm::new(rows, rhs, cost).solve() {
        StandardOutcome::Optimal { value, .. } => !value.is_negative(),
        _ => unreachable!("Farkas program is feasible and bounded"),
    }
}

enum StandardOutcome<S> {
    Optimal {
        value: S,
        multipliers: Vec<S>,
    },
    Infeasible,
    Unbounded,
}

/// `minimize cost·y subject to rows·y = rhs, y >= 0` as a dense tableau.
///
/// Columns `0..n` are structural, `n..n+r` artificial (one per original
/// row), then the right-hand side. Artificial columns never re-enter the
/// basis but are kept so the simplex multipliers can be read from their
/// reduced costs.
struct StandardForm<S> {
    n: usize,
    tableau: Vec<Vec<S>>,
    /// Original rows with negative rhs are stored negated.
    negated: Vec<bool>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry is minus the objective value.
    reduced: Vec<S>,
    cost: Vec<S>,
    original_rows: usize,
}

impl<S: Scalar> StandardForm<S> {
    fn new(rows: Vec<Vec<S>>, rhs: Vec<S>, cost: Vec<S>) -> Self {
        let r = rows.len();
        let n = cost.len();
        let width = n + r + 1;
        let mut tableau = Vec::with_capacity(r);
        let mut negated = Vec::with_capacity(r);
        for (i, (row, b)) in rows.into_iter().zip(rhs).enumerate() {
            let negate = b.is_negative();
            let mut t: Vec<S> = Vec::with_capacity(width);
            t.extend(row.into_iter().map(|v| if negate { -v } else { v }));
            t.extend((0..r).map(|j| if j == i { S::one() } else { S::zero() }));
            t.push(if negate { -b } else { b });
            tableau.push(t);
            negated.push(negate);
        }
        StandardForm {
            n,
            basis: (n..n + r).collect(),
            tableau,
            negated,
            reduced: vec![S::zero(); width],
            cost,
            original_rows: r,
        }
    }

    fn rhs_col(&self) -> usize {
        self.n + self.original_rows
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = S::one() / self.tableau[row][col].clone();
        for v in self.tableau[row].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        let pivot_row = self.tableau[row].clone();
        let support: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |target: &mut Vec<S>| {
            let factor = target[col].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                target[j] = target[j].clone() - factor.clone() * pivot_row[j].clone();
            }
        };
        for (i, t) in self.tableau.iter_mut().enumerate() {
            if i != row {
                eliminate(t);
            }
        }
        eliminate(&mut self.reduced);
        self.basis[row] = col;
    }

    /// Bland's rule over structural columns. Returns false on unboundedness.
    fn run(&mut self) -> bool {
        let rhs = self.rhs_col();
        loop {
            let Some(col) = (0..self.n).find(|&j| self.reduced[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, S)> = None;
            for (i, t) in self.tableau.iter().enumerate() {
                if !t[col].is_positive() {
                    continue;
                }
                let ratio = t[rhs].clone() / t[col].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn solve(mut self) -> StandardOutcome<S> {
        let rhs = self.rhs_col();
        // Phase 1: minimize the sum of artificials.
        for t in &self.tableau {
            for j in (0..self.n).chain(std::iter::once(rhs)) {
                self.reduced[j] = self.reduced[j].clone() - t[j].clone();
            }
        }
        let bounded = self.run();
        debug_assert!(bounded);
        if !self.reduced[rhs].is_zero() {
            return StandardOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < self.tableau.len() {
            if self.basis[i] >= self.n {
                match (0..self.n).find(|&j| !self.tableau[i][j].is_zero()) {
                    Some(col) => {
                        self.pivot(i, col);
                        i += 1;
                    }
                    None => {
                        self.tableau.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        // Phase 2 reduced costs: cost_j - Σ_r cost_{B_r} T[r][j].
        let width = rhs + 1;
        let mut reduced: Vec<S> = (0..width)
            .map(|j| if j < self.n { self.cost[j].clone() } else { S::zero() })
            .collect();
        for (t, &b) in self.tableau.iter().zip(&self.basis) {
            let cb = &self.cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !t[j].is_zero() {
                    reduced[j] = reduced[j].clone() - cb.clone() * t[j].clone();
                }
            }
        }
        self.reduced = reduced;
        if !self.run() {
            return StandardOutcome::Unbounded;
        }
        let multipliers = (0..self.original_rows)
            .map(|i| {
                let pi = -self.reduced[self.n + i].clone();
                if self.negated[i] {
                    -pi
                } else {
                    pi
                }
            })
            .collect();
        StandardOutcome::Optimal {
            value: -self.reduced[rhs].clone(),
            multipliers,
        }
    }
}

/// Exhaustive oracle: the best vertex of the program intersected with the
/// box `|x_i| <= box_bound`, recomputed with the box doubled to tell a
/// bounded optimum from an unbounded one. Exponential; test use only.
///
/// `box_bound` must exceed every coordinate of every vertex of the
/// original polyhedron for the verdict to be exact.
pub fn vertex_enumeration_oracle<S: Scalar>(lp: &LinearProgram<S>, box_bound: &S) -> LpOutcome<S> {
    let radii = [box_bound.clone(), box_bound.clone() + box_bound.clone()];
    let mut best: [Option<(S, Vec<S>)>; 2] = [None, None];
    let k = lp.num_vars;
    let m = lp.constraints.len();
    // A vertex is cut out by s tight program rows and k - s box faces; the
    // box faces fix their coordinates to ±radius and the program rows
    // determine the rest.
    for s in 0..=k.min(m) {
        for tight in subsets(m, s) {
            for free in subsets(k, s) {
                let fixed: Vec<usize> = (0..k).filter(|j| !free.contains(j)).collect();
                let Some(parts) = solve_restricted(lp, &tight, &free, &fixed) else {
                    continue;
                };
                for signs in 0..(1usize << fixed.len()) {
                    for (side, radius) in radii.iter().enumerate() {
                        let x = assemble(k, &free, &fixed, signs, radius, &parts);
                        if x.iter().all(|xi| xi.abs() <= *radius) && lp.is_feasible(&x) {
                            let value = lp.objective_value(&x);
                            if best[side].as_ref().is_none_or(|(b, _)| value > *b) {
                                best[side] = Some((value, x));
                            }
                        }
                    }
                }
            }
        }
    }
    let [inner, outer] = best;
    match (inner, outer) {
        (None, _) => LpOutcome::Infeasible,
        (Some((value, point)), Some((wider, _))) if wider == value => LpOutcome::Optimal { value, point },
        _ => LpOutcome::Unbounded,
    }
}

/// All `s`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = (0..s).collect();
    if s > n {
        return out;
    }
    loop {
        out.push(chosen.clone());
        let mut i = s;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if chosen[i] < n - s + i {
                break;
            }
        }
        chosen[i] += 1;
        for j in (i + 1)..s {
            chosen[j] = chosen[j - 1] + 1;
        }
    }
}

/// Solves the tight rows for the free coordinates. Returns the columns
/// `A⁻¹ b` followed by `A⁻¹ a_j` for each fixed coordinate `j`, where `A`
/// is the tight-by-free block; `None` if `A` is singular.
fn solve_restricted<S: Scalar>(
    lp: &LinearProgram<S>,
    tight: &[usize],
    free: &[usize],
    fixed: &[usize],
) -> Option<Vec<Vec<S>>> {
    let s = free.len();
    let mut a: Vec<Vec<S>> = tight
        .iter()
        .map(|&i| {
            let c = &lp.constraints[i];
            free.iter()
                .map(|&j| c.coefficients[j].clone())
                .chain(std::iter::once(c.bound.clone()))
                .chain(fixed.iter().map(|&j| c.coefficients[j].clone()))
                .collect()
        })
        .collect();
    let width = s + 1 + fixed.len();
    for col in 0..s {
        let pivot = (col..s).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        if !p.is_one() {
            for x in a[col][col..].iter_mut() {
                *x = x.clone() / p.clone();
            }
        }
        for r in 0..s {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..width {
                    if !a[col][c].is_zero() {
                        let delta = factor.clone() * a[col][c].clone();
                        a[r][c] = a[r][c].clone() - delta;
                    }
                }
            }
        }
    }
    Some((s..width).map(|c| a.iter().map(|r| r[c].clone()).collect()).collect())
}

/// The point with fixed coordinates `±radius` (bit `t` of `signs` set
/// means negative for the `t`-th fixed coordinate) and free coordinates
/// `A⁻¹ (b - Σ_j a_j x_j)`.
fn assemble<S: Scalar>(k: usize, free: &[usize], fixed: &[usize], signs: usize, radius: &S, parts: &[Vec<S>]) -> Vec<S> {
    let mut x = vec![S::zero(); k];
    let mut free_values = parts[0].clone();
    for (t, &j) in fixed.iter().enumerate() {
        let xj = if signs >> t & 1 == 1 { -radius.clone() } else { radius.clone() };
        for (v, c) in free_values.iter_mut().zip(&parts[t + 1]) {
            if !c.is_zero() {
                *v = v.clone() - c.clone() * xj.clone();
            }
        }
        x[j] = xj;
    }
    for (&j, v) in free.iter().zip(free_values) {
        x[j] = v;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn bounded_interval() {
        let mut lp = LinearProgram::maximize(vec![r(1)]);
        lp.add_constraint(vec![r(1)], r(1)).unwrap();
        lp.add_constraint(vec![r(-1)], r(0)).unwrap();
        assert_eq!(solve_lp(&lp), LpOutcome::Optimal { value: r(1), point: vec![r(1)] });
    }

    #[test]
    fn empty_interval_is_infeasible() {
        let mut lp = LinearProgram::maximize(vec![r(1)]);
        lp.add_constraint(vec![r(-1)], r(-2)).unwrap();
        lp.add_constraint(vec![r(1)], r(1)).unwrap();
        assert_eq!(solve_lp(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn half_line_is_unbounded() {
        let mut lp = LinearProgram::maximize(vec![r(1)]);
        lp.add_constraint(vec![r(-1)], r(0)).unwrap();
        assert_eq!(solve_lp(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_programs() {
        let free = LinearProgram::maximize(vec![r(1), r(0)]);
        assert_eq!(solve_lp(&free), LpOutcome::Unbounded);
        let zero = LinearProgram::<Rational>::maximize(vec![r(0)]);
        assert_eq!(solve_lp(&zero), LpOutcome::Optimal { value: r(0), point: vec![r(0)] });
        let mut no_vars = LinearProgram::<Rational>::maximize(vec![]);
        no_vars.add_constraint(vec![], r(-1)).unwrap();
        assert_eq!(solve_lp(&no_vars), LpOutcome::Infeasible);
    }

    #[test]
    fn rank_deficient_constraints() {
        // max x + y s.t. x + y <= 3, -x - y <= 0: optimum 3 on a line
        let mut lp = LinearProgram::maximize(vec![r(1), r(1)]);
        lp.add_constraint(vec![r(1), r(1)], r(3)).unwrap();
        lp.add_constraint(vec![r(-1), r(-1)], r(0)).unwrap();
        let (value, point) = solve_lp(&lp).optimal().unwrap();
        assert_eq!(value, r(3));
        assert!(lp.is_feasible(&point));
    }

    #[test]
    fn two_dimensional_vertex() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3, -x <= 0, -y <= 0
        let mut lp = LinearProgram::maximize(vec![r(3), r(2)]);
        lp.add_constraint(vec![r(1), r(1)], r(4)).unwrap();
        lp.add_constraint(vec![r(1), r(3)], r(6)).unwrap();
        lp.add_sparse(&[(0, r(1))], r(3)).unwrap();
        lp.add_sparse(&[(0, r(-1))], r(0)).unwrap();
        lp.add_sparse(&[(1, r(-1))], r(0)).unwrap();
        assert_eq!(solve_lp(&lp), LpOutcome::Optimal { value: r(11), point: vec![r(3), r(1)] });
    }

    #[test]
    fn row_length_is_checked() {
        let mut lp = LinearProgram::maximize(vec![r(1)]);
        assert!(lp.add_constraint(vec![r(1), r(2)], r(0)).is_err());
        assert!(lp.add_sparse(&[(3, r(1))], r(0)).is_err());
    }
}
