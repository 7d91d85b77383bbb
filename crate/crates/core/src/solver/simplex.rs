//! Dense revised simplex with Bland's rule.
//!
//! Problems are converted to equality form with nonnegative right-hand sides,
//! solved in two phases, and the basis inverse is kept explicitly and
//! refactorized periodically to limit drift.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective·x` subject to the constraints and `x ≥ lower_bounds`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Per-variable lower bounds; empty means all zero.
    #[serde(default)]
    pub lower_bounds: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration cap hit or the basis became singular.
    NumericalFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal solution; meaningful only when optimal.
    pub x: Vec<f64>,
    pub value: f64,
    /// One multiplier per constraint (`≤` rows nonpositive, `≥` rows nonnegative).
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
            lower_bounds: Vec::new(),
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn lower(&self, j: usize) -> f64 {
        self.lower_bounds.get(j).copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::invalid("linear program has no variables"));
        }
        if !self.lower_bounds.is_empty() && self.lower_bounds.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.lower_bounds.len(),
            });
        }
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        if !finite(&self.objective) || !finite(&self.lower_bounds) {
            return Err(Error::NonFinite("linear program data".into()));
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.coeffs.len(),
                });
            }
            if !finite(&c.coeffs) || !c.rhs.is_finite() {
                return Err(Error::NonFinite("linear program data".into()));
            }
        }
        Ok(())
    }

    /// Dual objective `b·π + Σ_j l_j (c_j − A_j·π)` for multipliers `π`.
    /// Bounded above by the primal optimum whenever `π` is dual feasible.
    pub fn dual_value(&self, duals: &[f64]) -> f64 {
        let mut total: f64 = self.constraints.iter().zip(duals).map(|(c, y)| c.rhs * y).sum();
        for j in 0..self.num_vars() {
            let l = self.lower(j);
            if l != 0.0 {
                let reduced = self.objective[j]
                    - self
                        .constraints
                        .iter()
                        .zip(duals)
                        .map(|(c, y)| c.coeffs[j] * y)
                        .sum::<f64>();
                total += l * reduced;
            }
        }
        total
    }

    pub fn solve(&self) -> Result<LpSolution> {
        solve_lp(self)
    }

    pub fn solve_with(&self, rule: PivotRule) -> Result<LpSolution> {
        solve_lp_with(self, rule)
    }
}

/// Entering-variable selection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotRule {
    /// Lowest-index improving column; never cycles.
    #[default]
    Bland,
    /// Most negative reduced cost, falling back to Bland's rule during runs
    /// of degenerate pivots so cycling is still impossible. Far fewer
    /// iterations on the large grid programs.
    Hybrid,
}

/// Consecutive degenerate pivots after which [`PivotRule::Hybrid`] switches to Bland.
const DEGENERATE_RUN: usize = 30;

const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 50;

struct Tableau {
    m: usize,
    /// Standard-form columns (structural, then slack/surplus, then artificial).
    cols: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
    max_iterations: usize,
    rule: PivotRule,
}

enum Phase {
    Optimal,
    Unbounded,
    Failed,
}

impl Tableau {
    fn binv_row(&self, i: usize) -> &[f64] {
        &self.binv[i * self.m..(i + 1) * self.m]
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        let nz: Vec<(usize, f64)> = col.iter().copied().enumerate().filter(|(_, a)| *a != 0.0).collect();
        (0..self.m)
            .map(|i| {
                let row = self.binv_row(i);
                nz.iter().map(|&(k, a)| row[k] * a).sum()
            })
            .collect()
    }

    fn prices(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = cost[bi];
            if cb != 0.0 {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += cb * self.binv_row(i)[k];
                }
            }
        }
        y
    }

    fn pivot(&mut self, r: usize, entering: usize, u: &[f64]) {
        let m = self.m;
        let piv = u[r];
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        self.xb[r] /= piv;
        for i in 0..m {
            if i != r && u[i] != 0.0 {
                let f = u[i];
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[r * m + k];
                }
                self.xb[i] -= f * self.xb[r];
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[entering] = true;
        self.basis[r] = entering;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    /// Minimum ratio, ties broken by the smallest basic variable index.
    fn ratio_test_bland(&self, u: &[f64], tol: f64) -> Option<(usize, f64)> {
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.m {
            if u[i] > tol {
                let ratio = self.xb[i].max(0.0) / u[i];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if (!tie && ratio < best) || (tie && self.basis[i] < self.basis[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        leave
    }

    /// Harris two-pass test: among rows whose ratio is within a small
    /// feasibility tolerance of the minimum, take the largest pivot.
    fn ratio_test_harris(&self, u: &[f64], tol: f64) -> Option<(usize, f64)> {
        let slack = 1e-9;
        let mut bound = f64::INFINITY;
        for i in 0..self.m {
            if u[i] > tol {
                bound = bound.min((self.xb[i].max(0.0) + slack) / u[i]);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut leave: Option<usize> = None;
        for i in 0..self.m {
            if u[i] > tol && self.xb[i].max(0.0) / u[i] <= bound {
                if leave.is_none_or(|r| u[i] > u[r]) {
                    leave = Some(i);
                }
            }
        }
        leave.map(|r| (r, self.xb[r].max(0.0) / u[r]))
    }

    /// Recomputes the basis inverse from scratch by Gauss-Jordan elimination.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (c, &bj) in self.basis.iter().enumerate() {
            for r in 0..m {
                a[r * m + c] = self.cols[bj][r];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let mut p = c;
            for r in c + 1..m {
                if a[r * m + c].abs() > a[p * m + c].abs() {
                    p = r;
                }
            }
            if a[p * m + c].abs() < 1e-12 {
                return false;
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r != c {
                    let f = a[r * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            a[r * m + k] -= f * a[c * m + k];
                            inv[r * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.xb = self.ftran(&self.b.clone());
        self.since_refactor = 0;
        true
    }

    /// Runs simplex iterations for `cost`, never letting columns at or past
    /// `allowed` enter the basis.
    fn run(&mut self, cost: &[f64], allowed: usize) -> Phase {
        let scale = cost.iter().fold(1.0f64, |s, c| s.max(c.abs()));
        let dj_tol = 1e-9 * scale;
        let mut degenerate_run = 0;
        loop {
            if self.iterations >= self.max_iterations {
                return Phase::Failed;
            }
            if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                return Phase::Failed;
            }
            let y = self.prices(cost);
            let bland = self.rule == PivotRule::Bland || degenerate_run >= DEGENERATE_RUN;
            let mut entering = None;
            let mut most_negative = -dj_tol;
            for j in 0..allowed {
                if self.is_basic[j] {
                    continue;
                }
                let d = cost[j] - self.cols[j].iter().zip(&y).map(|(a, yi)| a * yi).sum::<f64>();
                if d < most_negative {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    most_negative = d;
                }
            }
            let Some(j) = entering else {
                return Phase::Optimal;
            };
            let u = self.ftran(&self.cols[j]);
            let umax = u.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            let tol = PIVOT_TOL * umax;
            let leave = if bland {
                self.ratio_test_bland(&u, tol)
            } else {
                self.ratio_test_harris(&u, tol)
            };
            let Some((r, step)) = leave else {
                return Phase::Unbounded;
            };
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, j, &u);
        }
    }
}

/// Solves `lp` with Bland's rule. Returns an error only for malformed input;
/// numerical trouble is reported through [`LpStatus::NumericalFailure`].
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, PivotRule::Bland)
}

pub fn solve_lp_with(lp: &LinearProgram, rule: PivotRule) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.constraints.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut flip = Vec::with_capacity(m);
    let mut slack_sign = Vec::with_capacity(m);
    for c in &lp.constraints {
        let shift: f64 = (0..n).map(|j| c.coeffs[j] * lp.lower(j)).sum();
        let mut b = c.rhs - shift;
        let mut row = c.coeffs.clone();
        let mut s = match c.relation {
            Relation::Le => 1.0,
            Relation::Ge => -1.0,
            Relation::Eq => 0.0,
        };
        let sigma = if b < 0.0 { -1.0 } else { 1.0 };
        if sigma < 0.0 {
            row.iter_mut().for_each(|a| *a = -*a);
            b = -b;
            s = -s;
        }
        rows.push(row);
        rhs.push(b);
        flip.push(sigma);
        slack_sign.push(s);
    }

    // Column layout: structural, slacks (one per inequality row), artificials.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut basis = vec![usize::MAX; m];
    for i in 0..m {
        if slack_sign[i] != 0.0 {
            let mut col = vec![0.0; m];
            col[i] = slack_sign[i];
            if slack_sign[i] > 0.0 {
                basis[i] = cols.len();
            }
            cols.push(col);
        }
    }
    let first_artificial = cols.len();
    for i in 0..m {
        if basis[i] == usize::MAX {
            let mut col = vec![0.0; m];
            col[i] = 1.0;
            basis[i] = cols.len();
            cols.push(col);
        }
    }
    let total = cols.len();
    let mut binv = vec![0.0; m * m];
    for i in 0..m {
        binv[i * m + i] = 1.0;
    }
    let mut is_basic = vec![false; total];
    basis.iter().for_each(|&b| is_basic[b] = true);
    let mut t = Tableau {
        m,
        cols,
        b: rhs.clone(),
        basis,
        is_basic,
        binv,
        xb: rhs,
        iterations: 0,
        since_refactor: 0,
        max_iterations: 50 * (m + total) + 1000,
        rule,
    };
    let failure = |t: &Tableau| LpSolution {
        status: LpStatus::NumericalFailure,
        x: vec![0.0; n],
        value: f64::NAN,
        duals: vec![0.0; m],
        iterations: t.iterations,
    };

    if first_artificial < total {
        let mut cost1 = vec![0.0; total];
        cost1[first_artificial..].iter_mut().for_each(|c| *c = 1.0);
        match t.run(&cost1, total) {
            Phase::Optimal => {}
            Phase::Unbounded | Phase::Failed => return Ok(failure(&t)),
        }
        let infeas: f64 = t
            .basis
            .iter()
            .zip(&t.xb)
            .filter(|(b, _)| **b >= first_artificial)
            .map(|(_, x)| *x)
            .sum();
        let bscale = t.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        if infeas > 1e-9 * bscale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                value: f64::NAN,
                duals: vec![0.0; m],
                iterations: t.iterations,
            });
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if t.basis[r] < first_artificial {
                continue;
            }
            let row = t.binv_row(r).to_vec();
            let candidate = (0..first_artificial).find(|&j| {
                !t.is_basic[j]
                    && t.cols[j].iter().zip(&row).map(|(a, b)| a * b).sum::<f64>().abs() > 1e-7
            });
            if let Some(j) = candidate {
                let u = t.ftran(&t.cols[j]);
                t.pivot(r, j, &u);
            }
        }
    }

    let mut cost2 = vec![0.0; total];
    for j in 0..n {
        cost2[j] = lp.objective[j];
    }
    match t.run(&cost2, first_artificial) {
        Phase::Optimal => {}
        Phase::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: vec![0.0; n],
                value: f64::NEG_INFINITY,
                duals: vec![0.0; m],
                iterations: t.iterations,
            })
        }
        Phase::Failed => return Ok(failure(&t)),
    }
    if !t.refactor() {
        return Ok(failure(&t));
    }
    let mut x: Vec<f64> = (0..n).map(|j| lp.lower(j)).collect();
    for (i, &bj) in t.basis.iter().enumerate() {
        if bj < n {
            x[bj] += t.xb[i].max(0.0);
        }
    }
    if !satisfies(lp, &x) {
        return Ok(failure(&t));
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let y = t.prices(&cost2);
    let duals = y.iter().zip(&flip).map(|(v, s)| v * s).collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        value,
        duals,
        iterations: t.iterations,
    })
}

/// Feasibility check of a returned point against the original constraints.
fn satisfies(lp: &LinearProgram, x: &[f64]) -> bool {
    lp.constraints.iter().all(|c| {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let scale = 1.0
            + c.rhs.abs()
            + c.coeffs.iter().zip(x).map(|(a, v)| (a * v).abs()).sum::<f64>();
        let tol = 1e-7 * scale;
        match c.relation {
            Relation::Le => lhs <= c.rhs + tol,
            Relation::Ge => lhs >= c.rhs - tol,
            Relation::Eq => (lhs - c.rhs).abs() <= tol,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covering_constraint() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Ge, 1.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((lp.dual_value(&s.duals) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.constrain(vec![1.0], Relation::Le, -1.0);
        lp.constrain(vec![1.0], Relation::Ge, 0.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.constrain(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn lower_bounds_and_equalities() {
        // min x + 2y, x + y = 3, x ≤ 2, y ≥ 0.5, x ≥ -1.
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.lower_bounds = vec![-1.0, 0.5];
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 3.0);
        lp.constrain(vec![1.0, 0.0], Relation::Le, 2.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
        assert!((s.value - 4.0).abs() < 1e-12);
        assert!((lp.dual_value(&s.duals) - 4.0).abs() < 1e-9);
        assert!(s.duals[1] <= 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 2.0);
        lp.constrain(vec![2.0, 2.0], Relation::Eq, 4.0);
        lp.constrain(vec![1.0, 0.0], Relation::Ge, 0.5);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_programs_are_rejected() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert!(lp.solve().is_err());
        let mut lp = LinearProgram::new(vec![f64::NAN]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert!(lp.solve().is_err());
    }
}
