//! Small dense two-phase simplex solver.
//!
//! Programs are stated as `min c·v` subject to equality rows `A v = b`,
//! with every variable either nonnegative or free. Free variables are split
//! into a positive and a negative part internally. Pricing is Dantzig's rule
//! for the first pivots of each phase and Bland's rule afterwards, so the
//! pivot sequence (and therefore the output) is a deterministic function of
//! the input.
//!
//! Dual multipliers are read off the reduced costs of the artificial
//! columns, which are kept in the tableau through phase two but never allowed
//! to re-enter the basis.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// A reduced cost below `-optimality_tol` makes a column eligible to enter.
    pub optimality_tol: f64,
    /// Column entries at or below this magnitude are never pivoted on.
    pub pivot_tol: f64,
    /// Phase-one objective above this (relative to `max(1, |b|_inf)`) means infeasible.
    pub feasibility_tol: f64,
    pub max_pivots: usize,
    /// Switch from Dantzig to Bland pricing after this many pivots in a phase.
    pub bland_after: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { optimality_tol: 1e-11, pivot_tol: 1e-11, feasibility_tol: 1e-8, max_pivots: 10_000, bland_after: 100 }
    }
}

impl SolverOptions {
    /// Settings used to double-check suspicious results: a stricter
    /// optimality test and a larger pivot threshold, so that near-singular
    /// pivots cannot be what produced the first answer.
    pub fn tight() -> Self {
        Self { optimality_tol: 1e-13, pivot_tol: 1e-9, feasibility_tol: 1e-9, max_pivots: 50_000, bland_after: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    nonneg: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One multiplier per equality row, `y` with `A^T y <= c` on nonnegative
    /// columns and `A^T y = c` on free columns.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    /// A program over `num_vars` nonnegative variables with zero objective.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            rhs: Vec::new(),
            nonneg: vec![true; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.objective[var] = cost;
    }

    pub fn set_free(&mut self, var: usize) {
        self.nonneg[var] = false;
    }

    pub fn add_equality(&mut self, row: Vec<f64>, rhs: f64) -> Result<usize> {
        if row.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: row.len() });
        }
        if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite LP coefficient".into()));
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(self.rows.len() - 1)
    }

    /// Adds `sum coef * v[var] = rhs` from `(var, coef)` pairs; repeated
    /// variables accumulate.
    pub fn add_equality_sparse(&mut self, entries: &[(usize, f64)], rhs: f64) -> Result<usize> {
        let mut row = vec![0.0; self.num_vars];
        for &(var, coef) in entries {
            if var >= self.num_vars {
                return Err(Error::InvalidInput(format!("variable index {var} out of range")));
            }
            row[var] += coef;
        }
        self.add_equality(row, rhs)
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.solve_with(&SolverOptions::default())
    }

    pub fn solve_with(&self, opts: &SolverOptions) -> Result<LpSolution> {
        Tableau::build(self).run(self, opts)
    }

    /// `max_i |(A v - b)_i|` together with the most negative entry among
    /// nonnegative variables (as a positive violation).
    pub fn primal_residual(&self, primal: &[f64]) -> f64 {
        let eq = self.rows.iter().zip(&self.rhs).map(|(row, b)| (dot(row, primal) - b).abs()).fold(0.0, f64::max);
        let bounds =
            primal.iter().zip(&self.nonneg).filter(|(_, &nn)| nn).map(|(v, _)| (-v).max(0.0)).fold(0.0, f64::max);
        eq.max(bounds)
    }

    /// Largest violation of dual feasibility, `max(A^T y - c)` on nonnegative
    /// columns and `|A^T y - c|` on free ones.
    pub fn dual_residual(&self, duals: &[f64]) -> f64 {
        (0..self.num_vars)
            .map(|j| {
                let aty: f64 = self.rows.iter().zip(duals).map(|(r, y)| r[j] * y).sum();
                let gap = aty - self.objective[j];
                if self.nonneg[j] {
                    gap.max(0.0)
                } else {
                    gap.abs()
                }
            })
            .fold(0.0, f64::max)
    }

    /// `max_j |v_j * (c - A^T y)_j|` over nonnegative columns.
    pub fn complementarity_residual(&self, primal: &[f64], duals: &[f64]) -> f64 {
        (0..self.num_vars)
            .filter(|&j| self.nonneg[j])
            .map(|j| {
                let aty: f64 = self.rows.iter().zip(duals).map(|(r, y)| r[j] * y).sum();
                (primal[j] * (self.objective[j] - aty)).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn objective_value(&self, primal: &[f64]) -> f64 {
        dot(&self.objective, primal)
    }

    pub fn dual_objective(&self, duals: &[f64]) -> f64 {
        dot(&self.rhs, duals)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Tableau columns: expanded structural columns, then one artificial per row.
struct Tableau {
    m: usize,
    n_struct: usize,
    width: usize,
    /// `(m + 1) x (width + 1)` row-major; row `m` is the reduced-cost row and
    /// the last column is the right-hand side (`-z` in the cost row).
    cells: Vec<f64>,
    basis: Vec<usize>,
    /// For each original variable: its positive column and optional negative column.
    columns: Vec<(usize, Option<usize>)>,
    row_sign: Vec<f64>,
    b_scale: f64,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let mut columns = Vec::with_capacity(lp.num_vars);
        let mut n_struct = 0;
        for &nn in &lp.nonneg {
            if nn {
                columns.push((n_struct, None));
                n_struct += 1;
            } else {
                columns.push((n_struct, Some(n_struct + 1)));
                n_struct += 2;
            }
        }
        let width = n_struct + m;
        let stride = width + 1;
        let mut cells = vec![0.0; (m + 1) * stride];
        let mut row_sign = vec![1.0; m];
        for (i, (row, &b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let s = if b < 0.0 { -1.0 } else { 1.0 };
            row_sign[i] = s;
            let base = i * stride;
            for (j, &(pos, neg)) in columns.iter().enumerate() {
                cells[base + pos] = s * row[j];
                if let Some(neg) = neg {
                    cells[base + neg] = -s * row[j];
                }
            }
            cells[base + n_struct + i] = 1.0;
            cells[base + width] = s * b;
        }
        let b_scale = lp.rhs.iter().fold(1.0_f64, |acc, b| acc.max(b.abs()));
        Self { m, n_struct, width, cells, basis: (n_struct..n_struct + m).collect(), columns, row_sign, b_scale }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * (self.width + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width)
    }

    fn set_cost_row(&mut self, costs: &[f64]) {
        let stride = self.width + 1;
        let m = self.m;
        for j in 0..=self.width {
            let mut d = if j < self.width { costs[j] } else { 0.0 };
            for i in 0..m {
                let cb = costs[self.basis[i]];
                if cb != 0.0 {
                    d -= cb * self.cells[i * stride + j];
                }
            }
            self.cells[m * stride + j] = d;
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let stride = self.width + 1;
        let p = self.cells[r * stride + e];
        for j in 0..stride {
            self.cells[r * stride + j] /= p;
        }
        self.cells[r * stride + e] = 1.0;
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.cells[i * stride + e];
            if f == 0.0 {
                continue;
            }
            for j in 0..stride {
                let v = self.cells[r * stride + j];
                if v != 0.0 {
                    self.cells[i * stride + j] -= f * v;
                }
            }
            self.cells[i * stride + e] = 0.0;
        }
        self.basis[r] = e;
    }

    /// Runs simplex iterations on the current cost row over columns `< allowed`.
    /// Returns `Ok(true)` at optimality and `Ok(false)` when unbounded.
    fn iterate(&mut self, allowed: usize, opts: &SolverOptions, pivots: &mut usize) -> Result<bool> {
        let mut phase_pivots = 0;
        loop {
            let bland = phase_pivots >= opts.bland_after;
            let cost_row = self.m;
            let mut enter = None;
            let mut best = -opts.optimality_tol;
            for j in 0..allowed {
                let d = self.at(cost_row, j);
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(e) = enter else {
                return Ok(true);
            };

            let mut leave: Option<(usize, f64, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, e);
                if a <= opts.pivot_tol {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio, a)),
                    Some((li, lr, la)) => {
                        let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[li]
                            } else {
                                a > la
                            }
                        } else {
                            ratio < lr
                        };
                        if better {
                            Some((i, ratio, a))
                        } else {
                            Some((li, lr, la))
                        }
                    }
                };
            }
            let Some((r, _, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, e);
            phase_pivots += 1;
            *pivots += 1;
            if *pivots > opts.max_pivots {
                return Err(Error::NumericalFailure(format!("simplex exceeded {} pivots", opts.max_pivots)));
            }
        }
    }

    fn run(mut self, lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution> {
        let mut pivots = 0;
        let n_vars = lp.num_vars;

        if self.m > 0 {
            let mut phase1 = vec![0.0; self.width];
            for c in phase1.iter_mut().skip(self.n_struct) {
                *c = 1.0;
            }
            self.set_cost_row(&phase1);
            self.iterate(self.n_struct, opts, &mut pivots)?;
            let infeasibility = -self.at(self.m, self.width);
            if infeasibility > opts.feasibility_tol * self.b_scale {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    primal: vec![0.0; n_vars],
                    duals: vec![0.0; self.m],
                    objective: f64::NAN,
                    pivots,
                });
            }
            self.drive_out_artificials();
        }

        let mut phase2 = vec![0.0; self.width];
        for (j, &(pos, neg)) in self.columns.iter().enumerate() {
            phase2[pos] = lp.objective[j];
            if let Some(neg) = neg {
                phase2[neg] = -lp.objective[j];
            }
        }
        self.set_cost_row(&phase2);
        if !self.iterate(self.n_struct, opts, &mut pivots)? {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                primal: vec![0.0; n_vars],
                duals: vec![0.0; self.m],
                objective: f64::NEG_INFINITY,
                pivots,
            });
        }

        let mut x = vec![0.0; self.width];
        for (i, &bv) in self.basis.iter().enumerate() {
            x[bv] = self.rhs(i).max(0.0);
        }
        let primal: Vec<f64> = self.columns.iter().map(|&(pos, neg)| x[pos] - neg.map_or(0.0, |n| x[n])).collect();
        let duals: Vec<f64> = (0..self.m).map(|i| -self.at(self.m, self.n_struct + i) * self.row_sign[i]).collect();
        Ok(LpSolution { status: LpStatus::Optimal, objective: lp.objective_value(&primal), primal, duals, pivots })
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.n_struct {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n_struct {
                let a = self.at(r, j).abs();
                if a > 1e-9 && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(r, j);
            }
            // Otherwise the row is redundant; its artificial stays basic at zero
            // and its row has no structural entries, so it is never pivoted on.
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn min_x_nonnegative() {
        let mut lp = LinearProgram::new(1);
        lp.set_cost(0, 1.0);
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_close(sol.objective, 0.0, 1e-15);
    }

    #[test]
    fn min_lambda_at_least_three_with_slack() {
        // lambda - s = 3, s >= 0
        let mut lp = LinearProgram::new(2);
        lp.set_cost(0, 1.0);
        lp.add_equality(vec![1.0, -1.0], 3.0).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_close(sol.objective, 3.0, 1e-12);
        assert_close(sol.duals[0], 1.0, 1e-12);
    }

    #[test]
    fn detects_infeasible() {
        // x + y = -1 with x, y >= 0
        let mut lp = LinearProgram::new(2);
        lp.add_equality(vec![1.0, 1.0], -1.0).unwrap();
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // min -x s.t. x - y = 0
        let mut lp = LinearProgram::new(2);
        lp.set_cost(0, -1.0);
        lp.add_equality(vec![1.0, -1.0], 0.0).unwrap();
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_goes_negative() {
        // min x0 + 2 s s.t. x0 + s = -4, x0 free, s >= 0  -> x0 = -4
        let mut lp = LinearProgram::new(2);
        lp.set_free(0);
        lp.set_cost(0, 1.0);
        lp.set_cost(1, 2.0);
        lp.add_equality(vec![1.0, 1.0], -4.0).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_close(sol.primal[0], -4.0, 1e-12);
        assert_close(sol.objective, sol_dual(&lp, &sol), 1e-12);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let mut lp = LinearProgram::new(3);
        lp.set_cost(0, 1.0);
        lp.set_cost(1, 1.0);
        lp.add_equality(vec![1.0, 1.0, 1.0], 2.0).unwrap();
        lp.add_equality(vec![2.0, 2.0, 2.0], 4.0).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_close(sol.objective, 0.0, 1e-12);
        assert!(lp.primal_residual(&sol.primal) < 1e-12);
        assert_close(sol_dual(&lp, &sol), sol.objective, 1e-12);
    }

    #[test]
    fn row_length_checked() {
        let mut lp = LinearProgram::new(2);
        assert!(matches!(lp.add_equality(vec![1.0], 0.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling example, as equalities with slacks.
        let mut lp = LinearProgram::new(7);
        for (j, c) in [-0.75, 150.0, -0.02, 6.0].into_iter().enumerate() {
            lp.set_cost(j, c);
        }
        lp.add_equality(vec![0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0], 0.0).unwrap();
        lp.add_equality(vec![0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0], 0.0).unwrap();
        lp.add_equality(vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 1.0).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_close(sol.objective, -0.05, 1e-10);
        assert_close(sol_dual(&lp, &sol), -0.05, 1e-10);
    }

    fn sol_dual(lp: &LinearProgram, sol: &LpSolution) -> f64 {
        lp.dual_objective(&sol.duals)
    }

    #[test]
    fn deterministic_output() {
        let mut lp = LinearProgram::new(4);
        lp.set_cost(0, 1.0);
        lp.set_cost(2, -1.0);
        lp.add_equality(vec![1.0, 2.0, 1.0, 0.0], 3.0).unwrap();
        lp.add_equality(vec![0.0, 1.0, -1.0, 1.0], 1.0).unwrap();
        let a = lp.solve().unwrap();
        let b = lp.solve().unwrap();
        assert_eq!(a, b);
    }
}
