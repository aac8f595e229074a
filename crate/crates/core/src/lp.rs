//! Dense two-phase simplex for small linear programs.
//!
//! Problems are stated as `minimize cᵀx` subject to rows `aᵢᵀx {≤,≥,=} bᵢ`
//! and finite lower bounds on every variable (default 0, no upper bounds).
//! Pivoting follows Bland's rule throughout, so the method cannot cycle on
//! degenerate vertices. Intended for the few dozen variables a Best-Worst
//! model produces, not for large sparse systems.

use thiserror::Error;

use crate::tolerances::{LP_FEASIBILITY, LP_PIVOT, LP_REDUCED_COST};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint {row} has {found} coefficients, expected {expected}")]
    Dimension {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("variable index {0} out of range")]
    VariableIndex(usize),
    #[error("non-finite value in linear program data")]
    NonFinite,
    #[error("linear program is infeasible (phase-one residual {residual:.3e})")]
    Infeasible {
        residual: f64,
        /// Row multipliers `y` with `yᵀA ≤ 0` over the standard-form columns
        /// and `yᵀb > 0`, indexed like the constraints (rhs shifted by the
        /// lower bounds).
        certificate: Vec<f64>,
    },
    #[error("linear program is unbounded along variable {variable}")]
    Unbounded { variable: usize },
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
}

/// A linear program in inequality form with lower-bounded variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    lower_bounds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    /// A nonbasic column with zero reduced cost admits a strictly positive
    /// step at the optimum, so a second optimal vertex exists.
    pub alternative_optima: bool,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![0.0; n],
        }
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_bounds
    }

    pub fn add_constraint(
        &mut self,
        coefficients: Vec<f64>,
        sense: Sense,
        rhs: f64,
    ) -> Result<&mut Self, LpError> {
        if coefficients.len() != self.objective.len() {
            return Err(LpError::Dimension {
                row: self.constraints.len(),
                expected: self.objective.len(),
                found: coefficients.len(),
            });
        }
        self.constraints.push(Constraint {
            coefficients,
            sense,
            rhs,
        });
        Ok(self)
    }

    pub fn set_lower_bound(&mut self, variable: usize, bound: f64) -> Result<&mut Self, LpError> {
        let slot = self
            .lower_bounds
            .get_mut(variable)
            .ok_or(LpError::VariableIndex(variable))?;
        *slot = bound;
        Ok(self)
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for (v, lb) in x.iter().zip(&self.lower_bounds) {
            worst = worst.max(lb - v);
        }
        for c in &self.constraints {
            let lhs: f64 = c.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
            let gap = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }

    fn check_finite(&self) -> Result<(), LpError> {
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.lower_bounds.iter().all(|v| v.is_finite())
            && self
                .constraints
                .iter()
                .all(|c| c.rhs.is_finite() && c.coefficients.iter().all(|v| v.is_finite()));
        if finite {
            Ok(())
        } else {
            Err(LpError::NonFinite)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    /// m rows of `ncols` coefficients followed by the rhs.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    pivots: usize,
    pivot_limit: usize,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    fn rhs(&self, row: usize) -> f64 {
        self.rows[row][self.ncols()]
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<(), LpError> {
        self.pivots += 1;
        if self.pivots > self.pivot_limit {
            return Err(LpError::IterationLimit(self.pivot_limit));
        }
        let width = self.ncols() + 1;
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = other[col];
            if factor != 0.0 {
                for k in 0..width {
                    other[k] -= factor * pivot_row[k];
                }
                other[col] = 0.0;
            }
        }
        self.basis[row] = col;
        Ok(())
    }

    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut d = costs.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb != 0.0 {
                for (j, dj) in d.iter_mut().enumerate() {
                    *dj -= cb * self.rows[r][j];
                }
            }
        }
        d
    }

    /// Minimum-ratio row for `col`, ties broken by the smallest basic index.
    fn ratio_test(&self, col: usize) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows.len() {
            let a = self.rows[r][col];
            if a > LP_PIVOT {
                let ratio = self.rhs(r) / a;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio < bratio - LP_PIVOT
                            || (ratio <= bratio + LP_PIVOT && self.basis[r] < self.basis[br])
                        {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
        }
        best
    }

    /// Runs Bland-rule pivots until optimal for `costs`. Columns with
    /// `allowed[j] == false` never enter.
    fn optimize(&mut self, costs: &[f64], allowed: &[bool]) -> Result<(), LpError> {
        loop {
            let d = self.reduced_costs(costs);
            let entering = (0..self.ncols()).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && d[j] < -LP_REDUCED_COST
            });
            let Some(col) = entering else {
                return Ok(());
            };
            match self.ratio_test(col) {
                Some((row, _)) => self.pivot(row, col)?,
                None => return Err(LpError::Unbounded { variable: col }),
            }
        }
    }

    fn objective_value(&self, costs: &[f64]) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(r, &b)| costs[b] * self.rhs(r))
            .sum()
    }
}

/// Solves `lp` to optimality.
pub fn lp_minimize(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.check_finite()?;
    let n = lp.num_variables();
    let m = lp.constraints.len();

    // Shift x = x' + lb so every variable is nonnegative, then make rhs ≥ 0.
    let mut rows: Vec<(Vec<f64>, Sense, f64, f64)> = Vec::with_capacity(m);
    for c in &lp.constraints {
        let shift: f64 = c
            .coefficients
            .iter()
            .zip(&lp.lower_bounds)
            .map(|(a, lb)| a * lb)
            .sum();
        let rhs = c.rhs - shift;
        if rhs < 0.0 {
            let flipped = match c.sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
            rows.push((c.coefficients.iter().map(|a| -a).collect(), flipped, -rhs, -1.0));
        } else {
            rows.push((c.coefficients.clone(), c.sense, rhs, 1.0));
        }
    }

    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let ncols = n + n_slack + n_art;
    let mut kinds = vec![ColumnKind::Structural; n];
    kinds.extend(std::iter::repeat_n(ColumnKind::Slack, n_slack));
    kinds.extend(std::iter::repeat_n(ColumnKind::Artificial, n_art));

    let mut table = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack_col = n;
    let mut art_col = n + n_slack;
    for (coeffs, sense, rhs, _) in &rows {
        let mut row = vec![0.0; ncols + 1];
        row[..n].copy_from_slice(coeffs);
        row[ncols] = *rhs;
        match sense {
            Sense::Le => {
                row[slack_col] = 1.0;
                basis.push(slack_col);
                slack_col += 1;
            }
            Sense::Ge => {
                row[slack_col] = -1.0;
                slack_col += 1;
                row[art_col] = 1.0;
                basis.push(art_col);
                art_col += 1;
            }
            Sense::Eq => {
                row[art_col] = 1.0;
                basis.push(art_col);
                art_col += 1;
            }
        }
        table.push(row);
    }

    let mut tab = Tableau {
        rows: table,
        basis,
        kinds,
        pivots: 0,
        pivot_limit: 200 * (ncols + m) + 1000,
    };

    // Phase one: drive the artificial sum to zero.
    let phase_one: Vec<f64> = tab
        .kinds
        .iter()
        .map(|k| if *k == ColumnKind::Artificial { 1.0 } else { 0.0 })
        .collect();
    let initial_basis = tab.basis.clone();
    if n_art > 0 {
        let all = vec![true; ncols];
        tab.optimize(&phase_one, &all)?;
        let residual = tab.objective_value(&phase_one);
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if residual > LP_FEASIBILITY * scale {
            let d = tab.reduced_costs(&phase_one);
            let certificate = initial_basis
                .iter()
                .zip(&rows)
                .map(|(&col, r)| (phase_one[col] - d[col]) * r.3)
                .collect();
            return Err(LpError::Infeasible {
                residual,
                certificate,
            });
        }
        // Pivot remaining (zero-valued) artificials out of the basis; rows
        // where that is impossible are linearly dependent and get dropped.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.kinds[tab.basis[r]] == ColumnKind::Artificial {
                let replacement = (0..ncols).find(|&j| {
                    tab.kinds[j] != ColumnKind::Artificial
                        && !tab.basis.contains(&j)
                        && tab.rows[r][j].abs() > LP_PIVOT.sqrt()
                });
                match replacement {
                    Some(j) => tab.pivot(r, j)?,
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut costs = vec![0.0; ncols];
    costs[..n].copy_from_slice(&lp.objective);
    let allowed: Vec<bool> = tab
        .kinds
        .iter()
        .map(|k| *k != ColumnKind::Artificial)
        .collect();
    tab.optimize(&costs, &allowed)?;

    let mut values = lp.lower_bounds.clone();
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            values[b] += tab.rhs(r);
        }
    }
    let objective = lp.objective.iter().zip(&values).map(|(c, v)| c * v).sum();

    let d = tab.reduced_costs(&costs);
    let alternative_optima = (0..ncols).any(|j| {
        allowed[j]
            && !tab.basis.contains(&j)
            && d[j].abs() <= LP_REDUCED_COST
            && tab
                .ratio_test(j)
                .is_some_and(|(_, step)| step > LP_FEASIBILITY)
    });

    Ok(LpSolution {
        values,
        objective,
        alternative_optima,
        pivots: tab.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_active_bound() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_constraint(vec![1.0], Sense::Ge, 3.0).unwrap();
        let sol = lp_minimize(&lp).unwrap();
        assert!((sol.values[0] - 3.0).abs() < 1e-12);
        assert!((sol.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn equality_forces_objective() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0, 1.0], Sense::Eq, 1.0).unwrap();
        let sol = lp_minimize(&lp).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
        assert!(lp.max_violation(&sol.values) < 1e-9);
        // any split of x + y = 1 is optimal
        assert!(sol.alternative_optima);
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = LinearProgram::new(vec![-3.0, -5.0]);
        lp.add_constraint(vec![1.0, 0.0], Sense::Le, 4.0).unwrap();
        lp.add_constraint(vec![0.0, 2.0], Sense::Le, 12.0).unwrap();
        lp.add_constraint(vec![3.0, 2.0], Sense::Le, 18.0).unwrap();
        let sol = lp_minimize(&lp).unwrap();
        assert!((sol.values[0] - 2.0).abs() < 1e-9);
        assert!((sol.values[1] - 6.0).abs() < 1e-9);
        assert!((sol.objective + 36.0).abs() < 1e-9);
        assert!(!sol.alternative_optima);
    }

    #[test]
    fn infeasible_with_farkas_certificate() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_constraint(vec![1.0], Sense::Ge, 3.0).unwrap();
        lp.add_constraint(vec![1.0], Sense::Le, 1.0).unwrap();
        let LpError::Infeasible { certificate, .. } = lp_minimize(&lp).unwrap_err() else {
            panic!("expected infeasibility");
        };
        // yᵀb > 0, yᵀa ≤ 0, y ≥ 0 on ≥ rows, y ≤ 0 on ≤ rows
        let yb = certificate[0] * 3.0 + certificate[1] * 1.0;
        let ya = certificate[0] + certificate[1];
        assert!(yb > 0.0);
        assert!(ya <= 1e-12);
        assert!(certificate[0] >= 0.0 && certificate[1] <= 0.0);
    }

    #[test]
    fn unbounded_is_reported() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.add_constraint(vec![1.0, -1.0], Sense::Le, 1.0).unwrap();
        assert!(matches!(lp_minimize(&lp), Err(LpError::Unbounded { .. })));
    }

    #[test]
    fn lower_bounds_and_negative_rhs() {
        // min x + y, x ≥ -2 (bound), y ≥ 1 (bound), -x - y ≤ 5
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.set_lower_bound(0, -2.0).unwrap();
        lp.set_lower_bound(1, 1.0).unwrap();
        lp.add_constraint(vec![-1.0, -1.0], Sense::Le, 5.0).unwrap();
        lp.add_constraint(vec![1.0, 0.0], Sense::Le, -1.0).unwrap();
        let sol = lp_minimize(&lp).unwrap();
        assert!((sol.objective + 1.0).abs() < 1e-12);
        assert!(lp.max_violation(&sol.values) < 1e-9);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add_constraint(vec![1.0, 1.0], Sense::Eq, 2.0).unwrap();
        lp.add_constraint(vec![2.0, 2.0], Sense::Eq, 4.0).unwrap();
        let sol = lp_minimize(&lp).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
        assert!((sol.values[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling instance under the largest-coefficient rule.
        let mut lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add_constraint(vec![0.25, -60.0, -0.04, 9.0], Sense::Le, 0.0)
            .unwrap();
        lp.add_constraint(vec![0.5, -90.0, -0.02, 3.0], Sense::Le, 0.0)
            .unwrap();
        lp.add_constraint(vec![0.0, 0.0, 1.0, 0.0], Sense::Le, 1.0)
            .unwrap();
        let sol = lp_minimize(&lp).unwrap();
        assert!((sol.objective + 0.05).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        assert!(matches!(
            lp.add_constraint(vec![1.0], Sense::Le, 1.0),
            Err(LpError::Dimension { .. })
        ));
    }
}
