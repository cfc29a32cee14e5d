//! Exact solver for 0/1 programs `min cᵀx  s.t.  Mx = q,  x ∈ {0,1}ⁿ` with
//! `M` entries in `{-1, 0, +1}` and strictly positive costs.
//!
//! The LP relaxation is solved by a bounded simplex (basic solutions only);
//! integrality is enforced by best-first branch and bound on the most
//! fractional variable.

mod bnb;
mod lp;
mod lp_format;

use thiserror::Error;

pub use bnb::{solve_binary, IpSolution, IpStatus, SolveOptions};
pub use lp::{solve_lp, LpSolution};
pub use lp_format::LpFormatError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("LP relaxation is infeasible")]
    Infeasible,
    #[error("node limit of {0} exceeded")]
    NodeLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// A 0/1 program with sparse `±1` constraint rows and integer right-hand sides.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BinaryProgram {
    costs: Vec<f64>,
    names: Vec<String>,
    rows: Vec<Vec<(usize, i8)>>,
    rhs: Vec<i32>,
}

impl BinaryProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, cost: f64, name: impl Into<String>) -> usize {
        self.costs.push(cost);
        self.names.push(name.into());
        self.costs.len() - 1
    }

    /// Adds `Σ coeff·x_var = rhs`. An empty row with zero right-hand side is vacuous and skipped;
    /// an empty row with nonzero right-hand side is kept and makes the program infeasible.
    pub fn add_row(&mut self, row: Vec<(usize, i8)>, rhs: i32) {
        if row.is_empty() && rhs == 0 {
            return;
        }
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn n_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<(usize, i8)>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[i32] {
        &self.rhs
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidProgram(m));
        if let Some(i) = self.costs.iter().position(|c| !(c.is_finite() && *c > 0.0)) {
            return bad(format!("cost of variable {i} is {} (must be > 0)", self.costs[i]));
        }
        for (r, row) in self.rows.iter().enumerate() {
            let mut vars: Vec<usize> = row.iter().map(|&(v, _)| v).collect();
            vars.sort_unstable();
            if vars.windows(2).any(|w| w[0] == w[1]) {
                return bad(format!("row {r} mentions a variable twice"));
            }
            if let Some(&(v, c)) = row.iter().find(|&&(v, c)| v >= self.n_vars() || (c != 1 && c != -1)) {
                return bad(format!("row {r} has entry ({v}, {c})"));
            }
        }
        Ok(())
    }

    /// `Mx - q` in exact integer arithmetic.
    pub fn residual(&self, x: &[bool]) -> Vec<i64> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, &b)| row.iter().filter(|&&(v, _)| x[v]).map(|&(_, c)| c as i64).sum::<i64>() - b as i64)
            .collect()
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        x.len() == self.n_vars() && self.residual(x).iter().all(|&r| r == 0)
    }

    pub fn objective(&self, x: &[bool]) -> f64 {
        self.costs.iter().zip(x).filter(|(_, &b)| b).map(|(c, _)| c).sum()
    }

    /// Multiplies every cost by `factor` (> 0).
    pub fn scale_costs(&mut self, factor: f64) {
        self.costs.iter_mut().for_each(|c| *c *= factor);
    }

    /// Column of variable `v` as `(row, coeff)` pairs.
    pub fn column(&self, v: usize) -> Vec<(usize, i8)> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(r, row)| row.iter().find(|&&(u, _)| u == v).map(|&(_, c)| (r, c)))
            .collect()
    }
}
