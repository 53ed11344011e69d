//! LP and MILP solving: a bounded revised simplex, best-first branch and bound
//! over the binaries, a fixed-binary re-solve for prices and an exhaustive
//! enumeration oracle.

mod lu;
mod milp;
mod simplex;

use crate::model::{ConstraintTag, Model};

pub use milp::{brute_force_milp, fix_and_price, solve_milp, MilpSolution};
pub use simplex::{Basis, BoundedLp, LpSolution, LpStatus, VarStatus};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub int_tol: f64,
    /// Absolute optimality gap for branch and bound.
    pub gap_tol: f64,
    pub max_iterations: usize,
    pub max_nodes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            opt_tol: 1e-7,
            int_tol: 1e-6,
            gap_tol: 1e-6,
            max_iterations: 5_000_000,
            max_nodes: 1_000_000,
        }
    }
}

/// Solves the LP relaxation of `model` (binaries relaxed to `[0, 1]`).
pub fn solve_lp(model: &Model, warm: Option<&Basis>, opts: &SolverOptions) -> Result<LpSolution> {
    let lp = BoundedLp::new(model);
    let lo: Vec<f64> = model.columns().iter().map(|c| c.lo).collect();
    let hi: Vec<f64> = model.columns().iter().map(|c| c.hi).collect();
    lp.solve(&lo, &hi, warm, false, opts)
}

impl LpSolution {
    /// Dual of the row carrying `tag`, if the model has such a row.
    pub fn dual(&self, model: &Model, tag: &ConstraintTag) -> Option<f64> {
        model.row_of(tag).map(|i| self.duals[i])
    }
}

#[cfg(test)]
mod tests;
