//! Numerical solvers: quasi-Newton (BFGS) minimization, golden-section
//! scalar minimization and a dense primal simplex for linear programs.

mod qn;
mod scalar;
mod simplex;

pub use qn::{minimize_qn, QNConfig};
pub use scalar::{minimize_scalar_convex, ScalarConfig};
pub use simplex::{solve_lp_simplex, LPProblem};

use std::fmt;

/// Terminal state of a solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    IterationCap,
    Unbounded,
    Infeasible,
    /// Optimal, but a non-basic column has zero reduced cost so the optimum
    /// is not unique.
    DegenerateMultiple,
}

impl Status {
    /// True when the reported point is an optimum.
    pub fn is_optimal(self) -> bool {
        matches!(self, Status::Converged | Status::DegenerateMultiple)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::IterationCap => "iteration-cap",
            Status::Unbounded => "unbounded",
            Status::Infeasible => "infeasible",
            Status::DegenerateMultiple => "degenerate-multiple",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Empty for infeasible or unbounded LPs.
    pub solution: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub status: Status,
}

#[inline]
pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
