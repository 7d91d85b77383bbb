//! Numerical engines shared by the estimators.

mod ascent;
mod simplex;

pub use ascent::{golden_max, maximize_ratio, maximize_ratio_from, AscentConfig, AscentResult};
pub use simplex::{solve_lp, solve_lp_with, Constraint, LinearProgram, LpSolution, LpStatus, PivotRule, Relation};
