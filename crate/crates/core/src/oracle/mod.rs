//! Brute-force optimizers that check the analytic machinery.

mod compare;
mod discrete;
mod grid;

pub use compare::{compare_boundaries, expansion_samples, BoundaryComparison, BoundaryReport, BoundarySample};
pub use discrete::{solve_discrete_deterministic, DiscreteProblem, DiscreteSolution};
pub use grid::{solve_hjb_grid, GridSpec, GridValue};
