//! Regimes with (semi-)analytic solutions, used as ground truth for the live policy.

mod deterministic;
mod expansion;
mod quadcost;

pub use deterministic::{
    det_boundary, det_euler_lagrange_residual, det_trajectory_solve, euler_lagrange_residual_of,
    general_p_euler_lagrange_residual, DetTrajectory, Side,
};
pub use expansion::{expansion_boundary, expansion_dv1_dq, expansion_terms, ExpansionOrder, ExpansionTerms};
pub use quadcost::{quadcost_rate, quadcost_value, QuadCostValue};
