//! Identity suites over a chart and grid, collected into [`CheckReport`]s.

mod report;
mod suites;

pub use report::{CheckEntry, CheckReport, Tolerances};
pub use suites::{
    integral_suite, pinching_report, pointwise_suite, quadrature_convergence, simons_residual,
    simons_residual_with, simons_rhs, verify_suite, ConvergenceRow, CONVERGENCE_FLOOR,
};
