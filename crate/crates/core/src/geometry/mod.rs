//! Adapted Lagrangian frames, second fundamental form and its covariant derivative,
//! and grid-level fields, quadrature and the drift Laplacian on periodic charts.

mod chart;
mod frame;
mod grid;
mod spectral;

pub use chart::{ImmersionFn, SurfaceChart};
pub use frame::{
    frame_at, grad_a, intrinsic_gauss_curvature, lagrangian_defect, local_data,
    mean_curvature_derivative_defect, shrinker_residual, GradA, PointFrame,
    DEGENERATE_METRIC_THRESHOLD,
};
pub(crate) use grid::map_nodes;
pub use grid::{
    drift_laplacian, frames_on_grid, integrate, scalar_field, Grid, GridField, ScalarKind,
};
pub use spectral::{spectral_derivative_u, spectral_derivative_v};
