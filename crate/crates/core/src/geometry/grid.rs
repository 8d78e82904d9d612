use rayon::prelude::*;
use serde::Serialize;

use super::chart::SurfaceChart;
use super::frame::{frame_at, PointFrame, DEGENERATE_METRIC_THRESHOLD};
use super::spectral::{spectral_derivative_u, spectral_derivative_v};
use crate::tensor::Vec4;
use crate::{Error, Result};

/// Uniform periodic grid with `nu × nv` nodes; node `(i, j)` is stored at `j * nu + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub nu: usize,
    pub nv: usize,
}

impl Grid {
    pub fn new(nu: usize, nv: usize) -> Result<Self> {
        if nu == 0 || nv == 0 || !nu.is_multiple_of(2) || !nv.is_multiple_of(2) {
            return Err(Error::InvalidGrid { nu, nv });
        }
        Ok(Grid { nu, nv })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    /// Node spacing `(P_u / N_u, P_v / N_v)` on the given chart.
    pub fn spacing(&self, chart: &SurfaceChart) -> [f64; 2] {
        let p = chart.periods();
        [p[0] / self.nu as f64, p[1] / self.nv as f64]
    }

    /// Parameter values of node `(i, j)`, wrapping indices periodically.
    pub fn node(&self, chart: &SurfaceChart, i: usize, j: usize) -> (f64, f64) {
        let [du, dv] = self.spacing(chart);
        let start = chart.start();
        (
            start[0] + (i % self.nu) as f64 * du,
            start[1] + (j % self.nv) as f64 * dv,
        )
    }

    /// `(i, j)` for a linear node index.
    pub fn unravel(&self, idx: usize) -> (usize, usize) {
        (idx % self.nu, idx / self.nu)
    }
}

/// A real field sampled on grid nodes in row-major order (`u` fastest).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::FieldSize {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(GridField { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (i, j) = grid.unravel(idx);
                f(i, j)
            })
            .collect();
        GridField { grid, values }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        assert_eq!(self.grid, other.grid);
        GridField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// Nodewise scalar quantities available from [`PointFrame`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    /// `|A|²`
    A2,
    /// `|H|²`
    H2,
    /// Gauss curvature
    GaussK,
    /// `|x|²`
    X2,
    /// Gaussian weight `e^{-|x|²/2}`
    Weight,
}

impl ScalarKind {
    pub fn of(&self, frame: &PointFrame) -> f64 {
        match self {
            ScalarKind::A2 => frame.a2,
            ScalarKind::H2 => frame.h2,
            ScalarKind::GaussK => frame.gauss_k,
            ScalarKind::X2 => frame.x.norm_sq(),
            ScalarKind::Weight => (-0.5 * frame.x.norm_sq()).exp(),
        }
    }
}

fn node_error(err: Error, i: usize, j: usize) -> Error {
    match err {
        Error::DegenerateMetric { u, v, det } => Error::DegenerateNode { i, j, u, v, det },
        other => other,
    }
}

/// Evaluates `f` at every node in parallel and returns results in node order. The first
/// failing node in that order is reported.
pub(crate) fn map_nodes<T: Send>(
    chart: &SurfaceChart,
    grid: Grid,
    f: impl Fn(f64, f64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = grid.unravel(idx);
            let (u, v) = grid.node(chart, i, j);
            f(u, v).map_err(|e| node_error(e, i, j))
        })
        .collect()
}

/// Adapted frames at every grid node.
pub fn frames_on_grid(chart: &SurfaceChart, grid: Grid) -> Result<Vec<PointFrame>> {
    map_nodes(chart, grid, |u, v| frame_at(chart, u, v))
}

pub fn scalar_field(chart: &SurfaceChart, grid: Grid, kind: ScalarKind) -> Result<GridField> {
    let values = map_nodes(chart, grid, |u, v| {
        frame_at(chart, u, v).map(|f| kind.of(&f))
    })?;
    GridField::new(grid, values)
}

/// First-order metric data at a node.
struct MetricNode {
    x: Vec4,
    d1: [Vec4; 2],
    inv: [[f64; 2]; 2],
    sqrt_det: f64,
}

fn metric_node(chart: &SurfaceChart, u: f64, v: f64) -> Result<MetricNode> {
    let jets = chart.jet(u, v, 1);
    let x = Vec4(jets.map(|j| j.value()));
    let d1 = [
        Vec4(jets.map(|j| j.derivative(1, 0))),
        Vec4(jets.map(|j| j.derivative(0, 1))),
    ];
    let g = [
        [d1[0].dot(&d1[0]), d1[0].dot(&d1[1])],
        [d1[1].dot(&d1[0]), d1[1].dot(&d1[1])],
    ];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(det > DEGENERATE_METRIC_THRESHOLD) {
        return Err(Error::DegenerateMetric { u, v, det });
    }
    Ok(MetricNode {
        x,
        d1,
        inv: [
            [g[1][1] / det, -g[0][1] / det],
            [-g[1][0] / det, g[0][0] / det],
        ],
        sqrt_det: det.sqrt(),
    })
}

/// Neumaier-compensated sum in slice order.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `∫ f dv` by the periodic trapezoid rule, `Σ f √det g Δu Δv`, summed serially in node
/// order with compensation.
pub fn integrate(chart: &SurfaceChart, grid: Grid, field: &GridField) -> Result<f64> {
    if field.grid != grid {
        return Err(Error::FieldSize {
            expected: grid.len(),
            got: field.values.len(),
        });
    }
    let density = map_nodes(chart, grid, |u, v| {
        metric_node(chart, u, v).map(|m| m.sqrt_det)
    })?;
    let [du, dv] = grid.spacing(chart);
    let sum = compensated_sum(field.values.iter().zip(&density).map(|(f, w)| f * w));
    Ok(sum * du * dv)
}

/// Drift Laplacian `ℒf = Δf - ⟨x, ∇f⟩` on a compact chart.
///
/// `Δf = (1/√g) ∂_a(√g g^{ab} ∂_b f)` with every coordinate derivative taken spectrally,
/// and `⟨x, ∇f⟩ = g^{ab} ⟨x, x_a⟩ ∂_b f`.
pub fn drift_laplacian(chart: &SurfaceChart, grid: Grid, field: &GridField) -> Result<GridField> {
    if !chart.is_compact() {
        return Err(Error::NotCompact(chart.label().to_string()));
    }
    if field.grid != grid {
        return Err(Error::FieldSize {
            expected: grid.len(),
            got: field.values.len(),
        });
    }
    let metric = map_nodes(chart, grid, |u, v| metric_node(chart, u, v))?;
    let [pu, pv] = chart.periods();
    let (nu, nv) = (grid.nu, grid.nv);
    let fu = spectral_derivative_u(&field.values, nu, nv, pu);
    let fv = spectral_derivative_v(&field.values, nu, nv, pv);

    let mut flux_u = vec![0.0; grid.len()];
    let mut flux_v = vec![0.0; grid.len()];
    let mut drift = vec![0.0; grid.len()];
    for (idx, m) in metric.iter().enumerate() {
        let grad = [
            m.inv[0][0] * fu[idx] + m.inv[0][1] * fv[idx],
            m.inv[1][0] * fu[idx] + m.inv[1][1] * fv[idx],
        ];
        flux_u[idx] = m.sqrt_det * grad[0];
        flux_v[idx] = m.sqrt_det * grad[1];
        drift[idx] = grad[0] * m.x.dot(&m.d1[0]) + grad[1] * m.x.dot(&m.d1[1]);
    }
    let div_u = spectral_derivative_u(&flux_u, nu, nv, pu);
    let div_v = spectral_derivative_v(&flux_v, nu, nv, pv);
    let values = metric
        .iter()
        .enumerate()
        .map(|(idx, m)| (div_u[idx] + div_v[idx]) / m.sqrt_det - drift[idx])
        .collect();
    GridField::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn clifford() -> SurfaceChart {
        SurfaceChart::new("clifford", [2.0 * PI; 2], |s, t| {
            [s.cos(), s.sin(), t.cos(), t.sin()]
        })
    }

    #[test]
    fn grid_rejects_odd_sizes() {
        assert!(Grid::new(16, 15).is_err());
        assert!(Grid::new(0, 16).is_err());
        assert!(Grid::new(16, 8).is_ok());
    }

    #[test]
    fn clifford_area() {
        let c = clifford();
        let g = Grid::square(64).unwrap();
        let one = GridField::from_fn(g, |_, _| 1.0);
        let area = integrate(&c, g, &one).unwrap();
        assert!((area - 4.0 * PI * PI).abs() <= 1e-9 * 4.0 * PI * PI);
        let zero = GridField::from_fn(g, |_, _| 0.0);
        assert_eq!(integrate(&c, g, &zero).unwrap(), 0.0);
    }

    #[test]
    fn drift_laplacian_of_constants_and_modes() {
        let c = clifford();
        let g = Grid::square(32).unwrap();
        let konst = GridField::from_fn(g, |_, _| 3.5);
        assert!(drift_laplacian(&c, g, &konst).unwrap().max_abs() <= 1e-10);
        // flat metric and x tangent-free: ℒ cos(s) = -cos(s)
        let mode = GridField::from_fn(g, |i, j| g.node(&c, i, j).0.cos());
        let lf = drift_laplacian(&c, g, &mode).unwrap();
        let err = lf.zip_with(&mode, |a, b| a + b).max_abs();
        assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let vals = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(vals), 2.0);
    }
}
