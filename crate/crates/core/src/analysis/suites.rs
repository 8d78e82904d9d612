use crate::geometry::map_nodes;
use crate::geometry::{
    drift_laplacian, integrate, intrinsic_gauss_curvature, lagrangian_defect, local_data,
    mean_curvature_derivative_defect, scalar_field, GradA, Grid, GridField, PointFrame, ScalarKind,
    SurfaceChart,
};
use crate::{Error, Result};

use super::report::{CheckReport, Tolerances};

/// Absolute floor below which a quadrature value counts as converged on analytic charts.
pub const CONVERGENCE_FLOOR: f64 = 1e-12;

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc: f64, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v)
        }
    })
}

fn node_data(chart: &SurfaceChart, grid: Grid) -> Result<Vec<(PointFrame, GradA)>> {
    map_nodes(chart, grid, |u, v| local_data(chart, u, v))
}

fn shrinker_norm(frame: &PointFrame) -> f64 {
    let [a, b] = frame.shrinker_defects();
    a.hypot(b)
}

/// Nodewise checks: Lagrangian condition, shrinker equation, symmetry of `h` and `∇A`, and the
/// mean curvature derivative identity `H^{k*}_{,i} = Σ_j h_{ij}^{k*} ⟨x, e_j⟩`.
pub fn pointwise_suite(chart: &SurfaceChart, grid: Grid, tol: &Tolerances) -> Result<CheckReport> {
    let data = node_data(chart, grid)?;
    let lagrangian = map_nodes(chart, grid, |u, v| Ok(lagrangian_defect(chart, u, v)))?;
    let mut report = CheckReport::new(chart.label(), grid);
    report.check(
        "lagrangian_defect",
        max_of(lagrangian),
        tol.get("lagrangian_defect"),
        "symplectic form ⟨J x_u, x_v⟩ vanishes on the tangent plane",
    );
    report.check(
        "shrinker_residual",
        max_of(data.iter().map(|(f, _)| shrinker_norm(f))),
        tol.get("shrinker_residual"),
        "self-shrinker equation H + x^⊥ = 0",
    );
    report.check(
        "h_symmetry",
        max_of(data.iter().map(|(f, _)| f.symmetry_defect())),
        tol.get("h_symmetry"),
        "h_{ij}^{k*} totally symmetric on a Lagrangian surface",
    );
    report.check(
        "grad_a_symmetry",
        max_of(data.iter().map(|(_, g)| g.symmetry_defect())),
        tol.get("grad_a_symmetry"),
        "h_{ij,l}^{k*} totally symmetric (Codazzi equation plus Lagrangian symmetry)",
    );
    report.check(
        "mean_curvature_derivative",
        max_of(
            data.iter()
                .map(|(f, g)| mean_curvature_derivative_defect(f, g)),
        ),
        tol.get("mean_curvature_derivative"),
        "H^{k*}_{,i} = Σ_j h_{ij}^{k*} ⟨x, e_j⟩ on a self-shrinker",
    );
    Ok(report)
}

/// Right-hand side of the Simons-type identity at one point:
/// `|∇A|² + |A|² - 3/2 |A|⁴ + 2|H|²|A|² - 1/2 |H|⁴ - Σ H^{k*} H^{l*} h_{ij}^{k*} h_{ij}^{l*}`.
pub fn simons_rhs(frame: &PointFrame, grad: &GradA) -> f64 {
    let a2 = frame.a2;
    let h2 = frame.h2;
    grad.norm_sq + a2 - 1.5 * a2 * a2 + 2.0 * h2 * a2 - 0.5 * h2 * h2 - frame.mean_weighted_square()
}

/// Nodewise `|½ ℒ|A|² - RHS|`, refusing surfaces whose shrinker residual exceeds the default
/// `shrinker_residual` tolerance.
pub fn simons_residual(chart: &SurfaceChart, grid: Grid) -> Result<GridField> {
    simons_residual_with(chart, grid, Tolerances::default().get("shrinker_residual"))
}

/// As [`simons_residual`] with an explicit on-shell tolerance.
///
/// The left side uses only the `|A|²` field and the spectral drift Laplacian; the right side
/// uses only pointwise frame and `∇A` data.
pub fn simons_residual_with(chart: &SurfaceChart, grid: Grid, on_shell: f64) -> Result<GridField> {
    let data = node_data(chart, grid)?;
    let residual = max_of(data.iter().map(|(f, _)| shrinker_norm(f)));
    if !(residual <= on_shell) {
        return Err(Error::OffShell {
            label: chart.label().to_string(),
            residual,
            tolerance: on_shell,
        });
    }
    let a2 = scalar_field(chart, grid, ScalarKind::A2)?;
    let lhs = drift_laplacian(chart, grid, &a2)?;
    let values = lhs
        .values
        .iter()
        .zip(&data)
        .map(|(l, (f, g))| (0.5 * l - simons_rhs(f, g)).abs())
        .collect();
    GridField::new(grid, values)
}

/// Signed values of `∫(2 - |H|²)`, `∫(2 - |x|²)e^{-|x|²/2}` and `∫K`.
fn integrals(chart: &SurfaceChart, grid: Grid) -> Result<[(&'static str, f64); 3]> {
    if !chart.is_compact() {
        return Err(Error::NotCompact(chart.label().to_string()));
    }
    let h2 = scalar_field(chart, grid, ScalarKind::H2)?;
    let x2 = scalar_field(chart, grid, ScalarKind::X2)?;
    let k = scalar_field(chart, grid, ScalarKind::GaussK)?;
    let mean_part = h2.map(|h| 2.0 - h);
    let weighted = x2.map(|r| (2.0 - r) * (-0.5 * r).exp());
    Ok([
        ("integral_2_minus_h2", integrate(chart, grid, &mean_part)?),
        (
            "integral_weighted_2_minus_x2",
            integrate(chart, grid, &weighted)?,
        ),
        ("integral_gauss_k", integrate(chart, grid, &k)?),
    ])
}

/// Integral identities of a compact self-shrinker torus, each expected to vanish.
pub fn integral_suite(chart: &SurfaceChart, grid: Grid, tol: &Tolerances) -> Result<CheckReport> {
    let mut report = CheckReport::new(chart.label(), grid);
    let what = [
        "∫(2 - |H|²) dv = 0 on a compact self-shrinker",
        "∫(2 - |x|²) e^{-|x|²/2} dv = 0 on a compact self-shrinker",
        "∫K dv = 0 by Gauss–Bonnet on a torus",
    ];
    for ((name, value), what) in integrals(chart, grid)?.into_iter().zip(what) {
        report.check(name, value.abs(), tol.get(name), what);
        report.stat(name, value);
    }
    let area = integrate(chart, grid, &GridField::from_fn(grid, |_, _| 1.0))?;
    report.stat("area", area);
    Ok(report)
}

/// One row of a two-resolution quadrature comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub name: &'static str,
    pub coarse: f64,
    pub fine: f64,
    /// `|fine| ≤ max(|coarse| / 10, floor)`
    pub pass: bool,
}

/// Evaluates the integral identities on `grid` and on the grid doubled in both directions.
pub fn quadrature_convergence(
    chart: &SurfaceChart,
    grid: Grid,
    floor: f64,
) -> Result<Vec<ConvergenceRow>> {
    let coarse = integrals(chart, grid)?;
    let fine = integrals(chart, Grid::new(2 * grid.nu, 2 * grid.nv)?)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(&(name, c), &(_, f))| ConvergenceRow {
            name,
            coarse: c,
            fine: f,
            pass: f.abs() <= (c.abs() / 10.0).max(floor),
        })
        .collect())
}

/// Extremes of `|A|²`, `|H|²`, `K` and `|x|²`, the Gauss equation check, and for charts that
/// carry pinching bounds, the two bound checks.
pub fn pinching_report(chart: &SurfaceChart, grid: Grid, tol: &Tolerances) -> Result<CheckReport> {
    let frames = map_nodes(chart, grid, |u, v| {
        let frame = crate::geometry::frame_at(chart, u, v)?;
        let k = intrinsic_gauss_curvature(chart, u, v)?;
        Ok((frame, k))
    })?;
    let mut report = CheckReport::new(chart.label(), grid);

    let extremes = |f: &dyn Fn(&(PointFrame, f64)) -> f64| {
        frames
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            })
    };
    let (a2_min, a2_max) = extremes(&|(f, _)| f.a2);
    let (h2_min, h2_max) = extremes(&|(f, _)| f.h2);
    let (k_min, k_max) = extremes(&|(_, k)| *k);
    let (x2_min, x2_max) = extremes(&|(f, _)| f.x.norm_sq());
    for (name, value) in [
        ("a2_min", a2_min),
        ("a2_max", a2_max),
        ("h2_min", h2_min),
        ("h2_max", h2_max),
        ("k_min", k_min),
        ("k_max", k_max),
        ("x2_min", x2_min),
        ("x2_max", x2_max),
        // Rigidity threshold |A|² ≤ 2: reported, not asserted.
        ("a2_max_minus_2", a2_max - 2.0),
    ] {
        report.stat(name, value);
    }

    report.check(
        "gauss_consistency",
        max_of(frames.iter().map(|(f, k)| (2.0 * k - (f.h2 - f.a2)).abs())),
        tol.get("gauss_consistency"),
        "intrinsic curvature agrees with the Gauss equation 2K = |H|² - |A|²",
    );

    if let Some((lower, upper)) = chart.pinching_bounds() {
        report.stat("a2_lower_bound", lower);
        report.stat("a2_upper_bound", upper);
        report.check(
            "a2_lower_bound",
            lower - a2_min,
            tol.get("a2_lower_bound"),
            "|A|² ≥ (3m² + n²) / (n(m + n)) on the torus T_{m,n}",
        );
        report.check(
            "a2_upper_bound",
            a2_max - upper,
            tol.get("a2_upper_bound"),
            "|A|² ≤ (m² + 3n²) / (m(m + n)) on the torus T_{m,n}",
        );
    }
    Ok(report)
}

/// Every suite on a compact chart. A refused Simons check is recorded as a failing entry.
pub fn verify_suite(chart: &SurfaceChart, grid: Grid, tol: &Tolerances) -> Result<CheckReport> {
    if !chart.is_compact() {
        return Err(Error::NotCompact(chart.label().to_string()));
    }
    let mut report = pointwise_suite(chart, grid, tol)?;
    let simons_what = "½ℒ|A|² = |∇A|² + |A|² - 3/2|A|⁴ + 2|H|²|A|² - ½|H|⁴ - Σ H^{k*}H^{l*}h_{ij}^{k*}h_{ij}^{l*}";
    match simons_residual_with(chart, grid, tol.get("shrinker_residual")) {
        Ok(field) => report.check(
            "simons_identity",
            field.max(),
            tol.get("simons_identity"),
            simons_what,
        ),
        Err(Error::OffShell { .. }) => report.check(
            "simons_identity",
            f64::NAN,
            tol.get("simons_identity"),
            "refused: the identity only holds on a self-shrinker",
        ),
        Err(e) => return Err(e),
    }
    report.merge(integral_suite(chart, grid, tol)?);
    report.merge(pinching_report(chart, grid, tol)?);
    Ok(report)
}
