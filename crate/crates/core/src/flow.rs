//! Rescaled curve-shortening flow `∂x/∂t = (k + ⟨x, N⟩) N` for closed plane curves.
//!
//! Its stationary points are exactly the self-shrinking curves `k = -⟨x, N⟩`. The round
//! circle is unstable under the raw flow to dilation and translation, so the
//! [`Normalization::AreaCentroid`] mode recentres the enclosed-area centroid at the origin
//! and rescales to enclosed area `π` after every step.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::tensor::{fourier_fit, FourierCurve};
use crate::{Error, Result};

/// Explicit steps must satisfy `dt ≤ STABILITY_FACTOR · h²` with `h` the arc-length spacing.
pub const STABILITY_FACTOR: f64 = 0.2;

/// Smallest node speed, relative to the mean, before the curve counts as no longer immersed.
pub const MIN_SPEED: f64 = 1e-6;

/// Relative deviation from uniform node spacing that triggers a full arc-length resample.
const RESAMPLE_THRESHOLD: f64 = 1e-6;

pub const DEFAULT_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// Raw flow.
    None,
    /// Recentre the area centroid and rescale to enclosed area `π` after each step.
    AreaCentroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowDiagnostics {
    pub length: f64,
    /// Signed enclosed area, positive for counterclockwise curves.
    pub area: f64,
    /// `max |k + ⟨x, N⟩|` over the nodes.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub curve: FourierCurve,
    pub t: f64,
    pub diagnostics: FlowDiagnostics,
}

struct Transforms {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Transforms {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Transforms {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn coefficients(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        buf
    }

    /// `m`-th derivative (`m ≥ 1`) of the values, or the mean-free antiderivative for
    /// `m = -1`. The Nyquist mode is dropped.
    fn derivative(&self, coeffs: &[Complex64], period: f64, m: i32) -> Vec<Complex64> {
        let n = coeffs.len();
        let w = 2.0 * PI / period;
        let scaled: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 || i == n / 2 {
                    return Complex64::new(0.0, 0.0);
                }
                let k = if i < n / 2 {
                    i as f64
                } else {
                    i as f64 - n as f64
                };
                c * Complex64::new(0.0, w * k).powi(m)
            })
            .collect();
        self.synthesize(&scaled)
    }
}

/// Node-space geometry of a curve sampled at `n` uniform parameter values.
struct NodeGeometry {
    x: Vec<Complex64>,
    /// `|x_σ|`
    speed: Vec<f64>,
    tangent: Vec<Complex64>,
    curvature: Vec<f64>,
    /// `k + ⟨x, N⟩`
    velocity: Vec<f64>,
    period: f64,
}

impl NodeGeometry {
    fn new(curve: &FourierCurve, transforms: &Transforms) -> Self {
        let x: Vec<Complex64> = curve
            .node_points()
            .into_iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let period = curve.period();
        let coeffs = transforms.coefficients(&x);
        let d1 = transforms.derivative(&coeffs, period, 1);
        let d2 = transforms.derivative(&coeffs, period, 2);
        let n = x.len();
        let mut speed = Vec::with_capacity(n);
        let mut tangent = Vec::with_capacity(n);
        let mut curvature = Vec::with_capacity(n);
        let mut velocity = Vec::with_capacity(n);
        for j in 0..n {
            let g = d1[j].norm();
            let t = d1[j] / g;
            let k = (d1[j].re * d2[j].im - d1[j].im * d2[j].re) / (g * g * g);
            // N = iT, so ⟨x, N⟩ = Re(conj(x) · iT)
            let x_dot_n = (x[j].conj() * Complex64::i() * t).re;
            speed.push(g);
            tangent.push(t);
            curvature.push(k);
            velocity.push(k + x_dot_n);
        }
        NodeGeometry {
            x,
            speed,
            tangent,
            curvature,
            velocity,
            period,
        }
    }

    fn diagnostics(&self, transforms: &Transforms) -> FlowDiagnostics {
        let (area, _) = area_and_centroid(&self.x, self.period, transforms);
        FlowDiagnostics {
            length: self.period * mean(&self.speed),
            area,
            residual: self.velocity.iter().fold(0.0, |a: f64, v| a.max(v.abs())),
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Signed enclosed area `½∮(x dy - y dx)` and the area centroid, by the trapezoid rule.
fn area_and_centroid(x: &[Complex64], period: f64, transforms: &Transforms) -> (f64, Complex64) {
    let d1 = transforms.derivative(&transforms.coefficients(x), period, 1);
    let h = period / x.len() as f64;
    let mut area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for (p, dp) in x.iter().zip(&d1) {
        area += 0.5 * (p.re * dp.im - p.im * dp.re);
        cx += 0.5 * p.re * p.re * dp.im;
        cy -= 0.5 * p.im * p.im * dp.re;
    }
    area *= h;
    (area, Complex64::new(cx * h, cy * h) / area)
}

fn fit_nodes(x: &[Complex64], period: f64) -> Result<FourierCurve> {
    let h = period / x.len() as f64;
    let samples: Vec<_> = x
        .iter()
        .enumerate()
        .map(|(j, p)| (j as f64 * h, [p.re, p.im]))
        .collect();
    fourier_fit(&samples, period)
}

fn normalize(x: &mut [Complex64], period: f64, transforms: &Transforms) -> Result<()> {
    let (area, centroid) = area_and_centroid(x, period, transforms);
    if !(area.abs() > 0.0 && area.is_finite()) {
        return Err(Error::DegenerateCurve(area));
    }
    let scale = (PI / area.abs()).sqrt();
    x.iter_mut().for_each(|p| *p = (*p - centroid) * scale);
    Ok(())
}

impl FlowState {
    /// Reparametrizes `curve` by arc length on `nodes` nodes and starts the clock at zero.
    pub fn new(curve: &FourierCurve, nodes: usize) -> Result<Self> {
        Self::at_time(curve.resample_by_arclength(nodes)?, 0.0)
    }

    fn at_time(curve: FourierCurve, t: f64) -> Result<Self> {
        let transforms = Transforms::new(curve.mode_count());
        let geometry = NodeGeometry::new(&curve, &transforms);
        Ok(FlowState {
            diagnostics: geometry.diagnostics(&transforms),
            curve,
            t,
        })
    }

    /// Largest stable explicit step, `STABILITY_FACTOR · h²`.
    pub fn dt_max(&self) -> f64 {
        let h = self.diagnostics.length / self.curve.mode_count() as f64;
        STABILITY_FACTOR * h * h
    }
}

/// One explicit Euler step of the flow.
///
/// Nodes move with the normal velocity `(k + ⟨x, N⟩) N` plus the tangential
/// reparametrization that keeps arc-length spacing uniform; the result is refit, resampled
/// by arc length if the spacing has drifted, and optionally normalized.
pub fn flow_step(state: &FlowState, dt: f64, normalization: Normalization) -> Result<FlowState> {
    if !(dt > 0.0 && dt <= state.dt_max()) {
        return Err(Error::InvalidParameter(format!(
            "time step {dt} outside (0, {}]",
            state.dt_max()
        )));
    }
    let n = state.curve.mode_count();
    let transforms = Transforms::new(n);
    let geo = NodeGeometry::new(&state.curve, &transforms);
    let mean_speed = mean(&geo.speed);
    let min_speed = geo.speed.iter().fold(f64::INFINITY, |a, &g| a.min(g));
    if !(min_speed > MIN_SPEED * mean_speed) {
        return Err(Error::FlowBreakdown {
            t: state.t,
            reason: format!("node speed {min_speed:e} below immersion threshold"),
        });
    }

    // g_t = W_σ - g k V, so W_σ = g k V - mean(g k V) keeps the speed uniform in σ.
    let stretch: Vec<f64> = (0..n)
        .map(|j| geo.speed[j] * geo.curvature[j] * geo.velocity[j])
        .collect();
    let stretch_mean = mean(&stretch);
    let w_sigma: Vec<Complex64> = stretch
        .iter()
        .map(|s| Complex64::new(s - stretch_mean, 0.0))
        .collect();
    let w = transforms.derivative(&transforms.coefficients(&w_sigma), geo.period, -1);

    let mut x: Vec<Complex64> = (0..n)
        .map(|j| {
            let t = geo.tangent[j];
            let normal = Complex64::i() * t;
            geo.x[j] + dt * (geo.velocity[j] * normal + w[j].re * t)
        })
        .collect();
    if normalization == Normalization::AreaCentroid {
        normalize(&mut x, geo.period, &transforms)?;
    }
    if x.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(Error::FlowBreakdown {
            t: state.t + dt,
            reason: "non-finite node position".to_string(),
        });
    }

    let mut curve = fit_nodes(&x, geo.period)?;
    let check = NodeGeometry::new(&curve, &transforms);
    let avg = mean(&check.speed);
    let drift = check
        .speed
        .iter()
        .fold(0.0, |a: f64, g| a.max((g / avg - 1.0).abs()));
    if drift > RESAMPLE_THRESHOLD {
        curve = curve
            .resample_by_arclength(n)
            .map_err(|e| Error::FlowBreakdown {
                t: state.t + dt,
                reason: e.to_string(),
            })?;
    }
    FlowState::at_time(curve, state.t + dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub normalization: Normalization,
    /// Step size as a fraction of `dt_max`, in `(0, 1]`.
    pub cfl: f64,
    /// Record a snapshot whenever this much time has passed since the last one.
    pub snapshot_interval: Option<f64>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            normalization: Normalization::AreaCentroid,
            cfl: 0.5,
            snapshot_interval: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub length: f64,
    pub area: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub series: Vec<FlowSample>,
    pub snapshots: Vec<Snapshot>,
    pub converged: bool,
    /// Whether the residual never increased between consecutive samples.
    pub monotone: bool,
    pub steps: usize,
}

impl FlowReport {
    pub fn final_residual(&self) -> f64 {
        self.series.last().map_or(f64::NAN, |s| s.residual)
    }

    /// Columns `t,length,area,residual`.
    pub fn write_series_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "t,length,area,residual")?;
        for s in &self.series {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t, s.length, s.area, s.residual
            )?;
        }
        Ok(())
    }

    /// Columns `t,index,x,y`, one row per node per snapshot.
    pub fn write_snapshots_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "t,index,x,y")?;
        for snap in &self.snapshots {
            for (i, p) in snap.points.iter().enumerate() {
                writeln!(out, "{:.16e},{},{:.16e},{:.16e}", snap.t, i, p[0], p[1])?;
            }
        }
        Ok(())
    }
}

fn sample(state: &FlowState) -> FlowSample {
    FlowSample {
        t: state.t,
        length: state.diagnostics.length,
        area: state.diagnostics.area,
        residual: state.diagnostics.residual,
    }
}

fn snapshot(state: &FlowState) -> Snapshot {
    Snapshot {
        t: state.t,
        points: state.curve.node_points(),
    }
}

/// Steps until `max |k + ⟨x, N⟩| ≤ tol` or `t_max` is reached. Running out of time is
/// reported through `converged = false`, not as an error.
pub fn flow_to_stationary(
    state: FlowState,
    tol: f64,
    t_max: f64,
    options: &FlowOptions,
) -> Result<(FlowState, FlowReport)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(options.cfl > 0.0 && options.cfl <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "cfl must lie in (0, 1], got {}",
            options.cfl
        )));
    }
    let mut state = state;
    let mut report = FlowReport {
        series: vec![sample(&state)],
        snapshots: Vec::new(),
        converged: false,
        monotone: true,
        steps: 0,
    };
    let mut last_snapshot = None;
    let mut take_snapshot = |state: &FlowState, report: &mut FlowReport| {
        if let Some(interval) = options.snapshot_interval {
            if last_snapshot.is_none_or(|t: f64| state.t - t >= interval - 1e-12) {
                report.snapshots.push(snapshot(state));
                last_snapshot = Some(state.t);
            }
        }
    };
    take_snapshot(&state, &mut report);

    while state.diagnostics.residual > tol {
        let remaining = t_max - state.t;
        if remaining <= 1e-14 * t_max.abs().max(1.0) {
            break;
        }
        let dt = (options.cfl * state.dt_max()).min(remaining);
        let next = flow_step(&state, dt, options.normalization)?;
        if next.diagnostics.residual > state.diagnostics.residual {
            report.monotone = false;
        }
        state = next;
        report.steps += 1;
        report.series.push(sample(&state));
        take_snapshot(&state, &mut report);
    }
    report.converged = state.diagnostics.residual <= tol;
    if options.snapshot_interval.is_some() && report.snapshots.last().map(|s| s.t) != Some(state.t)
    {
        report.snapshots.push(snapshot(&state));
    }
    Ok((state, report))
}

/// Initial curves by name: `circle`, `circle:R` (radius `R`), and `ellipse01`, the polar curve
/// `r(θ) = 1 + 0.1 cos 2θ`.
pub fn initial_curve(name: &str, nodes: usize) -> Result<FourierCurve> {
    let polar = |r: Box<dyn Fn(f64) -> f64>| {
        FourierCurve::from_fn(2.0 * PI, nodes, move |th| {
            let rr = r(th);
            [rr * th.cos(), rr * th.sin()]
        })
    };
    match name {
        "circle" => FourierCurve::circle(1.0, nodes),
        "ellipse01" => polar(Box::new(|th| 1.0 + 0.1 * (2.0 * th).cos())),
        _ => {
            let radius = name
                .strip_prefix("circle:")
                .and_then(|r| r.parse::<f64>().ok())
                .filter(|r| *r > 0.0 && r.is_finite())
                .ok_or_else(|| Error::UnknownExample(name.to_string()))?;
            FourierCurve::circle(radius, nodes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn start(name: &str) -> FlowState {
        FlowState::new(&initial_curve(name, DEFAULT_NODES).unwrap(), DEFAULT_NODES).unwrap()
    }

    #[test]
    fn unit_circle_is_stationary() {
        let state = start("circle");
        assert!(state.diagnostics.residual < 1e-12);
        assert!((state.diagnostics.area - PI).abs() < 1e-12);
        let mut s = state.clone();
        for _ in 0..20 {
            s = flow_step(&s, s.dt_max(), Normalization::None).unwrap();
        }
        let moved = s
            .curve
            .node_points()
            .iter()
            .zip(state.curve.node_points())
            .fold(0.0, |a: f64, (p, q)| {
                a.max((p[0] - q[0]).hypot(p[1] - q[1]))
            });
        assert!(moved < 1e-12, "{moved}");
    }

    #[test]
    fn raw_flow_matches_radial_ode() {
        // Circles obey r' = r - 1/r, so r² = 1 + (r0² - 1) e^{2t}.
        let mut s = start("circle:1.2");
        while s.t < 0.2 {
            let dt = (0.25 * s.dt_max()).min(0.2 - s.t);
            s = flow_step(&s, dt, Normalization::None).unwrap();
        }
        let r = s.diagnostics.length / (2.0 * PI);
        let expected = (1.0 + (1.44f64 - 1.0) * (2.0 * s.t).exp()).sqrt();
        assert!((r - expected).abs() < 1e-4, "{r} vs {expected}");
        assert!(r > 1.2);
    }

    #[test]
    fn normalized_circle_lands_on_unit_circle() {
        let s = start("circle:3");
        let next = flow_step(&s, s.dt_max(), Normalization::AreaCentroid).unwrap();
        assert!((next.diagnostics.area - PI).abs() < 1e-12);
        assert!(next.diagnostics.residual < 1e-10);
    }

    #[test]
    fn step_size_is_bounded() {
        let s = start("circle");
        assert!(flow_step(&s, 1.01 * s.dt_max(), Normalization::None).is_err());
        assert!(flow_step(&s, 0.0, Normalization::None).is_err());
    }

    #[test]
    fn perturbed_circle_converges() {
        let (end, report) =
            flow_to_stationary(start("ellipse01"), 1e-6, 10.0, &FlowOptions::default()).unwrap();
        assert!(report.converged, "{}", report.final_residual());
        assert!(end.diagnostics.residual <= 1e-6);
        assert!(report.monotone);
        let dist = end
            .curve
            .node_points()
            .iter()
            .fold(0.0, |a: f64, p| a.max((p[0].hypot(p[1]) - 1.0).abs()));
        assert!(dist < 1e-6, "{dist}");
    }

    #[test]
    fn short_run_reports_not_converged() {
        let opts = FlowOptions {
            normalization: Normalization::None,
            ..FlowOptions::default()
        };
        let (end, report) = flow_to_stationary(start("circle:3"), 1e-8, 1e-3, &opts).unwrap();
        assert!(!report.converged);
        assert!((end.t - 1e-3).abs() < 1e-15);
        assert_eq!(report.series.len(), report.steps + 1);
    }

    #[test]
    fn converged_input_returns_immediately() {
        let (end, report) =
            flow_to_stationary(start("circle"), 1e-8, 5.0, &FlowOptions::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.steps, 0);
        assert_eq!(end.t, 0.0);
    }

    #[test]
    fn csv_exports() {
        let opts = FlowOptions {
            snapshot_interval: Some(0.5),
            ..FlowOptions::default()
        };
        let (_, report) = flow_to_stationary(start("ellipse01"), 1e-3, 2.0, &opts).unwrap();
        let mut series = Vec::new();
        report.write_series_csv(&mut series).unwrap();
        let text = String::from_utf8(series).unwrap();
        assert!(text.starts_with("t,length,area,residual\n"));
        assert_eq!(text.lines().count(), report.series.len() + 1);
        let mut snaps = Vec::new();
        report.write_snapshots_csv(&mut snaps).unwrap();
        let snaps = String::from_utf8(snaps).unwrap();
        assert_eq!(
            snaps.lines().count(),
            1 + report.snapshots.len() * DEFAULT_NODES
        );
    }

    #[test]
    fn unknown_initial_curve() {
        assert!(initial_curve("square", 64).is_err());
        assert!(initial_curve("circle:-1", 64).is_err());
    }
}
