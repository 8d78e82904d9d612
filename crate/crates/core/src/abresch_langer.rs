//! Planar self-shrinking curves `k = -⟨x, N⟩`.
//!
//! Curves are integrated in arc length with the classical fourth-order Runge–Kutta
//! scheme on the state `(x, T)`, where `x' = T`, `T' = kN` and `N = rot90(T)`. With this
//! orientation the unit circle run counterclockwise has `k = 1`. Along any solution the
//! quantity `k e^{-|x|²/2}` is constant, and the trace records it at every sample as an
//! integration-quality monitor.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::tensor::{fourier_fit, FourierCurve, PlaneCurve, StraightLine};
use crate::{Error, Result};

/// Integration stops with [`Error::Divergence`] once `|x|` exceeds this radius.
pub const DIVERGENCE_RADIUS: f64 = 10.0;

/// Position and tangent must both return to within this distance for a closed trace.
pub const CLOSURE_TOL: f64 = 1e-7;

/// Largest admissible arc-length step.
pub const MAX_STEP: f64 = 1e-2;

/// Default arc-length step for shooting and registry curves.
pub const DEFAULT_STEP: f64 = 1e-3;

const MAX_SHOOT_LENGTH: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveState {
    pub x: [f64; 2],
    /// Unit tangent.
    pub t: [f64; 2],
    /// Arc length.
    pub s: f64,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn rot90(a: [f64; 2]) -> [f64; 2] {
    [-a[1], a[0]]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl CurveState {
    pub fn new(x: [f64; 2], t: [f64; 2], s: f64) -> Self {
        CurveState { x, t, s }
    }

    pub fn normal(&self) -> [f64; 2] {
        rot90(self.t)
    }

    /// Curvature forced by the shrinker equation, `k = -⟨x, N⟩`.
    pub fn curvature(&self) -> f64 {
        -dot(self.x, self.normal())
    }
}

/// `k e^{-|x|²/2}`, constant along every self-shrinking curve.
pub fn conserved_quantity(state: &CurveState) -> f64 {
    state.curvature() * (-0.5 * dot(state.x, state.x)).exp()
}

fn derivative(x: [f64; 2], t: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let n = rot90(t);
    let k = -dot(x, n);
    (t, [k * n[0], k * n[1]])
}

fn rk4_step(state: &CurveState, h: f64) -> CurveState {
    let add = |a: [f64; 2], b: [f64; 2], c: f64| [a[0] + c * b[0], a[1] + c * b[1]];
    let (k1x, k1t) = derivative(state.x, state.t);
    let (k2x, k2t) = derivative(add(state.x, k1x, 0.5 * h), add(state.t, k1t, 0.5 * h));
    let (k3x, k3t) = derivative(add(state.x, k2x, 0.5 * h), add(state.t, k2t, 0.5 * h));
    let (k4x, k4t) = derivative(add(state.x, k3x, h), add(state.t, k3t, h));
    let comb = |a: [f64; 2], k1: [f64; 2], k2: [f64; 2], k3: [f64; 2], k4: [f64; 2]| {
        std::array::from_fn(|i| a[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    };
    let x = comb(state.x, k1x, k2x, k3x, k4x);
    let t: [f64; 2] = comb(state.t, k1t, k2t, k3t, k4t);
    let len = t[0].hypot(t[1]);
    CurveState {
        x,
        t: [t[0] / len, t[1] / len],
        s: state.s + h,
    }
}

/// Finds `τ ∈ [0, h]` with `g(τ) = 0` given a sign change, by the Illinois variant of
/// regula falsi.
fn refine_root(mut g: impl FnMut(f64) -> f64, h: f64) -> f64 {
    let (mut a, mut b) = (0.0, h);
    let (mut fa, mut fb) = (g(a), g(b));
    let mut side = 0;
    for _ in 0..100 {
        if (b - a).abs() < 1e-16 {
            break;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = g(c);
        if fc == 0.0 {
            return c;
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

/// Arc-length samples of a solution with the conserved quantity at each sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTrace {
    pub states: Vec<CurveState>,
    pub c_log: Vec<f64>,
    pub closed: bool,
    /// Arc length at closure.
    pub period: Option<f64>,
}

impl CurveTrace {
    fn push(&mut self, state: CurveState) {
        self.c_log.push(conserved_quantity(&state));
        self.states.push(state);
    }

    /// `(max c - min c) / |mean c|`, or zero for an identically vanishing log.
    pub fn c_spread(&self) -> f64 {
        let min = self.c_log.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.c_log.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = self.c_log.iter().sum::<f64>() / self.c_log.len() as f64;
        if max == min {
            0.0
        } else {
            (max - min) / mean.abs()
        }
    }

    /// Mean of the conserved-quantity log.
    pub fn c_mean(&self) -> f64 {
        self.c_log.iter().sum::<f64>() / self.c_log.len() as f64
    }

    /// `(k_min, k_max)` over the samples.
    pub fn curvature_extremes(&self) -> (f64, f64) {
        self.states
            .iter()
            .map(CurveState::curvature)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| {
                (lo.min(k), hi.max(k))
            })
    }

    /// Writes the trace as CSV with columns `s, x1, x2, T1, T2, k, c`.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "s,x1,x2,T1,T2,k,c")?;
        for (st, c) in self.states.iter().zip(&self.c_log) {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                st.s,
                st.x[0],
                st.x[1],
                st.t[0],
                st.t[1],
                st.curvature(),
                c
            )?;
        }
        Ok(())
    }
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step <= MAX_STEP) {
        return Err(Error::InvalidParameter(format!(
            "step must lie in (0, {MAX_STEP}], got {step}"
        )));
    }
    Ok(())
}

/// Integrates the shrinking-curve ODE from `(x0, t0)` for at most `max_length` arc length.
///
/// The run ends early, marked closed, when the curve returns to its start with position
/// and tangent matching to [`CLOSURE_TOL`]; the closing sample is placed exactly on the
/// plane through `x0` orthogonal to `t0`.
pub fn integrate_curve(
    x0: [f64; 2],
    t0: [f64; 2],
    step: f64,
    max_length: f64,
) -> Result<CurveTrace> {
    check_step(step)?;
    if (t0[0].hypot(t0[1]) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(
            "initial tangent must be a unit vector".into(),
        ));
    }
    let start = CurveState::new(x0, t0, 0.0);
    let mut trace = CurveTrace {
        states: Vec::new(),
        c_log: Vec::new(),
        closed: false,
        period: None,
    };
    trace.push(start);
    let phase = |st: &CurveState| dot([st.x[0] - x0[0], st.x[1] - x0[1]], t0);
    let mut departed = false;
    let mut current = start;
    while current.s < max_length {
        let h = step.min(max_length - current.s);
        let next = rk4_step(&current, h);
        if dot(next.x, next.x).sqrt() > DIVERGENCE_RADIUS {
            return Err(Error::Divergence {
                s: next.s,
                bound: DIVERGENCE_RADIUS,
            });
        }
        if !departed && dist(next.x, x0) > 10.0 * step {
            departed = true;
        }
        if departed
            && phase(&current) < 0.0
            && phase(&next) >= 0.0
            && dist(next.x, x0) < 10.0 * step
            && dot(next.t, t0) > 0.0
        {
            let tau = refine_root(|tau| phase(&rk4_step(&current, tau)), h);
            let closing = rk4_step(&current, tau);
            if dist(closing.x, x0) <= CLOSURE_TOL && dist(closing.t, t0) <= CLOSURE_TOL {
                trace.period = Some(closing.s);
                trace.closed = true;
                trace.push(closing);
                return Ok(trace);
            }
        }
        trace.push(next);
        current = next;
    }
    Ok(trace)
}

/// Integrates from the launch point `(r, 0)` with tangent `(0, 1)` until the tangent has
/// turned by `2πp/q`, returning `⟨x/|x|, T⟩` there together with the arc length.
///
/// A zero of this radial-velocity mismatch means the launch point, a radial extremum, is
/// reached again after one petal, rotated by `2πp/q`; `q` petals then close the curve.
pub fn petal_mismatch(r: f64, rotation: (u32, u32), step: f64) -> Result<(f64, f64)> {
    check_step(step)?;
    let (p, q) = rotation;
    if p == 0 || q == 0 {
        return Err(Error::InvalidParameter(
            "rotation numbers must be positive".into(),
        ));
    }
    let target = 2.0 * PI * p as f64 / q as f64;
    let turn = |a: [f64; 2], b: [f64; 2]| (a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b));
    let mut current = CurveState::new([r, 0.0], [0.0, 1.0], 0.0);
    let mut turned = 0.0;
    while current.s < MAX_SHOOT_LENGTH {
        let next = rk4_step(&current, step);
        if dot(next.x, next.x).sqrt() > DIVERGENCE_RADIUS {
            return Err(Error::Divergence {
                s: next.s,
                bound: DIVERGENCE_RADIUS,
            });
        }
        let d = turn(current.t, next.t);
        if d <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tangent stopped turning at s = {} for launch radius {r}",
                next.s
            )));
        }
        if turned + d >= target {
            let tau = refine_root(
                |tau| turned + turn(current.t, rk4_step(&current, tau).t) - target,
                step,
            );
            let end = rk4_step(&current, tau);
            let radius = dot(end.x, end.x).sqrt();
            return Ok((dot(end.x, end.t) / radius, end.s));
        }
        turned += d;
        current = next;
    }
    Err(Error::InvalidParameter(format!(
        "no full petal within arc length {MAX_SHOOT_LENGTH} for launch radius {r}"
    )))
}

/// A closed solution found by shooting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedCurve {
    pub launch_radius: f64,
    pub rotation: (u32, u32),
    pub bisection_steps: usize,
    pub trace: CurveTrace,
}

/// Why a bracket produced no closed curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoClosure {
    pub bracket: (f64, f64),
    pub mismatch: (f64, f64),
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ShootOutcome {
    Closed(ClosedCurve),
    NoClosure(NoClosure),
}

impl ShootOutcome {
    pub fn closed(self) -> Option<ClosedCurve> {
        match self {
            ShootOutcome::Closed(c) => Some(c),
            ShootOutcome::NoClosure(_) => None,
        }
    }
}

/// Bisects the launch radius over `[r_lo, r_hi]` on [`petal_mismatch`] and integrates the
/// resulting closed curve over its `q` petals.
pub fn shoot_closed(r_lo: f64, r_hi: f64, rotation: (u32, u32)) -> Result<ShootOutcome> {
    shoot_closed_with_step(r_lo, r_hi, rotation, DEFAULT_STEP)
}

pub fn shoot_closed_with_step(
    r_lo: f64,
    r_hi: f64,
    rotation: (u32, u32),
    step: f64,
) -> Result<ShootOutcome> {
    if !(0.0 < r_lo && r_lo < r_hi) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < r_lo < r_hi, got [{r_lo}, {r_hi}]"
        )));
    }
    let (mut a, mut b) = (r_lo, r_hi);
    let (fa0, _) = petal_mismatch(a, rotation, step)?;
    let (fb0, _) = petal_mismatch(b, rotation, step)?;
    if fa0 != 0.0 && fb0 != 0.0 && (fa0 > 0.0) == (fb0 > 0.0) {
        return Ok(ShootOutcome::NoClosure(NoClosure {
            bracket: (r_lo, r_hi),
            mismatch: (fa0, fb0),
            reason: "mismatch does not change sign over the bracket".into(),
        }));
    }
    let mut fa = fa0;
    let mut steps = 0;
    if fa0 == 0.0 {
        b = a;
    } else if fb0 == 0.0 {
        a = b;
    }
    while b - a > 1e-14 * b && steps < 200 {
        let mid = 0.5 * (a + b);
        let (fm, _) = petal_mismatch(mid, rotation, step)?;
        steps += 1;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let r = 0.5 * (a + b);
    let (_, petal_length) = petal_mismatch(r, rotation, step)?;
    let length = petal_length * rotation.1 as f64;
    let trace = integrate_curve([r, 0.0], [0.0, 1.0], step, length * 1.01 + 20.0 * step)?;
    if !trace.closed {
        return Ok(ShootOutcome::NoClosure(NoClosure {
            bracket: (r_lo, r_hi),
            mismatch: (fa0, fb0),
            reason: format!("bisection converged to r = {r} but the trace did not close"),
        }));
    }
    Ok(ShootOutcome::Closed(ClosedCurve {
        launch_radius: r,
        rotation,
        bisection_steps: steps,
        trace,
    }))
}

/// Samples [`petal_mismatch`] on `samples` uniformly spaced launch radii.
pub fn scan_mismatch(
    r_lo: f64,
    r_hi: f64,
    samples: usize,
    rotation: (u32, u32),
) -> Result<Vec<(f64, f64)>> {
    use rayon::prelude::*;
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let r = r_lo + (r_hi - r_lo) * i as f64 / (samples - 1) as f64;
            petal_mismatch(r, rotation, DEFAULT_STEP).map(|(m, _)| (r, m))
        })
        .collect()
}

/// Scans `(r_lo, r_hi)` for sign changes of the mismatch and shoots on the first bracket
/// that excludes the round circle `r = 1`.
pub fn find_noncircular(
    r_lo: f64,
    r_hi: f64,
    samples: usize,
    rotation: (u32, u32),
) -> Result<Option<ClosedCurve>> {
    let scan = scan_mismatch(r_lo, r_hi, samples, rotation)?;
    for w in scan.windows(2) {
        let ((ra, ma), (rb, mb)) = (w[0], w[1]);
        if (ma > 0.0) != (mb > 0.0) && !(ra <= 1.0 && 1.0 <= rb) {
            if let ShootOutcome::Closed(c) = shoot_closed(ra, rb, rotation)? {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

fn quintic_hermite(a: &CurveState, b: &CurveState, s: f64) -> [f64; 2] {
    let h = b.s - a.s;
    let t = (s - a.s) / h;
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);
    let w = [
        1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
        t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
        0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
        0.5 * t3 - t4 + 0.5 * t5,
        -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
        10.0 * t3 - 15.0 * t4 + 6.0 * t5,
    ];
    let acc = |st: &CurveState| {
        let n = st.normal();
        let k = st.curvature();
        [k * n[0], k * n[1]]
    };
    let (aa, ab) = (acc(a), acc(b));
    std::array::from_fn(|i| {
        w[0] * a.x[i]
            + w[1] * h * a.t[i]
            + w[2] * h * h * aa[i]
            + w[3] * h * h * ab[i]
            + w[4] * h * b.t[i]
            + w[5] * b.x[i]
    })
}

/// Largest admissible reconstruction error of [`to_fourier`].
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

/// Resamples a closed trace at `modes` uniform arc-length nodes (quintic Hermite on
/// position, tangent and curvature vector) and fits a [`FourierCurve`] of period equal to
/// the closed length.
pub fn to_fourier(trace: &CurveTrace, modes: usize) -> Result<FourierCurve> {
    let length = match (trace.closed, trace.period) {
        (true, Some(l)) => l,
        _ => return Err(Error::OpenTrace),
    };
    let states = &trace.states;
    let mut samples = Vec::with_capacity(modes);
    let mut seg = 0;
    for j in 0..modes {
        let s = j as f64 * length / modes as f64;
        while seg + 2 < states.len() && states[seg + 1].s <= s {
            seg += 1;
        }
        samples.push((s, quintic_hermite(&states[seg], &states[seg + 1], s)));
    }
    let curve = fourier_fit(&samples, length)?;
    let error = states
        .iter()
        .map(|st| dist(curve.eval(st.s), st.x))
        .fold(0.0, f64::max);
    if error > RECONSTRUCTION_TOL {
        return Err(Error::Reconstruction {
            error,
            tolerance: RECONSTRUCTION_TOL,
        });
    }
    Ok(curve)
}

/// Recognized names for [`named_curve`].
pub fn is_curve_name(name: &str) -> bool {
    matches!(name, "circle" | "circleA" | "circleB" | "circle2" | "line")
        || name
            .strip_prefix("al:")
            .and_then(|r| r.split_once(','))
            .is_some_and(|(p, q)| p.parse::<u32>().is_ok() && q.parse::<u32>().is_ok())
}

/// Mode count used when exporting non-circular registry curves.
pub const REGISTRY_MODES: usize = 128;

/// Closed-curve registry.
///
/// * `circle` – analytic unit circle
/// * `circleA`, `circleB` – unit circles recovered by shooting over `[0.9, 1.1]`
/// * `circle2` – circle of radius 2 (not a shrinker)
/// * `line` – segment of the line through the origin, length 4
/// * `al:p,q` – non-circular closed solution with `q` petals and rotation `2πp`, located
///   by scanning launch radii in `(1, 3]`
pub fn named_curve(name: &str) -> Result<Arc<dyn PlaneCurve>> {
    let unknown = || Error::UnknownExample(name.to_string());
    match name {
        "circle" => Ok(Arc::new(FourierCurve::circle(1.0, 16)?)),
        "circle2" => Ok(Arc::new(FourierCurve::circle(2.0, 16)?)),
        "line" => Ok(Arc::new(StraightLine::through_origin([1.0, 0.0], 4.0))),
        "circleA" | "circleB" => {
            let closed = shoot_closed(0.9, 1.1, (1, 1))?
                .closed()
                .ok_or_else(unknown)?;
            Ok(Arc::new(to_fourier(&closed.trace, 32)?))
        }
        _ => {
            let (p, q) = name
                .strip_prefix("al:")
                .and_then(|r| r.split_once(','))
                .and_then(|(p, q)| Some((p.parse::<u32>().ok()?, q.parse::<u32>().ok()?)))
                .ok_or_else(unknown)?;
            let found = find_noncircular(1.0 + 1e-3, 3.0, 200, (p, q))?.ok_or_else(|| {
                Error::InvalidParameter(format!("no closed curve with rotation ({p}, {q})"))
            })?;
            Ok(Arc::new(to_fourier(&found.trace, REGISTRY_MODES)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_closes_with_constant_curvature() {
        let trace = integrate_curve([1.0, 0.0], [0.0, 1.0], 1e-3, 10.0).unwrap();
        assert!(trace.closed);
        assert!((trace.period.unwrap() - 2.0 * PI).abs() < 1e-8);
        for st in &trace.states {
            assert!((st.curvature() - 1.0).abs() < 1e-10);
        }
        let c = (-0.5f64).exp();
        assert!((trace.c_mean() - c).abs() <= 1e-9 * c);
        assert!(trace.c_spread() <= 1e-9);
    }

    #[test]
    fn line_through_origin_never_closes() {
        let trace = integrate_curve([0.0, 0.0], [1.0, 0.0], 1e-3, 5.0).unwrap();
        assert!(!trace.closed);
        assert!(trace.c_log.iter().all(|&c| c == 0.0));
        assert!(trace.states.iter().all(|st| st.curvature() == 0.0));
    }

    #[test]
    fn divergence_is_reported() {
        let err = integrate_curve([0.0, 0.0], [1.0, 0.0], 1e-2, 50.0).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(integrate_curve([1.0, 0.0], [0.0, 1.0], 0.0, 1.0).is_err());
        assert!(integrate_curve([1.0, 0.0], [0.0, 1.0], 0.02, 1.0).is_err());
        assert!(integrate_curve([1.0, 0.0], [0.0, 2.0], 1e-3, 1.0).is_err());
        assert!(shoot_closed(1.1, 0.9, (1, 1)).is_err());
    }

    #[test]
    fn conserved_quantity_examples() {
        let circle = CurveState::new([1.0, 0.0], [0.0, 1.0], 0.0);
        assert!((conserved_quantity(&circle) - (-0.5f64).exp()).abs() < 1e-16);
        let line = CurveState::new([0.0, 0.0], [0.6, 0.8], 0.0);
        assert_eq!(conserved_quantity(&line), 0.0);
    }

    #[test]
    fn shooting_recovers_the_unit_circle() {
        let c = shoot_closed(0.9, 1.1, (1, 1)).unwrap().closed().unwrap();
        assert!((c.launch_radius - 1.0).abs() < 1e-8);
        assert!(c.trace.c_spread() <= 1e-8);
    }

    #[test]
    fn bracket_without_sign_change() {
        match shoot_closed(1.05, 1.1, (1, 1)).unwrap() {
            ShootOutcome::NoClosure(n) => assert_eq!(n.bracket, (1.05, 1.1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn open_trace_cannot_be_fitted() {
        let trace = integrate_curve([0.0, 0.0], [1.0, 0.0], 1e-3, 1.0).unwrap();
        assert_eq!(to_fourier(&trace, 16), Err(Error::OpenTrace));
    }

    #[test]
    fn circle_trace_exports_single_mode() {
        let trace = integrate_curve([1.0, 0.0], [0.0, 1.0], 1e-3, 10.0).unwrap();
        let curve = to_fourier(&trace, 64).unwrap();
        let big: Vec<_> = curve.modes().filter(|(_, c)| c.norm() > 1e-9).collect();
        assert_eq!(big.len(), 1);
        assert_eq!(big[0].0, 1);
    }

    #[test]
    fn csv_header_and_rows() {
        let trace = integrate_curve([1.0, 0.0], [0.0, 1.0], 1e-2, 0.05).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("s,x1,x2,T1,T2,k,c"));
        assert_eq!(lines.count(), trace.states.len());
    }
}
