use std::f64::consts::PI;
use std::fmt::Debug;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::jet::MAX_ORDER;
use crate::{Error, Result};

/// A parametrized plane curve that can report derivatives up to [`MAX_ORDER`].
pub trait PlaneCurve: Debug + Send + Sync {
    /// Derivatives `c, c', ..., c⁗` at parameter `s`.
    fn derivatives(&self, s: f64) -> [[f64; 2]; MAX_ORDER + 1];

    /// Parameter period, or `None` for an open curve.
    fn period(&self) -> Option<f64>;

    /// Parameter extent used when sampling; equals the period for closed curves.
    fn extent(&self) -> f64;

    fn point(&self, s: f64) -> [f64; 2] {
        self.derivatives(s)[0]
    }
}

/// Straight line `s ↦ offset + s·direction`, a degenerate self-shrinking curve when the
/// offset vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct StraightLine {
    pub offset: [f64; 2],
    pub direction: [f64; 2],
    /// Length of the segment sampled by grids, starting at `s = -length / 2`.
    pub length: f64,
}

impl StraightLine {
    pub fn through_origin(direction: [f64; 2], length: f64) -> Self {
        let n = direction[0].hypot(direction[1]);
        StraightLine {
            offset: [0.0, 0.0],
            direction: [direction[0] / n, direction[1] / n],
            length,
        }
    }
}

impl PlaneCurve for StraightLine {
    fn derivatives(&self, s: f64) -> [[f64; 2]; MAX_ORDER + 1] {
        let mut out = [[0.0; 2]; MAX_ORDER + 1];
        out[0] = [
            self.offset[0] + s * self.direction[0],
            self.offset[1] + s * self.direction[1],
        ];
        out[1] = self.direction;
        out
    }

    fn period(&self) -> Option<f64> {
        None
    }

    fn extent(&self) -> f64 {
        self.length
    }
}

/// Trigonometric interpolant of a closed plane curve, written as the complex function
/// `z(s) = Σ c_k e^{i ω k (s - origin)}` with `ω = 2π / period`.
///
/// Coefficients are kept in FFT order. For an even mode count the Nyquist coefficient is
/// applied as a cosine so that the interpolant stays real-symmetric and differentiable.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve {
    period: f64,
    origin: f64,
    coeffs: Vec<Complex64>,
}

fn wavenumber(index: usize, n: usize) -> i64 {
    if index <= n / 2 {
        index as i64
    } else {
        index as i64 - n as i64
    }
}

fn forward_fft(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    let fft = FftPlanner::new().plan_fft_forward(buf.len());
    fft.process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Fits the trigonometric interpolant through uniformly spaced samples `(s_j, point_j)`.
///
/// The samples must cover exactly one period with spacing `period / N`, `N` even and at
/// least 8.
pub fn fourier_fit(samples: &[(f64, [f64; 2])], period: f64) -> Result<FourierCurve> {
    let n = samples.len();
    if n < 8 || !n.is_multiple_of(2) {
        return Err(Error::SampleCount(n));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "period must be positive, got {period}"
        )));
    }
    let origin = samples[0].0;
    let h = period / n as f64;
    for (j, (s, _)) in samples.iter().enumerate() {
        let offset = s - origin - j as f64 * h;
        if offset.abs() > 1e-9 * period {
            return Err(Error::NonUniformSpacing { index: j, offset });
        }
    }
    let values: Vec<Complex64> = samples
        .iter()
        .map(|(_, p)| Complex64::new(p[0], p[1]))
        .collect();
    Ok(FourierCurve {
        period,
        origin,
        coeffs: forward_fft(&values),
    })
}

impl FourierCurve {
    /// Samples `f` at `n` uniform parameters in `[0, period)` and fits the interpolant.
    pub fn from_fn(period: f64, n: usize, f: impl Fn(f64) -> [f64; 2]) -> Result<Self> {
        let h = period / n as f64;
        let samples: Vec<_> = (0..n)
            .map(|j| {
                let s = j as f64 * h;
                (s, f(s))
            })
            .collect();
        fourier_fit(&samples, period)
    }

    /// Circle of the given radius centred at the origin, traversed counterclockwise at
    /// unit speed.
    pub fn circle(radius: f64, n: usize) -> Result<Self> {
        Self::from_fn(2.0 * PI * radius, n, |s| {
            let (sn, cs) = (s / radius).sin_cos();
            [radius * cs, radius * sn]
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn mode_count(&self) -> usize {
        self.coeffs.len()
    }

    /// `(wavenumber, coefficient)` for every stored mode.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.coeffs.len();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (wavenumber(i, n), *c))
    }

    fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// `m`-th derivative of the complex representation at `s`.
    pub fn derivative_complex(&self, s: f64, m: u32) -> Complex64 {
        let n = self.coeffs.len();
        let w = self.omega();
        let t = s - self.origin;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if n.is_multiple_of(2) && i == n / 2 {
                // cos(a t) differentiated m times: a^m cos(a t + m π/2)
                let a = w * (n / 2) as f64;
                acc += c * a.powi(m as i32) * (a * t + m as f64 * PI / 2.0).cos();
                continue;
            }
            let k = wavenumber(i, n) as f64;
            let ik = Complex64::new(0.0, w * k);
            acc += c * ik.powu(m) * Complex64::from_polar(1.0, w * k * t);
        }
        acc
    }

    pub fn eval(&self, s: f64) -> [f64; 2] {
        let z = self.derivative_complex(s, 0);
        [z.re, z.im]
    }

    pub fn derivative(&self, s: f64, m: u32) -> [f64; 2] {
        let z = self.derivative_complex(s, m);
        [z.re, z.im]
    }

    pub fn speed(&self, s: f64) -> f64 {
        self.derivative_complex(s, 1).norm()
    }

    /// Signed curvature `(c' × c'') / |c'|³`; positive on counterclockwise circles.
    pub fn curvature(&self, s: f64) -> f64 {
        let d1 = self.derivative_complex(s, 1);
        let d2 = self.derivative_complex(s, 2);
        (d1.re * d2.im - d1.im * d2.re) / d1.norm().powi(3)
    }

    /// Unit normal `rot90(T)`, pointing to the left of the direction of travel.
    pub fn normal(&self, s: f64) -> [f64; 2] {
        let d1 = self.derivative_complex(s, 1);
        let speed = d1.norm();
        [-d1.im / speed, d1.re / speed]
    }

    /// Pointwise self-shrinker defect `k + ⟨x, N⟩`, zero on curves with `k = -⟨x, N⟩`.
    pub fn shrinker_defect(&self, s: f64) -> f64 {
        let x = self.eval(s);
        let nrm = self.normal(s);
        self.curvature(s) + x[0] * nrm[0] + x[1] * nrm[1]
    }

    /// Uniform parameter nodes of the interpolant.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.coeffs.len();
        (0..n)
            .map(|j| self.origin + j as f64 * self.period / n as f64)
            .collect()
    }

    /// Node values recovered exactly from the coefficients by an inverse transform.
    pub fn node_points(&self) -> Vec<[f64; 2]> {
        let mut buf = self.coeffs.clone();
        let fft = FftPlanner::new().plan_fft_inverse(buf.len());
        fft.process(&mut buf);
        buf.iter().map(|z| [z.re, z.im]).collect()
    }

    /// Length of the closed curve, by the trapezoid rule on a refined node set.
    pub fn length(&self) -> f64 {
        let m = 4 * self.coeffs.len();
        let h = self.period / m as f64;
        let total: f64 = (0..m).map(|j| self.speed(self.origin + j as f64 * h)).sum();
        total * h
    }

    /// Reparametrizes by arc length and refits on `n` nodes.
    ///
    /// The arc-length function is integrated spectrally from the speed and inverted with
    /// Newton's method, so the result is accurate to the resolution of the interpolant.
    pub fn resample_by_arclength(&self, n: usize) -> Result<FourierCurve> {
        let m = 4 * self.coeffs.len().max(n);
        let h = self.period / m as f64;
        let speeds: Vec<Complex64> = (0..m)
            .map(|j| Complex64::new(self.speed(self.origin + j as f64 * h), 0.0))
            .collect();
        let min_speed = speeds.iter().fold(f64::INFINITY, |a, c| a.min(c.re));
        if min_speed <= 1e-6 {
            return Err(Error::DegenerateCurve(min_speed));
        }
        let b = forward_fft(&speeds);
        let w = self.omega();
        let length = b[0].re * self.period;
        let arc = |sigma: f64| -> f64 {
            let t = sigma - self.origin;
            let mut s = b[0].re * t;
            for (i, c) in b.iter().enumerate().skip(1) {
                if i == m / 2 {
                    continue;
                }
                let k = wavenumber(i, m) as f64;
                let ik = Complex64::new(0.0, w * k);
                s += (c / ik * (Complex64::from_polar(1.0, w * k * t) - 1.0)).re;
            }
            s
        };
        let target_h = length / n as f64;
        let mut samples = Vec::with_capacity(n);
        for j in 0..n {
            let target = j as f64 * target_h;
            let mut sigma = self.origin + target / b[0].re;
            for _ in 0..50 {
                let step = (arc(sigma) - target) / self.speed(sigma);
                sigma -= step;
                if step.abs() < 1e-15 * self.period {
                    break;
                }
            }
            samples.push((target, self.eval(sigma)));
        }
        fourier_fit(&samples, length)
    }

    pub fn map_points(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Result<FourierCurve> {
        let nodes = self.nodes();
        let pts = self.node_points();
        let samples: Vec<_> = nodes.into_iter().zip(pts.into_iter().map(f)).collect();
        fourier_fit(&samples, self.period)
    }
}

impl PlaneCurve for FourierCurve {
    fn derivatives(&self, s: f64) -> [[f64; 2]; MAX_ORDER + 1] {
        std::array::from_fn(|m| self.derivative(s, m as u32))
    }

    fn period(&self) -> Option<f64> {
        Some(self.period)
    }

    fn extent(&self) -> f64 {
        self.period
    }
}
