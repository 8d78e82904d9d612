use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Differentiates each periodic line of samples spectrally. The Nyquist mode is dropped,
/// which keeps the derivative of real data real.
fn differentiate_lines(lines: &mut [Vec<Complex64>], period: f64) {
    let n = lines[0].len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let w = 2.0 * PI / period;
    for line in lines.iter_mut() {
        fwd.process(line);
        for (i, c) in line.iter_mut().enumerate() {
            let k = if i < n / 2 {
                i as f64
            } else if i == n / 2 && n.is_multiple_of(2) {
                0.0
            } else {
                i as f64 - n as f64
            };
            *c *= Complex64::new(0.0, w * k / n as f64);
        }
        inv.process(line);
    }
}

/// `∂f/∂u` of a row-major field (`u` fastest) that is periodic in `u` with the given period.
pub fn spectral_derivative_u(values: &[f64], nu: usize, nv: usize, period: f64) -> Vec<f64> {
    let mut lines: Vec<Vec<Complex64>> = (0..nv)
        .map(|j| {
            values[j * nu..(j + 1) * nu]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect()
        })
        .collect();
    differentiate_lines(&mut lines, period);
    let mut out = vec![0.0; nu * nv];
    for (j, line) in lines.iter().enumerate() {
        for (i, c) in line.iter().enumerate() {
            out[j * nu + i] = c.re;
        }
    }
    out
}

/// `∂f/∂v` of a row-major field (`u` fastest) that is periodic in `v` with the given period.
pub fn spectral_derivative_v(values: &[f64], nu: usize, nv: usize, period: f64) -> Vec<f64> {
    let mut lines: Vec<Vec<Complex64>> = (0..nu)
        .map(|i| {
            (0..nv)
                .map(|j| Complex64::new(values[j * nu + i], 0.0))
                .collect()
        })
        .collect();
    differentiate_lines(&mut lines, period);
    let mut out = vec![0.0; nu * nv];
    for (i, line) in lines.iter().enumerate() {
        for (j, c) in line.iter().enumerate() {
            out[j * nu + i] = c.re;
        }
    }
    out
}
