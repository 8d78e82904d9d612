//! Chart constructors for the shipped surfaces and a name-based registry.
//!
//! Registry names: `clifford`, `control`, `lee-wang:m,n`, and `product:A,B` where `A` and
//! `B` are closed-curve names understood by [`crate::abresch_langer::named_curve`].

use std::f64::consts::PI;
use std::sync::Arc;

use crate::abresch_langer::named_curve;
use crate::geometry::SurfaceChart;
use crate::tensor::{CJet, Jet2, PlaneCurve, MAX_ORDER};
use crate::{Error, Result};

/// Coprime pair `1 <= m <= n` indexing the Lee–Wang tori `T_{m,n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeeWangParams {
    m: u32,
    n: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl LeeWangParams {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || m > n || gcd(m, n) != 1 {
            return Err(Error::NotCoprime { m, n });
        }
        Ok(LeeWangParams { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Lower and upper bounds of `|A|²` on `T_{m,n}`:
    /// `(3m² + n²) / (n(m + n))` and `(m² + 3n²) / (m(m + n))`.
    pub fn a2_bounds(&self) -> (f64, f64) {
        let (m, n) = (self.m as f64, self.n as f64);
        (
            (3.0 * m * m + n * n) / (n * (m + n)),
            (m * m + 3.0 * n * n) / (m * (m + n)),
        )
    }
}

fn complex_pair(z1: CJet, z2: CJet) -> [Jet2; 4] {
    [z1.re, z1.im, z2.re, z2.im]
}

/// Clifford torus `(e^{is}, e^{it})` with periods `(2π, 2π)`.
pub fn clifford() -> SurfaceChart {
    scaled_clifford(1.0, 1.0).with_label("clifford")
}

/// Product of two round circles `(r1 e^{is}, r2 e^{it})`; a self-shrinker only for
/// `r1 = r2 = 1`.
pub fn scaled_clifford(r1: f64, r2: f64) -> SurfaceChart {
    SurfaceChart::new(
        format!("circles:{r1},{r2}"),
        [2.0 * PI, 2.0 * PI],
        move |s, t| complex_pair(s.exp_i().scale(r1), t.exp_i().scale(r2)),
    )
}

/// Lagrangian but off-shell control surface `(e^{is}, 2e^{it})`.
pub fn control_nonshrinker() -> SurfaceChart {
    scaled_clifford(1.0, 2.0).with_label("control")
}

/// Lee–Wang torus
/// `Ψ(s, t) = √(m+n) ( n^{-1/2} cos s e^{i√(n/m) t}, m^{-1/2} sin s e^{i√(m/n) t} )`
/// with periods `(2π, 2π√(mn))`. The `|A|²` bounds are attached for the pinching report.
pub fn lee_wang(p: LeeWangParams) -> SurfaceChart {
    let (m, n) = (p.m as f64, p.n as f64);
    let scale = (m + n).sqrt();
    let (a1, a2) = (scale / n.sqrt(), scale / m.sqrt());
    let (w1, w2) = ((n / m).sqrt(), (m / n).sqrt());
    let (lower, upper) = p.a2_bounds();
    SurfaceChart::new(
        format!("lee-wang:{},{}", p.m, p.n),
        [2.0 * PI, 2.0 * PI * (m * n).sqrt()],
        move |s, t| {
            let z1 = t.scale(w1).exp_i().mul_real(s.cos()).scale(a1);
            let z2 = t.scale(w2).exp_i().mul_real(s.sin()).scale(a2);
            complex_pair(z1, z2)
        },
    )
    .with_pinching_bounds(lower, upper)
}

fn lift(curve: &dyn PlaneCurve, s: Jet2) -> CJet {
    let d = curve.derivatives(s.value());
    let mut re = [0.0; MAX_ORDER + 1];
    let mut im = [0.0; MAX_ORDER + 1];
    let mut fact = 1.0;
    for j in 0..=MAX_ORDER {
        if j > 0 {
            fact *= j as f64;
        }
        re[j] = d[j][0] / fact;
        im[j] = d[j][1] / fact;
    }
    CJet {
        re: s.compose(&re),
        im: s.compose(&im),
    }
}

fn min_speed(curve: &dyn PlaneCurve) -> f64 {
    let n = 512;
    let h = curve.extent() / n as f64;
    let start = if curve.period().is_some() {
        0.0
    } else {
        -0.5 * curve.extent()
    };
    (0..n)
        .map(|j| {
            let d = curve.derivatives(start + j as f64 * h)[1];
            d[0].hypot(d[1])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Product immersion `(c1(s), c2(t))` in C², Lagrangian by construction.
pub fn curve_product(
    c1: Arc<dyn PlaneCurve>,
    c2: Arc<dyn PlaneCurve>,
    label: impl Into<String>,
) -> Result<SurfaceChart> {
    for c in [&c1, &c2] {
        let speed = min_speed(c.as_ref());
        if !(speed > 1e-6) {
            return Err(Error::DegenerateCurve(speed));
        }
    }
    let periods = [c1.extent(), c2.extent()];
    let closed = [c1.period().is_some(), c2.period().is_some()];
    Ok(SurfaceChart::new(label, periods, move |s, t| {
        complex_pair(lift(c1.as_ref(), s), lift(c2.as_ref(), t))
    })
    .with_closed(closed))
}

fn parse_pair(text: &str) -> Option<(u32, u32)> {
    let (a, b) = text.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Resolves a registry name to a chart.
pub fn by_name(name: &str) -> Result<SurfaceChart> {
    let unknown = || Error::UnknownExample(name.to_string());
    match name {
        "clifford" => Ok(clifford()),
        "control" => Ok(control_nonshrinker()),
        _ => {
            if let Some(rest) = name.strip_prefix("lee-wang:") {
                let (m, n) = parse_pair(rest).ok_or_else(unknown)?;
                return Ok(lee_wang(LeeWangParams::new(m, n)?));
            }
            if let Some(rest) = name.strip_prefix("product:") {
                let (a, b) = split_curve_names(rest).ok_or_else(unknown)?;
                let c1 = named_curve(a)?;
                let c2 = named_curve(b)?;
                return curve_product(c1, c2, name);
            }
            Err(unknown())
        }
    }
}

/// Splits `A,B` where curve names may themselves contain a comma (`al:2,3`).
fn split_curve_names(text: &str) -> Option<(&str, &str)> {
    let parts: Vec<usize> = text.match_indices(',').map(|(i, _)| i).collect();
    for i in parts {
        let (a, b) = (&text[..i], &text[i + 1..]);
        if crate::abresch_langer::is_curve_name(a) && crate::abresch_langer::is_curve_name(b) {
            return Some((a, b));
        }
    }
    None
}
