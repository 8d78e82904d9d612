use proptest::prelude::*;
use shrinker_core::examples::{lee_wang, LeeWangParams};
use shrinker_core::tensor::{FourierCurve, Jet2};

/// Fourth-order central difference weights for derivatives of order 0..=3 as
/// `(offset, weight)` pairs; the result is divided by `h^order`.
fn stencil(order: usize) -> &'static [(f64, f64)] {
    match order {
        0 => &[(0.0, 1.0)],
        1 => &[
            (-2.0, 1.0 / 12.0),
            (-1.0, -8.0 / 12.0),
            (1.0, 8.0 / 12.0),
            (2.0, -1.0 / 12.0),
        ],
        2 => &[
            (-2.0, -1.0 / 12.0),
            (-1.0, 16.0 / 12.0),
            (0.0, -30.0 / 12.0),
            (1.0, 16.0 / 12.0),
            (2.0, -1.0 / 12.0),
        ],
        3 => &[
            (-3.0, 1.0 / 8.0),
            (-2.0, -1.0),
            (-1.0, 13.0 / 8.0),
            (1.0, -13.0 / 8.0),
            (2.0, 1.0),
            (3.0, -1.0 / 8.0),
        ],
        _ => unreachable!(),
    }
}

/// `∂_u^a ∂_v^b f` by tensor-product central differences. Total order three needs a larger
/// step than lower orders to keep roundoff below the tolerance.
fn finite_difference(f: &dyn Fn(f64, f64) -> f64, u: f64, v: f64, a: usize, b: usize) -> f64 {
    let h = if a + b <= 2 { 1e-4 } else { 1e-2 };
    let mut total = 0.0;
    for &(du, wu) in stencil(a) {
        for &(dv, wv) in stencil(b) {
            total += wu * wv * f(u + du * h, v + dv * h);
        }
    }
    total / h.powi((a + b) as i32)
}

fn test_map(p: [f64; 3]) -> (impl Fn(f64, f64) -> f64, impl Fn(Jet2, Jet2) -> Jet2) {
    let [a, b, c] = p;
    let real = move |u: f64, v: f64| (a * u + b * v).sin() * (c * u - v).cos() + u * v * v;
    let jet = move |u: Jet2, v: Jet2| {
        (u.scale(a) + v.scale(b)).sin() * (u.scale(c) - v).cos() + u * v * v
    };
    (real, jet)
}

proptest! {
    #[test]
    fn jet_coefficients_match_finite_differences(
        a in -1.5f64..1.5, b in -1.5f64..1.5, c in -1.5f64..1.5,
        u in -1.0f64..1.0, v in -1.0f64..1.0,
    ) {
        let (real, jet) = test_map([a, b, c]);
        let j = jet(Jet2::var_u(u, 3), Jet2::var_v(v, 3));
        for total in 0..=3 {
            for da in 0..=total {
                let exact = j.derivative(da, total - da);
                let fd = finite_difference(&real, u, v, da, total - da);
                prop_assert!(
                    (exact - fd).abs() <= 1e-6 * exact.abs().max(1.0),
                    "({}, {}): jet {} fd {}", da, total - da, exact, fd
                );
            }
        }
    }

    #[test]
    fn chart_jets_match_finite_differences(u in 0.0f64..6.3, v in 0.0f64..10.0) {
        let chart = lee_wang(LeeWangParams::new(2, 3).unwrap());
        let jets = chart.jet(u, v, 3);
        for (comp, jet) in jets.iter().enumerate() {
            let f = |uu: f64, vv: f64| chart.point(uu, vv).0[comp];
            for total in 0..=3 {
                for da in 0..=total {
                    let exact = jet.derivative(da, total - da);
                    let fd = finite_difference(&f, u, v, da, total - da);
                    prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn fourier_curve_is_period_translation_invariant(
        coeffs in proptest::collection::vec(-1.0f64..1.0, 6),
        period in 0.5f64..20.0,
        s in -50.0f64..50.0,
    ) {
        let curve = FourierCurve::from_fn(period, 16, |t| {
            let w = 2.0 * std::f64::consts::PI * t / period;
            [
                coeffs[0] * w.cos() + coeffs[1] * (2.0 * w).sin() + coeffs[2] * (3.0 * w).cos(),
                coeffs[3] * w.sin() + coeffs[4] * (2.0 * w).cos() + coeffs[5],
            ]
        }).unwrap();
        let p = curve.eval(s);
        let q = curve.eval(s + period);
        prop_assert!((p[0] - q[0]).hypot(p[1] - q[1]) <= 1e-12);
        let d = curve.derivative(s, 2);
        let e = curve.derivative(s - 3.0 * period, 2);
        let scale = (2.0 * std::f64::consts::PI * 3.0 / period).powi(2).max(1.0);
        prop_assert!((d[0] - e[0]).hypot(d[1] - e[1]) <= 1e-12 * scale);
    }
}
