use shrinker_core::abresch_langer::{find_noncircular, integrate_curve, to_fourier};
use shrinker_core::flow::{
    flow_to_stationary, initial_curve, FlowOptions, FlowState, DEFAULT_NODES,
};
use shrinker_core::tensor::FourierCurve;

fn start(name: &str) -> FlowState {
    FlowState::new(&initial_curve(name, DEFAULT_NODES).unwrap(), DEFAULT_NODES).unwrap()
}

fn max_residual(curve: &FourierCurve, samples: usize) -> f64 {
    (0..samples)
        .map(|j| {
            curve
                .shrinker_defect(j as f64 * curve.period() / samples as f64)
                .abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn unit_circle_stays_put() {
    let (end, report) =
        flow_to_stationary(start("circle"), 1e-300, 5.0, &FlowOptions::default()).unwrap();
    assert!((end.t - 5.0).abs() < 1e-12);
    assert!(report.series.iter().all(|s| s.residual <= 1e-9));
}

#[test]
fn perturbed_circle_settles_on_unit_circle() {
    let options = FlowOptions::default();
    let (at_five, report) = flow_to_stationary(start("ellipse01"), 1e-14, 5.0, &options).unwrap();
    assert!(report.monotone);
    let dist = at_five
        .curve
        .node_points()
        .iter()
        .fold(0.0, |a: f64, p| a.max((p[0].hypot(p[1]) - 1.0).abs()));
    assert!(dist <= 1e-3, "{dist}");

    let (end, report) = flow_to_stationary(start("ellipse01"), 1e-6, 10.0, &options).unwrap();
    assert!(report.converged && report.monotone);
    assert!(end.t <= 10.0);
    assert!(max_residual(&end.curve, 500) <= 1e-6);
}

#[test]
fn stationary_curves_are_reproduced_by_the_ode() {
    let al = find_noncircular(1.001, 3.0, 200, (2, 3)).unwrap().unwrap();
    for curve in [
        FourierCurve::circle(1.0, 32).unwrap(),
        to_fourier(&al.trace, 128).unwrap(),
    ] {
        assert!(max_residual(&curve, 1000) <= 1e-7);
        for s0 in [0.0, 0.37 * curve.period()] {
            let x0 = curve.eval(s0);
            let d = curve.derivative(s0, 1);
            let speed = d[0].hypot(d[1]);
            let trace =
                integrate_curve(x0, [d[0] / speed, d[1] / speed], 1e-3, curve.period()).unwrap();
            for st in trace.states.iter().step_by(97) {
                let p = curve.eval(s0 + st.s);
                assert!((p[0] - st.x[0]).hypot(p[1] - st.x[1]) <= 1e-5);
            }
        }
    }
}
