use shrinker_core::analysis::{
    integral_suite, pinching_report, simons_residual, verify_suite, Tolerances,
};
use shrinker_core::examples::{self, lee_wang, LeeWangParams};
use shrinker_core::geometry::Grid;
use shrinker_core::Error;

fn grid(n: usize) -> Grid {
    Grid::square(n).unwrap()
}

#[test]
fn simons_identity_on_clifford_and_lee_wang() {
    assert!(
        simons_residual(&examples::clifford(), grid(64))
            .unwrap()
            .max()
            <= 1e-8
    );
    let t12 = lee_wang(LeeWangParams::new(1, 2).unwrap());
    assert!(simons_residual(&t12, grid(64)).unwrap().max() <= 1e-5);
}

#[test]
fn simons_residual_converges_spectrally() {
    let t12 = lee_wang(LeeWangParams::new(1, 2).unwrap());
    let mut previous = f64::INFINITY;
    for n in [16, 32, 64, 128] {
        let r = simons_residual(&t12, grid(n)).unwrap().max();
        assert!(
            r <= previous / 10.0 || r <= 1e-9,
            "{n}: {r} after {previous}"
        );
        previous = r;
    }
}

#[test]
fn simons_refuses_off_shell_input() {
    let err = simons_residual(&examples::control_nonshrinker(), grid(16)).unwrap_err();
    match err {
        Error::OffShell { residual, .. } => assert!((residual - 1.5).abs() < 1e-12),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        simons_residual(&examples::scaled_clifford(2.0, 2.0), grid(16)),
        Err(Error::OffShell { .. })
    ));
}

#[test]
fn integral_identities_on_lee_wang_23() {
    let t23 = lee_wang(LeeWangParams::new(2, 3).unwrap());
    let report = integral_suite(&t23, grid(96), &Tolerances::default()).unwrap();
    assert_eq!(report.entries.len(), 3);
    for e in &report.entries {
        assert!(e.value <= 1e-6, "{e:?}");
    }
}

#[test]
fn clifford_integrals_vanish() {
    let report = integral_suite(&examples::clifford(), grid(64), &Tolerances::default()).unwrap();
    for e in &report.entries {
        assert!(e.value <= 1e-9, "{e:?}");
    }
    let area = report.stats["area"];
    assert!((area - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-10);
}

#[test]
fn control_integral_fails_by_wide_margin() {
    let report = integral_suite(
        &examples::control_nonshrinker(),
        grid(64),
        &Tolerances::default(),
    )
    .unwrap();
    let mean = report.entry("integral_2_minus_h2").unwrap();
    assert!(!mean.pass && mean.value - mean.tolerance > 0.1);
    assert!(report.entry("integral_gauss_k").unwrap().pass);
}

#[test]
fn pinching_extremes() {
    let tol = Tolerances::default();
    let clifford = pinching_report(&examples::clifford(), grid(32), &tol).unwrap();
    assert!((clifford.stats["a2_min"] - 2.0).abs() <= 1e-10);
    assert!((clifford.stats["a2_max"] - 2.0).abs() <= 1e-10);
    assert!(clifford.entry("a2_lower_bound").is_none());

    let t12 =
        pinching_report(&lee_wang(LeeWangParams::new(1, 2).unwrap()), grid(64), &tol).unwrap();
    assert!(t12.all_pass());
    assert!((t12.stats["a2_min"] - 7.0 / 6.0).abs() < 1e-3);
    assert!((t12.stats["a2_max"] - 13.0 / 3.0).abs() < 1e-3);

    let t45 =
        pinching_report(&lee_wang(LeeWangParams::new(4, 5).unwrap()), grid(64), &tol).unwrap();
    assert!(t45.all_pass());
    assert!(t45.stats["a2_max"] < 2.75);
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let chart = lee_wang(LeeWangParams::new(2, 3).unwrap());
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| verify_suite(&chart, grid(32), &Tolerances::default()).unwrap())
            .to_canonical_json()
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
}
