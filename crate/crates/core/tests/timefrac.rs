use fracmax::kernels::{Mollifier, MollifierFamily, TimeMesh, TimeSeries};
use fracmax::random::{hermite_trajectory, piecewise_linear, trial_rng};
use fracmax::timefrac::{
    caputo_apply, convex_inequality_check, discrete_extremum, fundamental_identity_residual,
    l1_weights, rl_extremum_sign, CaputoScheme, ExtremumMode, Linear, SchemeKind,
};
use proptest::prelude::*;

#[test]
fn extremum_sign_holds_on_random_splines() {
    let alphas = [0.3, 0.5, 0.7, 0.9];
    let mesh = TimeMesh::new(1.0, 256).unwrap();
    let mut checked = 0;
    for trial in 0..200u64 {
        let alpha = alphas[trial as usize % alphas.len()];
        let u = hermite_trajectory(&mut trial_rng(31, trial), &mesh, 6);
        let mut any = false;
        for mode in [ExtremumMode::Max, ExtremumMode::Min] {
            let n0 = discrete_extremum(&u, mode);
            if n0 == 0 {
                continue;
            }
            let verdict = rl_extremum_sign(&u, alpha, n0, mode).unwrap();
            assert!(verdict.pass, "trial {trial} {mode:?} at {n0}: {verdict:?}");
            any = true;
            checked += 1;
        }
        assert!(any, "trial {trial} has both extrema at t = 0");
    }
    assert!(checked >= 200);
}

#[test]
fn convexity_inequalities_hold_for_the_resolvent_kernel() {
    let mesh = TimeMesh::new(1.0, 128).unwrap();
    let kernels: Vec<TimeSeries> = [4u32, 64]
        .iter()
        .map(|&m| {
            Mollifier::new(MollifierFamily::Resolvent, 0.5, m)
                .unwrap()
                .regularized_kernel(&mesh)
                .unwrap()
        })
        .collect();
    for trial in 0..500u64 {
        let u = piecewise_linear(&mut trial_rng(41, trial), &mesh, 12);
        for k in &kernels {
            let verdicts = convex_inequality_check(&u, k).unwrap();
            assert_eq!(verdicts.len(), 128);
            if let Some(bad) = verdicts.iter().find(|v| !v.passed()) {
                panic!("trial {trial}: {bad:?}");
            }
        }
    }
}

#[test]
fn linear_probe_residual_vanishes_for_random_paths() {
    let mesh = TimeMesh::new(1.0, 128).unwrap();
    let k = Mollifier::new(MollifierFamily::Exponential, 0.4, 16)
        .unwrap()
        .regularized_kernel(&mesh)
        .unwrap();
    for trial in 0..20u64 {
        let u = hermite_trajectory(&mut trial_rng(5, trial), &mesh, 4);
        for n in [1, 17, 128] {
            let r = fundamental_identity_residual(&u, &Linear, &k, n).unwrap();
            assert!(r.abs() < 1e-11, "trial {trial} n {n}: {r}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn l1_weights_are_positive_and_decreasing(alpha in 0.01f64..0.99, tau in 1e-4f64..1.0, n in 1usize..400) {
        let b = l1_weights(alpha, tau, n);
        prop_assert_eq!(b.len(), n + 1);
        prop_assert!(b.iter().all(|&x| x > 0.0));
        prop_assert!(b.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn caputo_is_linear(
        u in prop::collection::vec(-1.0f64..1.0, 65),
        v in prop::collection::vec(-1.0f64..1.0, 65),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        alpha in 0.05f64..0.95,
        gl in any::<bool>(),
    ) {
        let tau = 1.0 / 64.0;
        let kind = if gl { SchemeKind::Gl } else { SchemeKind::L1 };
        let scheme = CaputoScheme::new(alpha, tau, kind, 64).unwrap();
        let w: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let (us, vs, ws) = (
            TimeSeries::new(tau, u).unwrap(),
            TimeSeries::new(tau, v).unwrap(),
            TimeSeries::new(tau, w).unwrap(),
        );
        for n in [1, 10, 64] {
            let lhs = caputo_apply(&ws, &scheme, n).unwrap();
            let rhs = a * caputo_apply(&us, &scheme, n).unwrap() + b * caputo_apply(&vs, &scheme, n).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn constants_have_zero_derivative(c in -1e3f64..1e3, alpha in 0.05f64..0.95, gl in any::<bool>()) {
        let kind = if gl { SchemeKind::Gl } else { SchemeKind::L1 };
        let scheme = CaputoScheme::new(alpha, 0.01, kind, 50).unwrap();
        let u = TimeSeries::new(0.01, vec![c; 51]).unwrap();
        for n in 0..=50 {
            prop_assert_eq!(caputo_apply(&u, &scheme, n).unwrap(), 0.0);
        }
    }
}
