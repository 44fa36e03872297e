use fracmax::kernels::{
    convolve, g_kernel, h_kernel, l1_distance_to_power, power_kernel_weights, regularized_kernel,
    Mollifier, MollifierFamily, TimeMesh, TimeSeries,
};
use fracmax::random::{trial_rng, SineModes};
use proptest::prelude::*;

const ALPHAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

fn semigroup_error(steps: usize) -> f64 {
    let mesh = TimeMesh::new(1.0, steps).unwrap();
    let k = power_kernel_weights(0.5, &mesh).unwrap();
    // u_n is the average of g_{1/2} over the cell left of t_n
    let mut shifted = vec![0.0];
    shifted.extend_from_slice(&k.values()[..steps]);
    let u = TimeSeries::new(mesh.tau(), shifted).unwrap();
    let conv = convolve(&k, &u).unwrap();
    (conv.values()[steps] - g_kernel(1.0, 1.0).unwrap()).abs()
}

#[test]
fn half_kernels_compose_to_the_unit_kernel() {
    let errors: Vec<f64> = [64, 128, 256, 512, 1024]
        .iter()
        .map(|&m| semigroup_error(m))
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] <= 0.5 * w[0], "{errors:?}");
    }
}

#[test]
fn g_kernel_is_positive() {
    for gamma in [0.05, 0.3, 0.5, 0.9, 1.0] {
        for t in [1e-8, 1e-3, 0.5, 1.0, 10.0, 1e4] {
            assert!(g_kernel(gamma, t).unwrap() > 0.0);
        }
    }
}

#[test]
fn exponential_mollifier_has_unit_mass() {
    for m in [1u32, 4, 64] {
        // Simpson on [0, 40/m]; the tail beyond is e^{-40}
        let n = 4000;
        let h = 40.0 / f64::from(m) / n as f64;
        let mut s = h_kernel(m, 0.0).unwrap() + h_kernel(m, n as f64 * h).unwrap();
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * h_kernel(m, i as f64 * h).unwrap();
        }
        assert!((s * h / 3.0 - 1.0).abs() < 1e-10);
    }
}

#[test]
fn regularized_kernels_are_nonnegative_on_the_lattice() {
    let mesh = TimeMesh::new(1.0, 256).unwrap();
    for alpha in ALPHAS {
        for m in [1u32, 4, 16, 64] {
            for family in [MollifierFamily::Exponential, MollifierFamily::Resolvent] {
                let moll = Mollifier::new(family, alpha, m).unwrap();
                let k = moll.regularized_kernel(&mesh).unwrap();
                assert!(
                    k.values().iter().all(|&v| v >= 0.0 && v.is_finite()),
                    "{family:?} {alpha} {m}"
                );
                assert!(mesh.nodes().all(|t| moll.density(t) >= 0.0));
            }
        }
    }
    let k = regularized_kernel(0.5, 8, &mesh).unwrap();
    assert!(k.values().iter().all(|&v| v >= 0.0));
}

#[test]
fn l1_distance_to_the_power_kernel_decreases_in_m() {
    let mesh = TimeMesh::new(1.0, 1024).unwrap();
    for alpha in ALPHAS {
        for family in [MollifierFamily::Exponential, MollifierFamily::Resolvent] {
            let d: Vec<f64> = [4u32, 16, 64, 256]
                .iter()
                .map(|&m| {
                    l1_distance_to_power(&Mollifier::new(family, alpha, m).unwrap(), &mesh).unwrap()
                })
                .collect();
            assert!(
                d.windows(2).all(|w| w[1] < w[0]),
                "{family:?} {alpha}: {d:?}"
            );
        }
    }
}

/// `(2/√π) ∫_0^1 m e^{-m(1-v²)} dv`, the value of `g_{1/2} * h_m` at 1 after `s = v²`.
fn substituted_quadrature(m: f64, panels: usize) -> f64 {
    let f = |v: f64| m * (-m * (1.0 - v * v)).exp();
    let h = 1.0 / panels as f64;
    let mut s = f(0.0) + f(1.0);
    for i in 1..panels {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    2.0 / std::f64::consts::PI.sqrt() * s * h / 3.0
}

#[test]
fn regularized_kernel_approaches_the_power_kernel_pointwise() {
    let oracle = substituted_quadrature(1024.0, 1 << 20);
    let moll = Mollifier::new(MollifierFamily::Exponential, 0.5, 1024).unwrap();
    let value = moll.regularized_at(1.0);
    assert!(
        (value - oracle).abs() < 1e-9 * oracle,
        "{value} vs {oracle}"
    );
    let limit = 1.0 / std::f64::consts::PI.sqrt();
    assert!((value - limit).abs() < 0.02 * limit);
}

fn l2(u: &[f64], v: &[f64], tau: f64) -> f64 {
    (tau * u.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).sqrt()
}

#[test]
fn mollifier_is_an_approximate_identity() {
    let mesh = TimeMesh::new(1.0, 2048).unwrap();
    for trial in 0..20 {
        let modes = SineModes::random(&mut trial_rng(11, trial), -0.3, 1.7, (-1.0, 1.0));
        let u = TimeSeries::sample(&mesh, |t| modes.eval(t)).unwrap();
        let errors: Vec<f64> = [4u32, 16, 64, 256]
            .iter()
            .map(|&m| {
                let smoothed = Mollifier::new(MollifierFamily::Exponential, 0.5, m)
                    .unwrap()
                    .smooth(&u);
                l2(smoothed.values(), u.values(), mesh.tau())
            })
            .collect();
        assert!(
            errors.windows(2).all(|w| w[1] < w[0]),
            "trial {trial}: {errors:?}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_is_linear(
        k in prop::collection::vec(-2.0f64..2.0, 33),
        u in prop::collection::vec(-2.0f64..2.0, 33),
        v in prop::collection::vec(-2.0f64..2.0, 33),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let tau = 1.0 / 32.0;
        let ks = TimeSeries::new(tau, k).unwrap();
        let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = convolve(&ks, &TimeSeries::new(tau, combo).unwrap()).unwrap();
        let cu = convolve(&ks, &TimeSeries::new(tau, u).unwrap()).unwrap();
        let cv = convolve(&ks, &TimeSeries::new(tau, v).unwrap()).unwrap();
        for n in 0..33 {
            let rhs = a * cu.values()[n] + b * cv.values()[n];
            prop_assert!((lhs.values()[n] - rhs).abs() <= 1e-13 * (1.0 + rhs.abs()) * 33.0);
        }
    }

    #[test]
    fn convolution_is_causal(
        k in prop::collection::vec(-1.0f64..1.0, 17),
        u in prop::collection::vec(-1.0f64..1.0, 17),
        cut in 1usize..16,
        bump in -5.0f64..5.0,
    ) {
        let tau = 0.1;
        let ks = TimeSeries::new(tau, k).unwrap();
        let mut w = u.clone();
        for x in &mut w[cut + 1..] {
            *x += bump;
        }
        let cu = convolve(&ks, &TimeSeries::new(tau, u).unwrap()).unwrap();
        let cw = convolve(&ks, &TimeSeries::new(tau, w).unwrap()).unwrap();
        prop_assert_eq!(&cu.values()[..=cut], &cw.values()[..=cut]);
    }
}
