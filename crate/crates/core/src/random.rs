//! Seeded random data for property checks: sine-mode fields on an interval,
//! space-time forcings and C¹ / piecewise-linear trajectories.
//!
//! Every trial gets its own ChaCha stream derived from `(seed, trial)`, so a
//! trial can be replayed alone and parallel runs are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::kernels::{TimeMesh, TimeSeries};

pub const MODES: usize = 5;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `s(x) = shift + Σ_k c_k sin(kπ(x-a)/(b-a))`, `k = 1..=5`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineModes {
    a: f64,
    b: f64,
    shift: f64,
    coefficients: [f64; MODES],
}

impl SineModes {
    /// Coefficients `c_k ~ U(-1, 1)/k` and a shift `~ U(lo, hi)`.
    pub fn random(rng: &mut impl Rng, a: f64, b: f64, shift: (f64, f64)) -> Self {
        let mut coefficients = [0.0; MODES];
        for (k, c) in coefficients.iter_mut().enumerate() {
            *c = rng.gen_range(-1.0..1.0) / (k + 1) as f64;
        }
        let shift = if shift.0 < shift.1 {
            rng.gen_range(shift.0..shift.1)
        } else {
            shift.0
        };
        Self {
            a,
            b,
            shift,
            coefficients,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let xi = (x - self.a) / (self.b - self.a);
        self.shift
            + self
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64 * PI * xi).sin())
                .sum::<f64>()
    }
}

/// `f(x, t) = s_0(x) + t·s_1(x)` built from two sine-mode fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeModes {
    base: SineModes,
    drift: SineModes,
}

impl SpaceTimeModes {
    pub fn random(rng: &mut impl Rng, a: f64, b: f64, shift: (f64, f64)) -> Self {
        Self {
            base: SineModes::random(rng, a, b, shift),
            drift: SineModes::random(rng, a, b, (0.0, 0.0)),
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.base.eval(x) + t * self.drift.eval(x)
    }
}

/// Random C¹ trajectory: cubic Hermite interpolation of random values and
/// slopes at `knots + 1` equispaced knots on `[0, T]`, sampled on `mesh`.
pub fn hermite_trajectory(rng: &mut impl Rng, mesh: &TimeMesh, knots: usize) -> TimeSeries {
    let knots = knots.max(1);
    let values: Vec<f64> = (0..=knots).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let slopes: Vec<f64> = (0..=knots).map(|_| rng.gen_range(-4.0..4.0)).collect();
    let width = mesh.t_end() / knots as f64;
    let samples = mesh
        .nodes()
        .map(|t| {
            let k = ((t / width).floor() as usize).min(knots - 1);
            let s = (t - k as f64 * width) / width;
            let (h00, h10) = (
                2.0 * s.powi(3) - 3.0 * s * s + 1.0,
                s.powi(3) - 2.0 * s * s + s,
            );
            let (h01, h11) = (-2.0 * s.powi(3) + 3.0 * s * s, s.powi(3) - s * s);
            h00 * values[k]
                + h10 * width * slopes[k]
                + h01 * values[k + 1]
                + h11 * width * slopes[k + 1]
        })
        .collect();
    TimeSeries::new(mesh.tau(), samples).expect("mesh has at least one node")
}

/// Random piecewise-linear trajectory through `knots + 1` values in `[-1, 1]`.
pub fn piecewise_linear(rng: &mut impl Rng, mesh: &TimeMesh, knots: usize) -> TimeSeries {
    let knots = knots.max(1);
    let values: Vec<f64> = (0..=knots).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let width = mesh.t_end() / knots as f64;
    let samples = mesh
        .nodes()
        .map(|t| {
            let k = ((t / width).floor() as usize).min(knots - 1);
            let s = (t - k as f64 * width) / width;
            (1.0 - s) * values[k] + s * values[k + 1]
        })
        .collect();
    TimeSeries::new(mesh.tau(), samples).expect("mesh has at least one node")
}
