//! Mollifier families `h_m` and regularized kernels `g_{1-α,m} = g_{1-α} * h_m`.
//!
//! Two families are provided:
//!
//! * [`MollifierFamily::Exponential`]: `h_m(t) = m e^{-mt}`. The regularized
//!   kernel vanishes at `t = 0`, rises over a layer of width `~1/m` and then
//!   decays; it is *not* monotone.
//! * [`MollifierFamily::Resolvent`]: `h_m(t) = m t^{α-1} E_{α,α}(-m t^α)`, whose
//!   regularized kernel is `g_{1-α,m}(t) = m E_α(-m t^α)`. Both are completely
//!   monotone, so `g_{1-α,m}` is positive and nonincreasing with
//!   `g_{1-α,m}(0) = m`. The convexity inequalities for `d/dt(k*u)` need a
//!   nonincreasing `k`, which only this family provides.
//!
//! Both are nonnegative, have unit mass and converge to `g_{1-α}` in `L¹`.

use libm::{lgamma as ln_gamma, tgamma as gamma};
use serde::{Deserialize, Serialize};

use super::{mittag_leffler, mittag_leffler_alpha_alpha, TimeMesh, TimeSeries};
use crate::error::{check_open_unit, domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MollifierFamily {
    Exponential,
    Resolvent,
}

impl MollifierFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exponential => "exponential",
            Self::Resolvent => "resolvent",
        }
    }
}

impl std::str::FromStr for MollifierFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exponential" => Ok(Self::Exponential),
            "resolvent" => Ok(Self::Resolvent),
            other => Err(format!(
                "unknown mollifier family {other:?} (expected exponential|resolvent)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    family: MollifierFamily,
    alpha: f64,
    m: u32,
}

impl Mollifier {
    pub fn new(family: MollifierFamily, alpha: f64, m: u32) -> Result<Self> {
        check_open_unit("alpha", alpha)?;
        if m == 0 {
            return Err(domain("regularization index m must be at least 1"));
        }
        Ok(Self { family, alpha, m })
    }

    pub fn family(&self) -> MollifierFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    fn mf(&self) -> f64 {
        f64::from(self.m)
    }

    /// `h_m(t)` for `t > 0` (the resolvent density is infinite at 0).
    pub fn density(&self, t: f64) -> f64 {
        let m = self.mf();
        match self.family {
            MollifierFamily::Exponential => m * (-m * t).exp(),
            MollifierFamily::Resolvent => {
                if t == 0.0 {
                    return f64::INFINITY;
                }
                let a = self.alpha;
                m * t.powf(a - 1.0) * ml_alpha_alpha(a, -m * t.powf(a))
            }
        }
    }

    /// `E(t) = 1 - ∫_0^t h_m`, the mass of `h_m` beyond `t`.
    fn tail(&self, t: f64) -> f64 {
        let m = self.mf();
        match self.family {
            MollifierFamily::Exponential => (-m * t).exp(),
            MollifierFamily::Resolvent => ml(self.alpha, -m * t.powf(self.alpha)),
        }
    }

    /// `∫_0^t h_m`.
    pub fn cumulative(&self, t: f64) -> f64 {
        match self.family {
            MollifierFamily::Exponential => -(-self.mf() * t).exp_m1(),
            MollifierFamily::Resolvent => 1.0 - self.tail(t),
        }
    }

    /// Exact masses of `h_m` on the cells `[jτ, (j+1)τ]`, `j < count`.
    pub fn cell_masses(&self, tau: f64, count: usize) -> Vec<f64> {
        let mut left = self.tail(0.0);
        (0..count)
            .map(|j| {
                let right = self.tail((j + 1) as f64 * tau);
                let mass = (left - right).max(0.0);
                left = right;
                mass
            })
            .collect()
    }

    /// `(h_m * u)(t_n) = ∫_0^{t_n} h_m(s) u(t_n - s) ds` for piecewise-linear `u`,
    /// using [`Mollifier::linear_weights`] on every cell.
    pub fn smooth(&self, u: &TimeSeries) -> TimeSeries {
        let tau = u.tau();
        let weights = self.cell_weights(tau, u.len());
        let uv = u.values();
        let values = (0..uv.len())
            .map(|n| {
                (0..n)
                    .map(|j| weights[j].0 * uv[n - j] + weights[j].1 * uv[n - j - 1])
                    .sum()
            })
            .collect();
        TimeSeries { tau, values }
    }

    /// [`Mollifier::linear_weights`] for the cells `[jτ, (j+1)τ]`, `j < count`.
    pub fn cell_weights(&self, tau: f64, count: usize) -> Vec<(f64, f64)> {
        (0..count)
            .map(|j| self.linear_weights(j as f64 * tau, tau))
            .collect()
    }

    /// Weights `(w₀, w₁)` with `∫_{r₀}^{r₀+τ} h_m(r) φ(r) dr = w₀ φ(r₀) + w₁ φ(r₀+τ)`
    /// for linear `φ`. Exact for the exponential family; the resolvent family
    /// splits the exact cell mass evenly.
    pub fn linear_weights(&self, r0: f64, tau: f64) -> (f64, f64) {
        match self.family {
            MollifierFamily::Exponential => {
                let m = self.mf();
                let x = m * tau;
                let decay = (-m * r0).exp();
                let a0 = -(-x).exp_m1();
                let a1 = first_moment_ratio(x);
                (decay * (a0 - a1).max(0.0), decay * a1)
            }
            MollifierFamily::Resolvent => {
                let mass = (self.tail(r0) - self.tail(r0 + tau)).max(0.0);
                (0.5 * mass, 0.5 * mass)
            }
        }
    }

    /// `g_{1-α,m}(t)` at an arbitrary `t ≥ 0`.
    pub fn regularized_at(&self, t: f64) -> f64 {
        match self.family {
            MollifierFamily::Exponential => exponential_regularized(self.alpha, self.mf(), t),
            MollifierFamily::Resolvent => {
                self.mf() * ml(self.alpha, -self.mf() * t.powf(self.alpha))
            }
        }
    }

    /// `g_{1-α,m}` at the nodes of `mesh`.
    pub fn regularized_kernel(&self, mesh: &TimeMesh) -> Result<TimeSeries> {
        mesh.require_steps()?;
        TimeSeries::new(
            mesh.tau(),
            mesh.nodes().map(|t| self.regularized_at(t)).collect(),
        )
    }
}

fn ml(alpha: f64, z: f64) -> f64 {
    // arguments here are finite and nonpositive with 0 < α < 1, for which
    // evaluation cannot fail
    mittag_leffler(alpha, z).expect("Mittag-Leffler of a nonpositive argument")
}

fn ml_alpha_alpha(alpha: f64, z: f64) -> f64 {
    mittag_leffler_alpha_alpha(alpha, z).expect("Mittag-Leffler of a nonpositive argument")
}

/// `(1 - e^{-x}(1+x))/x`, accurate for small `x`.
fn first_moment_ratio(x: f64) -> f64 {
    if x < 1e-2 {
        // x/2 - x²/3 + x³/8 - x⁴/30
        x * (0.5 - x * (1.0 / 3.0 - x * (1.0 / 8.0 - x / 30.0)))
    } else {
        (-(-x).exp_m1() - x * (-x).exp()) / x
    }
}

/// `∫_0^t g_{1-α}(s) m e^{-m(t-s)} ds
///  = m t^{1-α}/Γ(1-α) · Σ_k p_k(mt) / (k+1-α)` with Poisson weights
/// `p_k(x) = e^{-x} x^k / k!`.
///
/// The substitution integrates the `s^{-α}` singularity exactly and every term is
/// positive, so the sum is free of cancellation. The weights are generated by
/// the ratio `p_{k+1}/p_k = x/(k+1)` outwards from the mode, which avoids
/// underflow of `e^{-x}` for large `x`.
fn exponential_regularized(alpha: f64, m: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = m * t;
    let mode = x.floor();
    let p_mode = (-x + mode * x.ln() - ln_gamma(mode + 1.0)).exp();
    let mut sum = p_mode / (mode + 1.0 - alpha);
    let mut p = p_mode;
    let mut k = mode;
    loop {
        k += 1.0;
        p *= x / k;
        let term = p / (k + 1.0 - alpha);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    let mut p = p_mode;
    let mut k = mode;
    while k > 0.0 {
        p *= k / x;
        k -= 1.0;
        let term = p / (k + 1.0 - alpha);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    m * t.powf(1.0 - alpha) / gamma(1.0 - alpha) * sum
}
