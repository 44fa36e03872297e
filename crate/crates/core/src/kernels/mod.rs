//! Power-law kernels `g_γ(t) = t^{γ-1}/Γ(γ)`, their regularizations
//! `g_{1-α,m} = g_{1-α} * h_m`, discrete causal convolution and the
//! Mittag-Leffler function.
//!
//! Every time-dependent quantity lives on a uniform [`TimeMesh`] and is carried
//! around as a [`TimeSeries`] of node values `v_0, …, v_M`.

mod mittag_leffler;
mod mollifier;

pub use mittag_leffler::mittag_leffler;
pub(crate) use mittag_leffler::mittag_leffler_alpha_alpha;
pub use mollifier::{Mollifier, MollifierFamily};

use libm::tgamma as gamma;
use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Result};

/// Uniform partition `t_n = n·τ`, `n = 0..=steps`, of `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMesh {
    t_end: f64,
    steps: usize,
}

impl TimeMesh {
    pub fn new(t_end: f64, steps: usize) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(domain(format!("time horizon T = {t_end} must be positive")));
        }
        Ok(Self { t_end, steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step size; infinite for a mesh without steps.
    pub fn tau(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    pub fn node(&self, n: usize) -> f64 {
        if n == self.steps {
            self.t_end
        } else {
            n as f64 * self.tau()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|n| self.node(n))
    }

    /// The same interval with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            t_end: self.t_end,
            steps: self.steps * factor,
        }
    }

    pub(crate) fn require_steps(&self) -> Result<()> {
        if self.steps == 0 {
            Err(domain("time mesh has no steps"))
        } else {
            Ok(())
        }
    }
}

/// Node values of a function of time on a uniform mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    tau: f64,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(tau: f64, values: Vec<f64>) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(domain(format!("time step {tau} must be positive")));
        }
        if values.is_empty() {
            return Err(domain("a time series needs at least one value"));
        }
        Ok(Self { tau, values })
    }

    /// Samples `f` at every node of `mesh`.
    pub fn sample(mesh: &TimeMesh, f: impl Fn(f64) -> f64) -> Result<Self> {
        mesh.require_steps()?;
        Self::new(mesh.tau(), mesh.nodes().map(f).collect())
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Pointwise map, keeping the step.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            tau: self.tau,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Backward difference `(v_n - v_{n-1})/τ` for `n ≥ 1`.
    pub fn backward_difference(&self, n: usize) -> f64 {
        (self.values[n] - self.values[n - 1]) / self.tau
    }

    pub(crate) fn check_compatible(&self, other: &TimeSeries) -> Result<()> {
        if self.values.len() != other.values.len() {
            return Err(contract(format!(
                "time series lengths differ: {} vs {}",
                self.values.len(),
                other.values.len()
            )));
        }
        if (self.tau - other.tau).abs() > 1e-12 * self.tau {
            return Err(contract(format!(
                "time steps differ: {} vs {}",
                self.tau, other.tau
            )));
        }
        Ok(())
    }
}

/// Parameters of the time kernels: order `α`, horizon `T` and, for the
/// regularized kernels, the index `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub alpha: f64,
    pub t_end: f64,
    pub m: Option<u32>,
}

impl KernelSpec {
    pub fn new(alpha: f64, t_end: f64, m: Option<u32>) -> Result<Self> {
        crate::error::check_open_unit("alpha", alpha)?;
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(domain(format!("time horizon T = {t_end} must be positive")));
        }
        if m == Some(0) {
            return Err(domain("regularization index m must be at least 1"));
        }
        Ok(Self { alpha, t_end, m })
    }
}

/// `g_γ(t) = t^{γ-1}/Γ(γ)` for `γ ∈ (0,1]`, `t > 0`.
pub fn g_kernel(gamma_order: f64, t: f64) -> Result<f64> {
    if !(gamma_order > 0.0 && gamma_order <= 1.0) {
        return Err(domain(format!(
            "kernel order {gamma_order} must lie in (0,1]"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("kernel argument t = {t} must be positive")));
    }
    Ok(t.powf(gamma_order - 1.0) / gamma(gamma_order))
}

/// Exponential mollifier `h_m(t) = m·e^{-mt}`.
pub fn h_kernel(m: u32, t: f64) -> Result<f64> {
    if m == 0 {
        return Err(domain("mollifier index m must be at least 1"));
    }
    if !(t >= 0.0) {
        return Err(domain(format!(
            "mollifier argument t = {t} must be nonnegative"
        )));
    }
    let m = f64::from(m);
    Ok(m * (-m * t).exp())
}

/// Cell averages `(1/τ)∫_{t_j}^{t_{j+1}} g_γ` for `j = 0..=M`.
///
/// Used as the kernel argument of [`convolve`] when `g_γ` is singular at the
/// origin: the averages are exact, so the singular first cell carries its
/// full mass `τ^γ/Γ(γ+1)`.
pub fn power_kernel_weights(gamma_order: f64, mesh: &TimeMesh) -> Result<TimeSeries> {
    if !(gamma_order > 0.0 && gamma_order <= 1.0) {
        return Err(domain(format!(
            "kernel order {gamma_order} must lie in (0,1]"
        )));
    }
    mesh.require_steps()?;
    let tau = mesh.tau();
    let scale = tau.powf(gamma_order - 1.0) / gamma(gamma_order + 1.0);
    let values = (0..=mesh.steps())
        .map(|j| {
            let j = j as f64;
            scale * ((j + 1.0).powf(gamma_order) - j.powf(gamma_order))
        })
        .collect();
    TimeSeries::new(tau, values)
}

/// `g_{1-α,m} = g_{1-α} * h_m` on `mesh` for the exponential mollifier.
pub fn regularized_kernel(alpha: f64, m: u32, mesh: &TimeMesh) -> Result<TimeSeries> {
    Mollifier::new(MollifierFamily::Exponential, alpha, m)?.regularized_kernel(mesh)
}

/// Left-rectangle causal convolution `(k*u)(t_n) ≈ τ Σ_{j=0}^{n-1} k_j u_{n-j}`.
///
/// `k_j` stands for the kernel on the cell `[t_j, t_{j+1}]`; for singular kernels
/// pass cell averages (see [`power_kernel_weights`]). The value at `n = 0` is 0.
pub fn convolve(k: &TimeSeries, u: &TimeSeries) -> Result<TimeSeries> {
    k.check_compatible(u)?;
    let kv = k.values();
    let uv = u.values();
    let values = (0..uv.len())
        .map(|n| k.tau * (0..n).map(|j| kv[j] * uv[n - j]).sum::<f64>())
        .collect();
    TimeSeries::new(k.tau, values)
}

/// Approximates `‖g_{1-α,m} - g_{1-α}‖_{L¹(0,T)}` on `mesh`.
///
/// The first cell is split geometrically towards the origin so that the
/// `t^{-α}` singularity (integrated exactly) and the fast initial layer of the
/// regularized kernel are both resolved; the remaining cells use Simpson's
/// rule on `|g - g_m|`.
pub fn l1_distance_to_power(mollifier: &Mollifier, mesh: &TimeMesh) -> Result<f64> {
    mesh.require_steps()?;
    let alpha = mollifier.alpha();
    let order = 1.0 - alpha;
    let tau = mesh.tau();
    let antiderivative = |t: f64| t.powf(order) / gamma(order + 1.0);
    let g = |t: f64| t.powf(-alpha) / gamma(order);

    // geometric split of [0, τ]
    const LEVELS: i32 = 120;
    let mut first = 0.0;
    let mut right = tau;
    for level in 1..=LEVELS {
        let left = tau * 0.5f64.powi(level);
        let mid = 0.5 * (left + right);
        let exact = antiderivative(right) - antiderivative(left);
        let reg = (right - left) / 6.0
            * (mollifier.regularized_at(left)
                + 4.0 * mollifier.regularized_at(mid)
                + mollifier.regularized_at(right));
        first += (exact - reg).abs();
        right = left;
    }
    first += (antiderivative(right) - mollifier.regularized_at(0.0) * right).abs();

    // Simpson on the remaining cells, midpoints from the twice refined mesh
    let fine = mollifier.regularized_kernel(&mesh.refined(2))?;
    let fv = fine.values();
    let fine_mesh = mesh.refined(2);
    let diff = |i: usize| (g(fine_mesh.node(i)) - fv[i]).abs();
    let rest: f64 = (1..mesh.steps())
        .map(|j| tau / 6.0 * (diff(2 * j) + 4.0 * diff(2 * j + 1) + diff(2 * j + 2)))
        .sum();
    Ok(first + rest)
}
