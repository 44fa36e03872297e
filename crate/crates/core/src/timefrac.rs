//! Discrete time-fractional derivatives and the convexity machinery built on
//! the identity
//!
//! ```text
//! H'(u) d/dt(k*u) = d/dt(k*H(u)) + (H'(u)u - H(u)) k(t)
//!                   + ∫_0^t [H(u(t-s)) - H(u) - H'(u)(u(t-s) - u)] (-k'(s)) ds
//! ```
//!
//! for convex `H ∈ C¹` and `k ∈ W^{1,1}`.
//!
//! Discretization conventions, used everywhere in this module:
//! - `(k*v)_n = τ Σ_{j=0}^{n-1} k_j v_{n-j}` (see [`convolve`]);
//! - `d/dt` at `t_n` is the backward difference `(F_n - F_{n-1})/τ`;
//! - `dk/ds` is a centered difference (one-sided at the ends of the mesh);
//! - the `s`-integral is the trapezoidal rule on the nodes.

use libm::tgamma as gamma;
use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, contract, domain, Result};
use crate::kernels::{convolve, TimeSeries};

/// Grünwald–Letnikov weights `w_0 = 1`, `w_j = w_{j-1}(1 - (α+1)/j)`, for `j = 0..=n`.
pub fn gl_weights(alpha: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for j in 1..=n {
        let prev = w[j - 1];
        w.push(prev * (1.0 - (alpha + 1.0) / j as f64));
    }
    w
}

/// L1 weights `b_j = τ^{-α}((j+1)^{1-α} - j^{1-α})/Γ(2-α)`, for `j = 0..=n`.
pub fn l1_weights(alpha: f64, tau: f64, n: usize) -> Vec<f64> {
    let scale = tau.powf(-alpha) / gamma(2.0 - alpha);
    let p = 1.0 - alpha;
    (0..=n)
        .map(|j| {
            let j = j as f64;
            scale * ((j + 1.0).powf(p) - j.powf(p))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    /// Grünwald–Letnikov.
    Gl,
    /// L1 (piecewise linear interpolation of `u`).
    L1,
}

/// A discrete Caputo derivative `∂_t^α(u - u_0)` with precomputed weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoScheme {
    alpha: f64,
    tau: f64,
    kind: SchemeKind,
    weights: Vec<f64>,
}

impl CaputoScheme {
    /// Weights for indices up to `max_index`.
    pub fn new(alpha: f64, tau: f64, kind: SchemeKind, max_index: usize) -> Result<Self> {
        check_open_unit("alpha", alpha)?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(domain(format!("time step {tau} must be positive")));
        }
        let weights = match kind {
            SchemeKind::Gl => gl_weights(alpha, max_index),
            SchemeKind::L1 => l1_weights(alpha, tau, max_index),
        };
        Ok(Self {
            alpha,
            tau,
            kind,
            weights,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Discrete `∂_t^α(u - u_0)` at `t_n`.
///
/// L1: `Σ_{j=0}^{n-1} b_j (u_{n-j} - u_{n-j-1})`, which is 0 at `n = 0`.
/// GL: `τ^{-α} Σ_{j=0}^{n} w_j (u_{n-j} - u_0)`.
pub fn caputo_apply(u: &TimeSeries, scheme: &CaputoScheme, n: usize) -> Result<f64> {
    if n >= u.len() {
        return Err(contract(format!(
            "index {n} is past the end of a series of length {}",
            u.len()
        )));
    }
    if n >= scheme.weights.len() {
        return Err(contract(format!(
            "scheme has weights up to index {} but index {n} was requested",
            scheme.weights.len() - 1
        )));
    }
    if (u.tau() - scheme.tau).abs() > 1e-12 * scheme.tau {
        return Err(contract(format!(
            "series step {} differs from scheme step {}",
            u.tau(),
            scheme.tau
        )));
    }
    let v = u.values();
    let w = &scheme.weights;
    Ok(match scheme.kind {
        SchemeKind::L1 => (0..n).map(|j| w[j] * (v[n - j] - v[n - j - 1])).sum(),
        SchemeKind::Gl => {
            scheme.tau.powf(-scheme.alpha) * (0..=n).map(|j| w[j] * (v[n - j] - v[0])).sum::<f64>()
        }
    })
}

/// A convex `C¹` function `H` together with its derivative.
pub trait ConvexProbe {
    fn value(&self, y: f64) -> f64;
    fn derivative(&self, y: f64) -> f64;
}

/// `H(y) = y`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Linear;

/// `H(y) = y²/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfSquare;

/// `H(y) = (y⁺)²/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PositivePartSquare;

impl ConvexProbe for Linear {
    fn value(&self, y: f64) -> f64 {
        y
    }
    fn derivative(&self, _: f64) -> f64 {
        1.0
    }
}

impl ConvexProbe for HalfSquare {
    fn value(&self, y: f64) -> f64 {
        0.5 * y * y
    }
    fn derivative(&self, y: f64) -> f64 {
        y
    }
}

impl ConvexProbe for PositivePartSquare {
    fn value(&self, y: f64) -> f64 {
        0.5 * y.max(0.0).powi(2)
    }
    fn derivative(&self, y: f64) -> f64 {
        y.max(0.0)
    }
}

fn require_regular(k: &TimeSeries) -> Result<()> {
    match k.values().iter().position(|v| !v.is_finite()) {
        Some(j) => Err(contract(format!(
            "kernel value at index {j} is not finite; use a regularized kernel"
        ))),
        None => Ok(()),
    }
}

/// LHS − RHS of the fundamental identity at `t_n`, `n ≥ 1`.
pub fn fundamental_identity_residual(
    u: &TimeSeries,
    probe: &dyn ConvexProbe,
    k: &TimeSeries,
    n: usize,
) -> Result<f64> {
    k.check_compatible(u)?;
    require_regular(k)?;
    if n == 0 || n >= u.len() {
        return Err(contract(format!(
            "residual index {n} must lie in 1..{}",
            u.len()
        )));
    }
    let tau = u.tau();
    let v = u.values();
    let kv = k.values();
    let un = v[n];
    let dh = probe.derivative(un);

    let ku = convolve(k, u)?;
    let kh = convolve(k, &u.map(|y| probe.value(y)))?;
    let lhs = dh * ku.backward_difference(n);

    let dk = |j: usize| -> f64 {
        if j == 0 {
            (kv[1] - kv[0]) / tau
        } else if j + 1 >= kv.len() {
            (kv[j] - kv[j - 1]) / tau
        } else {
            (kv[j + 1] - kv[j - 1]) / (2.0 * tau)
        }
    };
    let bracket = |j: usize| {
        let back = v[n - j];
        probe.value(back) - probe.value(un) - dh * (back - un)
    };
    let integrand = |j: usize| bracket(j) * -dk(j);
    let memory = tau * (0.5 * (integrand(0) + integrand(n)) + (1..n).map(integrand).sum::<f64>());

    let rhs = kh.backward_difference(n) + (dh * un - probe.value(un)) * kv[n] + memory;
    Ok(lhs - rhs)
}

/// Verdicts of the three convexity inequalities at one time index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub index: usize,
    /// `u⁺ D(k*u) - ½ D(k*(u⁺)²) ≥ -tol`
    pub positive_part: bool,
    /// the same for `v = -u`
    pub negated: bool,
    /// `u⁻ D(k*u) + ½ D(k*(u⁻)²) ≤ tol`
    pub negative_part: bool,
    /// worst signed slack over the three (negative means violated beyond `tol`)
    pub margin: f64,
}

impl InequalityVerdict {
    pub fn passed(&self) -> bool {
        self.positive_part && self.negated && self.negative_part
    }
}

/// `τ Σ |k_j|` over the cells of the mesh.
fn kernel_l1(k: &TimeSeries) -> f64 {
    let v = k.values();
    k.tau() * v[..v.len() - 1].iter().map(|x| x.abs()).sum::<f64>()
}

/// Relative tolerance `1e-10 · max(1, ‖u‖∞² ‖k‖_{L¹})`.
pub fn inequality_tolerance(u: &TimeSeries, k: &TimeSeries) -> f64 {
    let sup = u.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    1e-10 * (sup * sup * kernel_l1(k)).max(1.0)
}

/// Checks the three convexity inequalities at every `n = 1..=M`.
pub fn convex_inequality_check(u: &TimeSeries, k: &TimeSeries) -> Result<Vec<InequalityVerdict>> {
    k.check_compatible(u)?;
    require_regular(k)?;
    let tol = inequality_tolerance(u, k);
    let plus = u.map(|y| y.max(0.0));
    let minus = u.map(|y| (-y).max(0.0));
    let ku = convolve(k, u)?;
    let k_plus_sq = convolve(k, &plus.map(|y| y * y))?;
    let k_minus_sq = convolve(k, &minus.map(|y| y * y))?;

    Ok((1..u.len())
        .map(|n| {
            let d = ku.backward_difference(n);
            let up = plus.values()[n];
            let um = minus.values()[n];
            let first = up * d - 0.5 * k_plus_sq.backward_difference(n);
            // the same inequality for v = -u: v⁺ = u⁻, D(k*v) = -D(k*u)
            let second = um * -d - 0.5 * k_minus_sq.backward_difference(n);
            let third = -(um * d + 0.5 * k_minus_sq.backward_difference(n));
            InequalityVerdict {
                index: n,
                positive_part: first >= -tol,
                negated: second >= -tol,
                negative_part: third >= -tol,
                margin: first.min(second).min(third) + tol,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumMode {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumSign {
    /// L1-discrete `∂_t^α(u - u_0)` at the extremum.
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Sign of the L1 derivative at a discrete extremum `n0 ≥ 1` of `u`.
///
/// Passes when the value is `≥ -tol` at a maximum or `≤ tol` at a minimum,
/// with `tol = 1e-8 · b_0 · max(1, ‖u‖∞)`.
pub fn rl_extremum_sign(
    u: &TimeSeries,
    alpha: f64,
    n0: usize,
    mode: ExtremumMode,
) -> Result<ExtremumSign> {
    if n0 == 0 {
        return Err(contract("the extremum must be attained at a positive time"));
    }
    let scheme = CaputoScheme::new(alpha, u.tau(), SchemeKind::L1, n0)?;
    let value = caputo_apply(u, &scheme, n0)?;
    let sup = u.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tolerance = 1e-8 * scheme.weights[0] * sup.max(1.0);
    let pass = match mode {
        ExtremumMode::Max => value >= -tolerance,
        ExtremumMode::Min => value <= tolerance,
    };
    Ok(ExtremumSign {
        value,
        tolerance,
        pass,
    })
}

/// Index of the first discrete maximum or minimum of `u`.
pub fn discrete_extremum(u: &TimeSeries, mode: ExtremumMode) -> usize {
    let v = u.values();
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        let better = match mode {
            ExtremumMode::Max => x > v[best],
            ExtremumMode::Min => x < v[best],
        };
        if better {
            best = i;
        }
    }
    best
}
