//! Implicit L1 time stepping for `∂_t^α(u - u_0) + (-Δ)^β u = f` on `(a, b)`
//! with `u = 0` outside, plus the weak-formulation residual.
//!
//! With L1 weights `b_j` the step reads
//!
//! ```text
//! (b_0 I + A) u^n = Σ_{j=1}^{n-1} (b_{j-1} - b_j) u^{n-j} + b_{n-1} u^0 + f^n.
//! ```
//!
//! The history coefficients are positive (the `b_j` decrease) and
//! `b_0 I + A` is a symmetric M-matrix, so nonnegative data give nonnegative
//! iterates at every step. `b_0 I + A` is factored once.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, contract, numeric, Result};
use crate::fraclap::{assemble_1d, bilinear_a, Field, FracLapMatrix, SpaceGrid};
use crate::kernels::{Mollifier, MollifierFamily, TimeMesh, TimeSeries};
use crate::timefrac::l1_weights;

/// The pair `(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracOrders {
    pub alpha: f64,
    pub beta: f64,
}

impl FracOrders {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_open_unit("alpha", alpha)?;
        check_open_unit("beta", beta)?;
        Ok(Self { alpha, beta })
    }
}

pub type Forcing = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Data of one initial-boundary value problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub orders: FracOrders,
    pub grid: SpaceGrid,
    pub mesh: TimeMesh,
    pub u0: Field,
    /// `f(x, t)`, sampled at the nodes at every `t_n`.
    pub forcing: Forcing,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("orders", &self.orders)
            .field("grid", &self.grid)
            .field("mesh", &self.mesh)
            .field("u0", &self.u0)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new(
        orders: FracOrders,
        grid: SpaceGrid,
        mesh: TimeMesh,
        u0: Field,
        forcing: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if *u0.grid() != grid {
            return Err(contract("initial value is not defined on the problem grid"));
        }
        Ok(Self {
            orders,
            grid,
            mesh,
            u0,
            forcing: Arc::new(forcing),
        })
    }

    /// `f(·, t_n)` at the interior nodes.
    pub fn forcing_at(&self, n: usize) -> Field {
        let t = self.mesh.node(n);
        Field::sample(self.grid, |x| (self.forcing)(x, t))
    }
}

/// States `u^0, …, u^M` together with the sampled forcing.
#[derive(Debug, Clone)]
pub struct Solution {
    pub problem: ProblemSpec,
    pub states: Vec<Field>,
    pub forcing: Vec<Field>,
}

impl Solution {
    pub fn grid(&self) -> &SpaceGrid {
        &self.problem.grid
    }

    pub fn mesh(&self) -> &TimeMesh {
        &self.problem.mesh
    }

    /// Node `i` as a time series.
    pub fn trajectory(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.values()[i]).collect()
    }

    /// Smallest value over all nodes and steps, with its `(node, step)`.
    pub fn min(&self) -> (f64, usize, usize) {
        self.extremum(|a, b| a < b)
    }

    pub fn max(&self) -> (f64, usize, usize) {
        self.extremum(|a, b| a > b)
    }

    fn extremum(&self, better: impl Fn(f64, f64) -> bool) -> (f64, usize, usize) {
        let mut best = (self.states[0].values()[0], 0, 0);
        for (n, state) in self.states.iter().enumerate() {
            for (i, &v) in state.values().iter().enumerate() {
                if better(v, best.0) {
                    best = (v, i, n);
                }
            }
        }
        best
    }
}

/// A factored `b_0 I + A` and the L1 weights for a fixed step.
pub struct L1Stepper {
    weights: Vec<f64>,
    factor: Cholesky<f64, Dyn>,
}

impl L1Stepper {
    /// `operator` must be symmetric positive semidefinite; `steps` bounds the
    /// history length.
    pub fn new(alpha: f64, tau: f64, operator: &DMatrix<f64>, steps: usize) -> Result<Self> {
        check_open_unit("alpha", alpha)?;
        let weights = l1_weights(alpha, tau, steps.max(1));
        let mut system = operator.clone();
        for i in 0..system.nrows() {
            system[(i, i)] += weights[0];
        }
        let factor = Cholesky::new(system).ok_or_else(|| {
            numeric("step matrix is not positive definite; Cholesky factorization failed")
        })?;
        Ok(Self { weights, factor })
    }

    /// `u^n` from `u^0, …, u^{n-1}` (`n = history.len()`) and `f^n`.
    pub fn advance(&self, history: &[&[f64]], forcing: &[f64]) -> Result<Vec<f64>> {
        let n = history.len();
        if n == 0 {
            return Err(contract("stepping needs the initial state"));
        }
        if n > self.weights.len() {
            return Err(contract(format!(
                "step {n} exceeds the prepared history length"
            )));
        }
        let b = &self.weights;
        let mut rhs = DVector::from_column_slice(forcing);
        for j in 1..n {
            rhs.axpy(
                b[j - 1] - b[j],
                &DVector::from_column_slice(history[n - j]),
                1.0,
            );
        }
        rhs.axpy(b[n - 1], &DVector::from_column_slice(history[0]), 1.0);
        let next = self.factor.solve(&rhs);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(numeric(format!("step {n} produced non-finite values")));
        }
        Ok(next.as_slice().to_vec())
    }
}

/// One step of the scheme for `problem`, given `u^0, …, u^{n-1}`.
///
/// Factors the step matrix on every call; [`solve`] reuses one factorization.
pub fn step(problem: &ProblemSpec, a: &FracLapMatrix, history: &[Field]) -> Result<Field> {
    if *a.grid() != problem.grid || a.beta() != problem.orders.beta {
        return Err(contract("matrix was not assembled for this problem"));
    }
    let stepper = L1Stepper::new(
        problem.orders.alpha,
        problem.mesh.tau(),
        a.entries(),
        history.len(),
    )?;
    let slices: Vec<&[f64]> = history.iter().map(Field::values).collect();
    let f = problem.forcing_at(history.len());
    Field::new(problem.grid, stepper.advance(&slices, f.values())?)
}

/// Runs all `M` steps.
pub fn solve(problem: &ProblemSpec) -> Result<Solution> {
    let steps = problem.mesh.steps();
    let mut states = vec![problem.u0.clone()];
    let forcing: Vec<Field> = (0..=steps).map(|n| problem.forcing_at(n)).collect();
    if steps == 0 {
        return Ok(Solution {
            problem: problem.clone(),
            states,
            forcing,
        });
    }
    let a = assemble_1d(problem.grid, problem.orders.beta)?;
    let stepper = L1Stepper::new(problem.orders.alpha, problem.mesh.tau(), a.entries(), steps)?;
    let mut raw: Vec<Vec<f64>> = vec![problem.u0.values().to_vec()];
    for f in forcing.iter().skip(1) {
        let slices: Vec<&[f64]> = raw.iter().map(Vec::as_slice).collect();
        let next = stepper.advance(&slices, f.values())?;
        raw.push(next);
    }
    states.extend(
        raw.into_iter()
            .skip(1)
            .map(|v| Field::new(problem.grid, v))
            .collect::<Result<Vec<_>>>()?,
    );
    Ok(Solution {
        problem: problem.clone(),
        states,
        forcing,
    })
}

/// The scheme applied to `u' = -λ u` in the fractional sense: `∂_t^α(u - u_0) = -λu`.
pub fn relax_scalar(alpha: f64, lambda: f64, u0: f64, mesh: &TimeMesh) -> Result<TimeSeries> {
    mesh.require_steps()?;
    let op = DMatrix::from_element(1, 1, lambda);
    let stepper = L1Stepper::new(alpha, mesh.tau(), &op, mesh.steps())?;
    let mut values = vec![u0];
    for _ in 0..mesh.steps() {
        let history: Vec<[f64; 1]> = values.iter().map(|&v| [v]).collect();
        let slices: Vec<&[f64]> = history.iter().map(|v| v.as_slice()).collect();
        values.push(stepper.advance(&slices, &[0.0])?[0]);
    }
    TimeSeries::new(mesh.tau(), values)
}

/// `η(x, t_n) = ∫_{t_n}^T h_m(σ - t_n) φ(x, σ) dσ` for `φ` piecewise linear in time.
///
/// `phi` holds `φ(·, t_k)`, `k = 0..=M`; the last entry is used as the left limit
/// at `T`, so a profile that drops to zero only at `T` may keep its value there.
pub fn mollified_test_function(
    phi: &[Field],
    mollifier: &Mollifier,
    mesh: &TimeMesh,
) -> Result<Vec<Field>> {
    if phi.len() != mesh.steps() + 1 {
        return Err(contract(format!(
            "test function has {} time levels, mesh has {}",
            phi.len(),
            mesh.steps() + 1
        )));
    }
    if let Some((k, _)) = phi
        .iter()
        .enumerate()
        .find(|(_, f)| f.values().iter().any(|&v| v < 0.0))
    {
        return Err(contract(format!(
            "test function is negative at time level {k}"
        )));
    }
    let grid = *phi[0].grid();
    let tau = mesh.tau();
    let weights = mollifier.cell_weights(tau, mesh.steps());
    let steps = mesh.steps();
    (0..=steps)
        .map(|n| {
            let mut eta = vec![0.0; grid.n()];
            for k in n..steps {
                let (w0, w1) = weights[k - n];
                for (e, (l, r)) in eta
                    .iter_mut()
                    .zip(phi[k].values().iter().zip(phi[k + 1].values()))
                {
                    *e += w0 * l + w1 * r;
                }
            }
            Field::new(grid, eta)
        })
        .collect()
}

/// LHS − RHS of the mollified weak inequality at `t_n`, `n ≥ 1`:
///
/// ```text
/// ∫ ψ ∂_t[g_{1-α,m} * (u - u_0)] dx + a(h_m * u, ψ) - ∫ (h_m * f) ψ dx
/// ```
///
/// `g_{1-α,m}` enters the convolution through its cell-midpoint values, the
/// time derivative is a backward difference, `h_m *` integrates the
/// piecewise-linear interpolant exactly per cell, and space integrals are
/// `h`-weighted sums.
pub fn weak_residual(
    sol: &Solution,
    psi: &Field,
    family: MollifierFamily,
    m: u32,
    n: usize,
) -> Result<f64> {
    if psi.grid() != sol.grid() {
        return Err(contract(
            "test function is not defined on the solution grid",
        ));
    }
    if psi.values().iter().any(|&v| v < 0.0) {
        return Err(contract("test function must be nonnegative"));
    }
    let steps = sol.mesh().steps();
    if n == 0 || n > steps {
        return Err(contract(format!(
            "residual index {n} must lie in 1..={steps}"
        )));
    }
    let orders = sol.problem.orders;
    let mollifier = Mollifier::new(family, orders.alpha, m)?;
    let tau = sol.mesh().tau();
    let grid = *sol.grid();
    let u0 = sol.states[0].values();

    let kernel: Vec<f64> = (0..n)
        .map(|j| mollifier.regularized_at((j as f64 + 0.5) * tau))
        .collect();
    // g_m * (u - u_0) at t_n and t_{n-1}, node by node, tested against ψ
    let memory = |level: usize| -> f64 {
        let per_node = (0..grid.n()).map(|i| {
            tau * (0..level)
                .map(|j| kernel[j] * (sol.states[level - j].values()[i] - u0[i]))
                .sum::<f64>()
        });
        grid.h() * per_node.zip(psi.values()).map(|(g, p)| g * p).sum::<f64>()
    };
    let time_term = (memory(n) - memory(n - 1)) / tau;

    let weights = mollifier.cell_weights(tau, n);
    let smooth = |levels: &[Field]| -> Field {
        let values = (0..grid.n())
            .map(|i| {
                (0..n)
                    .map(|j| {
                        weights[j].0 * levels[n - j].values()[i]
                            + weights[j].1 * levels[n - j - 1].values()[i]
                    })
                    .sum()
            })
            .collect();
        Field::new(grid, values).expect("length matches grid")
    };
    let form = bilinear_a(&smooth(&sol.states), psi, orders.beta)?;
    let source = smooth(&sol.forcing).inner(psi)?;
    Ok(time_term + form - source)
}
