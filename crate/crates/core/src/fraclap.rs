//! The 1-D fractional Laplacian `(-Δ)^β` on `(a, b)` with zero exterior values.
//!
//! `(-Δ)^β u(x) = c_{1,β} PV ∫ (u(x) - u(y)) / |x - y|^{1+2β} dy` is discretized by
//! applying the definition exactly to the piecewise-linear interpolant of the
//! node values (zero at `a`, `b` and outside):
//!
//! - the two cells adjacent to `x_i` are paired symmetrically (principal value),
//!   which gives the second difference `2u_i - u_{i-1} - u_{i+1}` times
//!   `h^{-2β}/(2-2β)`;
//! - every other hat function is integrated exactly against the kernel;
//! - the exterior `y ∉ (a,b)` adds `κ_i u_i` with
//!   `κ_i = ((x_i - a)^{-2β} + (b - x_i)^{-2β})/(2β)`.
//!
//! Interior couplings depend on `|i - j|` only and the diagonal is the constant
//! `c h^{-2β} (1/(1-β) + 1/β)`. The result is a dense symmetric M-matrix whose
//! row sums are strictly positive.

use std::fmt::Write as _;

use libm::tgamma as gamma;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, contract, domain, Result};

/// Beyond this lag the hat moments use their asymptotic expansion.
const SERIES_LAG: usize = 200;

/// Uniform grid on `(a, b)` with `n` interior nodes `x_i = a + (i+1)h`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    a: f64,
    b: f64,
    n: usize,
}

impl SpaceGrid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(domain(format!(
                "domain ({a}, {b}) must be a finite interval with a < b"
            )));
        }
        if n == 0 {
            return Err(domain("grid needs at least one interior node"));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n + 1) as f64
    }

    /// Interior node `i` (0-based).
    pub fn node(&self, i: usize) -> f64 {
        self.a + (i + 1) as f64 * self.h()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.node(i))
    }

    fn check_same(&self, other: &SpaceGrid) -> Result<()> {
        if self != other {
            return Err(contract(format!(
                "grids differ: ({}, {}, n = {}) vs ({}, {}, n = {})",
                self.a, self.b, self.n, other.a, other.b, other.n
            )));
        }
        Ok(())
    }
}

/// Values at the interior nodes of a grid; zero at and beyond the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    grid: SpaceGrid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(contract(format!(
                "field has {} values but the grid has {} interior nodes",
                values.len(),
                grid.n
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SpaceGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n],
        }
    }

    pub fn sample(grid: SpaceGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.nodes().map(f).collect(),
        }
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Discrete `L²` inner product `h Σ u_i v_i`.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self.grid.h()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x * y)
                .sum::<f64>())
    }
}

/// `c_{N,β} = β 2^{2β} Γ((N+2β)/2) / (π^{N/2} Γ(1-β))`.
pub fn normalization_constant(dim: u32, beta: f64) -> Result<f64> {
    check_open_unit("beta", beta)?;
    if dim == 0 {
        return Err(domain("dimension must be at least 1"));
    }
    let n = f64::from(dim);
    Ok(beta * 4f64.powf(beta) * gamma(0.5 * n + beta)
        / (std::f64::consts::PI.powf(0.5 * n) * gamma(1.0 - beta)))
}

#[cfg(test)]
/// Same constant through log-gamma; an independent evaluation route.
fn normalization_constant_log(dim: u32, beta: f64) -> f64 {
    let n = f64::from(dim);
    let log = beta.ln() + 2.0 * beta * 2f64.ln() + libm::lgamma(0.5 * n + beta)
        - 0.5 * n * std::f64::consts::PI.ln()
        - libm::lgamma(1.0 - beta);
    log.exp()
}

/// Moments `∫ φ(w) |w|^{-1-2β} dw / h^{-2β}` of the hat function centred at lag
/// `d ≥ 2` (in units of `h`).
///
/// This is the second central difference of `G(z) = z^q/(q(q-1))`, `q = 1-2β`,
/// written through `expm1` so that `q → 0` (β = 1/2) stays accurate.
fn hat_moment(beta: f64, d: usize) -> f64 {
    let p = 1.0 + 2.0 * beta;
    let q = 1.0 - 2.0 * beta;
    let df = d as f64;
    if d > SERIES_LAG {
        let inv2 = 1.0 / (df * df);
        let c1 = p * (p + 1.0) / 12.0;
        let c2 = p * (p + 1.0) * (p + 2.0) * (p + 3.0) / 360.0;
        return df.powf(-p) * (1.0 + inv2 * (c1 + inv2 * c2));
    }
    let up = (1.0 / df).ln_1p();
    let down = (-1.0 / df).ln_1p();
    if q == 0.0 {
        return -(up + down);
    }
    df.powf(q) * ((q * up).exp_m1() + (q * down).exp_m1()) / (q * (q - 1.0))
}

/// Outer half `∫_h^{2h} (2 - w/h) w^{-1-2β} dw / h^{-2β}` of a neighbouring hat.
fn neighbour_outer_moment(beta: f64) -> f64 {
    let q = 1.0 - 2.0 * beta;
    if q == 0.0 {
        return 1.0 - std::f64::consts::LN_2;
    }
    ((q * std::f64::consts::LN_2).exp_m1() - q) / (q * (q - 1.0))
}

/// Principal-value weight `h^{-2β}/(2-2β)` of the paired neighbour cells, over `h^{-2β}`.
fn near_moment(beta: f64) -> f64 {
    1.0 / (2.0 - 2.0 * beta)
}

/// Assembled `(-Δ)^β` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FracLapMatrix {
    beta: f64,
    grid: SpaceGrid,
    c: f64,
    entries: DMatrix<f64>,
}

/// Off-diagonal couplings `A_{i,i+d}`, `d = 1..n-1`, and the diagonal value.
fn toeplitz_coefficients(beta: f64, n: usize, h: f64, c: f64) -> (f64, Vec<f64>) {
    let scale = c * h.powf(-2.0 * beta);
    let diagonal = scale * (1.0 / (1.0 - beta) + 1.0 / beta);
    let mut off = vec![0.0; n];
    if n > 1 {
        off[1] = -scale * (near_moment(beta) + neighbour_outer_moment(beta));
    }
    for (d, slot) in off.iter_mut().enumerate().skip(2) {
        *slot = -scale * hat_moment(beta, d);
    }
    (diagonal, off)
}

/// Builds the matrix for `β ∈ (0,1)` on `grid`.
pub fn assemble_1d(grid: SpaceGrid, beta: f64) -> Result<FracLapMatrix> {
    let c = normalization_constant(1, beta)?;
    let n = grid.n;
    let (diagonal, off) = toeplitz_coefficients(beta, n, grid.h(), c);
    let entries = DMatrix::from_fn(
        n,
        n,
        |i, j| if i == j { diagonal } else { off[i.abs_diff(j)] },
    );
    Ok(FracLapMatrix {
        beta,
        grid,
        c,
        entries,
    })
}

impl FracLapMatrix {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    /// `c_{1,β}`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Row sums `Σ_j A_ij`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.row_iter().map(|r| r.sum()).collect()
    }

    /// Exterior weights `κ_i = ((x_i - a)^{-2β} + (b - x_i)^{-2β})/(2β)`.
    pub fn exterior_weights(&self) -> Vec<f64> {
        let g = self.grid;
        let s = 2.0 * self.beta;
        g.nodes()
            .map(|x| ((x - g.a).powf(-s) + (g.b - x).powf(-s)) / s)
            .collect()
    }

    /// First violated M-matrix condition, if any.
    pub fn m_matrix_violation(&self) -> Option<String> {
        let a = &self.entries;
        let n = self.grid.n;
        for i in 0..n {
            if !(a[(i, i)] > 0.0) {
                return Some(format!("diagonal entry {i} is {}", a[(i, i)]));
            }
            let mut sum = a[(i, i)];
            for j in 0..n {
                if i == j {
                    continue;
                }
                if a[(i, j)] > 0.0 {
                    return Some(format!("off-diagonal entry ({i}, {j}) is {}", a[(i, j)]));
                }
                if a[(i, j)] != a[(j, i)] {
                    return Some(format!("entries ({i}, {j}) and ({j}, {i}) differ"));
                }
                sum += a[(i, j)];
            }
            if !(sum > 0.0) {
                return Some(format!("row sum {i} is {sum}"));
            }
        }
        None
    }

    /// Row-major CSV with a `# beta,n,a,b` header line.
    pub fn to_csv(&self) -> String {
        let g = self.grid;
        let mut out = format!(
            "# beta={:.16e},n={},a={:.16e},b={:.16e}\n",
            self.beta, g.n, g.a, g.b
        );
        for row in self.entries.row_iter() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

/// `A u`.
pub fn apply(matrix: &FracLapMatrix, u: &Field) -> Result<Field> {
    matrix.grid.check_same(&u.grid)?;
    let v = &matrix.entries * DVector::from_column_slice(&u.values);
    Ok(Field {
        grid: u.grid,
        values: v.as_slice().to_vec(),
    })
}

/// Discrete `a(u, v) = (c/2) ∫∫ (u(x)-u(y))(v(x)-v(y)) |x-y|^{-1-2β}` for
/// piecewise-constant `u`, `v` on the node cells `[x_i - h/2, x_i + h/2]`.
///
/// Cells at lag `d ≥ 2` couple through `h² |x_i - x_j|^{-1-2β}`. Adjacent cells
/// have a non-integrable kernel for β ≥ 1/2 and reuse the exactly integrated
/// neighbour weight of the assembled operator. Everything outside the cells
/// is zero, which contributes `c h κ̃_i u_i v_i` with `κ̃_i` the kernel mass
/// outside `[a + h/2, b - h/2]` seen from `x_i`.
pub fn bilinear_a(u: &Field, v: &Field, beta: f64) -> Result<f64> {
    u.grid.check_same(&v.grid)?;
    let c = normalization_constant(1, beta)?;
    let g = u.grid;
    let n = g.n;
    let h = g.h();
    let p = 1.0 + 2.0 * beta;
    let neighbour = h * h.powf(-2.0 * beta) * (near_moment(beta) + neighbour_outer_moment(beta));
    let weight = |d: usize| {
        if d == 1 {
            neighbour
        } else {
            h * h * (d as f64 * h).powf(-p)
        }
    };
    let (uv, vv) = (&u.values, &v.values);

    let mut pairs = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            pairs += weight(j - i) * (uv[i] - uv[j]) * (vv[i] - vv[j]);
        }
    }
    let s = 2.0 * beta;
    let (lo, hi) = (g.a + 0.5 * h, g.b - 0.5 * h);
    let exterior: f64 = (0..n)
        .map(|i| {
            let x = g.node(i);
            ((x - lo).powf(-s) + (hi - x).powf(-s)) / s * uv[i] * vv[i]
        })
        .sum();
    // the double sum over ordered pairs is twice the sum over i < j
    Ok(c * (pairs + h * exterior))
}

/// `(u⁺, u⁻)` with `u = u⁺ - u⁻`.
pub fn sign_split(u: &Field) -> (Field, Field) {
    (u.map(|y| y.max(0.0)), u.map(|y| (-y).max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normalization_examples() {
        assert_relative_eq!(
            normalization_constant(1, 0.5).unwrap(),
            std::f64::consts::FRAC_1_PI,
            max_relative = 1e-15
        );
        // mpmath values from tests/oracles/reference_values.py
        assert_relative_eq!(
            normalization_constant(2, 0.75).unwrap(),
            0.17116712969055234,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            normalization_constant(3, 0.25).unwrap(),
            0.047620226950680727,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            normalization_constant(1, 0.3).unwrap(),
            0.2300963816816321,
            max_relative = 1e-14
        );
        assert!(normalization_constant(1, 1.0).is_err());
        assert!(normalization_constant(1, 0.0).is_err());
    }

    #[test]
    fn normalization_routes_agree() {
        for dim in 1..=3 {
            for k in 1..20 {
                let beta = k as f64 / 20.0;
                assert_relative_eq!(
                    normalization_constant(dim, beta).unwrap(),
                    normalization_constant_log(dim, beta),
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn normalization_vanishes_linearly_at_zero() {
        let ratio = |b: f64| normalization_constant(1, b).unwrap() / b;
        // c/β → Γ(1/2)/√π = 1
        assert!((ratio(1e-6) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn hat_moment_branches_meet() {
        for beta in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let d = SERIES_LAG;
            let exact = hat_moment(beta, d);
            let p = 1.0 + 2.0 * beta;
            let df = d as f64;
            let series = df.powf(-p)
                * (1.0
                    + p * (p + 1.0) / (12.0 * df * df)
                    + p * (p + 1.0) * (p + 2.0) * (p + 3.0) / (360.0 * df.powi(4)));
            assert_relative_eq!(exact, series, max_relative = 1e-9);
        }
    }

    #[test]
    fn hat_moment_is_continuous_in_beta_at_one_half() {
        for d in [2, 5, 50] {
            let at = hat_moment(0.5, d);
            assert_relative_eq!(hat_moment(0.5 - 1e-7, d), at, max_relative = 1e-5);
            assert_relative_eq!(hat_moment(0.5 + 1e-7, d), at, max_relative = 1e-5);
        }
        assert_relative_eq!(
            neighbour_outer_moment(0.5 + 1e-7),
            neighbour_outer_moment(0.5),
            max_relative = 1e-5
        );
    }

    #[test]
    fn hat_moment_matches_simpson() {
        // ∫_{d-1}^{d+1} (1 - |w - d|) w^{-p} dw by composite Simpson
        let beta = 0.35;
        let p = 1.0 + 2.0 * beta;
        for d in [2usize, 3, 10] {
            let f = |w: f64| (1.0 - (w - d as f64).abs()) * w.powf(-p);
            let steps = 20_000;
            let simpson = |lo: f64, hi: f64| {
                let h = (hi - lo) / steps as f64;
                let s: f64 = (0..=steps)
                    .map(|k| {
                        let wgt = if k == 0 || k == steps {
                            1.0
                        } else if k % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        wgt * f(lo + k as f64 * h)
                    })
                    .sum();
                s * h / 3.0
            };
            let df = d as f64;
            let quad = simpson(df - 1.0, df) + simpson(df, df + 1.0);
            assert_relative_eq!(hat_moment(beta, d), quad, max_relative = 1e-10);
        }
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let grid = SpaceGrid::new(-1.0, 1.0, 16).unwrap();
        let a = assemble_1d(grid, 0.4).unwrap();
        assert!(apply(&a, &Field::zeros(grid))
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn row_sums_are_the_boundary_terms() {
        // row sum = c (κ_i + inner half moments of the two boundary hats)
        let grid = SpaceGrid::new(0.0, 1.0, 40).unwrap();
        let beta = 0.6;
        let a = assemble_1d(grid, beta).unwrap();
        let sums = a.row_sums();
        let kappa = a.exterior_weights();
        for i in 0..40 {
            assert!(sums[i] > a.c() * kappa[i]);
        }
    }

    #[test]
    fn assembly_errors() {
        let grid = SpaceGrid::new(0.0, 1.0, 4).unwrap();
        assert!(assemble_1d(grid, 1.0).is_err());
        assert!(assemble_1d(grid, -0.1).is_err());
        assert!(SpaceGrid::new(1.0, 0.0, 4).is_err());
        assert!(SpaceGrid::new(0.0, 1.0, 0).is_err());
        let other = SpaceGrid::new(0.0, 2.0, 4).unwrap();
        let a = assemble_1d(grid, 0.5).unwrap();
        assert!(apply(&a, &Field::zeros(other)).is_err());
        assert!(Field::new(grid, vec![0.0; 3]).is_err());
        assert!(bilinear_a(&Field::zeros(grid), &Field::zeros(other), 0.5).is_err());
    }

    #[test]
    fn sign_split_examples() {
        let grid = SpaceGrid::new(0.0, 1.0, 4).unwrap();
        let u = Field::new(grid, vec![1.0, -3.0, 0.0, 2.5]).unwrap();
        let (p, m) = sign_split(&u);
        assert_eq!(p.values(), &[1.0, 0.0, 0.0, 2.5]);
        assert_eq!(m.values(), &[0.0, 3.0, 0.0, 0.0]);
        let pos = u.map(f64::abs);
        let (pp, pm) = sign_split(&pos);
        assert_eq!(pp, pos);
        assert!(pm.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let grid = SpaceGrid::new(0.0, 1.0, 3).unwrap();
        let csv = assemble_1d(grid, 0.5).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("# beta=5.0000000000000000e-1,n=3,"));
        assert_eq!(lines[1].split(',').count(), 3);
    }
}
