//! WebAssembly bindings for the demo page in `www/`.
//!
//! The `*_data` functions hold the logic and are tested natively; the exported
//! wrappers only turn their errors into JS exceptions.

use fracmax::exprparse::{parse, Expr};
use fracmax::fraclap::{apply, assemble_1d, Field, SpaceGrid};
use fracmax::kernels::{g_kernel, Mollifier, MollifierFamily, TimeMesh};
use fracmax::solver::{solve, FracOrders, ProblemSpec};
use wasm_bindgen::prelude::*;

/// Upper limits that keep a dense solve interactive in the browser.
pub const MAX_NODES: usize = 512;
pub const MAX_STEPS: usize = 2048;

fn parse_labeled(label: &str, src: &str) -> Result<Expr, String> {
    parse(src).map_err(|e| format!("{label}: {e}"))
}

fn check_sizes(n: usize, steps: usize) -> Result<(), String> {
    if n == 0 || n > MAX_NODES {
        return Err(format!("n must lie in 1..={MAX_NODES}"));
    }
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!("M must lie in 1..={MAX_STEPS}"));
    }
    Ok(())
}

/// Solution of one problem on `(-1, 1)` reduced to what the page plots.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    x: Vec<f64>,
    initial: Vec<f64>,
    terminal: Vec<f64>,
    lowest: Vec<f64>,
    min: f64,
    min_step: usize,
}

#[wasm_bindgen]
impl Profile {
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    pub fn initial(&self) -> Vec<f64> {
        self.initial.clone()
    }

    /// `u(·, T)`.
    pub fn terminal(&self) -> Vec<f64> {
        self.terminal.clone()
    }

    /// `min_n u(x_i, t_n)` at every node.
    pub fn lowest(&self) -> Vec<f64> {
        self.lowest.clone()
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    /// Time index of the global minimum.
    pub fn min_step(&self) -> usize {
        self.min_step
    }
}

pub fn solve_profile_data(
    alpha: f64,
    beta: f64,
    n: usize,
    steps: usize,
    t_end: f64,
    u0: &str,
    f: &str,
) -> Result<Profile, String> {
    check_sizes(n, steps)?;
    let u0 = parse_labeled("u0", u0)?;
    if u0.uses_t() {
        return Err("u0: the initial value cannot depend on t".into());
    }
    let f = parse_labeled("f", f)?;
    let grid = SpaceGrid::new(-1.0, 1.0, n).map_err(|e| e.to_string())?;
    let mesh = TimeMesh::new(t_end, steps).map_err(|e| e.to_string())?;
    let orders = FracOrders::new(alpha, beta).map_err(|e| e.to_string())?;
    let u0 = Field::sample(grid, |x| u0.eval(x, 0.0));
    if let Some(v) = u0.values().iter().find(|v| !v.is_finite()) {
        return Err(format!("u0: evaluates to {v} on the grid"));
    }
    let problem = ProblemSpec::new(orders, grid, mesh, u0, move |x, t| f.eval(x, t))
        .map_err(|e| e.to_string())?;
    let sol = solve(&problem).map_err(|e| e.to_string())?;

    let mut lowest = sol.states[0].values().to_vec();
    for state in &sol.states[1..] {
        for (l, &v) in lowest.iter_mut().zip(state.values()) {
            *l = l.min(v);
        }
    }
    let (min, _, min_step) = sol.min();
    Ok(Profile {
        x: grid.nodes().collect(),
        initial: sol.states[0].values().to_vec(),
        terminal: sol.states[steps].values().to_vec(),
        lowest,
        min,
        min_step,
    })
}

#[wasm_bindgen]
pub fn solve_profile(
    alpha: f64,
    beta: f64,
    n: usize,
    steps: usize,
    t_end: f64,
    u0: &str,
    f: &str,
) -> Result<Profile, JsError> {
    solve_profile_data(alpha, beta, n, steps, t_end, u0, f).map_err(|e| JsError::new(&e))
}

/// `g_{1-α}`, `g_{1-α,m}` and `h_m` sampled at `t_1, …, t_M` on `(0, T]`.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCurves {
    t: Vec<f64>,
    power: Vec<f64>,
    regularized: Vec<f64>,
    density: Vec<f64>,
}

#[wasm_bindgen]
impl KernelCurves {
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }

    pub fn power(&self) -> Vec<f64> {
        self.power.clone()
    }

    pub fn regularized(&self) -> Vec<f64> {
        self.regularized.clone()
    }

    pub fn density(&self) -> Vec<f64> {
        self.density.clone()
    }
}

pub fn kernel_curves_data(
    alpha: f64,
    m: u32,
    t_end: f64,
    samples: usize,
    family: &str,
) -> Result<KernelCurves, String> {
    let family = match family {
        "exponential" => MollifierFamily::Exponential,
        "resolvent" => MollifierFamily::Resolvent,
        other => return Err(format!("unknown mollifier family '{other}'")),
    };
    if samples == 0 || samples > MAX_STEPS {
        return Err(format!("samples must lie in 1..={MAX_STEPS}"));
    }
    let mesh = TimeMesh::new(t_end, samples).map_err(|e| e.to_string())?;
    let moll = Mollifier::new(family, alpha, m).map_err(|e| e.to_string())?;
    let t: Vec<f64> = mesh.nodes().skip(1).collect();
    let power = t
        .iter()
        .map(|&s| g_kernel(1.0 - alpha, s))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok(KernelCurves {
        regularized: t.iter().map(|&s| moll.regularized_at(s)).collect(),
        density: t.iter().map(|&s| moll.density(s)).collect(),
        power,
        t,
    })
}

#[wasm_bindgen]
pub fn kernel_curves(
    alpha: f64,
    m: u32,
    t_end: f64,
    samples: usize,
    family: &str,
) -> Result<KernelCurves, JsError> {
    kernel_curves_data(alpha, m, t_end, samples, family).map_err(|e| JsError::new(&e))
}

/// A field on `(-1, 1)` and its discrete fractional Laplacian.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    x: Vec<f64>,
    u: Vec<f64>,
    au: Vec<f64>,
}

#[wasm_bindgen]
impl Applied {
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    pub fn u(&self) -> Vec<f64> {
        self.u.clone()
    }

    pub fn au(&self) -> Vec<f64> {
        self.au.clone()
    }
}

pub fn fraclap_apply_data(beta: f64, n: usize, u: &str) -> Result<Applied, String> {
    check_sizes(n, 1)?;
    let expr = parse_labeled("u", u)?;
    if expr.uses_t() {
        return Err("u: the field cannot depend on t".into());
    }
    let grid = SpaceGrid::new(-1.0, 1.0, n).map_err(|e| e.to_string())?;
    let field = Field::sample(grid, |x| expr.eval(x, 0.0));
    if let Some(v) = field.values().iter().find(|v| !v.is_finite()) {
        return Err(format!("u: evaluates to {v} on the grid"));
    }
    let a = assemble_1d(grid, beta).map_err(|e| e.to_string())?;
    let au = apply(&a, &field).map_err(|e| e.to_string())?;
    Ok(Applied {
        x: grid.nodes().collect(),
        u: field.into_values(),
        au: au.into_values(),
    })
}

#[wasm_bindgen]
pub fn fraclap_apply(beta: f64, n: usize, u: &str) -> Result<Applied, JsError> {
    fraclap_apply_data(beta, n, u).map_err(|e| JsError::new(&e))
}
