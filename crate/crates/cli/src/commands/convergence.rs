//! `fracmax convergence`: refinement studies ending at the configured resolution.
//!
//! | study         | resolution | error                                            |
//! |---------------|------------|--------------------------------------------------|
//! | `caputo`      | M          | L1 derivative of t² at T vs 2T^{2-α}/Γ(3-α)      |
//! | `getoor`      | n          | max over \|x\| ≤ 1/2 of A(1-x²)^β vs its constant |
//! | `relaxation`  | M          | scalar relaxation at T vs E_α(-T^α)              |
//! | `weak`        | n          | \|weak residual\| at T, τ and h halved together  |

use std::path::Path;

use fracmax::fraclap::{apply, assemble_1d, Field, SpaceGrid};
use fracmax::kernels::{mittag_leffler, MollifierFamily, TimeMesh, TimeSeries};
use fracmax::solver::{relax_scalar, solve, weak_residual};
use fracmax::timefrac::{caputo_apply, CaputoScheme, SchemeKind};
use libm::tgamma as gamma;

use crate::commands::verify::bump;
use crate::config::RunConfig;
use crate::output::{num, Csv};
use crate::{write_file, CliError};

pub const LEVELS: usize = 4;

/// `(steps)` ladder `M/8, M/4, M/2, M`, keeping only exact halvings.
pub fn step_ladder(steps: usize) -> Vec<usize> {
    let mut ladder = vec![steps];
    while ladder.len() < LEVELS && ladder[0] % 2 == 0 && ladder[0] >= 4 {
        ladder.insert(0, ladder[0] / 2);
    }
    ladder
}

/// Node counts whose spacing halves: `(n+1)/2^k - 1`.
pub fn node_ladder(n: usize) -> Vec<usize> {
    step_ladder(n + 1).into_iter().map(|c| c - 1).collect()
}

/// `(−Δ)^β (1−x²)_+^β` on `(−1, 1)`.
pub fn getoor_constant(beta: f64) -> f64 {
    4f64.powf(beta) * gamma(1.0 + beta) * gamma(0.5 + beta) / gamma(0.5)
}

struct Row {
    study: &'static str,
    resolution: usize,
    cells: usize,
    error: f64,
}

fn caputo_rows(config: &RunConfig) -> Result<Vec<Row>, CliError> {
    let (alpha, t_end) = (config.alpha, config.t_end);
    let exact = 2.0 * t_end.powf(2.0 - alpha) / gamma(3.0 - alpha);
    step_ladder(config.steps)
        .into_iter()
        .map(|steps| {
            let mesh = TimeMesh::new(t_end, steps)?;
            let u = TimeSeries::sample(&mesh, |t| t * t)?;
            let scheme = CaputoScheme::new(alpha, mesh.tau(), SchemeKind::L1, steps)?;
            let error = (caputo_apply(&u, &scheme, steps)? - exact).abs();
            Ok(Row {
                study: "caputo",
                resolution: steps,
                cells: steps,
                error,
            })
        })
        .collect()
}

fn getoor_rows(config: &RunConfig) -> Result<Vec<Row>, CliError> {
    let beta = config.beta;
    let target = getoor_constant(beta);
    node_ladder(config.n)
        .into_iter()
        .map(|n| {
            let grid = SpaceGrid::new(-1.0, 1.0, n)?;
            let a = assemble_1d(grid, beta)?;
            let au = apply(&a, &Field::sample(grid, |x| (1.0 - x * x).powf(beta)))?;
            let error = grid
                .nodes()
                .zip(au.values())
                .filter(|(x, _)| x.abs() <= 0.5)
                .map(|(_, v)| (v - target).abs())
                .fold(0.0, f64::max);
            Ok(Row {
                study: "getoor",
                resolution: n,
                cells: n + 1,
                error,
            })
        })
        .collect()
}

fn relaxation_rows(config: &RunConfig) -> Result<Vec<Row>, CliError> {
    let (alpha, t_end) = (config.alpha, config.t_end);
    let exact = mittag_leffler(alpha, -t_end.powf(alpha))?;
    step_ladder(config.steps)
        .into_iter()
        .map(|steps| {
            let mesh = TimeMesh::new(t_end, steps)?;
            let u = relax_scalar(alpha, 1.0, 1.0, &mesh)?;
            Ok(Row {
                study: "relaxation",
                resolution: steps,
                cells: steps,
                error: (u.values()[steps] - exact).abs(),
            })
        })
        .collect()
}

fn weak_rows(config: &RunConfig) -> Result<Vec<Row>, CliError> {
    let nodes = node_ladder(config.n);
    let steps = step_ladder(config.steps);
    let levels = nodes.len().min(steps.len());
    let family = config.kernel_family.unwrap_or(MollifierFamily::Exponential);
    nodes[nodes.len() - levels..]
        .iter()
        .zip(&steps[steps.len() - levels..])
        .map(|(&n, &m_steps)| {
            let sol = solve(&config.problem_on(n, m_steps, 0.0)?)?;
            let mut scaled = config.clone();
            scaled.n = n;
            let psi = bump(&scaled);
            let r = weak_residual(&sol, &psi, family, config.m, m_steps)?;
            Ok(Row {
                study: "weak",
                resolution: n,
                cells: n + 1,
                error: r.abs(),
            })
        })
        .collect()
}

pub fn run(config: &RunConfig, dir: &Path) -> Result<(), CliError> {
    if step_ladder(config.steps).len() < 2 || node_ladder(config.n).len() < 2 {
        return Err(CliError::Usage(
            "convergence needs an even M ≥ 4 and an odd n ≥ 3 to halve the meshes".into(),
        ));
    }
    let mut csv = Csv::new(&["study", "resolution", "error", "order"]);
    for rows in [
        caputo_rows(config)?,
        getoor_rows(config)?,
        relaxation_rows(config)?,
        weak_rows(config)?,
    ] {
        for (k, row) in rows.iter().enumerate() {
            let order = match k {
                0 => String::new(),
                _ => {
                    let prev = &rows[k - 1];
                    num((prev.error / row.error).ln() / (row.cells as f64 / prev.cells as f64).ln())
                }
            };
            csv.row(&[
                row.study.to_string(),
                row.resolution.to_string(),
                num(row.error),
                order,
            ]);
        }
    }
    write_file(dir, "convergence.csv", &csv.finish())
}
