//! `fracmax solve`: one run of the L1-implicit scheme.

use std::path::Path;

use fracmax::solver::solve;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{json, num, Csv};
use crate::{write_file, CliError};

pub fn run(config: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let sol = solve(&config.problem()?)?;
    let grid = sol.grid();
    let mesh = sol.mesh();

    let mut csv = Csv::new(&["t", "x", "u"]);
    for (n, state) in sol.states.iter().enumerate() {
        let t = num(mesh.node(n));
        for (x, u) in grid.nodes().zip(state.values()) {
            csv.row(&[t.clone(), num(x), num(*u)]);
        }
    }
    write_file(dir, "solution.csv", &csv.finish())?;

    let (min, min_i, min_n) = sol.min();
    let (max, max_i, max_n) = sol.max();
    let meta = json!({
        "alpha": config.alpha,
        "beta": config.beta,
        "grid": { "a": grid.a(), "b": grid.b(), "n": grid.n(), "h": grid.h() },
        "mesh": { "T": mesh.t_end(), "M": mesh.steps(), "tau": mesh.tau() },
        "u0": config.u0_source,
        "f": config.f_source,
        "min": { "value": min, "node": min_i + 1, "step": min_n },
        "max": { "value": max, "node": max_i + 1, "step": max_n },
        "config_sha256": config.sha256,
    });
    write_file(dir, "solution.json", &json(&meta))
}
