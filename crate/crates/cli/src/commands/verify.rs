//! `fracmax verify`: maximum-principle and convexity suites.
//!
//! Each suite checks the configured problem where its hypotheses hold and
//! runs `trials` randomized cases; `verify_report.json` collects the results.

use std::path::Path;

use fracmax::fraclap::Field;
use fracmax::kernels::{Mollifier, MollifierFamily};
use fracmax::principles::{
    check_nonnegativity, check_parabolic_boundary, check_weak_nonnegativity, roundoff_tolerance,
    run_trials, Outcome, PrincipleReport, Sign, TrialKind, TrialSpec, TrialSummary,
};
use fracmax::random::{hermite_trajectory, piecewise_linear, trial_rng};
use fracmax::solver::solve;
use fracmax::timefrac::{
    convex_inequality_check, discrete_extremum, rl_extremum_sign, ExtremumMode,
};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::json;
use crate::{write_file, CliError, Suite};

/// `(α, β)` pairs swept by the randomized principle trials.
pub const LATTICE: [f64; 4] = [0.3, 0.5, 0.7, 0.9];

/// Convexity inequalities always include this index next to the configured `m`.
pub const BASE_M: u32 = 4;

pub fn lattice() -> Vec<(f64, f64)> {
    LATTICE
        .iter()
        .flat_map(|&a| LATTICE.iter().map(move |&b| (a, b)))
        .collect()
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports are serializable")
}

fn outcome_name(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

fn trial_spec(config: &RunConfig, kind: TrialKind) -> TrialSpec {
    TrialSpec {
        kind,
        trials: config.trials,
        seed: config.seed,
        lattice: lattice(),
        domain: config.domain,
        nodes: config.n,
        steps: config.steps,
        t_end: config.t_end,
    }
}

fn principle_suite(
    name: &str,
    configured: PrincipleReport,
    summary: TrialSummary,
) -> (bool, Value) {
    let passed = configured.outcome != Outcome::Fail && summary.all_passed();
    let value = json!({
        "suite": name,
        "outcome": outcome_name(passed),
        "configured": to_value(&configured),
        "trials": to_value(&summary),
    });
    (passed, value)
}

fn nonneg(config: &RunConfig) -> Result<(bool, Value), CliError> {
    let sol = solve(&config.problem()?)?;
    let configured = check_nonnegativity(&sol, roundoff_tolerance(&sol))?;
    let summary = run_trials(&trial_spec(config, TrialKind::Nonneg))?;
    Ok(principle_suite("nonneg", configured, summary))
}

fn boundary(config: &RunConfig) -> Result<(bool, Value), CliError> {
    let sol = solve(&config.problem()?)?;
    let configured = check_parabolic_boundary(&sol, Sign::Min, roundoff_tolerance(&sol))?;
    let summary = run_trials(&trial_spec(config, TrialKind::BoundaryMin))?;
    Ok(principle_suite("boundary", configured, summary))
}

/// `((1 - ((x - c)/r)²)_+)²` centred in the domain with `r` a quarter of its length.
pub fn bump(config: &RunConfig) -> Field {
    let (a, b) = config.domain;
    let (c, r) = (0.5 * (a + b), 0.25 * (b - a));
    Field::sample(config.grid(), |x| {
        (1.0 - ((x - c) / r).powi(2)).max(0.0).powi(2)
    })
}

/// Slack added to `f` to manufacture a strict supersolution.
const SLACK: f64 = 1.0;

fn weak(config: &RunConfig) -> Result<(bool, Value), CliError> {
    let sol = solve(&config.problem_on(config.n, config.steps, SLACK)?)?;
    let grid = config.grid();
    let mesh = config.mesh();
    let base: Vec<Field> = (0..=mesh.steps())
        .map(|n| Field::sample(grid, |x| config.f.eval(x, mesh.node(n))))
        .collect();
    let report = check_weak_nonnegativity(
        &sol,
        &base,
        &bump(config),
        config.m,
        1e-8,
        roundoff_tolerance(&sol),
    )?;
    let passed = report.outcome != Outcome::Fail;
    Ok((
        passed,
        json!({
            "suite": "weak",
            "outcome": outcome_name(passed),
            "slack": SLACK,
            "m": config.m,
            "report": to_value(&report),
        }),
    ))
}

fn identities(config: &RunConfig) -> Result<(bool, Value), CliError> {
    let family = config.kernel_family.unwrap_or(MollifierFamily::Resolvent);
    let mesh = config.mesh();
    let mut ms = vec![BASE_M];
    if config.m != BASE_M {
        ms.push(config.m);
    }
    let kernels = ms
        .iter()
        .map(|&m| Mollifier::new(family, config.alpha, m)?.regularized_kernel(&mesh))
        .collect::<fracmax::Result<Vec<_>>>()?;

    let mut inequality_failures = 0usize;
    let mut worst_margin = f64::INFINITY;
    let mut first_failure: Option<Value> = None;
    for trial in 0..config.trials {
        let u = piecewise_linear(&mut trial_rng(config.seed, trial as u64), &mesh, 12);
        for (k, &m) in kernels.iter().zip(&ms) {
            for v in convex_inequality_check(&u, k)? {
                worst_margin = worst_margin.min(v.margin);
                if !v.passed() {
                    inequality_failures += 1;
                    first_failure.get_or_insert_with(
                        || json!({ "trial": trial, "m": m, "verdict": to_value(&v) }),
                    );
                }
            }
        }
    }

    // the extremum trajectories use streams disjoint from the ones above
    let offset = 1u64 << 32;
    let mut extremum_checks = 0usize;
    let mut extremum_failures = 0usize;
    let mut worst_extremum: Option<Value> = None;
    for trial in 0..config.trials {
        let u = hermite_trajectory(&mut trial_rng(config.seed, offset + trial as u64), &mesh, 6);
        for mode in [ExtremumMode::Max, ExtremumMode::Min] {
            let n0 = discrete_extremum(&u, mode);
            if n0 == 0 {
                continue;
            }
            let sign = rl_extremum_sign(&u, config.alpha, n0, mode)?;
            extremum_checks += 1;
            if !sign.pass {
                extremum_failures += 1;
                worst_extremum.get_or_insert_with(
                    || json!({ "trial": trial, "index": n0, "sign": to_value(&sign) }),
                );
            }
        }
    }

    let passed = inequality_failures == 0 && extremum_failures == 0;
    Ok((
        passed,
        json!({
            "suite": "identities",
            "outcome": outcome_name(passed),
            "kernel_family": family.name(),
            "m": ms,
            "trials": config.trials,
            "inequality_failures": inequality_failures,
            "worst_margin": worst_margin,
            "first_failure": first_failure,
            "extremum_checks": extremum_checks,
            "extremum_failures": extremum_failures,
            "first_extremum_failure": worst_extremum,
        }),
    ))
}

/// Runs the selected suites and writes the report; `Ok(true)` when all pass.
pub fn run(config: &RunConfig, suite: Suite, dir: &Path) -> Result<bool, CliError> {
    let selected: Vec<Suite> = match suite {
        Suite::All => vec![
            Suite::Nonneg,
            Suite::Boundary,
            Suite::Weak,
            Suite::Identities,
        ],
        s => vec![s],
    };
    let mut results = Vec::new();
    let mut all = true;
    for s in selected {
        let (passed, value) = match s {
            Suite::Nonneg => nonneg(config)?,
            Suite::Boundary => boundary(config)?,
            Suite::Weak => weak(config)?,
            Suite::Identities => identities(config)?,
            Suite::All => unreachable!(),
        };
        all &= passed;
        results.push(value);
    }
    let report = json!({
        "config_sha256": config.sha256,
        "passed": all,
        "suites": results,
    });
    write_file(dir, "verify_report.json", &json(&report))?;
    Ok(all)
}
