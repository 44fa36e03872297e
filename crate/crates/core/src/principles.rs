//! Discrete maximum-principle checks on computed solutions.
//!
//! Space indices here run over the closed grid `0..=N+1`: `0` and `N+1` are the
//! boundary points `a`, `b` (where `u = 0`), `1..=N` are the interior nodes.
//! The nodes at `0, 1, N, N+1` touch the exterior and form the lateral
//! boundary; `t = 0` is the initial boundary; together they make up the
//! parabolic boundary. Interior nodes at `t = T` are terminal and do not belong
//! to it.
//!
//! A check whose hypotheses fail reports [`Outcome::NotApplicable`]; the
//! theorems are conditionals, so such data say nothing about them.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::fraclap::{Field, SpaceGrid};
use crate::kernels::{MollifierFamily, TimeMesh};
use crate::random::{trial_rng, SineModes, SpaceTimeModes};
use crate::solver::{solve, weak_residual, FracOrders, ProblemSpec, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryClass {
    Interior,
    Lateral,
    Initial,
    Terminal,
}

impl BoundaryClass {
    pub fn is_parabolic(self) -> bool {
        matches!(self, Self::Lateral | Self::Initial)
    }
}

/// Class of the closed-grid node `i ∈ 0..=N+1` at time index `n ∈ 0..=M`.
pub fn classify(grid: &SpaceGrid, mesh: &TimeMesh, i: usize, n: usize) -> Result<BoundaryClass> {
    let last = grid.n() + 1;
    if i > last || n > mesh.steps() {
        return Err(contract(format!(
            "index ({i}, {n}) outside the closed cylinder 0..={last} × 0..={}",
            mesh.steps()
        )));
    }
    Ok(if n == 0 {
        BoundaryClass::Initial
    } else if i <= 1 || i + 1 >= last {
        BoundaryClass::Lateral
    } else if n == mesh.steps() {
        BoundaryClass::Terminal
    } else {
        BoundaryClass::Interior
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Nonneg,
    BoundaryMax,
    BoundaryMin,
    WeakNonneg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    /// The hypotheses of the principle do not hold for the data.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipleReport {
    pub kind: ReportKind,
    pub outcome: Outcome,
    /// Extremal value found.
    pub value: f64,
    /// `(closed-grid node, time index)` of the extremum.
    pub location: (usize, usize),
    pub class: BoundaryClass,
    /// `max(0, -slack)`; zero when the check passes.
    pub violation: f64,
    pub tolerance: f64,
    pub trials: usize,
    pub seeds: Vec<u64>,
    pub note: Option<String>,
}

impl PrincipleReport {
    fn not_applicable(kind: ReportKind, note: String) -> Self {
        Self {
            kind,
            outcome: Outcome::NotApplicable,
            value: f64::NAN,
            location: (0, 0),
            class: BoundaryClass::Initial,
            violation: 0.0,
            tolerance: 0.0,
            trials: 1,
            seeds: Vec::new(),
            note: Some(note),
        }
    }
}

fn sup_norm(fields: &[Field]) -> f64 {
    fields
        .iter()
        .flat_map(|f| f.values())
        .fold(0.0, |m, v| m.max(v.abs()))
}

/// `1e-12 · max(1, ‖u_0‖∞, ‖f‖∞)`.
pub fn roundoff_tolerance(sol: &Solution) -> f64 {
    1e-12
        * sup_norm(&sol.forcing)
            .max(sup_norm(&sol.states[..1]))
            .max(1.0)
}

fn first_negative(fields: &[Field]) -> Option<(usize, usize, f64)> {
    fields.iter().enumerate().find_map(|(n, f)| {
        f.values()
            .iter()
            .enumerate()
            .find(|(_, &v)| v < 0.0)
            .map(|(i, &v)| (i + 1, n, v))
    })
}

/// `u ≥ -tol` everywhere, for `u_0 ≥ 0` and `f ≥ 0`.
pub fn check_nonnegativity(sol: &Solution, tol: f64) -> Result<PrincipleReport> {
    if let Some((i, _, v)) = first_negative(&sol.states[..1]) {
        return Ok(PrincipleReport::not_applicable(
            ReportKind::Nonneg,
            format!("hypotheses violated: u0 = {v} < 0 at node {i}"),
        ));
    }
    if let Some((i, n, v)) = first_negative(&sol.forcing) {
        return Ok(PrincipleReport::not_applicable(
            ReportKind::Nonneg,
            format!("hypotheses violated: f = {v} < 0 at node {i}, step {n}"),
        ));
    }
    nonnegativity_report(sol, ReportKind::Nonneg, tol)
}

fn nonnegativity_report(sol: &Solution, kind: ReportKind, tol: f64) -> Result<PrincipleReport> {
    let (value, i, n) = sol.min();
    let location = (i + 1, n);
    let class = classify(sol.grid(), sol.mesh(), location.0, location.1)?;
    let violation = (-(value + tol)).max(0.0);
    Ok(PrincipleReport {
        kind,
        outcome: if violation == 0.0 {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
        value,
        location,
        class,
        violation,
        tolerance: tol,
        trials: 1,
        seeds: Vec::new(),
        note: None,
    })
}

/// The extremum over the closed cylinder is attained on the parabolic boundary.
///
/// `Min` needs `f ≥ 0` (supersolution), `Max` needs `f ≤ 0` (subsolution).
/// Passes when the extremum over the parabolic boundary is within `tol` of the
/// extremum over the closed cylinder (including the zero boundary columns).
pub fn check_parabolic_boundary(sol: &Solution, sign: Sign, tol: f64) -> Result<PrincipleReport> {
    let kind = match sign {
        Sign::Min => ReportKind::BoundaryMin,
        Sign::Max => ReportKind::BoundaryMax,
    };
    let wrong_sign = sol.forcing.iter().enumerate().find_map(|(n, f)| {
        f.values().iter().enumerate().find_map(|(i, &v)| {
            let bad = match sign {
                Sign::Min => v < 0.0,
                Sign::Max => v > 0.0,
            };
            bad.then_some((i + 1, n, v))
        })
    });
    if let Some((i, n, v)) = wrong_sign {
        return Ok(PrincipleReport::not_applicable(
            kind,
            format!("hypotheses violated: f = {v} has the wrong sign at node {i}, step {n}"),
        ));
    }

    // signed so that "better" means smaller
    let key = |v: f64| match sign {
        Sign::Min => v,
        Sign::Max => -v,
    };
    let grid = sol.grid();
    let mesh = sol.mesh();
    let last = grid.n() + 1;
    let mut best_parabolic: Option<(f64, usize, usize)> = None;
    let mut best_rest: Option<(f64, usize, usize)> = None;
    for (n, state) in sol.states.iter().enumerate() {
        for i in 0..=last {
            let v = if i == 0 || i == last {
                0.0
            } else {
                state.values()[i - 1]
            };
            let slot = if classify(grid, mesh, i, n)?.is_parabolic() {
                &mut best_parabolic
            } else {
                &mut best_rest
            };
            if slot.is_none_or(|(b, _, _)| key(v) < key(b)) {
                *slot = Some((v, i, n));
            }
        }
    }
    let (pv, pi, pn) = best_parabolic.expect("the initial level is never empty");
    // ties go to the parabolic boundary
    let (value, i, n) = match best_rest {
        Some((rv, ri, rn)) if key(rv) < key(pv) => (rv, ri, rn),
        _ => (pv, pi, pn),
    };
    let gap = key(pv) - key(value);
    let violation = (gap - tol).max(0.0);
    Ok(PrincipleReport {
        kind,
        outcome: if violation == 0.0 {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
        value,
        location: (i, n),
        class: classify(grid, mesh, i, n)?,
        violation,
        tolerance: tol,
        trials: 1,
        seeds: Vec::new(),
        note: None,
    })
}

/// Nonnegativity of a supersolution: `sol` solves the equation with a forcing
/// `≥ f_base ≥ 0`, hence satisfies the weak inequality for `f_base`.
///
/// The supersolution property is confirmed through the mollified weak residual
/// against `f_base` (it must be `≥ -residual_tol` for the nonnegative test
/// function `psi` at every step) before nonnegativity is checked.
pub fn check_weak_nonnegativity(
    sol: &Solution,
    base_forcing: &[Field],
    psi: &Field,
    m: u32,
    residual_tol: f64,
    tol: f64,
) -> Result<PrincipleReport> {
    let kind = ReportKind::WeakNonneg;
    if base_forcing.len() != sol.forcing.len() {
        return Err(contract("base forcing must have one level per time step"));
    }
    if first_negative(&sol.states[..1]).is_some() || first_negative(base_forcing).is_some() {
        return Ok(PrincipleReport::not_applicable(
            kind,
            "hypotheses violated: u0 or f has negative values".into(),
        ));
    }
    let excess_ok = sol
        .forcing
        .iter()
        .zip(base_forcing)
        .all(|(f, g)| f.values().iter().zip(g.values()).all(|(a, b)| a >= b));
    if !excess_ok {
        return Ok(PrincipleReport::not_applicable(
            kind,
            "hypotheses violated: forcing below the base forcing".into(),
        ));
    }
    let mut base = sol.clone();
    base.forcing = base_forcing.to_vec();
    for n in 1..=sol.mesh().steps() {
        let r = weak_residual(&base, psi, MollifierFamily::Exponential, m, n)?;
        if r < -residual_tol {
            return Ok(PrincipleReport::not_applicable(
                kind,
                format!(
                    "hypotheses violated: weak residual {r} at step {n} is below -{residual_tol}"
                ),
            ));
        }
    }
    nonnegativity_report(sol, kind, tol)
}

/// Which principle a batch of randomized trials exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialKind {
    /// `u_0 ≥ 0`, `f ≥ 0`, check `u ≥ 0`.
    Nonneg,
    /// `f ≥ 0`, `u_0` of both signs, check the argmin is on the parabolic boundary.
    BoundaryMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub kind: TrialKind,
    pub trials: usize,
    pub seed: u64,
    /// `(α, β)` pairs, cycled through by trial index.
    pub lattice: Vec<(f64, f64)>,
    pub domain: (f64, f64),
    pub nodes: usize,
    pub steps: usize,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub kind: TrialKind,
    pub trials: usize,
    pub seed: u64,
    pub lattice: Vec<(f64, f64)>,
    pub passed: usize,
    pub failed: usize,
    pub not_applicable: usize,
    /// Worst report (largest violation; ties keep the earliest trial).
    pub worst: PrincipleReport,
    /// Trial index of the worst report.
    pub worst_trial: usize,
    /// Class counts of the extremum location over all trials.
    pub locations: LocationCounts,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationCounts {
    pub initial: usize,
    pub lateral: usize,
    pub terminal: usize,
    pub interior: usize,
}

impl TrialSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.not_applicable == 0
    }
}

/// Builds the random problem for one trial.
pub fn trial_problem(spec: &TrialSpec, trial: usize) -> Result<ProblemSpec> {
    let (alpha, beta) = spec.lattice[trial % spec.lattice.len()];
    let (a, b) = spec.domain;
    let mut rng = trial_rng(spec.seed, trial as u64);
    let grid = SpaceGrid::new(a, b, spec.nodes)?;
    let mesh = TimeMesh::new(spec.t_end, spec.steps)?;
    let (u0, f) = match spec.kind {
        TrialKind::Nonneg => {
            let u0 = SineModes::random(&mut rng, a, b, (-0.5, 0.5));
            let f = SpaceTimeModes::random(&mut rng, a, b, (-0.5, 0.5));
            (Field::sample(grid, |x| u0.eval(x).max(0.0)), f)
        }
        TrialKind::BoundaryMin => {
            let shape = SineModes::random(&mut rng, a, b, (0.0, 0.0));
            let modes = Field::sample(grid, |x| shape.eval(x));
            let (lo, hi) = modes
                .values()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                    (l.min(v), h.max(v))
                });
            // a shift strictly inside (-hi, -lo) leaves values of both signs on the grid
            let shift = if lo < hi {
                rng.gen_range(-hi..-lo)
            } else {
                0.0
            };
            let f = SpaceTimeModes::random(&mut rng, a, b, (-0.5, 0.5));
            (modes.map(|v| v + shift), f)
        }
    };
    ProblemSpec::new(
        FracOrders::new(alpha, beta)?,
        grid,
        mesh,
        u0,
        move |x, t| f.eval(x, t).max(0.0),
    )
}

fn run_one(spec: &TrialSpec, trial: usize) -> Result<PrincipleReport> {
    let sol = solve(&trial_problem(spec, trial)?)?;
    let tol = roundoff_tolerance(&sol);
    let mut report = match spec.kind {
        TrialKind::Nonneg => check_nonnegativity(&sol, tol)?,
        TrialKind::BoundaryMin => check_parabolic_boundary(&sol, Sign::Min, tol)?,
    };
    report.seeds = vec![spec.seed];
    Ok(report)
}

/// Runs the trials in parallel and merges the reports.
pub fn run_trials(spec: &TrialSpec) -> Result<TrialSummary> {
    if spec.trials == 0 {
        return Err(contract("trial count must be at least 1"));
    }
    if spec.lattice.is_empty() {
        return Err(contract("the (alpha, beta) lattice is empty"));
    }
    let reports: Vec<PrincipleReport> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_one(spec, t))
        .collect::<Result<_>>()?;

    let mut locations = LocationCounts::default();
    let (mut passed, mut failed, mut not_applicable) = (0, 0, 0);
    let mut worst_trial = 0;
    for (t, r) in reports.iter().enumerate() {
        match r.outcome {
            Outcome::Pass => passed += 1,
            Outcome::Fail => failed += 1,
            Outcome::NotApplicable => not_applicable += 1,
        }
        if r.outcome != Outcome::NotApplicable {
            match r.class {
                BoundaryClass::Initial => locations.initial += 1,
                BoundaryClass::Lateral => locations.lateral += 1,
                BoundaryClass::Terminal => locations.terminal += 1,
                BoundaryClass::Interior => locations.interior += 1,
            }
        }
        if r.violation > reports[worst_trial].violation {
            worst_trial = t;
        }
    }
    let mut worst = reports[worst_trial].clone();
    worst.trials = spec.trials;
    worst.seeds = vec![spec.seed];
    Ok(TrialSummary {
        kind: spec.kind,
        trials: spec.trials,
        seed: spec.seed,
        lattice: spec.lattice.clone(),
        passed,
        failed,
        not_applicable,
        worst,
        worst_trial,
        locations,
    })
}
