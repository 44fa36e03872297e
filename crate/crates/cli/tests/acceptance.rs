//! Acceptance suite: one line per criterion, nonzero exit when any fails.
//!
//! Run with `cargo test -p fracmax-cli --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fracmax::fraclap::{
    apply, assemble_1d, bilinear_a, normalization_constant, sign_split, Field, SpaceGrid,
};
use fracmax::kernels::{l1_distance_to_power, Mollifier, MollifierFamily, TimeMesh, TimeSeries};
use fracmax::principles::{classify, trial_problem, BoundaryClass, TrialKind, TrialSpec};
use fracmax::random::{hermite_trajectory, piecewise_linear, trial_rng, SineModes};
use fracmax::solver::{relax_scalar, solve, weak_residual, FracOrders, ProblemSpec};
use fracmax::timefrac::{
    caputo_apply, convex_inequality_check, discrete_extremum, rl_extremum_sign, CaputoScheme,
    ExtremumMode, SchemeKind,
};
use quadrature::double_exponential::integrate;

type Outcome = Result<String, String>;

const LATTICE: [f64; 4] = [0.3, 0.5, 0.7, 0.9];
const NINTHS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

fn lattice() -> Vec<(f64, f64)> {
    LATTICE
        .iter()
        .flat_map(|&a| LATTICE.iter().map(move |&b| (a, b)))
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn trial_spec(kind: TrialKind, trials: usize, seed: u64, nodes: usize, steps: usize) -> TrialSpec {
    TrialSpec {
        kind,
        trials,
        seed,
        lattice: lattice(),
        domain: (-1.0, 1.0),
        nodes,
        steps,
        t_end: 1.0,
    }
}

fn nonnegativity() -> Outcome {
    let spec = trial_spec(TrialKind::Nonneg, 200, 2024, 128, 256);
    let mut worst = f64::INFINITY;
    for t in 0..spec.trials {
        let problem = trial_problem(&spec, t).map_err(|e| e.to_string())?;
        let sol = solve(&problem).map_err(|e| e.to_string())?;
        let f_sup = sol
            .forcing
            .iter()
            .map(|f| sup(f.values()))
            .fold(0.0, f64::max);
        ensure(sol.states[0].values().iter().all(|&v| v >= 0.0), || {
            format!("trial {t}: u0 has a negative value")
        })?;
        ensure(
            sol.forcing
                .iter()
                .flat_map(|f| f.values())
                .all(|&v| v >= 0.0),
            || format!("trial {t}: f < 0"),
        )?;
        let tol = 1e-12 * sup(sol.states[0].values()).max(f_sup).max(1.0);
        let (min, i, n) = sol.min();
        ensure(min >= -tol, || {
            format!("trial {t}: u = {min:e} at node {i}, step {n}")
        })?;
        worst = worst.min(min);
    }
    Ok(format!("200 trials, smallest value {worst:e}"))
}

fn boundary_argmin() -> Outcome {
    let spec = trial_spec(TrialKind::BoundaryMin, 100, 99, 64, 128);
    let (mut initial, mut lateral) = (0, 0);
    for t in 0..spec.trials {
        let sol = solve(&trial_problem(&spec, t).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(
            sol.forcing
                .iter()
                .flat_map(|f| f.values())
                .all(|&v| v >= 0.0),
            || format!("trial {t}: f < 0"),
        )?;
        let u0 = sol.states[0].values();
        ensure(
            u0.iter().any(|&v| v < 0.0) && u0.iter().any(|&v| v > 0.0),
            || format!("trial {t}: u0 has one sign"),
        )?;
        // first minimum in (step, node) order; interior states are closed-grid nodes 1..=N
        let (_, i, n) = sol.min();
        match classify(sol.grid(), sol.mesh(), i + 1, n).map_err(|e| e.to_string())? {
            BoundaryClass::Initial => initial += 1,
            BoundaryClass::Lateral => lateral += 1,
            c => {
                return Err(format!(
                    "trial {t}: argmin ({}, {n}) classified {c:?}",
                    i + 1
                ))
            }
        }
    }
    Ok(format!("argmin initial {initial}, lateral {lateral}"))
}

fn scalar_relaxation() -> Outcome {
    // E_α(-1), 400-term series at 60 digits (mpmath)
    let reference = [
        (0.3, 0.45659440832969067),
        (0.5, 0.427583576155807),
        (0.7, 0.39961197811559938),
        (0.9, 0.37606602142464188),
    ];
    let mesh = TimeMesh::new(1.0, 2048).map_err(|e| e.to_string())?;
    let mut errors = Vec::new();
    for (alpha, exact) in reference {
        let u = relax_scalar(alpha, 1.0, 1.0, &mesh).map_err(|e| e.to_string())?;
        let rel = (u.values()[2048] - exact).abs() / exact;
        ensure(rel < 1e-2, || {
            format!("alpha {alpha}: relative error {rel:e}")
        })?;
        errors.push(format!("{rel:.1e}"));
    }
    Ok(format!("relative errors {}", errors.join(" ")))
}

fn caputo_order() -> Outcome {
    let alpha = 0.5;
    // 2/Γ(2.5) (mpmath)
    let exact = 1.5045055561273501;
    let errors = [256usize, 512, 1024, 2048]
        .iter()
        .map(|&m| {
            let mesh = TimeMesh::new(1.0, m)?;
            let u = TimeSeries::sample(&mesh, |t| t * t)?;
            let scheme = CaputoScheme::new(alpha, mesh.tau(), SchemeKind::L1, m)?;
            Ok((caputo_apply(&u, &scheme, m)? - exact).abs())
        })
        .collect::<fracmax::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?;
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    for &p in &orders {
        ensure((2.0 - alpha - 0.2..=2.0 - alpha + 0.2).contains(&p), || {
            format!("order {p} in {orders:?}")
        })?;
    }
    ensure(errors[3] < 2e-3, || {
        format!("error at M = 2048: {:e}", errors[3])
    })?;
    Ok(format!(
        "orders {orders:.3?}, error at 2048 {:.2e}",
        errors[3]
    ))
}

/// `(1+d)^β - 1 - βd` without cancellation for small `|d|`.
fn curvature_part(beta: f64, d: f64) -> f64 {
    if d <= -1.0 {
        return -1.0 - beta * d;
    }
    if d.abs() >= 0.1 {
        return (beta * d.ln_1p()).exp_m1() - beta * d;
    }
    let (mut coef, mut power, mut sum) = (beta, d, 0.0);
    for k in 2..40 {
        coef *= (beta - (k - 1) as f64) / k as f64;
        power *= d;
        sum += coef * power;
    }
    sum
}

/// Principal-value integral of `(−Δ)^β (1-x²)_+^β` at `0 ≤ x < 1` by
/// double-exponential quadrature.
fn getoor_oracle(beta: f64, x: f64) -> Result<f64, String> {
    let w = 1.0 - x * x;
    let ux = w.powf(beta);
    let p = 1.0 + 2.0 * beta;
    let integrand = |r: f64| {
        let (dp, dm) = ((-2.0 * x * r - r * r) / w, (2.0 * x * r - r * r) / w);
        -ux * (-2.0 * beta * r * r / w + curvature_part(beta, dp) + curvature_part(beta, dm))
            / r.powf(p)
    };
    let mut total = 0.0;
    for (lo, hi) in [(0.0, 1.0 - x), (1.0 - x, 1.0 + x)] {
        if hi > lo {
            let out = integrate(integrand, lo, hi, 1e-13);
            ensure(out.error_estimate < 1e-10, || {
                format!("quadrature error {:e}", out.error_estimate)
            })?;
            total += out.integral;
        }
    }
    total += 2.0 * ux * (1.0 + x).powf(-2.0 * beta) / (2.0 * beta);
    Ok(normalization_constant(1, beta).map_err(|e| e.to_string())? * total)
}

fn getoor_profile() -> Outcome {
    let closed_form = 1.0; // 2^{2β} Γ(1+β) Γ(1/2+β) / Γ(1/2) at β = 1/2
    let mut constant = 0.0;
    for x in [0.0, 0.25, 0.5] {
        constant = getoor_oracle(0.5, x)?;
        ensure((constant - closed_form).abs() < 1e-10, || {
            format!("oracle at x = {x}: {constant}")
        })?;
    }
    let grid = SpaceGrid::new(-1.0, 1.0, 2048).map_err(|e| e.to_string())?;
    let a = assemble_1d(grid, 0.5).map_err(|e| e.to_string())?;
    let au =
        apply(&a, &Field::sample(grid, |x| (1.0 - x * x).sqrt())).map_err(|e| e.to_string())?;
    let err = grid
        .nodes()
        .zip(au.values())
        .filter(|(x, _)| x.abs() <= 0.5)
        .map(|(_, v)| (v - constant).abs())
        .fold(0.0, f64::max);
    ensure(err < 1e-2, || format!("max error {err:e}"))?;
    Ok(format!(
        "oracle constant {constant:.12}, max error {err:.2e}"
    ))
}

fn m_matrices() -> Outcome {
    let mut checked = 0;
    for beta in NINTHS {
        for n in [64, 256, 1024] {
            let a = assemble_1d(
                SpaceGrid::new(0.0, 1.0, n).map_err(|e| e.to_string())?,
                beta,
            )
            .map_err(|e| e.to_string())?;
            let e = a.entries();
            for i in 0..n {
                ensure(e[(i, i)] > 0.0, || {
                    format!("beta {beta} n {n}: diagonal {i}")
                })?;
                let mut row = 0.0;
                for j in 0..n {
                    if i != j {
                        ensure(e[(i, j)] <= 0.0, || {
                            format!("beta {beta} n {n}: entry ({i}, {j}) positive")
                        })?;
                        ensure(e[(i, j)] == e[(j, i)], || {
                            format!("beta {beta} n {n}: ({i}, {j}) not symmetric")
                        })?;
                    }
                    row += e[(i, j)];
                }
                ensure(row > 0.0, || {
                    format!("beta {beta} n {n}: row sum {i} = {row:e}")
                })?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} matrices, zero exceptions"))
}

fn bilinear_signs() -> Outcome {
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut with_negative = 0;
    for trial in 0..500u64 {
        let beta = NINTHS[trial as usize % NINTHS.len()];
        let n = [48, 96, 160][trial as usize % 3];
        let grid = SpaceGrid::new(-1.0, 1.0, n).map_err(|e| e.to_string())?;
        let modes = SineModes::random(&mut trial_rng(77, trial), -1.0, 1.0, (-0.5, 0.5));
        let u = Field::sample(grid, |x| modes.eval(x));
        let (plus, minus) = sign_split(&u);
        let abs = u.map(f64::abs);
        let scale = bilinear_a(&abs, &abs, beta).map_err(|e| e.to_string())?;
        let cross = bilinear_a(&plus, &minus, beta).map_err(|e| e.to_string())?;
        ensure(cross <= 1e-14 * scale, || {
            format!("trial {trial}: a(u+, u-) = {cross:e}, scale {scale:e}")
        })?;
        worst_ratio = worst_ratio.max(cross / scale);
        if minus.values().iter().any(|&v| v > 0.0) {
            with_negative += 1;
            let q = bilinear_a(&minus, &minus, beta).map_err(|e| e.to_string())?;
            ensure(q > 0.0, || format!("trial {trial}: a(u-, u-) = {q:e}"))?;
        }
    }
    Ok(format!(
        "{with_negative} fields with u- ≠ 0, largest a(u+,u-)/scale {worst_ratio:.2e}"
    ))
}

fn convexity_inequalities() -> Outcome {
    let mesh = TimeMesh::new(1.0, 128).map_err(|e| e.to_string())?;
    let kernels = [4u32, 64]
        .iter()
        .map(|&m| Mollifier::new(MollifierFamily::Resolvent, 0.5, m)?.regularized_kernel(&mesh))
        .collect::<fracmax::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let mut verdicts = 0;
    for trial in 0..500u64 {
        let u = piecewise_linear(&mut trial_rng(41, trial), &mesh, 12);
        for k in &kernels {
            for v in convex_inequality_check(&u, k).map_err(|e| e.to_string())? {
                ensure(v.passed(), || format!("trial {trial}: {v:?}"))?;
                verdicts += 1;
            }
        }
    }
    Ok(format!("{verdicts} verdicts pass (resolvent mollifier)"))
}

fn kernel_regularization() -> Outcome {
    let mesh = TimeMesh::new(1.0, 256).map_err(|e| e.to_string())?;
    let fine = TimeMesh::new(1.0, 1024).map_err(|e| e.to_string())?;
    for family in [MollifierFamily::Exponential, MollifierFamily::Resolvent] {
        for alpha in NINTHS {
            for m in [1u32, 4, 16, 64] {
                let moll = Mollifier::new(family, alpha, m).map_err(|e| e.to_string())?;
                let k = moll.regularized_kernel(&mesh).map_err(|e| e.to_string())?;
                ensure(
                    k.values().iter().all(|&v| v >= 0.0 && v.is_finite()),
                    || format!("{family:?} alpha {alpha} m {m}: negative kernel sample"),
                )?;
                ensure(mesh.nodes().all(|t| moll.density(t) >= 0.0), || {
                    format!("{family:?} alpha {alpha} m {m}: negative density")
                })?;
            }
            let d = [4u32, 16, 64, 256]
                .iter()
                .map(|&m| l1_distance_to_power(&Mollifier::new(family, alpha, m)?, &fine))
                .collect::<fracmax::Result<Vec<f64>>>()
                .map_err(|e| e.to_string())?;
            ensure(d.windows(2).all(|w| w[1] < w[0]), || {
                format!("{family:?} alpha {alpha}: {d:?}")
            })?;
        }
    }
    Ok(
        "both families, 9 alphas, m in 1..64 nonnegative; L1 distance decreasing along 4..256"
            .into(),
    )
}

fn weak_self_convergence() -> Outcome {
    let mut residuals = Vec::new();
    for (n, steps) in [(63, 64), (127, 128), (255, 256)] {
        let grid = SpaceGrid::new(-1.0, 1.0, n).map_err(|e| e.to_string())?;
        let mesh = TimeMesh::new(1.0, steps).map_err(|e| e.to_string())?;
        let u0 = Field::sample(grid, |x| (1.0 - x * x).max(0.0));
        let orders = FracOrders::new(0.5, 0.5).map_err(|e| e.to_string())?;
        let problem = ProblemSpec::new(orders, grid, mesh, u0, |x, t| {
            1.0 + t * (3.0 * x).cos().abs()
        })
        .map_err(|e| e.to_string())?;
        let sol = solve(&problem).map_err(|e| e.to_string())?;
        let psi = Field::sample(grid, |x| (1.0 - 4.0 * x * x).max(0.0).powi(2));
        let r = weak_residual(&sol, &psi, MollifierFamily::Exponential, 64, steps)
            .map_err(|e| e.to_string())?;
        residuals.push(r.abs());
    }
    ensure(residuals.windows(2).all(|w| w[1] < w[0]), || {
        format!("|r(T)| = {residuals:?}")
    })?;
    let shown: Vec<String> = residuals.iter().map(|r| format!("{r:.3e}")).collect();
    Ok(format!("|r(T)| = {}", shown.join(" ")))
}

fn extremum_signs() -> Outcome {
    let mesh = TimeMesh::new(1.0, 256).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for trial in 0..200u64 {
        let alpha = LATTICE[trial as usize % LATTICE.len()];
        let u = hermite_trajectory(&mut trial_rng(31, trial), &mesh, 6);
        for mode in [ExtremumMode::Max, ExtremumMode::Min] {
            let n0 = discrete_extremum(&u, mode);
            if n0 == 0 {
                continue;
            }
            let s = rl_extremum_sign(&u, alpha, n0, mode).map_err(|e| e.to_string())?;
            ensure(s.pass, || format!("trial {trial} {mode:?} at {n0}: {s:?}"))?;
            checked += 1;
        }
    }
    ensure(checked >= 200, || {
        format!("only {checked} extrema at positive times")
    })?;
    Ok(format!("{checked} extrema checked"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn fracmax(args: &[&str], cfg: &Path, out: &Path) -> Result<i32, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_fracmax"))
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?
        .status;
    status
        .code()
        .ok_or_else(|| "terminated by a signal".to_string())
}

fn cli_end_to_end() -> Outcome {
    let golden = config("golden.json");
    let runs = [
        ("solve", &["solution.csv", "solution.json"][..]),
        ("verify", &["verify_report.json"][..]),
        ("convergence", &["convergence.csv"][..]),
        ("kernel-table", &["kernel_samples.csv", "kernel_l1.csv"][..]),
    ];
    for (sub, files) in runs {
        let dirs = [
            tempfile::tempdir().map_err(|e| e.to_string())?,
            tempfile::tempdir().map_err(|e| e.to_string())?,
        ];
        for d in &dirs {
            let code = fracmax(&[sub], &golden, d.path())?;
            ensure(code == 0, || format!("{sub} exited with {code}"))?;
        }
        for f in files {
            let read = |d: &tempfile::TempDir| {
                std::fs::read(d.path().join(f)).map_err(|e| format!("{f}: {e}"))
            };
            ensure(read(&dirs[0])? == read(&dirs[1])?, || {
                format!("{sub}: {f} differs between runs")
            })?;
        }
    }
    let scratch = tempfile::tempdir().map_err(|e| e.to_string())?;
    let failures = [
        (&["solve"][..], "bad_alpha.json", 2),
        (&["solve"][..], "bad_u0.json", 2),
        (
            &["verify", "--suite", "identities"][..],
            "exponential_identities.json",
            1,
        ),
    ];
    for (args, file, expected) in failures {
        let code = fracmax(args, &config(file), scratch.path())?;
        ensure(code == expected, || {
            format!("{file}: exit {code}, expected {expected}")
        })?;
    }
    Ok("4 subcommands byte-identical; exit codes 2, 2, 1".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 12] = [
        ("discrete positivity", 300, nonnegativity),
        ("parabolic-boundary argmin", 180, boundary_argmin),
        ("scalar relaxation vs Mittag-Leffler", 30, scalar_relaxation),
        ("Caputo L1 order", 10, caputo_order),
        ("Getoor profile", 60, getoor_profile),
        ("M-matrix invariants", 60, m_matrices),
        ("bilinear-form signs", 30, bilinear_signs),
        ("convexity inequalities", 60, convexity_inequalities),
        ("kernel regularization", 30, kernel_regularization),
        ("weak-residual self-convergence", 120, weak_self_convergence),
        ("extremum sign", 30, extremum_signs),
        ("CLI end-to-end", 60, cli_end_to_end),
    ];
    let mut failed = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if result.is_ok() && elapsed > Duration::from_secs(*budget) {
            result = Err(format!("over the {budget} s budget"));
        }
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "criterion {:>2} {tag} {name} ({:.2} s / {budget} s): {detail}",
            k + 1,
            elapsed.as_secs_f64()
        );
        failed += result.is_err() as usize;
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
