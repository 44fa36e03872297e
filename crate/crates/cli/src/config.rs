//! Run configuration: a flat JSON object of scalars and strings.
//!
//! ```json
//! {
//!   "alpha": 0.5, "beta": 0.5, "domain": [-1, 1], "n": 63, "T": 1, "M": 64,
//!   "u0": "max(0, 1 - x^2)", "f": "1 + t*abs(cos(3*x))",
//!   "m": 64, "trials": 50, "seed": 7, "output": "out", "kernel_family": "resolvent"
//! }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use fracmax::exprparse::{parse, Expr};
use fracmax::fraclap::{Field, SpaceGrid};
use fracmax::kernels::{MollifierFamily, TimeMesh};
use fracmax::solver::{FracOrders, ProblemSpec};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

const REQUIRED: [&str; 8] = ["alpha", "beta", "domain", "n", "T", "M", "u0", "f"];
const OPTIONAL: [&str; 5] = ["m", "trials", "seed", "output", "kernel_family"];

/// Largest accepted node count; the operator is dense.
pub const MAX_NODES: u64 = 4096;
pub const MAX_STEPS: u64 = 20_000;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub domain: (f64, f64),
    pub n: usize,
    pub t_end: f64,
    pub steps: usize,
    pub u0_source: String,
    pub u0: Expr,
    pub f_source: String,
    pub f: Expr,
    pub m: u32,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// `None` lets each command pick its default family.
    pub kernel_family: Option<MollifierFamily>,
    /// Hex SHA-256 of the config file bytes.
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Read {
        path: PathBuf,
        message: String,
    },
    Syntax(String),
    /// One entry per offending key: `(key, message)`.
    Invalid(Vec<(String, String)>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read { path, message } => {
                write!(f, "cannot read config {}: {message}", path.display())
            }
            ConfigError::Syntax(m) => write!(f, "config is not a valid JSON object: {m}"),
            ConfigError::Invalid(errors) => {
                write!(
                    f,
                    "invalid config ({} error{}):",
                    errors.len(),
                    if errors.len() == 1 { "" } else { "s" }
                )?;
                for (key, message) in errors {
                    write!(f, "\n  {key}: {message}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let bytes = std::fs::read(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config(&bytes)
}

struct Checker {
    map: Map<String, Value>,
    errors: Vec<(String, String)>,
}

impl Checker {
    fn fail(&mut self, key: &str, message: impl Into<String>) {
        self.errors.push((key.to_string(), message.into()));
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        match self.map.get(key)? {
            Value::Number(v) => v.as_f64(),
            other => {
                self.fail(key, format!("expected a number, got {other}"));
                None
            }
        }
    }

    fn open_unit(&mut self, key: &str) -> Option<f64> {
        let v = self.number(key)?;
        if v > 0.0 && v < 1.0 {
            Some(v)
        } else {
            self.fail(
                key,
                format!("must lie in the open interval (0, 1), got {v}"),
            );
            None
        }
    }

    fn integer(&mut self, key: &str, lo: u64, hi: u64) -> Option<u64> {
        let v = self.map.get(key)?;
        match v.as_u64() {
            Some(k) if (lo..=hi).contains(&k) => Some(k),
            Some(k) => {
                self.fail(key, format!("must lie in [{lo}, {hi}], got {k}"));
                None
            }
            None => {
                self.fail(key, format!("expected a nonnegative integer, got {v}"));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.map.get(key)? {
            Value::String(s) => Some(s.clone()),
            other => {
                self.fail(key, format!("expected a string, got {other}"));
                None
            }
        }
    }

    fn expression(&mut self, key: &str) -> Option<(String, Expr)> {
        let src = self.string(key)?;
        match parse(&src) {
            Ok(e) => Some((src, e)),
            Err(err) => {
                self.fail(key, format!("{err}"));
                None
            }
        }
    }

    fn domain(&mut self) -> Option<(f64, f64)> {
        let v = self.map.get("domain")?;
        let pair = v
            .as_array()
            .filter(|a| a.len() == 2)
            .and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)));
        match pair {
            Some((a, b)) if a < b => Some((a, b)),
            Some((a, b)) => {
                self.fail("domain", format!("needs a < b, got [{a}, {b}]"));
                None
            }
            None => {
                self.fail(
                    "domain",
                    format!("expected [a, b] with two numbers, got {v}"),
                );
                None
            }
        }
    }
}

/// Parses and validates config text; every problem is reported, keyed by name.
pub fn parse_config(bytes: &[u8]) -> Result<RunConfig, ConfigError> {
    let value: Value =
        serde_json::from_slice(bytes).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let Value::Object(map) = value else {
        return Err(ConfigError::Syntax("top level must be an object".into()));
    };
    let mut c = Checker {
        map,
        errors: Vec::new(),
    };
    let unknown: Vec<String> = c
        .map
        .keys()
        .filter(|k| !REQUIRED.contains(&k.as_str()) && !OPTIONAL.contains(&k.as_str()))
        .cloned()
        .collect();
    for key in unknown {
        c.fail(&key, "unknown key");
    }
    for key in REQUIRED {
        if !c.map.contains_key(key) {
            c.fail(key, "missing required key");
        }
    }

    let alpha = c.open_unit("alpha");
    let beta = c.open_unit("beta");
    let domain = c.domain();
    let n = c.integer("n", 1, MAX_NODES);
    let t_end = c.number("T").and_then(|t| {
        if t > 0.0 && t.is_finite() {
            Some(t)
        } else {
            c.fail("T", format!("must be positive, got {t}"));
            None
        }
    });
    let steps = c.integer("M", 1, MAX_STEPS);
    let u0 = c.expression("u0");
    if let Some((_, e)) = &u0 {
        if e.uses_t() {
            c.fail("u0", "the initial value may depend on x only");
        }
    }
    let f = c.expression("f");
    let m = if c.map.contains_key("m") {
        c.integer("m", 1, 1 << 20)
    } else {
        Some(64)
    };
    let trials = if c.map.contains_key("trials") {
        c.integer("trials", 1, 100_000)
    } else {
        Some(200)
    };
    let seed = if c.map.contains_key("seed") {
        c.integer("seed", 0, u64::MAX)
    } else {
        Some(0)
    };
    let output = if c.map.contains_key("output") {
        c.string("output").map(|s| Some(PathBuf::from(s)))
    } else {
        Some(None)
    };
    let kernel_family = match c
        .map
        .contains_key("kernel_family")
        .then(|| c.string("kernel_family"))
    {
        None => Some(None),
        Some(None) => None,
        Some(Some(name)) => match name.as_str() {
            "exponential" => Some(Some(MollifierFamily::Exponential)),
            "resolvent" => Some(Some(MollifierFamily::Resolvent)),
            other => {
                c.fail(
                    "kernel_family",
                    format!("expected \"exponential\" or \"resolvent\", got {other:?}"),
                );
                None
            }
        },
    };

    // sample the expressions once the grid and mesh are known
    if let (Some((a, b)), Some(n), Some(t_end), Some(steps)) = (domain, n, t_end, steps) {
        let grid = SpaceGrid::new(a, b, n as usize).expect("validated above");
        let mesh = TimeMesh::new(t_end, steps as usize).expect("validated above");
        if let Some((_, e)) = &u0 {
            if let Some(x) = grid.nodes().find(|&x| !e.eval(x, 0.0).is_finite()) {
                c.fail("u0", format!("is not finite at (x, t) = ({x}, 0)"));
            }
        }
        if let Some((_, e)) = &f {
            let bad = mesh.nodes().find_map(|t| {
                grid.nodes()
                    .find(|&x| !e.eval(x, t).is_finite())
                    .map(|x| (x, t))
            });
            if let Some((x, t)) = bad {
                c.fail("f", format!("is not finite at (x, t) = ({x}, {t})"));
            }
        }
    }

    if !c.errors.is_empty() {
        return Err(ConfigError::Invalid(c.errors));
    }
    let (u0_source, u0) = u0.expect("no errors");
    let (f_source, f) = f.expect("no errors");
    Ok(RunConfig {
        alpha: alpha.expect("no errors"),
        beta: beta.expect("no errors"),
        domain: domain.expect("no errors"),
        n: n.expect("no errors") as usize,
        t_end: t_end.expect("no errors"),
        steps: steps.expect("no errors") as usize,
        u0_source,
        u0,
        f_source,
        f,
        m: m.expect("no errors") as u32,
        trials: trials.expect("no errors") as usize,
        seed: seed.expect("no errors"),
        output: output.expect("no errors"),
        kernel_family: kernel_family.expect("no errors"),
        sha256: hex_sha256(bytes),
    })
}

impl RunConfig {
    pub fn grid(&self) -> SpaceGrid {
        SpaceGrid::new(self.domain.0, self.domain.1, self.n).expect("validated at load")
    }

    pub fn mesh(&self) -> TimeMesh {
        TimeMesh::new(self.t_end, self.steps).expect("validated at load")
    }

    /// The configured problem on an `(n, M)` grid of choice, with `f` shifted by `slack`.
    pub fn problem_on(&self, n: usize, steps: usize, slack: f64) -> fracmax::Result<ProblemSpec> {
        let grid = SpaceGrid::new(self.domain.0, self.domain.1, n)?;
        let mesh = TimeMesh::new(self.t_end, steps)?;
        let u0 = Field::sample(grid, |x| self.u0.eval(x, 0.0));
        let f = self.f.clone();
        ProblemSpec::new(
            FracOrders::new(self.alpha, self.beta)?,
            grid,
            mesh,
            u0,
            move |x, t| f.eval(x, t) + slack,
        )
    }

    pub fn problem(&self) -> fracmax::Result<ProblemSpec> {
        self.problem_on(self.n, self.steps, 0.0)
    }
}
