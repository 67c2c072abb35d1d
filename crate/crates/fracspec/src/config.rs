//! JSON run configuration.
//!
//! ```json
//! {
//!   "problem": {
//!     "alpha": 0.5, "length": "pi", "horizon": 1,
//!     "p": "1", "q": "0", "u0": "x*(pi-x)",
//!     "phi1": "0", "phi2": "0", "source": "0",
//!     "n_modes": 64, "grid_size": 2001, "n_time_steps": 1024
//!   },
//!   "snapshots": [0, 0.5, 1],
//!   "checks": ["maximum_principle", "residual"],
//!   "output_dir": "out"
//! }
//! ```
//!
//! Expressions are strings in the coefficient grammar; `length` and
//! `horizon` accept a number or a constant expression such as `"pi"`.

use std::fmt;
use std::path::{Path, PathBuf};

use fracspec_core::expr::{parse, Expr};
use fracspec_core::spectral::{DEFAULT_GRID_SIZE, DEFAULT_N_MODES, DEFAULT_TIME_STEPS};
use fracspec_core::sturm_liouville::{DiscreteOperator, OperatorCoefficients};
use fracspec_core::{Error, ProblemSpec};
use serde::{Deserialize, Serialize};

/// Input error tied to the configuration key that caused it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{key}: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            key: key.into(),
            message: message.to_string(),
        }
    }
}

/// A number given either literally or as a constant expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn value(&self, key: &str) -> Result<f64, ConfigError> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Text(s) => {
                let e = parse(s).map_err(|e| ConfigError::new(key, e))?;
                e.as_constant()
                    .ok_or_else(|| ConfigError::new(key, format!("{s:?} is not a constant")))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Number(v) => f.write_str(&crate::format::num(*v)),
            Scalar::Text(s) => f.write_str(s),
        }
    }
}

fn zero() -> String {
    "0".into()
}
fn one() -> String {
    "1".into()
}
fn default_modes() -> usize {
    DEFAULT_N_MODES
}
fn default_grid() -> usize {
    DEFAULT_GRID_SIZE
}
fn default_steps() -> usize {
    DEFAULT_TIME_STEPS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub alpha: f64,
    pub length: Scalar,
    pub horizon: Scalar,
    #[serde(default = "one")]
    pub p: String,
    #[serde(default = "zero")]
    pub q: String,
    #[serde(default = "zero")]
    pub u0: String,
    #[serde(default = "zero")]
    pub phi1: String,
    #[serde(default = "zero")]
    pub phi2: String,
    #[serde(default = "zero")]
    pub source: String,
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    #[serde(default = "default_steps")]
    pub n_time_steps: usize,
}

/// Sample counts used by the checks and the snapshot files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sampling {
    /// Space points of the check grid, endpoints included.
    pub nx: usize,
    /// Time points of the check grid, `t = 0` included.
    pub nt: usize,
    /// Points per snapshot file.
    pub snapshot_points: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            nx: 41,
            nt: 21,
            snapshot_points: 101,
        }
    }
}

/// Data of the comparison problem; omitted fields repeat the base problem.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub u0: Option<String>,
    pub phi1: Option<String>,
    pub phi2: Option<String>,
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    #[serde(default)]
    pub perturbed: Perturbation,
    /// Stated bound on `‖F − F̃‖`.
    pub eps: f64,
    /// Stated bound on `‖u₀ − ũ₀‖`.
    pub eps0: f64,
    /// Stated bound on `‖φ − φ̃‖`.
    pub eps1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualConfig {
    pub t_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeConfig {
    pub beta: f64,
    pub lambda: f64,
    /// 1-based index of the mode whose eigenvalue is `λ_k`.
    pub mode: usize,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_window() -> [f64; 2] {
    [1e2, 1e4]
}
fn default_points() -> usize {
    40
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    MaximumPrinciple,
    MinimumPrinciple,
    Residual,
    Stability,
    Uniqueness,
    AsymptoticSlope,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::MaximumPrinciple => "maximum_principle",
            CheckName::MinimumPrinciple => "minimum_principle",
            CheckName::Residual => "residual",
            CheckName::Stability => "stability",
            CheckName::Uniqueness => "uniqueness",
            CheckName::AsymptoticSlope => "asymptotic_slope",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub checks: Vec<CheckName>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub residual: Option<ResidualConfig>,
    #[serde(default)]
    pub stability: Option<StabilityConfig>,
    #[serde(default)]
    pub slope: Option<SlopeConfig>,
    /// Eigen system cache in the CSV export format; read when present and
    /// matching, written otherwise.
    #[serde(default)]
    pub eigen_cache: Option<PathBuf>,
}

fn default_output() -> PathBuf {
    PathBuf::from("fracspec_out")
}

fn expr(key: &str, text: &str) -> Result<Expr, ConfigError> {
    parse(text).map_err(|e| ConfigError::new(key, e))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::new("config", e))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigError::new("config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    /// Relative `output_dir` and `eigen_cache` entries are resolved against
    /// `base`, normally the directory holding the config file.
    pub fn resolve_paths(&mut self, base: &Path) {
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
        if let Some(p) = &self.eigen_cache {
            if p.is_relative() {
                self.eigen_cache = Some(base.join(p));
            }
        }
    }

    /// Builds and validates the problem, naming the offending key on error.
    pub fn problem_spec(&self) -> Result<ProblemSpec, ConfigError> {
        let pc = &self.problem;
        let length = pc.length.value("problem.length")?;
        let horizon = pc.horizon.value("problem.horizon")?;
        if !(pc.alpha > 0.0 && pc.alpha <= 1.0) {
            return Err(ConfigError::new(
                "problem.alpha",
                format!("must lie in (0, 1], got {}", pc.alpha),
            ));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(ConfigError::new(
                "problem.horizon",
                format!("must be positive, got {horizon}"),
            ));
        }
        let p = expr("problem.p", &pc.p)?;
        let q = expr("problem.q", &pc.q)?;
        let coeffs = OperatorCoefficients::new(p, q, length).map_err(|e| match e {
            Error::Domain(ref m) if m.contains("length") => ConfigError::new("problem.length", e),
            Error::Domain(ref m) if m.contains(" q ") => ConfigError::new("problem.q", e),
            _ => ConfigError::new("problem.p", e),
        })?;
        DiscreteOperator::new(&coeffs, pc.grid_size.max(3)).map_err(|e| match e {
            Error::Coefficient { name, .. } => ConfigError::new(format!("problem.{name}"), e),
            _ => ConfigError::new("problem", e),
        })?;
        let spec = ProblemSpec::new(pc.alpha, coeffs, horizon)
            .with_initial(expr("problem.u0", &pc.u0)?)
            .with_boundary(
                expr("problem.phi1", &pc.phi1)?,
                expr("problem.phi2", &pc.phi2)?,
            )
            .with_source(expr("problem.source", &pc.source)?)
            .with_resolution(pc.n_modes, pc.grid_size, pc.n_time_steps);
        spec.validate().map_err(|e| {
            let key = match &e {
                Error::Compatibility { side: "left", .. } => "problem.phi1",
                Error::Compatibility { .. } => "problem.phi2",
                Error::Domain(m) => ["u0", "phi1", "phi2", "n_modes"]
                    .into_iter()
                    .find(|k| m.starts_with(k))
                    .map_or("problem", |k| match k {
                        "u0" => "problem.u0",
                        "phi1" => "problem.phi1",
                        "phi2" => "problem.phi2",
                        _ => "problem.n_modes",
                    }),
                Error::Eval(_) => "problem.u0",
                _ => "problem",
            };
            ConfigError::new(key, e)
        })?;
        if 4 * spec.n_modes > spec.grid_size {
            return Err(ConfigError::new(
                "problem.n_modes",
                Error::Resolution {
                    n_modes: spec.n_modes,
                    grid_size: spec.grid_size,
                },
            ));
        }
        Ok(spec)
    }

    /// The comparison problem of the stability check.
    pub fn perturbed_spec(&self, base: &ProblemSpec) -> Result<ProblemSpec, ConfigError> {
        let Some(st) = &self.stability else {
            return Err(ConfigError::new(
                "stability",
                "the stability check needs a `stability` section",
            ));
        };
        let pick =
            |key: &str, own: &Option<String>, fallback: &Expr| -> Result<Expr, ConfigError> {
                match own {
                    Some(text) => expr(key, text),
                    None => Ok(fallback.clone()),
                }
            };
        let pt = &st.perturbed;
        Ok(base
            .clone()
            .with_initial(pick("stability.perturbed.u0", &pt.u0, &base.u0)?)
            .with_boundary(
                pick("stability.perturbed.phi1", &pt.phi1, &base.phi1)?,
                pick("stability.perturbed.phi2", &pt.phi2, &base.phi2)?,
            )
            .with_source(pick(
                "stability.perturbed.source",
                &pt.source,
                &base.source,
            )?))
    }

    /// Checks everything outside the problem section.
    pub fn validate(&self, spec: &ProblemSpec) -> Result<(), ConfigError> {
        for (i, &t) in self.snapshots.iter().enumerate() {
            if !(t >= 0.0 && t <= spec.horizon) {
                return Err(ConfigError::new(
                    format!("snapshots[{i}]"),
                    format!("time {t} is outside [0, {}]", spec.horizon),
                ));
            }
        }
        let s = &self.sampling;
        if s.nx < 3 || s.nt < 2 || s.snapshot_points < 2 {
            return Err(ConfigError::new(
                "sampling",
                "need nx >= 3, nt >= 2 and snapshot_points >= 2",
            ));
        }
        for c in &self.checks {
            match c {
                CheckName::Stability => {
                    let st = self.stability.as_ref().ok_or_else(|| {
                        ConfigError::new(
                            "stability",
                            "the stability check needs a `stability` section",
                        )
                    })?;
                    for (k, v) in [("eps", st.eps), ("eps0", st.eps0), ("eps1", st.eps1)] {
                        if !(v >= 0.0 && v.is_finite()) {
                            return Err(ConfigError::new(
                                format!("stability.{k}"),
                                "must be a non-negative number",
                            ));
                        }
                    }
                    self.perturbed_spec(spec)?;
                }
                CheckName::AsymptoticSlope => {
                    let sl = self.slope.as_ref().ok_or_else(|| {
                        ConfigError::new(
                            "slope",
                            "the asymptotic_slope check needs a `slope` section",
                        )
                    })?;
                    if sl.mode == 0 || sl.mode > spec.n_modes {
                        return Err(ConfigError::new(
                            "slope.mode",
                            format!("must lie in 1..={}, got {}", spec.n_modes, sl.mode),
                        ));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// `residual.t_min`, defaulting to ten time steps.
    pub fn residual_t_min(&self, spec: &ProblemSpec) -> f64 {
        self.residual
            .as_ref()
            .map_or(10.0 * spec.horizon / spec.n_time_steps as f64, |r| r.t_min)
    }

    /// Every effective parameter as `key = value` lines, defaults included.
    pub fn summary_lines(&self, spec: &ProblemSpec) -> Vec<String> {
        use crate::format::num;
        let pc = &self.problem;
        let list = |v: &[f64]| v.iter().map(|&t| num(t)).collect::<Vec<_>>().join(", ");
        let mut out = vec![
            format!("problem.alpha = {}", num(pc.alpha)),
            format!("problem.length = {} ({})", pc.length, num(spec.length())),
            format!("problem.horizon = {} ({})", pc.horizon, num(spec.horizon)),
            format!("problem.p = {}", pc.p),
            format!("problem.q = {}", pc.q),
            format!("problem.u0 = {}", pc.u0),
            format!("problem.phi1 = {}", pc.phi1),
            format!("problem.phi2 = {}", pc.phi2),
            format!("problem.source = {}", pc.source),
            format!("problem.n_modes = {}", spec.n_modes),
            format!("problem.grid_size = {}", spec.grid_size),
            format!("problem.n_time_steps = {}", spec.n_time_steps),
            format!("snapshots = [{}]", list(&self.snapshots)),
            format!(
                "checks = [{}]",
                self.checks
                    .iter()
                    .map(|c| c.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            format!("output_dir = {}", self.output_dir.display()),
            format!("sampling.nx = {}", self.sampling.nx),
            format!("sampling.nt = {}", self.sampling.nt),
            format!(
                "sampling.snapshot_points = {}",
                self.sampling.snapshot_points
            ),
            format!("residual.t_min = {}", num(self.residual_t_min(spec))),
        ];
        if let Some(st) = &self.stability {
            let pt = &st.perturbed;
            let or_base = |v: &Option<String>| v.clone().unwrap_or_else(|| "(base)".into());
            out.push(format!("stability.perturbed.u0 = {}", or_base(&pt.u0)));
            out.push(format!("stability.perturbed.phi1 = {}", or_base(&pt.phi1)));
            out.push(format!("stability.perturbed.phi2 = {}", or_base(&pt.phi2)));
            out.push(format!(
                "stability.perturbed.source = {}",
                or_base(&pt.source)
            ));
            out.push(format!("stability.eps = {}", num(st.eps)));
            out.push(format!("stability.eps0 = {}", num(st.eps0)));
            out.push(format!("stability.eps1 = {}", num(st.eps1)));
        }
        if let Some(sl) = &self.slope {
            out.push(format!("slope.beta = {}", num(sl.beta)));
            out.push(format!("slope.lambda = {}", num(sl.lambda)));
            out.push(format!("slope.mode = {}", sl.mode));
            out.push(format!("slope.window = [{}]", list(&sl.window)));
            out.push(format!("slope.points = {}", sl.points));
        }
        if let Some(p) = &self.eigen_cache {
            out.push(format!("eigen_cache = {}", p.display()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        r#"{"problem": {"alpha": 0.5, "length": "pi", "horizon": 1, "u0": "sin(x)"}}"#;

    #[test]
    fn defaults_are_applied() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        let spec = cfg.problem_spec().unwrap();
        assert_eq!(spec.n_modes, DEFAULT_N_MODES);
        assert!((spec.length() - std::f64::consts::PI).abs() < 1e-15);
        let lines = cfg.summary_lines(&spec);
        assert!(lines.contains(&"problem.p = 1".to_string()));
        assert!(lines.contains(&format!("problem.grid_size = {DEFAULT_GRID_SIZE}")));
    }

    #[test]
    fn errors_name_the_key() {
        let bad = MINIMAL.replace(r#""u0": "sin(x)""#, r#""p": "-1""#);
        let e = RunConfig::from_json(&bad)
            .unwrap()
            .problem_spec()
            .unwrap_err();
        assert_eq!(e.key, "problem.p");
        assert!(e.message.contains("p(x) > 0"), "{e}");

        let bad = MINIMAL.replace("sin(x)", "sin(x");
        let e = RunConfig::from_json(&bad)
            .unwrap()
            .problem_spec()
            .unwrap_err();
        assert_eq!(e.key, "problem.u0");
        assert!(e.message.contains("byte 5"), "{e}");

        let e = RunConfig::from_json(&MINIMAL.replace("u0", "u_0")).unwrap_err();
        assert!(e.message.contains("u_0"), "{e}");

        let mut cfg = RunConfig::from_json(MINIMAL).unwrap();
        cfg.snapshots = vec![0.5, 2.0];
        let spec = cfg.problem_spec().unwrap();
        assert_eq!(cfg.validate(&spec).unwrap_err().key, "snapshots[1]");

        cfg.snapshots.clear();
        cfg.checks = vec![CheckName::Stability];
        assert_eq!(cfg.validate(&spec).unwrap_err().key, "stability");
    }

    #[test]
    fn unknown_check_is_rejected() {
        let bad = MINIMAL.replace("}}", r#"}, "checks": ["energy"]}"#);
        let e = RunConfig::from_json(&bad).unwrap_err();
        assert!(e.message.contains("energy"), "{e}");
    }
}
