//! The batch pipeline behind the `solve`, `check` and `eigen` subcommands.

use std::path::PathBuf;

use fracspec_core::spectral::{solve_on, Executor, Field};
use fracspec_core::sturm_liouville::{solve_eigen, DiscreteOperator, EigenSystem};
use fracspec_core::verify::{
    asymptotic_slope, check_maximum_principle, check_minimum_principle, check_residual,
    check_stability_fields, check_uniqueness_evidence, stability_preconditions, SampleGrid,
};
use fracspec_core::{CheckReport, Error, ProblemSpec};

use crate::config::{CheckName, ConfigError, RunConfig};
use crate::format::num;
use crate::io::{self, IoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Solve, write snapshots and the modal table, run the checks.
    Solve,
    /// Solve and run the checks only.
    Check,
    /// Compute and export the eigen system only.
    Eigen,
}

/// Any failure that makes the run unusable, as opposed to a failed check.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Solve(#[from] Error),
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub reports: Vec<CheckReport>,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl RunOutcome {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    /// 0 when every check passed, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.all_passed() {
            0
        } else {
            2
        }
    }
}

/// A failed report for a check whose hypotheses could not be established.
fn precondition_report(name: &str, message: String) -> CheckReport {
    CheckReport {
        name: name.into(),
        passed: false,
        applicable: false,
        measured: f64::NAN,
        bound: f64::NAN,
        details: message,
    }
}

/// Rayleigh quotients of the first modes against the discrete operator; a
/// cached system computed for other coefficients fails this test.
fn matches_operator(sys: &EigenSystem, spec: &ProblemSpec) -> bool {
    if sys.length() != spec.length()
        || sys.grid_size() != spec.grid_size
        || sys.n_modes() != spec.n_modes
    {
        return false;
    }
    let Ok(op) = DiscreteOperator::new(&spec.coeffs, spec.grid_size) else {
        return false;
    };
    (0..sys.n_modes().min(3)).all(|i| {
        let u = sys.mode(i);
        let rq: f64 = (1..u.len() - 1)
            .map(|j| op.apply_at(u, j) * u[j])
            .sum::<f64>()
            * sys.h();
        ((rq - sys.lambdas()[i]) / sys.lambdas()[i]).abs() < 1e-3
    })
}

fn eigen_system(
    cfg: &RunConfig,
    spec: &ProblemSpec,
    warnings: &mut Vec<String>,
) -> Result<EigenSystem, RunError> {
    if let Some(path) = &cfg.eigen_cache {
        if path.exists() {
            match io::read_eigen(path) {
                Ok(sys) if matches_operator(&sys, spec) => return Ok(sys),
                Ok(_) => warnings.push(format!(
                    "eigen cache {} does not match the problem; recomputed",
                    path.display()
                )),
                Err(e) => warnings.push(format!("eigen cache unreadable ({e}); recomputed")),
            }
        }
        let sys = solve_eigen(&spec.coeffs, spec.n_modes, spec.grid_size)?;
        io::write_eigen(path, &sys)?;
        return Ok(sys);
    }
    Ok(solve_eigen(&spec.coeffs, spec.n_modes, spec.grid_size)?)
}

/// Runs the configured pipeline and writes its files into `cfg.output_dir`.
/// `notes` are extra `key = value` lines for `summary.txt`.
pub fn run(
    cfg: &RunConfig,
    mode: RunMode,
    exec: &dyn Executor,
    notes: &[String],
) -> Result<RunOutcome, RunError> {
    let spec = cfg.problem_spec()?;
    cfg.validate(&spec)?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| IoError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut out = RunOutcome::default();
    let sys = eigen_system(cfg, &spec, &mut out.warnings)?;

    if mode == RunMode::Eigen {
        let path = dir.join("eigen.csv");
        io::write_eigen(&path, &sys)?;
        out.files.push(path);
        finish(cfg, &spec, notes, &mut out, false)?;
        return Ok(out);
    }

    let sol = solve_on(&spec, sys, exec)?;
    out.warnings.extend(sol.warnings().iter().cloned());

    if mode == RunMode::Solve {
        let n = cfg.sampling.snapshot_points;
        let l = spec.length();
        let xs: Vec<f64> = (0..n)
            .map(|j| {
                if j + 1 == n {
                    l
                } else {
                    l * j as f64 / (n - 1) as f64
                }
            })
            .collect();
        for &t in &cfg.snapshots {
            let us = sol.sample_grid(&xs, &[t])?;
            let path = io::snapshot_path(dir, t);
            io::write_snapshot(&path, &xs, &us)?;
            out.files.push(path);
        }
        let path = dir.join("modes.csv");
        let final_factors = sol.time_factors(spec.horizon)?;
        io::write_modes(
            &path,
            sol.eigen().lambdas(),
            sol.coefficients(),
            &final_factors,
        )?;
        out.files.push(path);
    }

    let grid = SampleGrid::uniform(
        spec.length(),
        spec.horizon,
        cfg.sampling.nx,
        cfg.sampling.nt,
    );
    for &check in &cfg.checks {
        let report = match check {
            CheckName::MaximumPrinciple => check_maximum_principle(&sol, &spec, &grid)?,
            CheckName::MinimumPrinciple => check_minimum_principle(&sol, &spec, &grid)?,
            CheckName::Residual => check_residual(&sol, &spec, cfg.residual_t_min(&spec))?,
            CheckName::Uniqueness => check_uniqueness_evidence(&spec, exec)?,
            CheckName::Stability => {
                let st = cfg.stability.as_ref().expect("validated");
                let other = cfg.perturbed_spec(&spec)?;
                match stability_preconditions(&spec, &other, st.eps, st.eps0, st.eps1, &grid) {
                    Ok(()) => {
                        let sol_b = solve_on(&other, sol.eigen().clone(), exec)?;
                        check_stability_fields(
                            &sol, &sol_b, &spec, st.eps, st.eps0, st.eps1, &grid,
                        )?
                    }
                    Err(Error::Precondition(m)) => precondition_report("stability", m),
                    Err(e) => return Err(e.into()),
                }
            }
            CheckName::AsymptoticSlope => {
                let sl = cfg.slope.as_ref().expect("validated");
                let lambda_k = sol.eigen().lambdas()[sl.mode - 1];
                let window = (sl.window[0], sl.window[1]);
                match asymptotic_slope(spec.alpha, sl.beta, sl.lambda, lambda_k, window, sl.points)
                {
                    Ok(r) => r,
                    Err(Error::Precondition(m)) => precondition_report("asymptotic_slope", m),
                    Err(e) => return Err(e.into()),
                }
            }
        };
        out.reports.push(report);
    }
    finish(cfg, &spec, notes, &mut out, true)?;
    Ok(out)
}

fn finish(
    cfg: &RunConfig,
    spec: &ProblemSpec,
    notes: &[String],
    out: &mut RunOutcome,
    checks: bool,
) -> Result<(), RunError> {
    let dir = &cfg.output_dir;
    if checks {
        let path = dir.join("checks.jsonl");
        io::write_checks(&path, &out.reports)?;
        out.files.push(path);
    }
    let mut lines = cfg.summary_lines(spec);
    lines.extend(notes.iter().cloned());
    for w in &out.warnings {
        lines.push(format!("warning = {w}"));
    }
    for r in &out.reports {
        lines.push(format!(
            "check.{} = {} (measured {}, bound {}{})",
            r.name,
            if r.passed { "pass" } else { "FAIL" },
            num(r.measured),
            num(r.bound),
            if r.applicable { "" } else { ", not applicable" }
        ));
    }
    let path = dir.join("summary.txt");
    io::write_lines(&path, &lines)?;
    out.files.push(path);
    Ok(())
}
