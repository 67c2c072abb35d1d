use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracspec::exec::THREADS_ENV;
use fracspec::format::num;
use fracspec::{run, RayonExecutor, RunConfig, RunMode};
use fracspec_core::special::{ml, MlParams};

#[derive(Debug, Parser)]
#[command(
    name = "fracspec",
    version,
    about = "Spectral solver for the time-fractional diffusion equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve, write snapshots and the modal table, run the configured checks.
    Solve(RunArgs),
    /// Solve and run the configured checks without writing solution files.
    Check(RunArgs),
    /// Export the eigenvalues and sampled eigenfunctions.
    Eigen(RunArgs),
    /// Evaluate the Mittag-Leffler function E_{alpha,beta}(z).
    #[command(name = "ml-eval", allow_negative_numbers = true)]
    MlEval {
        /// Order, 0 < alpha <= 1.
        alpha: f64,
        /// Second parameter, beta > 0.
        beta: f64,
        /// Real argument.
        z: f64,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of modes, overriding `problem.n_modes`.
    #[arg(long)]
    modes: Option<usize>,
    /// Number of time steps, overriding `problem.n_time_steps`.
    #[arg(long = "time-steps")]
    time_steps: Option<usize>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::MlEval { alpha, beta, z } => match ml(MlParams::new(alpha, beta, z)) {
            Ok(r) => {
                println!("{}", num(r.value));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("usage error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Solve(a) => pipeline(a, RunMode::Solve),
        Command::Check(a) => pipeline(a, RunMode::Check),
        Command::Eigen(a) => pipeline(a, RunMode::Eigen),
    }
}

fn pipeline(args: RunArgs, mode: RunMode) -> ExitCode {
    let mut cfg = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let base = args.config.parent().map(PathBuf::from).unwrap_or_default();
    cfg.resolve_paths(&base);
    if let Some(o) = args.output {
        cfg.output_dir = o;
    }
    if let Some(m) = args.modes {
        cfg.problem.n_modes = m;
    }
    if let Some(n) = args.time_steps {
        cfg.problem.n_time_steps = n;
    }
    let exec = match RayonExecutor::from_env() {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let notes = [format!("threads = {} ({THREADS_ENV})", exec.threads())];
    match run(&cfg, mode, &exec, &notes) {
        Ok(outcome) => {
            if !args.quiet || !outcome.all_passed() {
                for w in &outcome.warnings {
                    eprintln!("warning: {w}");
                }
                for r in &outcome.reports {
                    let status = match (r.passed, r.applicable) {
                        (true, true) => "PASS",
                        (true, false) => "SKIP",
                        (false, _) => "FAIL",
                    };
                    println!(
                        "{status} {}: measured {} bound {}",
                        r.name,
                        num(r.measured),
                        num(r.bound)
                    );
                    if !r.passed || !args.quiet {
                        println!("     {}", r.details);
                    }
                }
                if !args.quiet {
                    for f in &outcome.files {
                        println!("wrote {}", f.display());
                    }
                }
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
