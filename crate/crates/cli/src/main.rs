use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lagpinch::driver::{run_scan, run_verify, Grid, OutputFormat, Report, RunConfig, Target};
use lagpinch::Error;

#[derive(Parser, Debug)]
#[command(name = "lagpinch", version, about = "Verify curvature pinching of Lagrangian sphere immersions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every check on one family or suite.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the family parameter over a grid.
    Scan {
        #[arg(value_enum)]
        target: ScanTarget,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.1)]
        q_min: f64,
        #[arg(long, default_value_t = 6.0)]
        q_max: f64,
        #[arg(long, default_value_t = 0.1)]
        q_step: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_min: f64,
        #[arg(long, default_value_t = 1.5)]
        theta_max: f64,
        #[arg(long, default_value_t = 0.1)]
        theta_step: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VerifyTarget {
    Whitney,
    Castro,
    WhitneyCp,
    GeodesicPlane,
    Identities,
    Frames,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScanTarget {
    Castro,
    WhitneyCp,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    /// Sphere dimension; the identity and frame suites run several dimensions when omitted.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Family tolerance (default 1e-8, or 1e-6 for whitney-cp).
    #[arg(long)]
    tol: Option<f64>,
    /// Tolerance of the finite-difference curvature oracle.
    #[arg(long, default_value_t = 1e-4)]
    oracle_tol: f64,
    /// Leading points that also run the curvature oracle.
    #[arg(long, default_value_t = 20)]
    oracle_points: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 3.0)]
    q: f64,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Random probes per point for the frame inequalities.
    #[arg(long, default_value_t = 8)]
    frames: usize,
    /// Optimizer restarts for the isotropic minimum (0 disables it).
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn config(&self, target: Target, default_samples: usize) -> RunConfig {
        RunConfig {
            target,
            n: self.n,
            q: self.q,
            theta: self.theta,
            samples: self.samples.unwrap_or(default_samples),
            seed: self.seed,
            tol: self.tol,
            oracle_tol: self.oracle_tol,
            oracle_points: self.oracle_points,
            frames: self.frames,
            restarts: self.restarts,
            trials: self.trials,
            grid: None,
            threads: self.threads,
            format: match self.format {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            },
        }
    }
}

fn build(cli: &Cli) -> (RunConfig, Option<PathBuf>, bool) {
    match &cli.command {
        Command::Verify { target, common } => {
            let target = match target {
                VerifyTarget::Whitney => Target::Whitney,
                VerifyTarget::Castro => Target::Castro,
                VerifyTarget::WhitneyCp => Target::WhitneyCp,
                VerifyTarget::GeodesicPlane => Target::GeodesicPlane,
                VerifyTarget::Identities => Target::Identities,
                VerifyTarget::Frames => Target::Frames,
            };
            (common.config(target, 100), common.out.clone(), false)
        }
        Command::Scan {
            target,
            common,
            q_min,
            q_max,
            q_step,
            theta_min,
            theta_max,
            theta_step,
        } => {
            let (target, grid) = match target {
                ScanTarget::Castro => (
                    Target::Castro,
                    Grid {
                        min: *q_min,
                        max: *q_max,
                        step: *q_step,
                    },
                ),
                ScanTarget::WhitneyCp => (
                    Target::WhitneyCp,
                    Grid {
                        min: *theta_min,
                        max: *theta_max,
                        step: *theta_step,
                    },
                ),
            };
            let mut cfg = common.config(target, 10);
            cfg.grid = Some(grid);
            cfg.oracle_points = cfg.oracle_points.min(2);
            (cfg, common.out.clone(), true)
        }
    }
}

fn emit(report: &Report, cfg: &RunConfig, out: Option<&PathBuf>) -> Result<(), Error> {
    let text = report.render(cfg.format)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, out, scan) = build(&cli);
    let result = if scan { run_scan(&cfg) } else { run_verify(&cfg) };
    let report = match result {
        Ok(r) => r,
        Err(e @ (Error::Config(_) | Error::InvalidSpec(_) | Error::Dimension(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&report, &cfg, out.as_ref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for (name, check) in &report.summary.checks {
        if !check.passed {
            eprintln!(
                "FAIL {name}: worst {:e} ({} tolerance {:e})",
                check.worst, check.kind, check.tolerance
            );
        }
    }
    eprintln!("{}", if report.passed() { "PASS" } else { "FAIL" });
    ExitCode::from(report.exit_code() as u8)
}
