//! `polarint`: integrate polynomial vector fields with polar maps and check
//! the geometric properties of the result.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 singular step,
//! 3 verification failure.

mod config;
mod error;
mod trajectory_io;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{debug, info, warn};
use polarint_core::analysis::{
    height_growth, height_growth_with, DEFAULT_ITERS, EXPONENTIAL_MIN, MIN_ITERS, SUBEXPONENTIAL_MAX,
};
use polarint_core::polarize::SymMultilinearForm;
use polarint_core::{polarize, FieldSpec, HamiltonianFileSpec, HamiltonianSpec, PolyVectorField, Rational, Scalar};
use serde_json::{json, Value};

use config::{read_text, Mode, Problem, RunConfig, System};
use error::{CliError, CliResult};
use verify::Status;

#[derive(Parser, Debug)]
#[command(name = "polarint", version, about = "Polar-map integrator for polynomial vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the symmetric multilinear form of a homogeneous field.
    Polarize {
        /// Field file, Hamiltonian file, or run config.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Homogenize a nonhomogeneous field with an extra coordinate first.
        #[arg(long)]
        homogenize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a run config and write the trajectory as CSV.
    Integrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        homogenize: bool,
    },
    /// Run the verification checks and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        homogenize: bool,
    },
    /// Classify arithmetic height growth of exact iterates.
    Entropy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ITERS)]
        iters: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        homogenize: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("POLARINT_LOG", "error")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polarint: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Polarize {
            config,
            mode,
            homogenize,
            out,
        } => match mode.unwrap_or(Mode::Rational) {
            Mode::Rational => cmd_polarize::<Rational>(&config, homogenize, out.as_deref()),
            Mode::Double => cmd_polarize::<f64>(&config, homogenize, out.as_deref()),
        },
        Command::Integrate {
            config,
            out,
            mode,
            homogenize,
        } => {
            let cfg = RunConfig::load(&config)?;
            let out = out.or_else(|| cfg.outputs.trajectory.as_ref().map(|p| cfg.resolve(p)));
            match run_mode(&cfg, mode) {
                Mode::Rational => cmd_integrate::<Rational>(&cfg, homogenize, out.as_deref()),
                Mode::Double => cmd_integrate::<f64>(&cfg, homogenize, out.as_deref()),
            }
        }
        Command::Verify {
            config,
            report,
            seed,
            mode,
            homogenize,
        } => {
            let cfg = RunConfig::load(&config)?;
            let report = report.or_else(|| cfg.outputs.report.as_ref().map(|p| cfg.resolve(p)));
            match run_mode(&cfg, mode) {
                Mode::Rational => cmd_verify::<Rational>(&cfg, homogenize, seed, report.as_deref()),
                Mode::Double => cmd_verify::<f64>(&cfg, homogenize, seed, report.as_deref()),
            }
        }
        Command::Entropy {
            config,
            iters,
            report,
            mode,
            homogenize,
        } => {
            let cfg = RunConfig::load(&config)?;
            if run_mode(&cfg, mode) == Mode::Double {
                return Err(CliError::Usage(
                    "the entropy probe needs exact iterates; use a rational-mode config or --mode rational".into(),
                ));
            }
            let report = report.or_else(|| cfg.outputs.report.as_ref().map(|p| cfg.resolve(p)));
            cmd_entropy(&cfg, homogenize, iters, report.as_deref())
        }
    }
}

/// The command-line flag wins over the config; rational is the default.
fn run_mode(cfg: &RunConfig, flag: Option<Mode>) -> Mode {
    flag.or(cfg.mode).unwrap_or(Mode::Rational)
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::Config(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(path: Option<&Path>, value: &Value) -> CliResult<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn cmd_polarize<S: Scalar>(path: &Path, homogenize: bool, out: Option<&Path>) -> CliResult<()> {
    let text = read_text(path)?;
    let raw: Value = serde_json::from_str(&text)?;
    let (field, origin) = if raw.get("components").is_some() {
        let spec: FieldSpec = serde_json::from_value(raw)?;
        (PolyVectorField::<S>::from_spec(&spec)?, "field")
    } else if raw.get("monomials").is_some() {
        let spec: HamiltonianFileSpec = serde_json::from_value(raw)?;
        (HamiltonianSpec::<S>::from_file_spec(&spec)?.field().clone(), "Hamiltonian field K grad H")
    } else {
        let cfg = RunConfig::load(path)?;
        match (&cfg.field, &cfg.hamiltonian) {
            (Some(spec), _) => (PolyVectorField::<S>::from_spec(spec)?, "field"),
            (_, Some(spec)) => (
                HamiltonianSpec::<S>::from_file_spec(spec)?.field().clone(),
                "Hamiltonian field K grad H",
            ),
            (None, None) => unreachable!("checked on load"),
        }
    };
    let (field, lifted) = if field.is_zero() || field.homogeneous_degree().is_some() {
        (field, false)
    } else if homogenize {
        (field.homogenize(), true)
    } else {
        return Err(CliError::Config(
            "field is not homogeneous; pass --homogenize to polarize its homogenization".into(),
        ));
    };
    let mut w = output(out)?;
    let n = field.dim();
    if field.is_zero() {
        writeln!(w, "# zero {origin} in {n} variables: no coefficients")?;
        for i in 0..n {
            writeln!(w, "component {i}:")?;
        }
        return Ok(());
    }
    let form = polarize(&field)?;
    let m = form.order();
    writeln!(w, "# {origin} of degree {m} in {n} variables, symmetric {m}-linear form")?;
    if lifted {
        writeln!(w, "# homogenized: x{} is the auxiliary coordinate", n - 1)?;
    }
    writeln!(w, "# x<i>[j] is coordinate i of argument j")?;
    for (i, terms) in form.coefficients().iter().enumerate() {
        writeln!(w, "component {i}:")?;
        for (exponents, coeff) in terms {
            let expansion: Vec<String> = SymMultilinearForm::<S>::assignments(exponents)
                .iter()
                .map(|slots| {
                    slots
                        .iter()
                        .enumerate()
                        .map(|(j, v)| format!("x{v}[{}]", j + 1))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            writeln!(
                w,
                "  {} {:?}: {} * ({})",
                monomial_name(exponents),
                exponents,
                coeff.to_text(),
                expansion.join(" + ")
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

fn monomial_name(exponents: &[u32]) -> String {
    let factors: Vec<String> = exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
        .collect();
    if factors.is_empty() {
        "1".into()
    } else {
        factors.join(" ")
    }
}

fn cmd_integrate<S: Scalar>(cfg: &RunConfig, homogenize: bool, out: Option<&Path>) -> CliResult<()> {
    let problem = Problem::<S>::build(cfg, homogenize)?;
    info!("integrating {} steps with k = {}", problem.steps, problem.k);
    let traj = problem.integrate()?;
    if traj.extension {
        warn!("suspension of a field of degree above 2: this is an extension, not the classical Kahan map");
    }
    trajectory_io::write_csv(output(out)?, &traj, problem.window.dim())?;
    match traj.singular_at {
        Some(step) => Err(CliError::Singular(format!(
            "singular linear system at step {step}; wrote {} points",
            traj.len()
        ))),
        None => Ok(()),
    }
}

fn cmd_verify<S: Scalar>(cfg: &RunConfig, homogenize: bool, seed: u64, report: Option<&Path>) -> CliResult<()> {
    let problem = Problem::<S>::build(cfg, homogenize)?;
    let (points, singular_at) = match &cfg.trajectory_in {
        Some(p) => {
            let path = cfg.resolve(p);
            debug!("verifying recorded trajectory {}", path.display());
            let file = File::open(&path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            (trajectory_io::read_csv::<S, _>(file, problem.window.dim())?, None)
        }
        None => {
            let traj = problem.integrate()?;
            (traj.point_slice(), traj.singular_at)
        }
    };
    let checks = verify::run_checks(&problem, &points, cfg.leapfrog_control, seed);
    for c in &checks {
        info!("{}: {:?}", c.name, c.status);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name).collect();
    let value = json!({
        "schema": 1,
        "command": "verify",
        "mode": if S::EXACT { "rational" } else { "double" },
        "seed": seed,
        "k": problem.k,
        "dimension": problem.window.dim(),
        "h": problem.window.h().to_text(),
        "trajectory_points": points.len(),
        "singular_at": singular_at,
        "checks": checks,
    });
    write_json(report, &value)?;
    if let Some(step) = singular_at {
        return Err(CliError::Singular(format!("singular linear system at step {step}")));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("failed checks: {}", failed.join(", "))))
    }
}

fn cmd_entropy(cfg: &RunConfig, homogenize: bool, iters: usize, report: Option<&Path>) -> CliResult<()> {
    let problem = Problem::<Rational>::build(cfg, homogenize)?;
    let estimate = match problem.system.form() {
        Some(form) => height_growth(form, &problem.window, iters)?,
        None => height_growth_with(problem.window.points().to_vec(), iters, |pts| {
            let w = polarint_core::PolarWindow::new(pts.to_vec(), problem.window.h().clone())?;
            Ok(problem.step(&w)?.new_point)
        })?,
    };
    if estimate.insufficient_data {
        warn!("only {} iterates; at least {MIN_ITERS} are needed for a classification", estimate.heights.len());
    }
    let system = match problem.system {
        System::Hamiltonian(_) => "hamiltonian",
        System::Field { .. } => "field",
        System::Suspended { .. } => "suspended field",
    };
    let value = json!({
        "schema": 1,
        "command": "entropy",
        "system": system,
        "k": problem.k,
        "iters": iters,
        "heights": estimate.heights,
        "growth_ratios": estimate.growth_ratios,
        "growth_factor": estimate.growth_factor,
        "fit_window": estimate.fit_window,
        "classification": estimate.classification,
        "insufficient_data": estimate.insufficient_data,
        "singular_at": estimate.singular_at,
        "thresholds": {
            "subexponential_max": SUBEXPONENTIAL_MAX,
            "exponential_min": EXPONENTIAL_MIN,
            "min_iters": MIN_ITERS,
        },
    });
    write_json(report, &value)
}
