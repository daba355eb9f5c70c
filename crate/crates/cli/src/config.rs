//! Run configuration files and the problem they describe.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use polarint_core::polarmap::StepResult;
use polarint_core::{
    bootstrap, integrate, integrate_suspended, polar_step, polarize, suspended_step, BootstrapConfig, FieldSpec,
    HamiltonianFileSpec, HamiltonianSpec, PolarWindow, PolyVectorField, Scalar, SymMultilinearForm, Trajectory,
};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Double,
    Rational,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub trajectory: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// A starting point plus how to fill in the rest of the window.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub x: Vec<Value>,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub field: Option<FieldSpec>,
    pub hamiltonian: Option<HamiltonianFileSpec>,
    pub h: Value,
    #[serde(default)]
    pub steps: usize,
    /// Explicit starting points x_0, …, x_{k−1}.
    pub window: Option<Vec<Vec<Value>>>,
    pub initial: Option<InitialSpec>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub leapfrog_control: bool,
    #[serde(default)]
    pub homogenize: bool,
    /// Previously written trajectory to verify instead of integrating.
    pub trajectory_in: Option<PathBuf>,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        match (&cfg.field, &cfg.hamiltonian) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either \"field\" or \"hamiltonian\", not both".into())),
            (None, None) => return Err(CliError::Config("config needs a \"field\" or a \"hamiltonian\"".into())),
            _ => {}
        }
        match (&cfg.window, &cfg.initial) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either \"window\" or \"initial\", not both".into())),
            (None, None) => return Err(CliError::Config("config needs a \"window\" or an \"initial\" point".into())),
            _ => {}
        }
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

pub enum System<S> {
    /// Homogeneous field with its polarization.
    Field {
        field: PolyVectorField<S>,
        form: SymMultilinearForm<S>,
    },
    /// Nonhomogeneous field run through the suspension.
    Suspended { field: PolyVectorField<S> },
    Hamiltonian(HamiltonianSpec<S>),
}

/// Everything a command needs: the system, its window size and the
/// starting window.
pub struct Problem<S> {
    pub system: System<S>,
    pub k: usize,
    pub window: PolarWindow<S>,
    pub steps: usize,
}

impl<S: Scalar> Problem<S> {
    pub fn build(cfg: &RunConfig, homogenize: bool) -> CliResult<Self> {
        let (system, k) = match (&cfg.field, &cfg.hamiltonian) {
            (Some(spec), _) => field_system(spec, homogenize || cfg.homogenize)?,
            (_, Some(spec)) => {
                let ham = HamiltonianSpec::from_file_spec(spec)?;
                let k = ham.k();
                (System::Hamiltonian(ham), k)
            }
            (None, None) => unreachable!("checked on load"),
        };
        let h = S::parse_json(&cfg.h)?;
        if h.is_zero() {
            return Err(CliError::Config("step size h must be nonzero".into()));
        }
        let window = match (&cfg.window, &cfg.initial) {
            (Some(points), _) => {
                if points.len() != k {
                    return Err(CliError::Config(format!(
                        "window has {} points but the {} needs k = {k}",
                        points.len(),
                        system.degree_phrase(k)
                    )));
                }
                let points = points
                    .iter()
                    .map(|p| p.iter().map(S::parse_json).collect::<polarint_core::Result<Vec<S>>>())
                    .collect::<polarint_core::Result<Vec<_>>>()?;
                PolarWindow::new(points, h)?
            }
            (_, Some(init)) => {
                let x = init.x.iter().map(S::parse_json).collect::<polarint_core::Result<Vec<S>>>()?;
                bootstrap(system.field(), &[x], k, &h, &init.bootstrap)?
            }
            (None, None) => unreachable!("checked on load"),
        };
        if window.dim() != system.field().dim() {
            return Err(CliError::Config(format!(
                "window points have dimension {} but the system has dimension {}",
                window.dim(),
                system.field().dim()
            )));
        }
        Ok(Problem {
            system,
            k,
            window,
            steps: cfg.steps,
        })
    }

    pub fn step(&self, w: &PolarWindow<S>) -> polarint_core::Result<StepResult<S>> {
        match &self.system {
            System::Field { form, .. } => polar_step(form, w),
            System::Suspended { field } => suspended_step(field, w),
            System::Hamiltonian(spec) => polar_step(spec.field_form(), w),
        }
    }

    pub fn integrate(&self) -> polarint_core::Result<Trajectory<S>> {
        match &self.system {
            System::Field { form, .. } => integrate(form, &self.window, self.steps),
            System::Suspended { field } => integrate_suspended(field, &self.window, self.steps),
            System::Hamiltonian(spec) => integrate(spec.field_form(), &self.window, self.steps),
        }
    }
}

impl<S: Scalar> System<S> {
    pub fn field(&self) -> &PolyVectorField<S> {
        match self {
            System::Field { field, .. } | System::Suspended { field } => field,
            System::Hamiltonian(spec) => spec.field(),
        }
    }

    /// Form of the homogeneous map, absent for suspended fields.
    pub fn form(&self) -> Option<&SymMultilinearForm<S>> {
        match self {
            System::Field { form, .. } => Some(form),
            System::Suspended { .. } => None,
            System::Hamiltonian(spec) => Some(spec.field_form()),
        }
    }

    fn degree_phrase(&self, k: usize) -> String {
        match self {
            System::Hamiltonian(_) => format!("Hamiltonian of degree {}", k + 2),
            _ => format!("field of degree {}", self.field().degree().unwrap_or(0)),
        }
    }
}

fn field_system<S: Scalar>(spec: &FieldSpec, homogenize: bool) -> CliResult<(System<S>, usize)> {
    let field = PolyVectorField::<S>::from_spec(spec)?;
    let degree = field
        .degree()
        .ok_or_else(|| CliError::Config("the zero field has no degree, so the window size is undefined".into()))?;
    match field.homogeneous_degree() {
        Some(d) if d >= 2 => {
            let form = polarize(&field)?;
            Ok((System::Field { field, form }, d as usize - 1))
        }
        Some(d) => Err(CliError::Config(format!(
            "field is homogeneous of degree {d}; polar maps need degree at least 2"
        ))),
        None if homogenize => Ok((System::Suspended { field }, degree.max(2) as usize - 1)),
        None => Err(CliError::Config(
            "field is not homogeneous; pass --homogenize (or set \"homogenize\": true) to integrate its suspension".into(),
        )),
    }
}
