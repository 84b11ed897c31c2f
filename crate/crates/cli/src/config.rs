//! Run and sweep configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spin2_gs::linalg::LinearSolverConfig;
use spin2_gs::{ClosedForm, Grid, InitialDataSpec, InitialKind, ModelParams, PotentialSpec, Profile, StepperConfig};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_beta0")]
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Signed magnetization in `(-2, 2)`.
    #[serde(default)]
    pub m: f64,
    #[serde(default = "PotentialSpec::harmonic")]
    pub potential: PotentialSpec,
}

fn default_beta0() -> f64 {
    100.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_lower")]
    pub lower: f64,
    #[serde(default = "default_upper")]
    pub upper: f64,
    /// Mesh size; 1/64 in one dimension and 1/16 in two when omitted.
    #[serde(default)]
    pub h: Option<f64>,
}

fn default_dim() -> usize {
    1
}
fn default_lower() -> f64 {
    -10.0
}
fn default_upper() -> f64 {
    10.0
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            dim: default_dim(),
            lower: default_lower(),
            upper: default_upper(),
            h: None,
        }
    }
}

impl GridSection {
    pub fn mesh_size(&self) -> f64 {
        self.h.unwrap_or(if self.dim == 1 { 1.0 / 64.0 } else { 1.0 / 16.0 })
    }

    pub fn build(&self) -> Result<Grid, CliError> {
        if self.dim != 1 && self.dim != 2 {
            return Err(CliError::Config(format!("grid.dim = {} must be 1 or 2", self.dim)));
        }
        Ok(Grid::with_spacing(self.dim, self.lower, self.upper, self.mesh_size())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_linear_tol")]
    pub linear_tol: f64,
    #[serde(default = "default_linear_max_iter")]
    pub linear_max_iter: usize,
}

fn default_dt() -> f64 {
    StepperConfig::default().dt
}
fn default_tol() -> f64 {
    StepperConfig::default().tol
}
fn default_max_iter() -> usize {
    StepperConfig::default().max_iter
}
fn default_linear_tol() -> f64 {
    LinearSolverConfig::default().tol
}
fn default_linear_max_iter() -> usize {
    LinearSolverConfig::default().max_iter
}

impl Default for StepperSection {
    fn default() -> Self {
        StepperSection {
            dt: default_dt(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            linear_tol: default_linear_tol(),
            linear_max_iter: default_linear_max_iter(),
        }
    }
}

impl StepperSection {
    pub fn build(&self) -> Result<StepperConfig, CliError> {
        let cfg = StepperConfig {
            dt: self.dt,
            tol: self.tol,
            max_iter: self.max_iter,
            linear: LinearSolverConfig {
                tol: self.linear_tol,
                max_iter: self.linear_max_iter,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Closed-form uniform family, as written in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Ferromagnetic,
    Nematic,
    NematicMixed { gamma: f64, theta: f64 },
    /// Same family, parameterized by the outer amplitude.
    NematicMixedOuter { outer: f64, theta: f64 },
    NematicTilted { theta: f64 },
    CyclicSplit,
    CyclicSymmetric,
    CyclicTheta {
        theta: f64,
        #[serde(default)]
        upper: bool,
    },
    /// The theta family at its default angle.
    CyclicDefault,
}

impl FamilySpec {
    pub fn resolve(&self, m: f64) -> ClosedForm {
        match *self {
            FamilySpec::Ferromagnetic => ClosedForm::Ferromagnetic,
            FamilySpec::Nematic => ClosedForm::Nematic,
            FamilySpec::NematicMixed { gamma, theta } => ClosedForm::NematicMixed { gamma, theta },
            FamilySpec::NematicMixedOuter { outer, theta } => ClosedForm::nematic_mixed_from_outer(outer, theta),
            FamilySpec::NematicTilted { theta } => ClosedForm::NematicTilted { theta },
            FamilySpec::CyclicSplit => ClosedForm::CyclicSplit,
            FamilySpec::CyclicSymmetric => ClosedForm::CyclicSymmetric,
            FamilySpec::CyclicTheta { theta, upper } => ClosedForm::CyclicTheta { theta, upper },
            FamilySpec::CyclicDefault => ClosedForm::cyclic_default(m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSpec {
    Gaussian,
    ThomasFermi,
    BoxMode,
    #[default]
    Auto,
}

impl From<ProfileSpec> for Profile {
    fn from(p: ProfileSpec) -> Self {
        match p {
            ProfileSpec::Gaussian => Profile::Gaussian,
            ProfileSpec::ThomasFermi => Profile::ThomasFermi,
            ProfileSpec::BoxMode => Profile::BoxMode,
            ProfileSpec::Auto => Profile::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialKindSpec {
    ClosedForm {
        #[serde(default)]
        family: Option<FamilySpec>,
    },
    GeneralSigma { sigma: f64 },
    Vector { xi: [f64; 5] },
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialSection {
    #[serde(flatten)]
    pub kind: InitialKindSpec,
    #[serde(default)]
    pub profile: ProfileSpec,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            kind: InitialKindSpec::ClosedForm { family: None },
            profile: ProfileSpec::Auto,
        }
    }
}

impl InitialSection {
    /// Core initial-data spec for the mirrored (non-negative) magnetization.
    pub fn build(&self, m: f64) -> InitialDataSpec {
        let kind = match &self.kind {
            InitialKindSpec::ClosedForm { family } => InitialKind::SmaClosedForm(family.map(|f| f.resolve(m))),
            InitialKindSpec::GeneralSigma { sigma } => InitialKind::GeneralSigma(*sigma),
            InitialKindSpec::Vector { xi } => InitialKind::Vector(*xi),
            InitialKindSpec::Random { seed } => InitialKind::Random { seed: *seed },
        };
        InitialDataSpec {
            kind,
            profile: self.profile.into(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.kind {
            InitialKindSpec::Random { seed } => Some(seed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub fields: bool,
    #[serde(default = "yes")]
    pub diagnostics: bool,
    #[serde(default)]
    pub landscape: bool,
    #[serde(default = "default_resolution")]
    pub landscape_resolution: usize,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn yes() -> bool {
    true
}
fn default_resolution() -> usize {
    101
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_dir(),
            fields: true,
            diagnostics: true,
            landscape: false,
            landscape_resolution: default_resolution(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    M,
    Beta1,
    Beta2,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::M => "m",
            SweepParameter::Beta1 => "beta1",
            SweepParameter::Beta2 => "beta2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// One ground-state computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub stepper: StepperSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Only read by the sweep command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

/// Everything the solver needs, validated.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub params: ModelParams,
    /// Negative magnetization was requested; results are mirrored back.
    pub mirrored: bool,
    pub grid: Grid,
    pub stepper: StepperConfig,
    pub initial: InitialDataSpec,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn resolve(&self) -> Result<ResolvedRun, CliError> {
        let m = &self.model;
        if !(m.m.abs() < 2.0) {
            return Err(CliError::Config(format!("model.m = {} must lie in (-2, 2)", m.m)));
        }
        let (params, mirrored) =
            ModelParams::with_signed_magnetization(m.beta0, m.beta1, m.beta2, m.m, m.potential.clone())?;
        Ok(ResolvedRun {
            initial: self.initial.build(params.m),
            params,
            mirrored,
            grid: self.grid.build()?,
            stepper: self.stepper.build()?,
        })
    }

    /// Copy with one model parameter replaced.
    pub fn with_parameter(&self, p: SweepParameter, value: f64) -> RunConfig {
        let mut c = self.clone();
        match p {
            SweepParameter::M => c.model.m = value,
            SweepParameter::Beta1 => c.model.beta1 = value,
            SweepParameter::Beta2 => c.model.beta2 = value,
        }
        c.sweep = None;
        c
    }
}

/// A base run plus one swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl SweepConfig {
    pub fn from_run(base: RunConfig) -> Result<Self, CliError> {
        let Some(sweep) = base.sweep.clone() else {
            return Err(CliError::Config("missing [sweep] section".into()));
        };
        if sweep.values.is_empty() {
            return Err(CliError::Config("sweep.values is empty".into()));
        }
        for &v in &sweep.values {
            let ok = match sweep.parameter {
                SweepParameter::M => v.abs() < 2.0,
                _ => v.is_finite(),
            };
            if !ok {
                return Err(CliError::Config(format!("sweep value {v} out of range for {}", sweep.parameter.name())));
            }
        }
        Ok(SweepConfig {
            base,
            parameter: sweep.parameter,
            values: sweep.values,
        })
    }

    pub fn runs(&self) -> Vec<RunConfig> {
        self.values.iter().map(|&v| self.base.with_parameter(self.parameter, v)).collect()
    }
}
