//! Implicit-explicit Euler time stepping of the normalized gradient flow.

use num_complex::Complex64;

use crate::energy::{masses, Hamiltonian};
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::grid::Grid;
use crate::linalg::{solve_component_system, LinearSolverConfig};
use crate::params::ModelParams;
use crate::projection::{project, solve_sigma, ProjectionWeights};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    /// Stop when `max |Phi^{n+1} - Phi^n| / dt` falls to this value.
    pub tol: f64,
    pub max_iter: usize,
    pub linear: LinearSolverConfig,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt: 0.005,
            tol: 1e-7,
            max_iter: 1_000_000,
            linear: LinearSolverConfig::default(),
        }
    }
}

impl StepperConfig {
    pub fn with_dt(dt: f64) -> Self {
        StepperConfig {
            dt,
            ..StepperConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.dt.is_finite()
            && self.tol > 0.0
            && self.max_iter > 0
            && self.linear.tol > 0.0
            && self.linear.max_iter > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "time step, tolerances and iteration limits must be positive: {self:?}"
            )))
        }
    }
}

/// State after one accepted step (iteration 0 is the projected initial data).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub iteration: usize,
    pub energy: f64,
    pub n_total: f64,
    pub m_total: f64,
    /// `max |Phi^{n+1} - Phi^n| / dt`; zero for iteration 0.
    pub residual: f64,
    /// Quartic root used by the projection, when that branch applied.
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunDiagnostics {
    pub records: Vec<StepRecord>,
    pub iterations: usize,
    pub converged: bool,
}

impl RunDiagnostics {
    pub fn final_record(&self) -> Option<&StepRecord> {
        self.records.last()
    }

    /// Largest energy increase between consecutive records.
    pub fn max_energy_increase(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| w[1].energy - w[0].energy)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|N - 1|` and `|M_total - m|` over all records.
    pub fn max_constraint_error(&self, m: f64) -> (f64, f64) {
        self.records.iter().fold((0.0, 0.0), |(a, b), r| {
            (f64::max(a, (r.n_total - 1.0).abs()), f64::max(b, (r.m_total - m).abs()))
        })
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub field: SpinorField,
    pub energy: f64,
    pub diagnostics: RunDiagnostics,
}

impl GroundState {
    pub fn converged(&self) -> bool {
        self.diagnostics.converged
    }
}

/// BEFD stepper for one model on one grid.
#[derive(Debug, Clone)]
pub struct Stepper {
    ham: Hamiltonian,
    cfg: StepperConfig,
}

impl Stepper {
    pub fn new(grid: &Grid, params: &ModelParams, cfg: StepperConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Stepper {
            ham: Hamiltonian::new(grid, params),
            cfg,
        })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.ham
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    fn record(&self, iteration: usize, phi: &SpinorField, residual: f64, lambda: Option<f64>) -> StepRecord {
        let ms = masses(phi);
        StepRecord {
            iteration,
            energy: self.ham.energy(phi),
            n_total: ms.total,
            m_total: ms.magnetization,
            residual,
            lambda,
        }
    }

    /// Projects arbitrary data onto the constraint set.
    pub fn prepare(&self, phi: &SpinorField) -> Result<SpinorField> {
        check_grid(phi, self.ham.grid())?;
        let sigma = solve_sigma(&ProjectionWeights::from_field(phi, self.ham.params().m))?;
        Ok(project(phi, &sigma))
    }

    /// One implicit solve per component followed by the projection.
    pub fn step(&self, phi: &SpinorField, iteration: usize) -> Result<(SpinorField, StepRecord)> {
        let grid = self.ham.grid();
        let p = self.ham.params();
        let dt = self.cfg.dt;
        let split = self.ham.split(phi);
        let v = self.ham.potential();
        let n = grid.len();
        let mut comps: [Vec<Complex64>; 5] = std::array::from_fn(|_| Vec::new());
        let mut diag = vec![0.0; n];
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        for (k, out) in comps.iter_mut().enumerate() {
            let cur = phi.component(k);
            for i in grid.interior() {
                diag[i] = 1.0 / dt + v[i] + p.beta0 * split.rho[i] + split.a[k][i];
                rhs[i] = cur[i] / dt - split.f[k][i];
            }
            *out = solve_component_system(&diag, &rhs, grid, Some(cur), &self.cfg.linear).map_err(|e| match e {
                Error::NonPositiveDiagonal { point, value, .. } => Error::NonPositiveDiagonal {
                    component: k,
                    point,
                    value,
                },
                other => other,
            })?;
        }
        let star = SpinorField::from_components(grid.clone(), comps);
        let sigma = solve_sigma(&ProjectionWeights::from_field(&star, p.m))?;
        let next = project(&star, &sigma);
        let residual = next.max_abs_diff(phi) / dt;
        let rec = self.record(iteration, &next, residual, sigma.lambda);
        Ok((next, rec))
    }

    pub fn run(&self, phi0: &SpinorField) -> Result<GroundState> {
        self.run_observed(phi0, |_| {})
    }

    /// Like [`Stepper::run`], calling `observe` with every record as it is
    /// produced.
    pub fn run_observed(&self, phi0: &SpinorField, mut observe: impl FnMut(&StepRecord)) -> Result<GroundState> {
        let mut phi = self.prepare(phi0)?;
        let first = self.record(0, &phi, 0.0, None);
        observe(&first);
        let mut diagnostics = RunDiagnostics {
            records: vec![first],
            iterations: 0,
            converged: false,
        };
        for it in 1..=self.cfg.max_iter {
            let (next, rec) = self.step(&phi, it)?;
            observe(&rec);
            diagnostics.records.push(rec);
            diagnostics.iterations = it;
            phi = next;
            if rec.residual <= self.cfg.tol {
                diagnostics.converged = true;
                break;
            }
        }
        let energy = diagnostics.records.last().map_or(f64::NAN, |r| r.energy);
        Ok(GroundState {
            field: phi,
            energy,
            diagnostics,
        })
    }
}

fn check_grid(phi: &SpinorField, grid: &Grid) -> Result<()> {
    if phi.grid() != grid {
        return Err(Error::InvalidGrid("field and model live on different grids".into()));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidParameter("initial data contains non-finite values".into()));
    }
    Ok(())
}

pub fn befd_step(phi: &SpinorField, params: &ModelParams, cfg: &StepperConfig) -> Result<(SpinorField, StepRecord)> {
    Stepper::new(phi.grid(), params, *cfg)?.step(phi, 1)
}

pub fn run_to_ground(phi0: &SpinorField, params: &ModelParams, cfg: &StepperConfig) -> Result<GroundState> {
    Stepper::new(phi0.grid(), params, *cfg)?.run(phi0)
}
