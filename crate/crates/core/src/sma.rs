//! Single-mode approximation: a shared spatial mode times a uniform
//! five-vector, used for initial data and as a diagnostic of ground states.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::component_masses;
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::grid::Grid;
use crate::linalg::{gradient_norm_sqr, solve_component_system};
use crate::params::ModelParams;
use crate::potential::PotentialSpec;
use crate::projection::{project, solve_sigma, ProjectionWeights};
use crate::stepper::StepperConfig;
use crate::uniform::{beta_of_m, ground_xi, ClosedForm, UniformState};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One complex field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl ScalarField {
    pub fn norm_sqr(&self) -> f64 {
        self.grid.interior().map(|i| self.values[i].norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        self.values.iter_mut().for_each(|z| *z /= n);
        self
    }
}

/// `int |grad phi|^2/2 + V |phi|^2 + beta |phi|^4` on the grid.
pub fn energy_sma(phi: &ScalarField, beta: f64, potential: &PotentialSpec) -> f64 {
    let g = &phi.grid;
    let local: f64 = g
        .interior()
        .map(|i| {
            let x = g.point(i);
            let r = phi.values[i].norm_sqr();
            potential.eval(&x[..g.dim()]) * r + beta * r * r
        })
        .sum::<f64>()
        * g.cell_volume();
    0.5 * gradient_norm_sqr(&phi.values, g) + local
}

#[derive(Debug, Clone)]
pub struct ScalarGroundState {
    pub field: ScalarField,
    pub energy: f64,
    /// Energy after every step, starting with the initial guess.
    pub energies: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Ground state of the single-component problem by the same implicit Euler
/// flow, renormalized after each step.
pub fn scalar_ground_state(
    beta: f64,
    potential: &PotentialSpec,
    grid: &Grid,
    cfg: &StepperConfig,
) -> Result<ScalarGroundState> {
    cfg.validate()?;
    let v = grid.sample(|x| potential.eval(x));
    let mut phi = ScalarField {
        grid: grid.clone(),
        values: profile_values(Profile::Auto, beta, potential, grid)
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect(),
    };
    let mut energies = vec![energy_sma(&phi, beta, potential)];
    let mut diag = vec![0.0; grid.len()];
    let mut rhs = vec![ZERO; grid.len()];
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=cfg.max_iter {
        for i in grid.interior() {
            diag[i] = 1.0 / cfg.dt + v[i] + 2.0 * beta * phi.values[i].norm_sqr();
            rhs[i] = phi.values[i] / cfg.dt;
        }
        let star = solve_component_system(&diag, &rhs, grid, Some(&phi.values), &cfg.linear)?;
        let next = ScalarField {
            grid: grid.clone(),
            values: star,
        }
        .normalized();
        let change = next
            .values
            .iter()
            .zip(&phi.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / cfg.dt;
        phi = next;
        energies.push(energy_sma(&phi, beta, potential));
        iterations = it;
        if change <= cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(ScalarGroundState {
        energy: *energies.last().unwrap_or(&f64::NAN),
        field: phi,
        energies,
        iterations,
        converged,
    })
}

/// `Phi_l = xi_l phi`.
pub fn assemble_sma(xi: &UniformState, phi: &ScalarField) -> SpinorField {
    let comps = std::array::from_fn(|k| phi.values.iter().map(|z| z * xi.xi[k]).collect());
    SpinorField::from_components(phi.grid.clone(), comps)
}

/// Spatial mode shared by all components of the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    /// `pi^{-d/4} exp(-|x|^2/2)`.
    Gaussian,
    /// `sqrt(max(0, mu - V)/(2 beta))` with `mu` fixed by the normalization;
    /// falls back to [`Profile::Auto`] without repulsion.
    ThomasFermi,
    /// Product of half-period sine modes of the domain.
    BoxMode,
    /// Thomas-Fermi when `beta > 0`, otherwise the sine mode in a box and
    /// the Gaussian in a trap.
    #[default]
    Auto,
}

/// Profile values at every stored point, zero on the boundary, with unit
/// discrete norm.
pub fn profile_values(profile: Profile, beta: f64, potential: &PotentialSpec, grid: &Grid) -> Vec<f64> {
    let boxed = matches!(potential, PotentialSpec::Box);
    let resolved = match profile {
        Profile::ThomasFermi | Profile::Auto if beta > 0.0 => Profile::ThomasFermi,
        Profile::ThomasFermi | Profile::Auto if boxed => Profile::BoxMode,
        Profile::ThomasFermi | Profile::Auto => Profile::Gaussian,
        p => p,
    };
    let d = grid.dim();
    let mut vals: Vec<f64> = match resolved {
        Profile::Gaussian => grid.sample(|x| {
            std::f64::consts::PI.powf(-(d as f64) / 4.0) * (-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp()
        }),
        Profile::BoxMode => grid.sample(|x| {
            x.iter()
                .zip(grid.axes())
                .map(|(&t, ax)| (std::f64::consts::PI * (t - ax.lower) / (ax.upper - ax.lower)).sin())
                .product()
        }),
        _ => {
            let v = grid.sample(|x| potential.eval(x));
            let vol = grid.cell_volume();
            let mass = |mu: f64| grid.interior().map(|i| (mu - v[i]).max(0.0)).sum::<f64>() * vol / (2.0 * beta);
            let vmin = grid.interior().map(|i| v[i]).fold(f64::INFINITY, f64::min);
            let (mut lo, mut hi) = (vmin, vmin + 1.0);
            while mass(hi) < 1.0 {
                lo = hi;
                hi = vmin + 2.0 * (hi - vmin);
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mass(mid) < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            v.iter().map(|&vi| ((hi - vi).max(0.0) / (2.0 * beta)).sqrt()).collect()
        }
    };
    for (i, x) in vals.iter_mut().enumerate() {
        if grid.is_boundary(i) {
            *x = 0.0;
        }
    }
    let n = grid.interior().map(|i| vals[i] * vals[i]).sum::<f64>() * grid.cell_volume();
    let s = 1.0 / n.sqrt();
    vals.iter_mut().for_each(|x| *x *= s);
    vals
}

/// Five profile functions evaluated at a point.
pub type CustomProfile = Arc<dyn Fn(&[f64]) -> [Complex64; 5] + Send + Sync>;

#[derive(Clone)]
pub enum InitialKind {
    /// A closed-form uniform ground state; `None` takes the phase default.
    SmaClosedForm(Option<ClosedForm>),
    /// `(sqrt(2+M-2s), sqrt s, sqrt(2s), sqrt s, sqrt(2-M-2s))/2` with
    /// `s in [0, 1 - M/2]`.
    GeneralSigma(f64),
    /// An explicit five-vector.
    Vector([f64; 5]),
    /// Random complex amplitudes with mild spatial noise on the profile.
    Random { seed: u64 },
    /// User-supplied components; the profile is ignored.
    Custom(CustomProfile),
}

impl fmt::Debug for InitialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialKind::SmaClosedForm(c) => f.debug_tuple("SmaClosedForm").field(c).finish(),
            InitialKind::GeneralSigma(s) => f.debug_tuple("GeneralSigma").field(s).finish(),
            InitialKind::Vector(v) => f.debug_tuple("Vector").field(v).finish(),
            InitialKind::Random { seed } => f.debug_struct("Random").field("seed", seed).finish(),
            InitialKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InitialDataSpec {
    pub kind: InitialKind,
    pub profile: Profile,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        InitialDataSpec {
            kind: InitialKind::SmaClosedForm(None),
            profile: Profile::Auto,
        }
    }
}

impl InitialDataSpec {
    pub fn closed_form(family: Option<ClosedForm>) -> Self {
        InitialDataSpec {
            kind: InitialKind::SmaClosedForm(family),
            profile: Profile::Auto,
        }
    }
}

/// Five-vector selected by the general initial set-up.
pub fn general_sigma_xi(sigma: f64, m: f64) -> Result<UniformState> {
    let top = 1.0 - m / 2.0;
    if !(0.0..=top).contains(&sigma) {
        return Err(Error::InvalidParameter(format!("sigma = {sigma} must lie in [0, {top}]")));
    }
    Ok(UniformState::new([
        0.5 * (2.0 + m - 2.0 * sigma).sqrt(),
        0.5 * sigma.sqrt(),
        0.5 * (2.0 * sigma).sqrt(),
        0.5 * sigma.sqrt(),
        0.5 * (2.0 - m - 2.0 * sigma).max(0.0).sqrt(),
    ]))
}

/// Builds initial data on `grid` and projects it onto the constraints.
pub fn build_initial_data(spec: &InitialDataSpec, p: &ModelParams, grid: &Grid) -> Result<SpinorField> {
    let beta = beta_of_m(p.beta0, p.beta1, p.beta2, p.m).value;
    let prof = || profile_values(spec.profile, beta, &p.potential, grid);
    let from_xi = |xi: UniformState| {
        let vals = prof();
        SpinorField::from_components(
            grid.clone(),
            std::array::from_fn(|k| vals.iter().map(|&v| Complex64::new(v * xi.xi[k], 0.0)).collect()),
        )
    };
    let raw = match &spec.kind {
        InitialKind::SmaClosedForm(family) => from_xi(ground_xi(p.beta1, p.beta2, p.m, *family)?),
        InitialKind::GeneralSigma(sigma) => from_xi(general_sigma_xi(*sigma, p.m)?),
        InitialKind::Vector(xi) => from_xi(UniformState::new(*xi)),
        InitialKind::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let amp: [Complex64; 5] =
                std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let vals = prof();
            let comps = std::array::from_fn(|k| {
                vals.iter()
                    .map(|&v| {
                        let noise = Complex64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
                        (amp[k] + noise) * v
                    })
                    .collect()
            });
            SpinorField::from_components(grid.clone(), comps)
        }
        InitialKind::Custom(f) => SpinorField::from_fn(grid.clone(), |x| f(x)),
    };
    if !raw.is_finite() {
        return Err(Error::InvalidParameter("initial data contains non-finite values".into()));
    }
    let sigma = solve_sigma(&ProjectionWeights::from_field(&raw, p.m))?;
    Ok(project(&raw, &sigma))
}

/// Outcome of the single-mode test on a converged state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmaReport {
    pub valid: bool,
    /// Largest spatial variation of `phi_l / phi_ref`, in units of the
    /// reference component.
    pub deviation: f64,
    /// Storage index of the reference (largest-mass) component.
    pub reference: usize,
}

/// Relative ratio floor below which points are excluded from the test.
pub const SMA_FLOOR: f64 = 1e-6;
pub const SMA_DEFAULT_TOL: f64 = 1e-3;

/// Checks whether every component is a constant multiple of the dominant
/// one, measured where the dominant component exceeds `SMA_FLOOR` of its peak.
pub fn sma_validity(phi: &SpinorField, tol: f64) -> Result<SmaReport> {
    let grid = phi.grid();
    let cm = component_masses(phi);
    let reference = (0..5).fold(0, |best, k| if cm[k] > cm[best] { k } else { best });
    let r = phi.component(reference);
    let (peak_idx, peak) = grid
        .interior()
        .map(|i| (i, r[i].norm()))
        .fold((usize::MAX, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if !(peak > 0.0) {
        return Err(Error::SmaReference("reference component vanishes everywhere".into()));
    }
    let floor = SMA_FLOOR * peak;
    let base: [Complex64; 5] = std::array::from_fn(|k| phi.component(k)[peak_idx] / r[peak_idx]);
    let mut deviation: f64 = 0.0;
    for i in grid.interior() {
        if r[i].norm() < floor {
            continue;
        }
        for (k, b) in base.iter().enumerate() {
            deviation = deviation.max((phi.component(k)[i] / r[i] - b).norm());
        }
    }
    Ok(SmaReport {
        valid: deviation <= tol,
        deviation,
        reference,
    })
}
