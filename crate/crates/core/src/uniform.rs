//! The spatially uniform system: reduced energy over `(tau, delta)`,
//! reconstruction of real five-vectors, and closed-form ground states.

use nalgebra::{Matrix4x5, Vector4, Vector5};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ELLS;
use crate::params::ModelParams;

const SQRT2: f64 = std::f64::consts::SQRT_2;
const SQRT3: f64 = 1.732_050_807_568_877_2;
const SQRT6: f64 = 2.449_489_742_783_178;

/// Slack allowed when deciding feasibility of points on the ellipse boundary.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// Values of the transverse spin density and the singlet amplitude (without
/// its `1/sqrt 5`) on a uniform state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauDelta {
    pub tau: f64,
    pub delta: f64,
}

/// A real uniform five-vector in storage order `2, 1, 0, -1, -2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformState {
    pub xi: [f64; 5],
}

impl UniformState {
    pub fn new(xi: [f64; 5]) -> Self {
        UniformState { xi }
    }

    pub fn mass(&self) -> f64 {
        self.xi.iter().map(|x| x * x).sum()
    }

    pub fn magnetization(&self) -> f64 {
        self.xi.iter().zip(ELLS).map(|(x, l)| l as f64 * x * x).sum()
    }

    pub fn component_masses(&self) -> [f64; 5] {
        self.xi.map(|x| x * x)
    }

    pub fn tau_delta(&self) -> TauDelta {
        tau_delta(&self.xi)
    }

    /// `(xi_1, xi_-1) -> (-xi_1, -xi_-1)`: flips the sign of `tau` and keeps
    /// `delta`, the mass and the magnetization.
    pub fn sign_flipped(&self) -> Self {
        let mut xi = self.xi;
        xi[1] = -xi[1];
        xi[3] = -xi[3];
        UniformState { xi }
    }

    pub fn as_complex(&self) -> [Complex64; 5] {
        self.xi.map(|x| Complex64::new(x, 0.0))
    }
}

pub fn tau_delta(xi: &[f64; 5]) -> TauDelta {
    let [x2, x1, x0, m1, m2] = *xi;
    TauDelta {
        tau: 2.0 * (x2 * x1 + m1 * m2) + SQRT6 * (x1 * x0 + x0 * m1),
        delta: 2.0 * x2 * m2 - 2.0 * x1 * m1 + x0 * x0,
    }
}

/// `(|F_+|, |2 xi_2 xi_-2 - 2 xi_1 xi_-1 + xi_0^2|)` of a complex five-vector.
pub fn tau_delta_complex(xi: &[Complex64; 5]) -> TauDelta {
    let [x2, x1, x0, m1, m2] = *xi;
    let fp = (x2.conj() * x1 + m1.conj() * m2) * 2.0 + (x1.conj() * x0 + x0.conj() * m1) * SQRT6;
    let d = x2 * m2 * 2.0 - x1 * m1 * 2.0 + x0 * x0;
    TauDelta {
        tau: fp.norm(),
        delta: d.norm(),
    }
}

/// Energy per unit volume of a uniform state with magnetization `m`.
pub fn energy_of(td: TauDelta, m: f64, beta0: f64, beta1: f64, beta2: f64) -> f64 {
    0.5 * (beta1 * td.tau * td.tau + beta2 / 5.0 * td.delta * td.delta + beta0 + beta1 * m * m)
}

/// Uniform energy of `xi`, using its own magnetization. The trap is ignored.
pub fn uniform_energy(xi: &UniformState, p: &ModelParams) -> f64 {
    energy_of(xi.tau_delta(), xi.magnetization(), p.beta0, p.beta1, p.beta2)
}

pub fn feasible(tau: f64, delta: f64, m: f64) -> bool {
    tau * tau + 4.0 * delta * delta <= 4.0 - m * m
}

/// Where two regimes meet, or the interaction is spin independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// `beta2 = 20 beta1 < 0`.
    FerroNematic,
    /// `beta1 = 0 < beta2`.
    FerroCyclic,
    /// `beta2 = 0 < beta1`.
    CyclicNematic,
    /// `beta1 = beta2 = 0`.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Ferromagnetic,
    Nematic,
    Cyclic,
    Boundary(Degeneracy),
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::Ferromagnetic => "ferromagnetic",
            Phase::Nematic => "nematic",
            Phase::Cyclic => "cyclic",
            Phase::Boundary(Degeneracy::FerroNematic) => "boundary(ferromagnetic|nematic)",
            Phase::Boundary(Degeneracy::FerroCyclic) => "boundary(ferromagnetic|cyclic)",
            Phase::Boundary(Degeneracy::CyclicNematic) => "boundary(cyclic|nematic)",
            Phase::Boundary(Degeneracy::Flat) => "boundary(flat)",
        }
    }

    /// Open regimes whose ground states are also ground states here.
    pub fn regimes(&self) -> &'static [Phase] {
        match self {
            Phase::Ferromagnetic => &[Phase::Ferromagnetic],
            Phase::Nematic => &[Phase::Nematic],
            Phase::Cyclic => &[Phase::Cyclic],
            Phase::Boundary(Degeneracy::FerroNematic) => &[Phase::Ferromagnetic, Phase::Nematic],
            Phase::Boundary(Degeneracy::FerroCyclic) => &[Phase::Ferromagnetic, Phase::Cyclic],
            Phase::Boundary(Degeneracy::CyclicNematic) => &[Phase::Cyclic, Phase::Nematic],
            Phase::Boundary(Degeneracy::Flat) => &[Phase::Ferromagnetic, Phase::Nematic, Phase::Cyclic],
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify(beta1: f64, beta2: f64) -> Phase {
    if beta1 < 0.0 {
        if beta2 > 20.0 * beta1 {
            Phase::Ferromagnetic
        } else if beta2 < 20.0 * beta1 {
            Phase::Nematic
        } else {
            Phase::Boundary(Degeneracy::FerroNematic)
        }
    } else if beta1 == 0.0 {
        if beta2 > 0.0 {
            Phase::Boundary(Degeneracy::FerroCyclic)
        } else if beta2 < 0.0 {
            Phase::Nematic
        } else {
            Phase::Boundary(Degeneracy::Flat)
        }
    } else if beta2 > 0.0 {
        Phase::Cyclic
    } else if beta2 < 0.0 {
        Phase::Nematic
    } else {
        Phase::Boundary(Degeneracy::CyclicNematic)
    }
}

/// The set of minimizers of the reduced energy for fixed `M` (with `tau >= 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinimizerSet {
    Point(TauDelta),
    /// `(0, +delta)` and `(0, -delta)`.
    DeltaPair(f64),
    /// The whole boundary `tau^2 + 4 delta^2 = 4 - M^2`.
    EllipseBoundary,
    /// `delta = 0`, `0 <= tau <= tau_max`.
    TauSegment { tau_max: f64 },
    /// `tau = 0`, `|delta| <= delta_max`.
    DeltaSegment { delta_max: f64 },
    /// Every feasible point.
    Everywhere,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeMinimum {
    pub phase: Phase,
    /// A representative minimizer; `delta >= 0` for the nematic pair.
    pub argmin: TauDelta,
    pub minimizers: MinimizerSet,
}

/// Minimizes `beta1 tau^2 + beta2 delta^2 / 5` over the feasible ellipse.
pub fn minimize_landscape(beta1: f64, beta2: f64, m: f64) -> LandscapeMinimum {
    let r = (4.0 - m * m).max(0.0).sqrt();
    let phase = classify(beta1, beta2);
    let (argmin, minimizers) = match phase {
        Phase::Ferromagnetic => {
            let p = TauDelta { tau: r, delta: 0.0 };
            (p, MinimizerSet::Point(p))
        }
        Phase::Nematic => (TauDelta { tau: 0.0, delta: r / 2.0 }, MinimizerSet::DeltaPair(r / 2.0)),
        Phase::Cyclic => {
            let p = TauDelta { tau: 0.0, delta: 0.0 };
            (p, MinimizerSet::Point(p))
        }
        Phase::Boundary(Degeneracy::FerroNematic) => {
            (TauDelta { tau: r, delta: 0.0 }, MinimizerSet::EllipseBoundary)
        }
        Phase::Boundary(Degeneracy::FerroCyclic) => {
            (TauDelta { tau: 0.0, delta: 0.0 }, MinimizerSet::TauSegment { tau_max: r })
        }
        Phase::Boundary(Degeneracy::CyclicNematic) => (
            TauDelta { tau: 0.0, delta: 0.0 },
            MinimizerSet::DeltaSegment { delta_max: r / 2.0 },
        ),
        Phase::Boundary(Degeneracy::Flat) => (TauDelta { tau: 0.0, delta: 0.0 }, MinimizerSet::Everywhere),
    };
    LandscapeMinimum {
        phase,
        argmin,
        minimizers,
    }
}

/// Root of the quadratic in `xi_1` taken during reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootBranch {
    #[default]
    Plus,
    Minus,
}

impl RootBranch {
    fn sign(self) -> f64 {
        match self {
            RootBranch::Plus => 1.0,
            RootBranch::Minus => -1.0,
        }
    }
}

/// A real five-vector with unit mass, magnetization `m` and the given
/// `(tau, delta)`. Negative `tau` is served by the sign-flip map.
pub fn reconstruct_xi(tau: f64, delta: f64, m: f64) -> Result<UniformState> {
    reconstruct_xi_branch(tau, delta, m, RootBranch::Plus)
}

pub fn reconstruct_xi_branch(tau: f64, delta: f64, m: f64, branch: RootBranch) -> Result<UniformState> {
    if !(0.0..=2.0).contains(&m) {
        return Err(Error::InvalidParameter(format!("magnetization M = {m} must lie in [0, 2]")));
    }
    let excess = tau * tau + 4.0 * delta * delta - (4.0 - m * m);
    if !tau.is_finite() || !delta.is_finite() || excess > FEASIBILITY_SLACK {
        return Err(Error::Infeasible { tau, delta, m });
    }
    if tau < 0.0 {
        return reconstruct_xi_branch(-tau, delta, m, branch).map(|s| s.sign_flipped());
    }
    let target = [1.0, m, tau, delta];
    if delta >= 1.0 {
        return Ok(UniformState::new([0.0, 0.0, 1.0, 0.0, 0.0]));
    }
    let p = (1.0 - delta).sqrt();
    let sg = branch.sign();
    let xi = if m == 0.0 {
        // theta = pi/2: xi_-2 = xi_2, xi_1 + xi_-1 = p
        let disc = (-48.0 * p * p * (tau * tau + 4.0 * delta * delta - 4.0)).max(0.0);
        let x2 = (4.0 * p * tau + sg * disc.sqrt()) / (32.0 * p * p);
        let x1 = p / 2.0;
        let x0 = (tau - 2.0 * p * x2) / (p * SQRT6);
        [x2, x1, x0, p - x1, x2]
    } else if tau == 0.0 {
        // theta = pi: xi_1 = xi_-1 = 0, xi_2 - xi_-2 = p
        let x2 = (m + 2.0 * p * p) / (4.0 * p);
        let x0 = ((4.0 - m * m - 4.0 * delta * delta) / (8.0 * p * p)).max(0.0).sqrt();
        [x2, 0.0, sg * x0, 0.0, x2 - p]
    } else {
        quadratic_branch(tau, delta, m, p, sg)
    };
    let first = polish(xi, target);
    if m == 0.0 || constraint_residual(&first, target).amax() < 1e-13 {
        return Ok(UniformState::new(first));
    }
    // the quadratic loses digits as M -> 0; restart from the M = 0 branch
    let warm = reconstruct_xi_branch(tau, delta, 0.0, branch)?;
    let second = polish(warm.xi, target);
    let err = |x: &[f64; 5]| {
        let r = constraint_residual(x, target).amax();
        if r.is_finite() {
            r
        } else {
            f64::INFINITY
        }
    };
    Ok(UniformState::new(if err(&second) < err(&first) { second } else { first }))
}

fn quadratic_branch(tau: f64, delta: f64, m: f64, p: f64, sg: f64) -> [f64; 5] {
    let th = std::f64::consts::PI - (tau / m).atan();
    let (s, c) = th.sin_cos();
    let (csc, sec) = (1.0 / s, 1.0 / c);
    let s2t = (2.0 * th).sin();
    let a = 8.0 / (s2t * s2t);
    let b = csc * csc * sec * sec / (4.0 * p)
        * (5.0 * tau * c + 3.0 * tau * (3.0 * th).cos() - 5.0 * m * s - 8.0 * p * p * s + 3.0 * m * (3.0 * th).sin());
    let cc = 1.0 / (2.0 * p * p)
        * (tau * tau * csc * csc + (m - 2.0 * p * p) * tau * csc * sec
            - 0.5
                * sec
                * sec
                * (-2.0 * m * m + 6.0 * delta * p * p - m * p * p + p.powi(4)
                    + 3.0 * p * p * (2.0 * delta + m + p * p) * (2.0 * th).cos()
                    - 3.0 * p * p * tau * s2t));
    let disc = (b * b - 4.0 * a * cc).max(0.0);
    let x1 = (-b + sg * disc.sqrt()) / (2.0 * a);
    let x2 = -(m + 2.0 * p * p - p * p * s * s - 2.0 * p * s * x1) / (4.0 * p * c);
    let x0 = (4.0 - 6.0 * s * s) / (SQRT6 * s2t) * x1
        + (m - 2.0 * p * p + 3.0 * p * p * s * s) / (2.0 * SQRT6 * p * c)
        + tau / (SQRT6 * p * s);
    [x2, x1, x0, p * s - x1, p * c + x2]
}

fn constraint_residual(xi: &[f64; 5], target: [f64; 4]) -> Vector4<f64> {
    let s = UniformState::new(*xi);
    let td = s.tau_delta();
    Vector4::new(
        s.mass() - target[0],
        s.magnetization() - target[1],
        td.tau - target[2],
        td.delta - target[3],
    )
}

/// Minimum-norm Gauss-Newton refinement of the four constraint equations;
/// only steps that reduce the residual are kept.
fn polish(mut xi: [f64; 5], target: [f64; 4]) -> [f64; 5] {
    let mut r = constraint_residual(&xi, target);
    for _ in 0..30 {
        let rn = r.amax();
        if !rn.is_finite() {
            break;
        }
        if rn < 1e-15 {
            break;
        }
        let [x2, x1, x0, m1, m2] = xi;
        #[rustfmt::skip]
        let j = Matrix4x5::new(
            2.0 * x2, 2.0 * x1, 2.0 * x0, 2.0 * m1, 2.0 * m2,
            4.0 * x2, 2.0 * x1, 0.0, -2.0 * m1, -4.0 * m2,
            2.0 * x1, 2.0 * x2 + SQRT6 * x0, SQRT6 * (x1 + m1), 2.0 * m2 + SQRT6 * x0, 2.0 * m1,
            2.0 * m2, -2.0 * m1, 2.0 * x0, -2.0 * x1, 2.0 * x2,
        );
        let Ok(pinv) = j.pseudo_inverse(1e-10) else { break };
        let step: Vector5<f64> = pinv * r;
        let cand: [f64; 5] = std::array::from_fn(|k| xi[k] - step[k]);
        let rc = constraint_residual(&cand, target);
        if rc.amax() < rn {
            xi = cand;
            r = rc;
        } else {
            break;
        }
    }
    xi
}

/// Which of the closed-form uniform ground states to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `(m1^4/16, m1^3 m2/8, sqrt6 m1^2 m2^2/16, m1 m2^3/8, m2^4/16)`.
    Ferromagnetic,
    /// `(m1/2, 0, 0, 0, m2/2)`.
    Nematic,
    /// `M = 0` only: `(g1 cos t, g1 sin t, gamma, -g1 sin t, g1 cos t)` with
    /// `g1 = sqrt((1 - gamma^2)/2)`.
    NematicMixed { gamma: f64, theta: f64 },
    /// `M = 0` only: `(cos t, sin t, 0, sin t, -cos t)/sqrt2`.
    NematicTilted { theta: f64 },
    /// `(m1^2/4, 0, sqrt2 m1 m2/4, 0, -m2^2/4)`.
    CyclicSplit,
    /// `M <= 1` only, built from `m3 = sqrt(1+M)`, `m4 = sqrt(1-M)`.
    CyclicSymmetric,
    /// One-parameter cyclic family; `upper` selects the `+` sign in front of
    /// the square root in `xi_1`.
    CyclicTheta { theta: f64, upper: bool },
}

impl ClosedForm {
    /// Cyclic family at `theta = arctan sqrt((2-M)/(1+M))`, which is
    /// `(sqrt((M+1)/3), 0, 0, sqrt((2-M)/3), 0)`.
    pub fn cyclic_default(m: f64) -> Self {
        ClosedForm::CyclicTheta {
            theta: ((2.0 - m) / (1.0 + m)).sqrt().atan(),
            upper: false,
        }
    }

    /// Nematic family at `M = 0` parameterized by the amplitude `g1` of the
    /// outer components instead of `gamma`.
    pub fn nematic_mixed_from_outer(g1: f64, theta: f64) -> Self {
        ClosedForm::NematicMixed {
            gamma: (1.0 - 2.0 * g1 * g1).max(0.0).sqrt(),
            theta,
        }
    }

    pub fn regime(&self) -> Phase {
        match self {
            ClosedForm::Ferromagnetic => Phase::Ferromagnetic,
            ClosedForm::Nematic | ClosedForm::NematicMixed { .. } | ClosedForm::NematicTilted { .. } => {
                Phase::Nematic
            }
            _ => Phase::Cyclic,
        }
    }

    pub fn build(&self, m: f64) -> Result<UniformState> {
        if !(0.0..=2.0).contains(&m) {
            return Err(Error::InvalidParameter(format!("magnetization M = {m} must lie in [0, 2]")));
        }
        let polarizable = !matches!(
            self,
            ClosedForm::NematicMixed { .. } | ClosedForm::NematicTilted { .. } | ClosedForm::CyclicSymmetric
        );
        if m == 2.0 && polarizable {
            // the feasible set collapses to the fully polarized state
            return Ok(UniformState::new([1.0, 0.0, 0.0, 0.0, 0.0]));
        }
        let m1 = (2.0 + m).sqrt();
        let m2 = (2.0 - m).sqrt();
        let require_zero_m = |name: &str| {
            if m != 0.0 {
                Err(Error::InvalidVariant(format!("{name} requires M = 0, got {m}")))
            } else {
                Ok(())
            }
        };
        let xi = match *self {
            ClosedForm::Ferromagnetic => [
                m1.powi(4) / 16.0,
                m1.powi(3) * m2 / 8.0,
                SQRT6 * m1 * m1 * m2 * m2 / 16.0,
                m1 * m2.powi(3) / 8.0,
                m2.powi(4) / 16.0,
            ],
            ClosedForm::Nematic => [m1 / 2.0, 0.0, 0.0, 0.0, m2 / 2.0],
            ClosedForm::NematicMixed { gamma, theta } => {
                require_zero_m("nematic mixed family")?;
                if !(gamma.abs() <= 1.0) {
                    return Err(Error::InvalidVariant(format!("|gamma| <= 1 (gamma = {gamma})")));
                }
                let g1 = ((1.0 - gamma * gamma) / 2.0).sqrt();
                let (s, c) = theta.sin_cos();
                [g1 * c, g1 * s, gamma, -g1 * s, g1 * c]
            }
            ClosedForm::NematicTilted { theta } => {
                require_zero_m("nematic tilted family")?;
                let (s, c) = theta.sin_cos();
                [c / SQRT2, s / SQRT2, 0.0, s / SQRT2, -c / SQRT2]
            }
            ClosedForm::CyclicSplit => [m1 * m1 / 4.0, 0.0, SQRT2 * m1 * m2 / 4.0, 0.0, -m2 * m2 / 4.0],
            ClosedForm::CyclicSymmetric => {
                if m > 1.0 {
                    return Err(Error::InvalidVariant(format!("M <= 1 for the symmetric cyclic family (M = {m})")));
                }
                let m3 = (1.0 + m).sqrt();
                let m4 = (1.0 - m).sqrt();
                [
                    SQRT3 * m3 * m4 / 4.0,
                    m3 * m3 / 2.0,
                    -SQRT2 * m3 * m4 / 4.0,
                    m4 * m4 / 2.0,
                    SQRT3 * m3 * m4 / 4.0,
                ]
            }
            ClosedForm::CyclicTheta { theta, upper } => cyclic_theta(m, theta, upper)?,
        };
        Ok(UniformState::new(xi))
    }
}

fn cyclic_theta(m: f64, theta: f64, upper: bool) -> Result<[f64; 5]> {
    let (s, c) = theta.sin_cos();
    if !theta.is_finite() || c.abs() < 1e-12 {
        return Err(Error::InvalidVariant(format!("|sin theta| != 1 (theta = {theta})")));
    }
    let m1s = 2.0 + m;
    let m2s = 2.0 - m;
    let k = m1s * m2s - 3.0 * m * m * s * s;
    if k < -1e-14 {
        return Err(Error::InvalidVariant(format!(
            "m1^2 m2^2 - 3 M^2 sin^2 theta >= 0 (value {k:.3e} at theta = {theta})"
        )));
    }
    let rk = k.max(0.0).sqrt();
    let sg = if upper { 1.0 } else { -1.0 };
    // g = |sin cos| sqrt(k); the cotangent and tangent factors are folded in
    // so that sin theta = 0 stays finite
    let g = (s * c).abs() * rk;
    let cot_term = (s * c).signum() * (3.0 * c * c - 1.0) * rk;
    let tan_term = s * s.abs() * c.signum() * rk;
    let x0 = -3.0 * SQRT6 / 8.0 * m * s * s * c - sg * SQRT2 / 8.0 * cot_term;
    let x1 = 0.75 * m * s.powi(3) + 0.25 * m2s * s + sg * SQRT3 / 4.0 * g;
    let x2 = (3.0 * m * s * s + 2.0 * m1s) * c / 8.0 - sg * SQRT3 / 8.0 * tan_term;
    Ok([x2, x1, x0, s - x1, x2 - c])
}

/// Closed-form uniform ground state for the given interactions. Without a
/// `family` the default of the phase is used: ferromagnetic, `Nematic`, or
/// [`ClosedForm::cyclic_default`]; boundary sets take the first adjacent
/// regime of [`Phase::regimes`].
pub fn ground_xi(beta1: f64, beta2: f64, m: f64, family: Option<ClosedForm>) -> Result<UniformState> {
    let phase = classify(beta1, beta2);
    let family = match family {
        Some(f) => {
            if !phase.regimes().contains(&f.regime()) {
                return Err(Error::InvalidParameter(format!(
                    "a {} family is not a ground state in the {} phase",
                    f.regime(),
                    phase
                )));
            }
            f
        }
        None => match phase.regimes()[0] {
            Phase::Ferromagnetic => ClosedForm::Ferromagnetic,
            Phase::Nematic => ClosedForm::Nematic,
            _ => ClosedForm::cyclic_default(m),
        },
    };
    family.build(m)
}

/// Uniform ground-state energy as a function of the magnetization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaOfM {
    pub value: f64,
    pub phase: Phase,
}

pub fn beta_of_m(beta0: f64, beta1: f64, beta2: f64, m: f64) -> BetaOfM {
    let phase = classify(beta1, beta2);
    // the three regime formulas agree on every boundary set
    let value = match phase.regimes()[0] {
        Phase::Ferromagnetic => 0.5 * (beta0 + 4.0 * beta1),
        Phase::Nematic => 0.5 * (beta0 + beta2 / 5.0 + (20.0 * beta1 - beta2) * m * m / 20.0),
        _ => 0.5 * (beta0 + beta1 * m * m),
    };
    BetaOfM { value, phase }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MStar {
    /// Every `M` in `[-2, 2]` attains the minimum.
    Any,
    At(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinOverM {
    pub value: f64,
    pub m_star: MStar,
    pub phase: Phase,
}

/// Minimum of [`beta_of_m`] over `M in [-2, 2]`.
pub fn min_beta_over_m(beta0: f64, beta1: f64, beta2: f64) -> MinOverM {
    let phase = classify(beta1, beta2);
    let (value, m_star) = match phase {
        Phase::Ferromagnetic
        | Phase::Boundary(Degeneracy::FerroNematic)
        | Phase::Boundary(Degeneracy::FerroCyclic)
        | Phase::Boundary(Degeneracy::Flat) => (0.5 * (beta0 + 4.0 * beta1), MStar::Any),
        Phase::Nematic => (0.5 * (beta0 + beta2 / 5.0), MStar::At(0.0)),
        Phase::Cyclic | Phase::Boundary(Degeneracy::CyclicNematic) => (0.5 * beta0, MStar::At(0.0)),
    };
    MinOverM { value, m_star, phase }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeSample {
    pub tau: f64,
    pub delta: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub samples: Vec<LandscapeSample>,
    /// Index of the smallest sample; ties go to the larger `delta`.
    pub argmin: usize,
}

/// Samples the reduced energy on an elliptic-polar lattice covering the
/// feasible half-ellipse `tau >= 0`: `resolution` radii from 0 to
/// `sqrt(4 - M^2)` times `resolution` angles from `-pi/2` to `pi/2`.
pub fn landscape_grid(beta0: f64, beta1: f64, beta2: f64, m: f64, resolution: usize) -> Result<Landscape> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("landscape resolution {resolution} must be at least 2")));
    }
    if !(0.0..=2.0).contains(&m) {
        return Err(Error::InvalidParameter(format!("magnetization M = {m} must lie in [0, 2]")));
    }
    let rmax = (4.0 - m * m).sqrt();
    let last = (resolution - 1) as f64;
    let mut samples = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let r = rmax * i as f64 / last;
        for j in 0..resolution {
            let a = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * j as f64 / last;
            let td = TauDelta {
                tau: (r * a.cos()).max(0.0),
                delta: 0.5 * r * a.sin(),
            };
            samples.push(LandscapeSample {
                tau: td.tau,
                delta: td.delta,
                energy: energy_of(td, m, beta0, beta1, beta2),
            });
        }
    }
    let mut argmin = 0;
    for (k, s) in samples.iter().enumerate() {
        let best = &samples[argmin];
        if s.energy < best.energy || (s.energy == best.energy && s.delta > best.delta) {
            argmin = k;
        }
    }
    Ok(Landscape { samples, argmin })
}
