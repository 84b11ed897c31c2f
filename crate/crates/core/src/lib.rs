//! Ground states of spin-2 Bose-Einstein condensates.
//!
//! A gradient flow with discrete normalization is discretized by an
//! implicit-explicit Euler finite-difference scheme; five projection
//! constants restore unit mass and the target magnetization after every
//! step. The exactly solvable uniform system supplies initial data and
//! reference energies.

pub mod energy;
pub mod error;
pub mod field;
pub mod grid;
pub mod linalg;
pub mod params;
pub mod potential;
pub mod projection;
pub mod sma;
pub mod stepper;
pub mod uniform;

pub use energy::{el_gradient, el_residual, masses, split_af, total_energy, Hamiltonian, Masses, Multipliers};
pub use error::{Error, Result};
pub use field::{observables, LocalObservables, Observables, SpinorField, ELLS};
pub use grid::{Axis, Grid};
pub use params::ModelParams;
pub use potential::PotentialSpec;
pub use projection::{project, solve_sigma, ProjectionConstants, ProjectionWeights};
pub use sma::{build_initial_data, sma_validity, InitialDataSpec, InitialKind, Profile};
pub use stepper::{befd_step, run_to_ground, GroundState, RunDiagnostics, StepRecord, Stepper, StepperConfig};
pub use uniform::{ground_xi, reconstruct_xi, ClosedForm, Phase, UniformState};
