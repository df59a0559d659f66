//! Ground states of a quasi-one-dimensional binary condensate (or a pair of
//! linearly coupled optical modes) whose linear inter-component coupling is
//! periodically modulated and changes sign in space.
//!
//! The crate provides
//!
//! * the discretized model: grid, coupling profile, energy functional,
//!   chemical potential and stationary-equation residual ([`model`]);
//! * closed-form uniform states and a brute-force oracle ([`uniform`]);
//! * the small-coupling Thomas-Fermi perturbative pair ([`perturbation`]);
//! * a norm-projected imaginary-time ground-state solver ([`solver`]);
//! * thresholded kink counting in the sign-changing component ([`kinks`]);
//! * a parameter-sweep harness and the CSV/JSON file formats ([`sweep`], [`io`]).

pub mod error;
pub mod io;
pub mod kinks;
pub mod model;
pub mod perturbation;
pub mod solver;
pub mod sweep;
pub mod uniform;

pub use error::{Error, Result};
pub use kinks::{count_kinks, parity_of, KinkReport, KinkThresholdConfig, ThresholdReference};
pub use model::{
    chemical_potential, coupling_at, energy, make_grid, stationary_residual, trap_at,
    CouplingProfile, FieldPair, Grid1D, Parity, SystemParams,
};
pub use perturbation::{effective_mu, tf_pair, TfApprox};
pub use solver::{
    imaginary_time_step, solve_ground_state, GroundStateResult, SeedKind, SolverConfig,
};
pub use sweep::{run_sweep, MapRow, MapTable, SweepSpec, ALPHA0};
pub use uniform::{
    uniform_asymmetric, uniform_brute_force, uniform_ground_state, uniform_symmetric,
    AsymmetricAbsent, UniformLabel, UniformState,
};
