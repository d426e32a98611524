//! Simulation and analytic toolkit for the electric and magnetic
//! Aharonov-Bohm effects, organized around the picture in which the phase
//! is carried by shifts of the *source* wavepackets: the charges and
//! cylinders that create the potential, not the electron that interferes.
//!
//! The crate has three layers:
//!
//! * closed-form relations ([`analytic`]): phases, shifts, flux, and the
//!   multiplicity identities connecting them;
//! * a split-operator Schroedinger engine ([`grid`], [`propagator`],
//!   [`branch`]) in which those phases and shifts emerge from
//!   branch-dependent dynamics;
//! * end-to-end experiments ([`scenario`]) wiring validated configurations
//!   ([`config`]) into runs, sweeps, and the triggered null check.
//!
//! See the `book/` directory for a guided tour with runnable examples.

pub mod analytic;
pub mod branch;
pub mod config;
pub mod constants;
pub mod error;
pub mod grid;
pub mod mirror;
pub mod propagator;
pub mod quad;
pub mod scenario;
pub mod setup;

pub use analytic::ConsistencyReport;
pub use branch::BranchResult;
pub use config::SimulationConfig;
pub use constants::Constants;
pub use error::{Error, Result};
pub use grid::{Grid, GridState};
pub use mirror::MirrorSpec;
pub use propagator::Propagator;
pub use scenario::ScenarioReport;
pub use setup::{ElectricSetup, MagneticSetup, ScalingMap, Setup};
