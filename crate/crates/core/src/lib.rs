//! Ground-state energy bounds for semirelativistic N-boson systems.
//!
//! Units: ħ = c = 1 throughout.

pub mod bounds;
pub mod cli;
pub mod delta_verify;
pub mod potentials;
pub mod solver;

pub use potentials::{PairPotential, PotentialError};
pub use solver::{
    ground_energy, kinetic_matrix, potential_matrix, scaled_energy_linear, ConvergenceCheck,
    ReducedHamiltonian, SolverConfig, SolverError, SpectrumResult,
};
