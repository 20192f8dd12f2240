//! Monte Carlo checks of the kinetic inequality `⟨δ(m, N)⟩ >= 0`.
//!
//! `δ(m, N) = Σ_i sqrt(p_i² + m²) - 2/(N-1) Σ_{i<j} sqrt((N-1)/(2N) (p_i - p_j)² + m²)`
//! is evaluated on zero-total-momentum configurations drawn from
//! permutation-symmetrized Gaussian mixtures in Jacobi momenta.

mod corpus;
mod geometry;
mod sampling;

pub use corpus::{
    random_state, run_corpus, CorpusConfig, CorpusReport, Finding, FindingKind, Regime,
    StateResult, Verdict, NEGATIVE_MEAN_THRESHOLD,
};
pub use geometry::{
    delta_value, equilateral_triangle, pair_sum_identity_residual, jacobi_inverse, jacobi_transform,
    regular_tetrahedron, tetrahedron_relations, JacobiFrame, MomentumConfiguration, Vec3,
};
pub use sampling::{
    expectation_delta, quadratic_identities_check, sample_momenta, DeltaStats,
    GaussianComponent, QuadraticReport, SymmetrizedGaussianState, DEFAULT_SHARDS,
    MIN_SAMPLES,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeltaError {
    #[error("total momentum is {0:e}, expected 0")]
    NonzeroTotalMomentum(f64),
    #[error("expected {expected} momenta, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}
