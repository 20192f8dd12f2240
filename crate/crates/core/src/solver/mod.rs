//! Rayleigh–Ritz solver for the reduced one-body operator
//! `β sqrt(λ p² + m²) + γ V(r)` in three dimensions, s-wave.
//!
//! The trial space is spanned by the first `M` radial oscillator functions
//! at momentum scale `σ` (coordinate functions `σ^{3/2} R_n(σ r)`). Because
//! the basis is its own Fourier transform up to `(-1)^n`, kinetic matrix
//! elements are one-dimensional momentum quadratures and potential matrix
//! elements one-dimensional coordinate quadratures over the same table.
//!
//! The returned energy is variational: an upper bound to the spectral bottom
//! of the operator, not a certified lower bracket. Callers that need a
//! conservative lower estimate subtract `convergence_estimate`.

mod basis;
mod optimize;
pub mod quadrature;

pub use basis::{radial_functions, BasisTable};
pub use optimize::{minimize_log_scale, ScaleMinimum};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potentials::PairPotential;

/// Ground energy of `|p| + r` in three dimensions (Boukraa and Basdevant).
pub const LINEAR_REFERENCE_ENERGY: f64 = 2.2322;

/// Precision assumed for [`LINEAR_REFERENCE_ENERGY`], which is quoted
/// without error bars.
pub const LINEAR_REFERENCE_PRECISION: f64 = 5e-4;

/// Coupling `α` beyond which `|p| - α/r` is unbounded below.
pub const CRITICAL_COULOMB_COUPLING: f64 = 2.0 / std::f64::consts::PI;

/// Relative matrix change between quadrature orders `n` and `2n` above which
/// a warning is recorded.
pub const QUADRATURE_WARN_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid reduced Hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "stability guard: effective Coulomb coupling {coupling:.6} >= 2/pi; \
         the operator is unbounded below"
    )]
    Unstable { coupling: f64 },
    #[error("eigensolver returned a non-finite energy at basis scale {scale}")]
    NonFinite { scale: f64 },
}

/// `β sqrt(λ p² + m²) + γ V(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedHamiltonian {
    pub beta: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub mass: f64,
    pub potential: PairPotential,
}

impl ReducedHamiltonian {
    pub fn new(
        beta: f64,
        lambda: f64,
        gamma: f64,
        mass: f64,
        potential: PairPotential,
    ) -> Result<Self, SolverError> {
        let h = Self {
            beta,
            lambda,
            gamma,
            mass,
            potential,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        for (name, v) in [("beta", self.beta), ("lambda", self.lambda), ("gamma", self.gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SolverError::InvalidHamiltonian(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            return Err(SolverError::InvalidHamiltonian(format!(
                "mass must be non-negative, got {}",
                self.mass
            )));
        }
        self.potential
            .validate()
            .map_err(|e| SolverError::InvalidHamiltonian(e.to_string()))
    }

    /// `γ v / (β sqrt(λ))`: the Coulomb coupling after dividing the operator
    /// by the coefficient of `|p|`.
    pub fn effective_coulomb_coupling(&self) -> f64 {
        self.gamma * self.potential.coulomb_strength() / (self.beta * self.lambda.sqrt())
    }

    pub fn check_stability(&self) -> Result<(), SolverError> {
        let coupling = self.effective_coulomb_coupling();
        if coupling >= CRITICAL_COULOMB_COUPLING {
            Err(SolverError::Unstable { coupling })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "size")]
pub enum ConvergenceCheck {
    /// Compare against `M / 2`.
    HalfBasis,
    Size(usize),
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub basis_size: usize,
    pub scale_search_interval: (f64, f64),
    pub scale_tolerance: f64,
    pub quadrature_order: usize,
    pub convergence_check: ConvergenceCheck,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            basis_size: 40,
            scale_search_interval: (0.05, 20.0),
            scale_tolerance: 1e-4,
            quadrature_order: 200,
            convergence_check: ConvergenceCheck::HalfBasis,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::InvalidConfig(msg));
        if self.basis_size < 2 {
            return bad(format!("basis_size must be >= 2, got {}", self.basis_size));
        }
        let (lo, hi) = self.scale_search_interval;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            return bad(format!(
                "scale_search_interval must satisfy 0 < lo < hi, got [{lo}, {hi}]"
            ));
        }
        if !(self.scale_tolerance.is_finite() && self.scale_tolerance > 0.0) {
            return bad(format!(
                "scale_tolerance must be positive, got {}",
                self.scale_tolerance
            ));
        }
        if self.quadrature_order < 16 {
            return bad(format!(
                "quadrature_order must be >= 16, got {}",
                self.quadrature_order
            ));
        }
        if let ConvergenceCheck::Size(s) = self.convergence_check {
            if s == 0 || s >= self.basis_size {
                return bad(format!(
                    "convergence comparison size must lie in 1..{}, got {s}",
                    self.basis_size
                ));
            }
        }
        Ok(())
    }

    fn comparison_size(&self) -> Option<usize> {
        match self.convergence_check {
            ConvergenceCheck::HalfBasis => Some(self.basis_size / 2),
            ConvergenceCheck::Size(s) => Some(s),
            ConvergenceCheck::Off => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub ground_energy: f64,
    pub optimal_basis_scale: f64,
    pub coefficients: Vec<f64>,
    /// `|E0(M) - E0(M_c)|` for the configured comparison size, 0 when off.
    pub convergence_estimate: f64,
    pub comparison_basis_size: Option<usize>,
    pub basis_size: usize,
    /// Relative change of the Hamiltonian matrix between quadrature
    /// orders `n` and `2n` at the optimal scale.
    pub quadrature_change: f64,
    pub at_scale_boundary: bool,
    pub warnings: Vec<String>,
}

/// A matrix together with its doubled-order quadrature diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixReport {
    pub matrix: DMatrix<f64>,
    pub quadrature_change: f64,
    pub warnings: Vec<String>,
}

fn relative_change(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.abs().max().max(f64::MIN_POSITIVE);
    (a - b).abs().max() / scale
}

/// `β λp² / (sqrt(λp² + m²) + m)`: the kinetic operator minus `β m`, written
/// without cancellation for large `m`.
fn kinetic_excess(beta: f64, lambda: f64, mass: f64, p: f64) -> f64 {
    let lp2 = lambda * p * p;
    beta * lp2 / ((lp2 + mass * mass).sqrt() + mass)
}

fn kinetic_from_table(
    table: &BasisTable,
    beta: f64,
    lambda: f64,
    mass: f64,
    scale: f64,
) -> DMatrix<f64> {
    let mut k = table.operator_matrix(|x| kinetic_excess(beta, lambda, mass, scale * x), true);
    for i in 0..table.size {
        k[(i, i)] += beta * mass;
    }
    k
}

fn potential_from_table(
    table: &BasisTable,
    potential: &PairPotential,
    gamma: f64,
    scale: f64,
) -> DMatrix<f64> {
    table.operator_matrix(|x| gamma * potential.value_unchecked(x / scale), false)
}

fn hamiltonian_from_table(table: &BasisTable, h: &ReducedHamiltonian, scale: f64) -> DMatrix<f64> {
    kinetic_from_table(table, h.beta, h.lambda, h.mass, scale)
        + potential_from_table(table, &h.potential, h.gamma, scale)
}

fn check_matrix_args(basis_size: usize, basis_scale: f64, order: usize) -> Result<(), SolverError> {
    if basis_size == 0 {
        return Err(SolverError::InvalidConfig("basis_size must be >= 1".into()));
    }
    if !(basis_scale.is_finite() && basis_scale > 0.0) {
        return Err(SolverError::InvalidConfig(format!(
            "basis scale must be positive, got {basis_scale}"
        )));
    }
    if order < 16 {
        return Err(SolverError::InvalidConfig(format!(
            "quadrature_order must be >= 16, got {order}"
        )));
    }
    Ok(())
}

fn with_quadrature_check(
    basis_size: usize,
    order: usize,
    build: impl Fn(&BasisTable) -> DMatrix<f64>,
) -> MatrixReport {
    let matrix = build(&BasisTable::new(basis_size, order));
    let doubled = build(&BasisTable::new(basis_size, 2 * order));
    let quadrature_change = relative_change(&matrix, &doubled);
    let mut warnings = Vec::new();
    if quadrature_change > QUADRATURE_WARN_THRESHOLD {
        warnings.push(format!(
            "quadrature not converged: relative change {quadrature_change:.3e} between orders {order} and {}",
            2 * order
        ));
    }
    MatrixReport {
        matrix,
        quadrature_change,
        warnings,
    }
}

/// `⟨φ_i| β sqrt(λp² + m²) |φ_j⟩` at momentum scale `basis_scale`.
pub fn kinetic_matrix(
    beta: f64,
    lambda: f64,
    mass: f64,
    basis_size: usize,
    basis_scale: f64,
    quadrature_order: usize,
) -> Result<MatrixReport, SolverError> {
    check_matrix_args(basis_size, basis_scale, quadrature_order)?;
    for (name, v) in [("beta", beta), ("lambda", lambda)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(SolverError::InvalidHamiltonian(format!("{name} must be positive, got {v}")));
        }
    }
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(SolverError::InvalidHamiltonian(format!(
            "mass must be non-negative, got {mass}"
        )));
    }
    Ok(with_quadrature_check(basis_size, quadrature_order, |t| {
        kinetic_from_table(t, beta, lambda, mass, basis_scale)
    }))
}

/// `⟨φ_i| γ V(r) |φ_j⟩` at momentum scale `basis_scale`.
pub fn potential_matrix(
    potential: &PairPotential,
    gamma: f64,
    basis_size: usize,
    basis_scale: f64,
    quadrature_order: usize,
) -> Result<MatrixReport, SolverError> {
    check_matrix_args(basis_size, basis_scale, quadrature_order)?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(SolverError::InvalidHamiltonian(format!("gamma must be positive, got {gamma}")));
    }
    potential
        .validate()
        .map_err(|e| SolverError::InvalidHamiltonian(e.to_string()))?;
    Ok(with_quadrature_check(basis_size, quadrature_order, |t| {
        potential_from_table(t, potential, gamma, basis_scale)
    }))
}

fn lowest_eigenvalue(h: DMatrix<f64>) -> f64 {
    h.symmetric_eigenvalues().min()
}

fn lowest_eigenpair(h: DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(h);
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let mut v = eig.eigenvectors.column(idx).into_owned();
    v /= v.norm();
    // fix the overall sign so the largest component is positive
    let (imax, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("non-empty vector");
    if v[imax] < 0.0 {
        v = -v;
    }
    (value, v)
}

/// Lowest eigenvalue in the leading `size` functions, minimized over scale.
fn optimize_scale(
    table: &BasisTable,
    h: &ReducedHamiltonian,
    size: usize,
    cfg: &SolverConfig,
) -> Result<ScaleMinimum, SolverError> {
    minimize_log_scale(cfg.scale_search_interval, cfg.scale_tolerance, |scale| {
        let full = hamiltonian_from_table(table, h, scale);
        let e = lowest_eigenvalue(full.view((0, 0), (size, size)).into_owned());
        if e.is_finite() {
            Ok(e)
        } else {
            Err(SolverError::NonFinite { scale })
        }
    })
}

/// Variational ground energy of `h`, optimized over the basis scale.
pub fn ground_energy(h: &ReducedHamiltonian, cfg: &SolverConfig) -> Result<SpectrumResult, SolverError> {
    h.validate()?;
    cfg.validate()?;
    h.check_stability()?;

    let m = cfg.basis_size;
    let table = BasisTable::new(m, cfg.quadrature_order);
    let best = optimize_scale(&table, h, m, cfg)?;
    let mut warnings = Vec::new();
    best.push_boundary_warning(cfg.scale_search_interval, &mut warnings);

    let hm = hamiltonian_from_table(&table, h, best.scale);
    let (energy, vector) = lowest_eigenpair(hm.clone());

    let doubled = BasisTable::new(m, 2 * cfg.quadrature_order);
    let quadrature_change = relative_change(&hm, &hamiltonian_from_table(&doubled, h, best.scale));
    if quadrature_change > QUADRATURE_WARN_THRESHOLD {
        warnings.push(format!(
            "quadrature not converged: relative change {quadrature_change:.3e} between orders {} and {}",
            cfg.quadrature_order,
            2 * cfg.quadrature_order
        ));
    }

    let comparison = cfg.comparison_size();
    let convergence_estimate = match comparison {
        Some(size) => {
            let coarse = optimize_scale(&table, h, size, cfg)?;
            (energy - coarse.value).abs()
        }
        None => 0.0,
    };

    Ok(SpectrumResult {
        ground_energy: energy,
        optimal_basis_scale: best.scale,
        coefficients: vector.iter().copied().collect(),
        convergence_estimate,
        comparison_basis_size: comparison,
        basis_size: m,
        quadrature_change,
        at_scale_boundary: best.at_boundary,
        warnings,
    })
}

impl ScaleMinimum {
    pub(crate) fn push_boundary_warning(&self, (lo, hi): (f64, f64), warnings: &mut Vec<String>) {
        if self.at_boundary {
            warnings.push(format!(
                "scale optimum {:.6} lies at an endpoint of the search interval [{lo}, {hi}]; \
                 the energy is the endpoint value",
                self.scale
            ));
        }
    }
}

/// Ground energy of `a |p| + b r` from the stored reference value:
/// `sqrt(ab) e`.
pub fn scaled_energy_linear(a: f64, b: f64) -> Result<f64, SolverError> {
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
        return Err(SolverError::InvalidHamiltonian(format!(
            "linear scaling requires a, b > 0, got ({a}, {b})"
        )));
    }
    Ok((a * b).sqrt() * LINEAR_REFERENCE_ENERGY)
}

#[cfg(test)]
mod tests;
