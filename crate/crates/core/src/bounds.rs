//! N-boson energy bounds from reduced one-body problems.
//!
//! Every lower bound here has the form `N · inf spec(sqrt(λ p² + m²) + (N-1)/2 · V)`
//! and differs from the others only in `λ`:
//!
//! | bound        | `λ`            | valid for          |
//! |--------------|----------------|--------------------|
//! | N/2          | 1              | N ≥ 2              |
//! | N/3          | 4/3            | N ≥ 3              |
//! | N/4          | 3/2            | N ≥ 4, m = 0       |
//! | model (`H_c`)| 2(N-1)/N       | proven in special cases, conjectured otherwise |
//!
//! The upper bound evaluates the Hamiltonian in a product Gaussian over the
//! Jacobi relative coordinates, which reduces to a Gaussian expectation of
//! the same one-body operator with the model-bound `λ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potentials::PairPotential;
use crate::solver::quadrature::RadialRule;
use crate::solver::{
    ground_energy, minimize_log_scale, radial_functions, ReducedHamiltonian, SolverConfig,
    SolverError, SpectrumResult, LINEAR_REFERENCE_ENERGY,
};

/// Scale interval and relative tolerance for the single-Gaussian search.
pub const GAUSSIAN_SCALE_INTERVAL: (f64, f64) = (1e-3, 1e3);
pub const GAUSSIAN_SCALE_TOLERANCE: f64 = 1e-7;

/// Relative slack allowed when checking `upper >= lower`.
pub const SANDWICH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("{bound} bound unavailable: {reason}")]
    Unavailable { bound: &'static str, reason: String },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("internal error: upper bound {upper} is below the {bound} lower bound {lower}")]
    SandwichViolation {
        bound: &'static str,
        lower: f64,
        upper: f64,
    },
}

/// N identical bosons of mass `m` with pair potential `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n: usize,
    pub mass: f64,
    pub potential: PairPotential,
}

impl ProblemSpec {
    pub fn new(n: usize, mass: f64, potential: PairPotential) -> Result<Self, BoundsError> {
        let spec = Self { n, mass, potential };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        if self.n < 2 {
            return Err(BoundsError::InvalidProblem(format!(
                "particle count must be >= 2, got {}",
                self.n
            )));
        }
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            return Err(BoundsError::InvalidProblem(format!(
                "mass must be non-negative, got {}",
                self.mass
            )));
        }
        self.potential
            .validate()
            .map_err(|e| BoundsError::InvalidProblem(e.to_string()))
    }

    /// Number of pairs, `N(N-1)/2`.
    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    fn n_f64(&self) -> f64 {
        self.n as f64
    }

    /// Potential coupling of every reduced operator, `(N-1)/2`.
    fn reduced_coupling(&self) -> f64 {
        (self.n_f64() - 1.0) / 2.0
    }

    /// `λ = 2(N-1)/N` of the model Hamiltonian.
    pub fn model_lambda(&self) -> f64 {
        2.0 * (self.n_f64() - 1.0) / self.n_f64()
    }
}

/// Which reduction a lower bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundKind {
    N2,
    N3,
    N4,
    Conjectured,
}

impl LowerBoundKind {
    pub fn key(self) -> &'static str {
        match self {
            Self::N2 => "n2",
            Self::N3 => "n3",
            Self::N4 => "n4",
            Self::Conjectured => "conjectured",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::N2 => "N/2 reduction: pair kinetic energy, lambda = 1",
            Self::N3 => "N/3 reduction: three-body kinetic inequality, lambda = 4/3",
            Self::N4 => "N/4 reduction: four-body kinetic inequality (m = 0), lambda = 3/2",
            Self::Conjectured => "model Hamiltonian reduction, lambda = 2(N-1)/N",
        }
    }

    fn lambda(self, spec: &ProblemSpec) -> f64 {
        match self {
            Self::N2 => 1.0,
            Self::N3 => 4.0 / 3.0,
            Self::N4 => 1.5,
            Self::Conjectured => spec.model_lambda(),
        }
    }

    /// Why this bound does not apply to `spec`, if it doesn't.
    pub fn unavailable_reason(self, spec: &ProblemSpec) -> Option<String> {
        match self {
            Self::N3 if spec.n < 3 => Some("requires N>=3".into()),
            Self::N4 if spec.n < 4 => Some("requires N>=4".into()),
            Self::N4 if spec.mass != 0.0 => Some("requires m=0".into()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum ConjectureStatus {
    Proven(String),
    Conjectured,
}

impl ConjectureStatus {
    pub fn for_problem(spec: &ProblemSpec) -> Self {
        match (spec.n, spec.mass == 0.0, spec.potential) {
            (2, _, _) => Self::Proven("N=2: exact two-body reduction".into()),
            (3, _, _) => Self::Proven("N=3: three-body kinetic inequality, any m>=0".into()),
            (4, true, _) => Self::Proven("N=4, m=0: regular-tetrahedron inequality".into()),
            (_, _, PairPotential::Harmonic { .. }) => {
                Self::Proven("harmonic pair potential: quadratic Jacobi identities".into())
            }
            _ => Self::Conjectured,
        }
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, Self::Proven(_))
    }
}

/// One lower bound with the solver diagnostics behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub kind: LowerBoundKind,
    pub value: f64,
    /// `N · (E0 - convergence_estimate)`.
    pub conservative_value: f64,
    pub reduced: ReducedHamiltonian,
    pub spectrum: SpectrumResult,
}

const SCALE_INVARIANT_WARNING: &str =
    "massless Coulomb problem is scale invariant: the infimum 0 is approached as the scale goes to 0 and is not attained";

/// `m = 0` with `V ∝ -1/r`: kinetic and potential terms both scale like
/// `σ`, so a subcritical operator has infimum exactly 0.
fn scale_invariant(spec: &ProblemSpec) -> bool {
    spec.mass == 0.0 && spec.potential.homogeneity_degree() == Some(-1.0)
}

fn scale_invariant_spectrum(cfg: &SolverConfig) -> SpectrumResult {
    SpectrumResult {
        ground_energy: 0.0,
        optimal_basis_scale: 0.0,
        coefficients: Vec::new(),
        convergence_estimate: 0.0,
        comparison_basis_size: None,
        basis_size: cfg.basis_size,
        quadrature_change: 0.0,
        at_scale_boundary: false,
        warnings: vec![SCALE_INVARIANT_WARNING.to_string()],
    }
}

fn reduced_lower(
    spec: &ProblemSpec,
    kind: LowerBoundKind,
    cfg: &SolverConfig,
) -> Result<BoundEntry, BoundsError> {
    spec.validate()?;
    if let Some(reason) = kind.unavailable_reason(spec) {
        return Err(BoundsError::Unavailable {
            bound: kind.key(),
            reason,
        });
    }
    let reduced = ReducedHamiltonian::new(
        1.0,
        kind.lambda(spec),
        spec.reduced_coupling(),
        spec.mass,
        spec.potential,
    )?;
    let spectrum = if scale_invariant(spec) {
        cfg.validate()?;
        reduced.check_stability()?;
        scale_invariant_spectrum(cfg)
    } else {
        ground_energy(&reduced, cfg)?
    };
    let n = spec.n_f64();
    Ok(BoundEntry {
        kind,
        value: n * spectrum.ground_energy,
        conservative_value: n * (spectrum.ground_energy - spectrum.convergence_estimate),
        reduced,
        spectrum,
    })
}

pub fn lower_n2(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<BoundEntry, BoundsError> {
    reduced_lower(spec, LowerBoundKind::N2, cfg)
}

pub fn lower_n3(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<BoundEntry, BoundsError> {
    reduced_lower(spec, LowerBoundKind::N3, cfg)
}

pub fn lower_n4(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<BoundEntry, BoundsError> {
    reduced_lower(spec, LowerBoundKind::N4, cfg)
}

pub fn conjectured_lower(
    spec: &ProblemSpec,
    cfg: &SolverConfig,
) -> Result<(BoundEntry, ConjectureStatus), BoundsError> {
    let entry = reduced_lower(spec, LowerBoundKind::Conjectured, cfg)?;
    Ok((entry, ConjectureStatus::for_problem(spec)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianUpper {
    pub value: f64,
    /// Optimal momentum scale of the Gaussian.
    pub scale: f64,
    pub at_scale_boundary: bool,
    pub warnings: Vec<String>,
}

/// Upper bound from the product Gaussian trial state, minimized over its
/// scale: `min_σ N ⟨sqrt(2(N-1)/N p² + m²)⟩_σ + γ ⟨V⟩_σ`.
pub fn gaussian_upper(spec: &ProblemSpec, quadrature_order: usize) -> Result<GaussianUpper, BoundsError> {
    spec.validate()?;
    if quadrature_order < 16 {
        return Err(SolverError::InvalidConfig(format!(
            "quadrature_order must be >= 16, got {quadrature_order}"
        ))
        .into());
    }
    let stability = ReducedHamiltonian::new(
        1.0,
        spec.model_lambda(),
        spec.reduced_coupling(),
        spec.mass,
        spec.potential,
    )?;
    stability.check_stability()?;
    if scale_invariant(spec) {
        return Ok(GaussianUpper {
            value: 0.0,
            scale: 0.0,
            at_scale_boundary: false,
            warnings: vec![SCALE_INVARIANT_WARNING.to_string()],
        });
    }

    let rule = RadialRule::new(quadrature_order, RadialRule::oscillator_cutoff(1));
    // |R_0(x)|² x² w at each node
    let density: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| {
            let r0 = radial_functions(1, x)[0];
            r0 * r0 * x * x * w
        })
        .collect();
    let (n, lambda, m) = (spec.n_f64(), spec.model_lambda(), spec.mass);
    let pairs = spec.pair_count() as f64;
    let energy = |scale: f64| -> Result<f64, BoundsError> {
        let mut kinetic = 0.0;
        let mut potential = 0.0;
        for (&x, &d) in rule.nodes.iter().zip(&density) {
            let lp2 = lambda * (scale * x).powi(2);
            kinetic += d * lp2 / ((lp2 + m * m).sqrt() + m);
            potential += d * spec.potential.value_unchecked(x / scale);
        }
        Ok(n * (m + kinetic) + pairs * potential)
    };
    let best = minimize_log_scale(GAUSSIAN_SCALE_INTERVAL, GAUSSIAN_SCALE_TOLERANCE, energy)?;
    let mut warnings = Vec::new();
    best.push_boundary_warning(GAUSSIAN_SCALE_INTERVAL, &mut warnings);
    Ok(GaussianUpper {
        value: best.value,
        scale: best.scale,
        at_scale_boundary: best.at_boundary,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub problem: ProblemSpec,
    pub lower_n2: BoundEntry,
    pub lower_n3: Option<BoundEntry>,
    pub lower_n4: Option<BoundEntry>,
    pub lower_conjectured: BoundEntry,
    pub conjecture_status: ConjectureStatus,
    pub upper_gaussian: GaussianUpper,
    /// Reasons for absent optional bounds, keyed by bound key.
    pub absent: BTreeMap<String, String>,
}

impl BoundSet {
    pub fn lowers(&self) -> impl Iterator<Item = &BoundEntry> {
        std::iter::once(&self.lower_n2)
            .chain(self.lower_n3.as_ref())
            .chain(self.lower_n4.as_ref())
            .chain(std::iter::once(&self.lower_conjectured))
    }

    /// Checks `upper >= lower` for every present lower bound.
    pub fn check_sandwich(&self) -> Result<(), BoundsError> {
        let upper = self.upper_gaussian.value;
        for entry in self.lowers() {
            let slack = SANDWICH_TOLERANCE * upper.abs().max(entry.value.abs());
            if entry.value > upper + slack {
                return Err(BoundsError::SandwichViolation {
                    bound: entry.kind.key(),
                    lower: entry.value,
                    upper,
                });
            }
        }
        Ok(())
    }
}

fn optional(
    spec: &ProblemSpec,
    kind: LowerBoundKind,
    cfg: &SolverConfig,
    absent: &mut BTreeMap<String, String>,
) -> Result<Option<BoundEntry>, BoundsError> {
    match kind.unavailable_reason(spec) {
        Some(reason) => {
            absent.insert(kind.key().to_string(), reason);
            Ok(None)
        }
        None => reduced_lower(spec, kind, cfg).map(Some),
    }
}

/// All applicable bounds for `spec`; fails if the upper bound falls below
/// any lower bound.
pub fn compute_bounds(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<BoundSet, BoundsError> {
    spec.validate()?;
    let mut absent = BTreeMap::new();
    let lower_n2 = lower_n2(spec, cfg)?;
    let lower_n3 = optional(spec, LowerBoundKind::N3, cfg, &mut absent)?;
    let lower_n4 = optional(spec, LowerBoundKind::N4, cfg, &mut absent)?;
    let (lower_conjectured, conjecture_status) = conjectured_lower(spec, cfg)?;
    let upper_gaussian = gaussian_upper(spec, cfg.quadrature_order)?;
    let set = BoundSet {
        problem: *spec,
        lower_n2,
        lower_n3,
        lower_n4,
        lower_conjectured,
        conjecture_status,
        upper_gaussian,
        absent,
    };
    set.check_sandwich()?;
    Ok(set)
}

/// Closed-form bounds for `V(r) = r`, `m = 0`, from the reference energy `e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearBounds {
    pub n: usize,
    pub lower_n2: f64,
    pub lower_n3: Option<f64>,
    pub lower_n4: Option<f64>,
    pub lower_conjectured: f64,
    pub upper_gaussian: f64,
}

pub fn linear_bound_table(n: usize) -> Result<LinearBounds, BoundsError> {
    if n < 2 {
        return Err(BoundsError::InvalidProblem(format!(
            "particle count must be >= 2, got {n}"
        )));
    }
    let e = LINEAR_REFERENCE_ENERGY;
    let nf = n as f64;
    let k = nf - 1.0;
    Ok(LinearBounds {
        n,
        lower_n2: nf * (k / 2.0).sqrt() * e,
        lower_n3: (n >= 3).then(|| nf * (k / 3f64.sqrt()).sqrt() * e),
        lower_n4: (n >= 4).then(|| nf * (3.0 * k * k / 8.0).powf(0.25) * e),
        lower_conjectured: nf * (k.powi(3) / (2.0 * nf)).powf(0.25) * e,
        upper_gaussian: 4.0 * nf * (k.powi(3) / (2.0 * nf * PI * PI)).powf(0.25),
    })
}

/// A column of the upper/lower ratio table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableColumn {
    Finite(usize),
    Infinity,
}

impl std::fmt::Display for TableColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(n) => write!(f, "{n}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

/// `R_X = E_g^U / E_X^L` for one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioColumn {
    pub column: TableColumn,
    pub r_n2: Option<f64>,
    pub r_n3: Option<f64>,
    pub r_n4: Option<f64>,
    pub r_c: Option<f64>,
}

/// The columns of the published table: N = 2, 3, 4, 5, 6, 10 and N → ∞.
pub const PUBLISHED_COLUMNS: [TableColumn; 7] = [
    TableColumn::Finite(2),
    TableColumn::Finite(3),
    TableColumn::Finite(4),
    TableColumn::Finite(5),
    TableColumn::Finite(6),
    TableColumn::Finite(10),
    TableColumn::Infinity,
];

/// `4 / (sqrt(π) e)`, the N-independent model-bound ratio.
pub fn conjectured_ratio() -> f64 {
    4.0 / (PI.sqrt() * LINEAR_REFERENCE_ENERGY)
}

/// Large-N limits of the ratios. Each ratio is `(4/e) (c (N-1)/(N π²))^{1/4}`
/// with `c = 2, 3/2, 4/3` for the N/2, N/3, N/4 bounds.
fn limit_ratio(c: f64) -> f64 {
    4.0 / LINEAR_REFERENCE_ENERGY * (c / (PI * PI)).powf(0.25)
}

pub fn ratio_column(column: TableColumn) -> Result<RatioColumn, BoundsError> {
    match column {
        TableColumn::Finite(n) => {
            let t = linear_bound_table(n)?;
            let ratio = |lower: f64| t.upper_gaussian / lower;
            Ok(RatioColumn {
                column,
                r_n2: Some(ratio(t.lower_n2)),
                r_n3: t.lower_n3.map(ratio),
                r_n4: t.lower_n4.map(ratio),
                r_c: Some(ratio(t.lower_conjectured)),
            })
        }
        TableColumn::Infinity => Ok(RatioColumn {
            column,
            r_n2: Some(limit_ratio(2.0)),
            r_n3: Some(limit_ratio(1.5)),
            r_n4: Some(limit_ratio(4.0 / 3.0)),
            r_c: Some(conjectured_ratio()),
        }),
    }
}

pub fn ratio_table(columns: &[TableColumn]) -> Result<Vec<RatioColumn>, BoundsError> {
    columns.iter().map(|&c| ratio_column(c)).collect()
}
