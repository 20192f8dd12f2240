use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::sampling::{expectation_delta, DeltaStats, GaussianComponent, SymmetrizedGaussianState};
use super::DeltaError;

/// A mean below `-NEGATIVE_MEAN_THRESHOLD` standard errors is a finding.
pub const NEGATIVE_MEAN_THRESHOLD: f64 = 3.0;

const MAX_COMPONENTS: usize = 4;
const WIDTH_RANGE: (f64, f64) = (0.3, 3.0);
// keeps corpus generation off the shard streams of the same seed
const CORPUS_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    TheoremCovered,
    Conjectured,
}

impl Regime {
    /// `N = 2` (δ vanishes identically), `N = 3` for any mass, `N = 4` at `m = 0`.
    pub fn classify(n: usize, mass: f64) -> Self {
        match n {
            2 | 3 => Self::TheoremCovered,
            4 if mass == 0.0 => Self::TheoremCovered,
            _ => Self::Conjectured,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::TheoremCovered => "theorem-covered regime",
            Self::Conjectured => "conjectured regime",
        }
    }
}

/// Random symmetrized mixture: 1 to 4 components, centers from a unit
/// normal, widths log-uniform in `[0.3, 3]`, weights uniform then normalized.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<SymmetrizedGaussianState, DeltaError> {
    if n < 2 {
        return Err(DeltaError::InvalidParameter(format!("N must be >= 2, got {n}")));
    }
    let dim = 3 * (n - 1);
    let count = rng.random_range(1..=MAX_COMPONENTS);
    let (lo, hi) = (WIDTH_RANGE.0.ln(), WIDTH_RANGE.1.ln());
    let components = (0..count)
        .map(|_| GaussianComponent {
            // open at zero so every weight is positive
            weight: 1.0 - rng.random::<f64>(),
            center: (0..dim).map(|_| rng.sample(StandardNormal)).collect(),
            width: (0..dim).map(|_| rng.random_range(lo..=hi).exp()).collect(),
        })
        .collect();
    SymmetrizedGaussianState::new(n, components, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CorpusConfig {
    pub n: usize,
    pub mass: f64,
    pub states: usize,
    pub samples: usize,
    pub seed: u64,
    pub shards: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    /// Negative mean where a theorem applies.
    ImplementationBugSignal,
    /// Negative mean outside the proven regime.
    CounterEvidence,
}

/// Everything needed to reproduce one negative-mean state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub state_index: usize,
    pub n: usize,
    pub mass: f64,
    pub master_seed: u64,
    pub sample_seed: u64,
    pub shard_count: usize,
    pub sample_count: usize,
    pub mean: f64,
    pub standard_error: f64,
    pub z_score: f64,
    pub state: SymmetrizedGaussianState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateResult {
    pub index: usize,
    pub sample_seed: u64,
    pub state: SymmetrizedGaussianState,
    pub stats: DeltaStats,
    pub negative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AllNonnegative,
    Findings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub config: CorpusConfig,
    pub regime: Regime,
    pub regime_label: String,
    pub results: Vec<StateResult>,
    pub findings: Vec<Finding>,
    pub verdict: Verdict,
}

impl CorpusReport {
    /// A negative mean where a theorem applies.
    pub fn proven_regime_failure(&self) -> bool {
        self.regime == Regime::TheoremCovered && self.verdict == Verdict::Findings
    }
}

/// Draws `states` random states from the master seed and estimates `⟨δ⟩` on each.
pub fn run_corpus(config: &CorpusConfig) -> Result<CorpusReport, DeltaError> {
    if config.states == 0 {
        return Err(DeltaError::InvalidParameter("states must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(CORPUS_STREAM);
    let regime = Regime::classify(config.n, config.mass);
    let kind = match regime {
        Regime::TheoremCovered => FindingKind::ImplementationBugSignal,
        Regime::Conjectured => FindingKind::CounterEvidence,
    };
    let mut results = Vec::with_capacity(config.states);
    let mut findings = Vec::new();
    for index in 0..config.states {
        let state = random_state(&mut rng, config.n)?;
        let sample_seed: u64 = rng.random();
        let stats = expectation_delta(
            &state,
            config.mass,
            config.n,
            config.samples,
            sample_seed,
            config.shards,
        )?;
        let negative = stats.mean < -NEGATIVE_MEAN_THRESHOLD * stats.standard_error;
        if negative {
            findings.push(Finding {
                kind,
                state_index: index,
                n: config.n,
                mass: config.mass,
                master_seed: config.seed,
                sample_seed,
                shard_count: config.shards,
                sample_count: stats.sample_count,
                mean: stats.mean,
                standard_error: stats.standard_error,
                z_score: stats.z_score(),
                state: state.clone(),
            });
        }
        results.push(StateResult {
            index,
            sample_seed,
            state,
            stats,
            negative,
        });
    }
    let verdict = if findings.is_empty() {
        Verdict::AllNonnegative
    } else {
        Verdict::Findings
    };
    Ok(CorpusReport {
        config: *config,
        regime,
        regime_label: regime.label().to_string(),
        results,
        findings,
        verdict,
    })
}
