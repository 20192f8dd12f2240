use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{delta_unchecked, pair_sum_identity_residual, JacobiFrame, Vec3};
use super::{DeltaError, MomentumConfiguration};

pub const DEFAULT_SHARDS: usize = 16;
pub const MIN_SAMPLES: usize = 10_000;

/// One mixture component over `(π_2, .., π_N)`, flattened to `3(N-1)` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub weight: f64,
    pub center: Vec<f64>,
    pub width: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizedGaussianState {
    pub n: usize,
    pub components: Vec<GaussianComponent>,
    /// Average the distribution over all particle permutations.
    pub symmetrized: bool,
}

impl SymmetrizedGaussianState {
    /// Normalizes the weights and validates.
    pub fn new(
        n: usize,
        mut components: Vec<GaussianComponent>,
        symmetrized: bool,
    ) -> Result<Self, DeltaError> {
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(DeltaError::InvalidState(format!(
                "weights must have a positive finite sum, got {total}"
            )));
        }
        for c in &mut components {
            c.weight /= total;
        }
        let state = Self {
            n,
            components,
            symmetrized,
        };
        state.validate()?;
        Ok(state)
    }

    /// Centred, equal widths in every Jacobi direction.
    pub fn isotropic(n: usize, width: f64) -> Result<Self, DeltaError> {
        let dim = 3 * n.saturating_sub(1);
        Self::new(
            n,
            vec![GaussianComponent {
                weight: 1.0,
                center: vec![0.0; dim],
                width: vec![width; dim],
            }],
            true,
        )
    }

    pub fn dimension(&self) -> usize {
        3 * (self.n - 1)
    }

    pub fn validate(&self) -> Result<(), DeltaError> {
        if self.n < 2 {
            return Err(DeltaError::InvalidState(format!("N must be >= 2, got {}", self.n)));
        }
        if self.components.is_empty() {
            return Err(DeltaError::InvalidState("no mixture components".into()));
        }
        let dim = self.dimension();
        let mut total = 0.0;
        for (i, c) in self.components.iter().enumerate() {
            if c.center.len() != dim || c.width.len() != dim {
                return Err(DeltaError::InvalidState(format!(
                    "component {i}: center and width need {dim} entries"
                )));
            }
            if c.center.iter().any(|x| !x.is_finite()) {
                return Err(DeltaError::InvalidState(format!("component {i}: non-finite center")));
            }
            if c.width.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(DeltaError::InvalidState(format!(
                    "component {i}: widths must be positive"
                )));
            }
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(DeltaError::InvalidState(format!(
                    "component {i}: weight must be non-negative"
                )));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(DeltaError::InvalidState(format!("weights sum to {total}, expected 1")));
        }
        Ok(())
    }
}

/// Draws configurations for one shard of the sample stream.
struct ShardSampler<'a> {
    state: &'a SymmetrizedGaussianState,
    frame: &'a JacobiFrame,
    picker: WeightedIndex<f64>,
    rng: ChaCha8Rng,
    pi: Vec<Vec3>,
    perm: Vec<usize>,
}

impl<'a> ShardSampler<'a> {
    fn new(state: &'a SymmetrizedGaussianState, frame: &'a JacobiFrame, seed: u64, shard: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard as u64);
        let picker = WeightedIndex::new(state.components.iter().map(|c| c.weight))
            .expect("validated weights");
        Self {
            state,
            frame,
            picker,
            rng,
            pi: vec![[0.0; 3]; state.n],
            perm: (0..state.n).collect(),
        }
    }

    fn draw(&mut self, out: &mut [Vec3]) {
        let comp = &self.state.components[self.picker.sample(&mut self.rng)];
        for k in 1..self.state.n {
            for c in 0..3 {
                let idx = 3 * (k - 1) + c;
                let z: f64 = StandardNormal.sample(&mut self.rng);
                self.pi[k][c] = comp.center[idx] + comp.width[idx] * z;
            }
        }
        let n = self.state.n;
        for (j, o) in out.iter_mut().enumerate() {
            *o = [0.0; 3];
            for k in 1..n {
                let w = self.frame.b[(k, j)];
                if w != 0.0 {
                    for (oc, pc) in o.iter_mut().zip(&self.pi[k]) {
                        *oc += w * pc;
                    }
                }
            }
        }
        if self.state.symmetrized {
            self.perm.shuffle(&mut self.rng);
            let tmp: Vec<Vec3> = self.perm.iter().map(|&i| out[i]).collect();
            out.copy_from_slice(&tmp);
        }
    }
}

fn shard_sizes(count: usize, shards: usize) -> Vec<usize> {
    let base = count / shards;
    let extra = count % shards;
    (0..shards).map(|s| base + usize::from(s < extra)).collect()
}

fn check_shards(shards: usize) -> Result<(), DeltaError> {
    if shards == 0 {
        return Err(DeltaError::InvalidParameter("shard count must be >= 1".into()));
    }
    Ok(())
}

/// `count` configurations from `state`, in shard order; deterministic in
/// `(state, count, seed, shards)`.
pub fn sample_momenta(
    state: &SymmetrizedGaussianState,
    count: usize,
    seed: u64,
    shards: usize,
) -> Result<Vec<MomentumConfiguration>, DeltaError> {
    state.validate()?;
    check_shards(shards)?;
    if count == 0 {
        return Err(DeltaError::InvalidParameter("count must be >= 1".into()));
    }
    let frame = JacobiFrame::new(state.n)?;
    let sizes = shard_sizes(count, shards);
    let parts: Vec<Vec<MomentumConfiguration>> = sizes
        .par_iter()
        .enumerate()
        .map(|(shard, &size)| {
            let mut sampler = ShardSampler::new(state, &frame, seed, shard);
            let mut buf = vec![[0.0; 3]; state.n];
            (0..size)
                .map(|_| {
                    sampler.draw(&mut buf);
                    MomentumConfiguration::new(buf.clone())
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Streaming mean and variance with a pairwise merge.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Self) {
        if other.count == 0.0 {
            return;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        self.mean += d * other.count / count;
        self.m2 += other.m2 + d * d * self.count * other.count / count;
        self.count = count;
    }

    fn standard_error(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.count - 1.0) / self.count).sqrt()
    }
}

#[derive(Debug, Clone)]
struct DeltaAccumulator {
    delta: Welford,
    k: Vec<Welford>,
    q: Vec<Welford>,
}

impl DeltaAccumulator {
    fn new(n: usize) -> Self {
        Self {
            delta: Welford::default(),
            k: vec![Welford::default(); n],
            q: vec![Welford::default(); n * (n - 1) / 2],
        }
    }

    fn push(&mut self, m: f64, p: &[Vec3]) {
        let n = p.len();
        let m2 = m * m;
        let c = (n as f64 - 1.0) / (2.0 * n as f64);
        for (acc, v) in self.k.iter_mut().zip(p) {
            acc.push((v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + m2).sqrt());
        }
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                let d = [p[i][0] - p[j][0], p[i][1] - p[j][1], p[i][2] - p[j][2]];
                self.q[idx].push((c * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) + m2).sqrt());
                idx += 1;
            }
        }
        self.delta.push(delta_unchecked(m, p));
    }

    fn merge(&mut self, other: &Self) {
        self.delta.merge(&other.delta);
        for (a, b) in self.k.iter_mut().zip(&other.k) {
            a.merge(b);
        }
        for (a, b) in self.q.iter_mut().zip(&other.q) {
            a.merge(b);
        }
    }
}

/// Monte Carlo estimate of `⟨δ(m, N)⟩` with per-particle `k_i = ⟨sqrt(p_i² + m²)⟩`
/// and per-pair `q_ij = ⟨sqrt((N-1)/(2N) (p_i - p_j)² + m²)⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaStats {
    pub n: usize,
    pub mass: f64,
    pub sample_count: usize,
    pub mean: f64,
    pub standard_error: f64,
    pub k: Vec<f64>,
    pub k_standard_error: Vec<f64>,
    /// Pairs `(i, j)`, `i < j`, in row-major order.
    pub q: Vec<f64>,
    pub q_standard_error: Vec<f64>,
    pub seed: u64,
    pub shard_count: usize,
}

impl DeltaStats {
    /// `mean / standard_error`; infinite sign of the mean if the error is zero.
    pub fn z_score(&self) -> f64 {
        if self.standard_error > 0.0 {
            self.mean / self.standard_error
        } else if self.mean < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }

    /// Each `k_i` and `q_ij` lies within 3 standard errors of its index average.
    pub fn symmetry_consistent(&self) -> bool {
        fn within(values: &[f64], errors: &[f64]) -> bool {
            let avg = values.iter().sum::<f64>() / values.len() as f64;
            values
                .iter()
                .zip(errors)
                .all(|(v, e)| (v - avg).abs() <= 3.0 * e)
        }
        within(&self.k, &self.k_standard_error) && within(&self.q, &self.q_standard_error)
    }
}

pub fn expectation_delta(
    state: &SymmetrizedGaussianState,
    m: f64,
    n: usize,
    samples: usize,
    seed: u64,
    shards: usize,
) -> Result<DeltaStats, DeltaError> {
    state.validate()?;
    check_shards(shards)?;
    if state.n != n {
        return Err(DeltaError::WrongCount {
            expected: n,
            got: state.n,
        });
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(DeltaError::InvalidParameter(format!("mass must be >= 0, got {m}")));
    }
    if samples < MIN_SAMPLES {
        return Err(DeltaError::InvalidParameter(format!(
            "samples must be >= {MIN_SAMPLES}, got {samples}"
        )));
    }
    let frame = JacobiFrame::new(n)?;
    let parts: Vec<DeltaAccumulator> = shard_sizes(samples, shards)
        .par_iter()
        .enumerate()
        .map(|(shard, &size)| {
            let mut sampler = ShardSampler::new(state, &frame, seed, shard);
            let mut acc = DeltaAccumulator::new(n);
            let mut buf = vec![[0.0; 3]; n];
            for _ in 0..size {
                sampler.draw(&mut buf);
                acc.push(m, &buf);
            }
            acc
        })
        .collect();
    let mut total = DeltaAccumulator::new(n);
    for part in &parts {
        total.merge(part);
    }
    Ok(DeltaStats {
        n,
        mass: m,
        sample_count: samples,
        mean: total.delta.mean,
        standard_error: total.delta.standard_error(),
        k: total.k.iter().map(|w| w.mean).collect(),
        k_standard_error: total.k.iter().map(Welford::standard_error).collect(),
        q: total.q.iter().map(|w| w.mean).collect(),
        q_standard_error: total.q.iter().map(Welford::standard_error).collect(),
        seed,
        shard_count: shards,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticReport {
    pub skipped: bool,
    pub warnings: Vec<String>,
    /// `⟨π_i²⟩` for `i = 2..N`.
    pub pi_squared_mean: Vec<f64>,
    pub pi_squared_standard_error: Vec<f64>,
    /// Largest `|⟨π_i²⟩ - ⟨π_j²⟩|` in units of its standard error.
    pub max_separation: f64,
    /// Largest pointwise residual of the pair-sum identity, relative to
    /// `max(1, Σ p_i²)`.
    pub max_identity_residual: f64,
}

impl QuadraticReport {
    pub fn consistent(&self, separation_limit: f64) -> bool {
        !self.skipped && self.max_separation <= separation_limit && self.max_identity_residual <= 1e-12
    }
}

/// Checks that `⟨π_i²⟩` agrees across the relative Jacobi momenta and that
/// `Σ p_i² = (1/N) Σ_{i<j} (p_i - p_j)² + (1/N)(Σ p_i)²` on every sample.
pub fn quadratic_identities_check(
    state: &SymmetrizedGaussianState,
    samples: usize,
    seed: u64,
    shards: usize,
) -> Result<QuadraticReport, DeltaError> {
    state.validate()?;
    if !state.symmetrized {
        return Ok(QuadraticReport {
            skipped: true,
            warnings: vec!["state is not permutation-symmetrized; check skipped".into()],
            pi_squared_mean: Vec::new(),
            pi_squared_standard_error: Vec::new(),
            max_separation: 0.0,
            max_identity_residual: 0.0,
        });
    }
    let frame = JacobiFrame::new(state.n)?;
    let configs = sample_momenta(state, samples, seed, shards)?;
    let mut pi_sq = vec![Welford::default(); state.n - 1];
    let mut max_residual: f64 = 0.0;
    for cfg in &configs {
        let p = cfg.momenta();
        let pi = super::jacobi_transform(&frame, p)?;
        for (acc, v) in pi_sq.iter_mut().zip(&pi[1..]) {
            acc.push(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        }
        let scale = p.iter().map(|v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sum::<f64>();
        max_residual = max_residual.max(pair_sum_identity_residual(p).abs() / scale.max(1.0));
    }
    let mut max_separation: f64 = 0.0;
    for i in 0..pi_sq.len() {
        for j in i + 1..pi_sq.len() {
            let se = pi_sq[i].standard_error().hypot(pi_sq[j].standard_error());
            let gap = (pi_sq[i].mean - pi_sq[j].mean).abs();
            max_separation = max_separation.max(if se > 0.0 { gap / se } else { 0.0 });
        }
    }
    Ok(QuadraticReport {
        skipped: false,
        warnings: Vec::new(),
        pi_squared_mean: pi_sq.iter().map(|w| w.mean).collect(),
        pi_squared_standard_error: pi_sq.iter().map(Welford::standard_error).collect(),
        max_separation,
        max_identity_residual: max_residual,
    })
}
