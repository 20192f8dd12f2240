use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::DeltaError;

pub type Vec3 = [f64; 3];

fn norm_sq(v: &Vec3) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Particle momenta with vanishing sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumConfiguration {
    momenta: Vec<Vec3>,
}

impl MomentumConfiguration {
    /// Accepts `momenta` if `|Σ p_i| <= 1e-12 · max(1, max |p_i|)`.
    pub fn new(momenta: Vec<Vec3>) -> Result<Self, DeltaError> {
        let mut total = [0.0; 3];
        let mut scale: f64 = 1.0;
        for p in &momenta {
            for c in 0..3 {
                total[c] += p[c];
            }
            scale = scale.max(norm_sq(p).sqrt());
        }
        let residual = norm_sq(&total).sqrt();
        if !residual.is_finite() || residual > 1e-12 * scale {
            return Err(DeltaError::NonzeroTotalMomentum(residual));
        }
        Ok(Self { momenta })
    }

    pub fn momenta(&self) -> &[Vec3] {
        &self.momenta
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }
}

/// `δ(m, N)` at one configuration; `N` is the number of momenta.
pub fn delta_value(m: f64, n: usize, config: &MomentumConfiguration) -> Result<f64, DeltaError> {
    if n < 2 {
        return Err(DeltaError::InvalidParameter(format!("N must be >= 2, got {n}")));
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(DeltaError::InvalidParameter(format!("mass must be >= 0, got {m}")));
    }
    if config.len() != n {
        return Err(DeltaError::WrongCount {
            expected: n,
            got: config.len(),
        });
    }
    Ok(delta_unchecked(m, config.momenta()))
}

pub(super) fn delta_unchecked(m: f64, p: &[Vec3]) -> f64 {
    let n = p.len();
    let m2 = m * m;
    let c = (n as f64 - 1.0) / (2.0 * n as f64);
    let single: f64 = p.iter().map(|v| (norm_sq(v) + m2).sqrt()).sum();
    let mut pairs = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            pairs += (c * norm_sq(&sub(&p[i], &p[j])) + m2).sqrt();
        }
    }
    single - 2.0 / (n as f64 - 1.0) * pairs
}

/// `Σ p_i² - (1/N) Σ_{i<j} (p_i - p_j)² - (1/N) (Σ p_i)²`, identically zero.
pub fn pair_sum_identity_residual(p: &[Vec3]) -> f64 {
    let n = p.len() as f64;
    let squares: f64 = p.iter().map(norm_sq).sum();
    let mut pairs = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            pairs += norm_sq(&sub(&p[i], &p[j]));
        }
    }
    let mut total = [0.0; 3];
    for v in p {
        for c in 0..3 {
            total[c] += v[c];
        }
    }
    squares - pairs / n - norm_sq(&total) / n
}

/// Orthogonal Jacobi matrix `B`: row 1 is `1/sqrt(N)`, row `k >= 2` is
/// `(1, .., 1, -(k-1), 0, ..) / sqrt(k(k-1))`. `[π] = B [p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiFrame {
    pub n: usize,
    pub b: DMatrix<f64>,
}

impl JacobiFrame {
    pub fn new(n: usize) -> Result<Self, DeltaError> {
        if n < 2 {
            return Err(DeltaError::InvalidParameter(format!("N must be >= 2, got {n}")));
        }
        let mut b = DMatrix::zeros(n, n);
        let first = 1.0 / (n as f64).sqrt();
        for j in 0..n {
            b[(0, j)] = first;
        }
        for k in 2..=n {
            let kf = k as f64;
            let norm = 1.0 / (kf * (kf - 1.0)).sqrt();
            for j in 0..k - 1 {
                b[(k - 1, j)] = norm;
            }
            b[(k - 1, k - 1)] = -(kf - 1.0) * norm;
        }
        Ok(Self { n, b })
    }

    /// `max |BᵀB - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let id = DMatrix::<f64>::identity(self.n, self.n);
        (self.b.transpose() * &self.b - id).abs().max()
    }

    fn apply(&self, transpose: bool, v: &[Vec3]) -> Vec<Vec3> {
        let mut out = vec![[0.0; 3]; self.n];
        for (r, o) in out.iter_mut().enumerate() {
            for (s, x) in v.iter().enumerate() {
                let w = if transpose { self.b[(s, r)] } else { self.b[(r, s)] };
                if w != 0.0 {
                    for c in 0..3 {
                        o[c] += w * x[c];
                    }
                }
            }
        }
        out
    }
}

/// `[π] = B [p]`.
pub fn jacobi_transform(frame: &JacobiFrame, p: &[Vec3]) -> Result<Vec<Vec3>, DeltaError> {
    check_len(frame, p)?;
    Ok(frame.apply(false, p))
}

/// `[p] = Bᵀ [π]`.
pub fn jacobi_inverse(frame: &JacobiFrame, pi: &[Vec3]) -> Result<Vec<Vec3>, DeltaError> {
    check_len(frame, pi)?;
    Ok(frame.apply(true, pi))
}

fn check_len(frame: &JacobiFrame, v: &[Vec3]) -> Result<(), DeltaError> {
    if v.len() != frame.n {
        return Err(DeltaError::WrongCount {
            expected: frame.n,
            got: v.len(),
        });
    }
    Ok(())
}

/// Height `h` and circumradius `k` of a regular tetrahedron with edge `q`.
pub fn tetrahedron_relations(q: f64) -> Result<(f64, f64), DeltaError> {
    if !(q.is_finite() && q > 0.0) {
        return Err(DeltaError::InvalidParameter(format!("edge must be > 0, got {q}")));
    }
    Ok(((2.0f64 / 3.0).sqrt() * q, (3.0f64 / 8.0).sqrt() * q))
}

/// Vertices of a regular tetrahedron with edge `q`, centred at the origin.
pub fn regular_tetrahedron(q: f64) -> [Vec3; 4] {
    // alternate cube vertices have edge 2 sqrt(2)
    let s = q / (2.0 * std::f64::consts::SQRT_2);
    [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
}

/// Three vectors of length `radius` at mutual angles of 120° in the xy plane.
pub fn equilateral_triangle(radius: f64) -> [Vec3; 3] {
    let h = 3f64.sqrt() / 2.0 * radius;
    [[radius, 0.0, 0.0], [-radius / 2.0, h, 0.0], [-radius / 2.0, -h, 0.0]]
}
