//! Radial s-wave oscillator functions in three dimensions.
//!
//! `R_n(x) = sqrt(2) exp(-x²/2) ℓ_n(x²)` with `ℓ_n` the orthonormal
//! generalized Laguerre polynomial of order 1/2, normalized on
//! `x² dx`. The 3-d Fourier transform maps `R_n(r)` to `(-1)^n R_n(p)`.

use nalgebra::DMatrix;

use super::quadrature::RadialRule;

const ALPHA: f64 = 0.5;

/// Values `R_0(x) .. R_{size-1}(x)`.
pub fn radial_functions(size: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(size);
    if size == 0 {
        return out;
    }
    let y = x * x;
    // 1/sqrt(Γ(3/2)) = sqrt(2) / π^{1/4}
    let l0 = std::f64::consts::SQRT_2 / std::f64::consts::PI.powf(0.25);
    let envelope = std::f64::consts::SQRT_2 * (-0.5 * y).exp();
    out.push(envelope * l0);
    if size == 1 {
        return out;
    }
    let mut prev2 = l0;
    let mut prev1 = (1.0 + ALPHA - y) * l0 / (1.0 + ALPHA).sqrt();
    out.push(envelope * prev1);
    for n in 2..size {
        let nf = n as f64;
        let next = ((2.0 * nf - 1.0 + ALPHA - y) * prev1
            - ((nf - 1.0) * (nf - 1.0 + ALPHA)).sqrt() * prev2)
            / (nf * (nf + ALPHA)).sqrt();
        out.push(envelope * next);
        prev2 = prev1;
        prev1 = next;
    }
    out
}

/// Basis functions tabulated on a half-line rule, with `x² w` folded in.
#[derive(Debug, Clone)]
pub struct BasisTable {
    pub size: usize,
    pub nodes: Vec<f64>,
    /// `x_k² w_k`
    pub measure: Vec<f64>,
    /// `values[(n, k)] = R_n(x_k)`
    pub values: DMatrix<f64>,
}

impl BasisTable {
    pub fn new(size: usize, order: usize) -> Self {
        let rule = RadialRule::new(order, RadialRule::oscillator_cutoff(size));
        let mut values = DMatrix::zeros(size, order);
        for (k, &x) in rule.nodes.iter().enumerate() {
            for (n, r) in radial_functions(size, x).into_iter().enumerate() {
                values[(n, k)] = r;
            }
        }
        let measure = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| x * x * w)
            .collect();
        Self {
            size,
            nodes: rule.nodes,
            measure,
            values,
        }
    }

    /// `A_ij = s_ij ∫ R_i R_j f x² dx`, upper triangle computed then mirrored;
    /// `s_ij = (-1)^{i+j}` when `momentum_signs` is set.
    pub fn operator_matrix(&self, f: impl Fn(f64) -> f64, momentum_signs: bool) -> DMatrix<f64> {
        let weighted: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.measure)
            .map(|(&x, &m)| m * f(x))
            .collect();
        let m = self.size;
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            let ri = self.values.row(i);
            for j in i..m {
                let rj = self.values.row(j);
                let mut acc = 0.0;
                for k in 0..weighted.len() {
                    acc += ri[k] * rj[k] * weighted[k];
                }
                if momentum_signs && (i + j) % 2 == 1 {
                    acc = -acc;
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_function_matches_closed_form() {
        let c = 2.0 / std::f64::consts::PI.powf(0.25);
        for x in [0.0, 0.3, 1.0, 2.5] {
            let r = radial_functions(1, x)[0];
            assert!((r - c * (-0.5 * x * x).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn orthonormal_on_quadrature() {
        let table = BasisTable::new(40, 200);
        let overlap = table.operator_matrix(|_| 1.0, false);
        let err = (overlap - DMatrix::<f64>::identity(40, 40)).abs().max();
        assert!(err < 1e-12, "overlap error {err}");
    }

    #[test]
    fn first_excited_function_explicit() {
        // L_1^{1/2}(y) = 3/2 - y, normalization sqrt(1!/Γ(5/2))
        let gamma_5_2 = 0.75 * std::f64::consts::PI.sqrt();
        for x in [0.2f64, 1.1, 3.0] {
            let expect = std::f64::consts::SQRT_2
                * (-0.5 * x * x).exp()
                * (1.5 - x * x)
                / gamma_5_2.sqrt();
            assert!((radial_functions(2, x)[1] - expect).abs() < 1e-14);
        }
    }
}
