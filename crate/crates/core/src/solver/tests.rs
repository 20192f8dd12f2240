use super::*;
use std::f64::consts::PI;

fn two_over_sqrt_pi() -> f64 {
    2.0 / PI.sqrt()
}

fn linear() -> PairPotential {
    PairPotential::linear(1.0).unwrap()
}

/// Composite Simpson on [0, r_max]; independent of the Gauss–Legendre path.
fn simpson(f: impl Fn(f64) -> f64, r_max: f64, intervals: usize) -> f64 {
    let h = r_max / intervals as f64;
    let mut s = f(0.0) + f(r_max);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn kinetic_single_gaussian_massless() {
    let k = kinetic_matrix(1.0, 1.0, 0.0, 1, 1.0, 200).unwrap();
    assert!((k.matrix[(0, 0)] - two_over_sqrt_pi()).abs() < 1e-13);
    assert!(k.warnings.is_empty());
    for sigma in [0.1, 0.7, 3.0, 12.0] {
        let k = kinetic_matrix(1.0, 1.0, 0.0, 1, sigma, 200).unwrap();
        assert!((k.matrix[(0, 0)] - sigma * two_over_sqrt_pi()).abs() < 1e-12 * sigma);
    }
}

#[test]
fn kinetic_single_gaussian_heavy() {
    let k = kinetic_matrix(1.0, 1.0, 1000.0, 1, 1.0, 200).unwrap();
    let expect = 1000.0 + 1.5 / 2000.0;
    assert!(((k.matrix[(0, 0)] - expect) / expect).abs() < 1e-6);
}

#[test]
fn potential_single_gaussian() {
    let lin = potential_matrix(&linear(), 1.0, 1, 1.0, 200).unwrap();
    assert!((lin.matrix[(0, 0)] - two_over_sqrt_pi()).abs() < 1e-13);
    let harm = potential_matrix(&PairPotential::harmonic(1.0).unwrap(), 1.0, 1, 1.0, 200).unwrap();
    assert!((harm.matrix[(0, 0)] - 1.5).abs() < 1e-13);
    let coul = potential_matrix(&PairPotential::coulomb(1.0).unwrap(), 2.0, 1, 1.0, 200).unwrap();
    // oracle: ⟨1/r⟩ = ∫ (4/√π) r e^{-r²} dr by Simpson
    let inv_r = simpson(|r| 4.0 / PI.sqrt() * r * (-r * r).exp(), 12.0, 20_000);
    assert!((inv_r - two_over_sqrt_pi()).abs() < 1e-12);
    assert!((coul.matrix[(0, 0)] + 2.0 * inv_r).abs() < 1e-12);
}

#[test]
fn power_law_gaussian_moments() {
    // ⟨r^k⟩ = Γ((3+k)/2) / Γ(3/2) for the unit Gaussian
    for k in [0.5, 1.0, 1.5, 3.0] {
        let v = PairPotential::power_law(1.0, k).unwrap();
        let m = potential_matrix(&v, 1.0, 1, 1.0, 200).unwrap();
        let expect = statrs::function::gamma::gamma((3.0 + k) / 2.0) / statrs::function::gamma::gamma(1.5);
        assert!((m.matrix[(0, 0)] - expect).abs() < 1e-12, "k={k}");
    }
}

#[test]
fn matrices_are_exactly_symmetric() {
    let k = kinetic_matrix(1.3, 0.8, 0.4, 30, 1.7, 120).unwrap().matrix;
    let v = potential_matrix(&PairPotential::coulomb_plus_linear(0.3, 1.0).unwrap(), 2.0, 30, 1.7, 120)
        .unwrap()
        .matrix;
    for a in [&k, &v] {
        assert_eq!((a - a.transpose()).abs().max(), 0.0);
    }
}

#[test]
fn fourier_self_duality_up_to_parity_signs() {
    let k = kinetic_matrix(1.0, 1.0, 0.0, 40, 1.0, 200).unwrap().matrix;
    let v = potential_matrix(&linear(), 1.0, 40, 1.0, 200).unwrap().matrix;
    for i in 0..40 {
        for j in 0..40 {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((k[(i, j)] - sign * v[(i, j)]).abs() < 1e-10, "({i},{j})");
        }
    }
}

#[test]
fn default_quadrature_is_converged() {
    let k = kinetic_matrix(1.0, 1.0, 0.0, 40, 1.0, 200).unwrap();
    assert!(k.warnings.is_empty(), "{:?}", k.warnings);
    let coarse = kinetic_matrix(1.0, 1.0, 0.0, 40, 1.0, 16).unwrap();
    assert!(!coarse.warnings.is_empty());
}

#[test]
fn linear_reference_energy() {
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 0.0, linear()).unwrap();
    let r = ground_energy(&h, &SolverConfig::default()).unwrap();
    assert!((r.ground_energy - LINEAR_REFERENCE_ENERGY).abs() < 1e-3, "{}", r.ground_energy);
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    assert_eq!(r.coefficients.len(), 40);
    let norm: f64 = r.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-12);
    assert!(r.convergence_estimate >= 0.0 && r.convergence_estimate < 1e-2);
}

#[test]
fn lambda_four_is_doubled_kinetic_coefficient() {
    // sqrt(4p²) = 2|p|, so E = E(2, 1) = sqrt(2) e
    let h = ReducedHamiltonian::new(1.0, 4.0, 1.0, 0.0, linear()).unwrap();
    let r = ground_energy(&h, &SolverConfig::default()).unwrap();
    assert!((r.ground_energy - 2f64.sqrt() * LINEAR_REFERENCE_ENERGY).abs() < 2e-3);
}

#[test]
fn heavy_harmonic_matches_oscillator() {
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 200.0, PairPotential::harmonic(1.0).unwrap()).unwrap();
    let r = ground_energy(&h, &SolverConfig::default()).unwrap();
    assert!((r.ground_energy - 200.15).abs() < 1e-3, "{}", r.ground_energy);
}

#[test]
fn massless_harmonic_is_airy_problem() {
    // |p| + r² is unitarily equivalent (Fourier) to p² + r, whose s-wave
    // ground energy is the first Airy zero magnitude.
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 0.0, PairPotential::harmonic(1.0).unwrap()).unwrap();
    let r = ground_energy(&h, &SolverConfig::default()).unwrap();
    assert!((r.ground_energy - 2.338_107_410_459_767).abs() < 1e-4, "{}", r.ground_energy);
}

#[test]
fn weak_coulomb_nonrelativistic_limit() {
    // sqrt(p² + 1) - α/r with α = 0.1: E ≈ 1 - α²/2 to O(α⁴)
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 1.0, PairPotential::coulomb(0.1).unwrap()).unwrap();
    let r = ground_energy(&h, &SolverConfig::default()).unwrap();
    assert!(r.ground_energy < 1.0);
    assert!((r.ground_energy - 0.995).abs() < 2e-4, "{}", r.ground_energy);
}

#[test]
fn energy_nonincreasing_in_basis_size() {
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 0.5, PairPotential::coulomb_plus_linear(0.2, 1.0).unwrap())
        .unwrap();
    let mut last = f64::INFINITY;
    for m in [5, 10, 20, 40] {
        let cfg = SolverConfig {
            basis_size: m,
            convergence_check: ConvergenceCheck::Off,
            ..SolverConfig::default()
        };
        let e = ground_energy(&h, &cfg).unwrap().ground_energy;
        assert!(e <= last + 1e-10, "M={m}: {e} > {last}");
        last = e;
    }
}

#[test]
fn linear_scaling_law() {
    let cfg = SolverConfig::default();
    let e11 = ground_energy(&ReducedHamiltonian::new(1.0, 1.0, 1.0, 0.0, linear()).unwrap(), &cfg)
        .unwrap()
        .ground_energy;
    for (a, b) in [(2.0, 1.0), (1.0, 2.0), (3.0, 5.0)] {
        let h = ReducedHamiltonian::new(a, 1.0, b, 0.0, linear()).unwrap();
        let e = ground_energy(&h, &cfg).unwrap().ground_energy;
        let s = a * b;
        assert!((e - s.sqrt() * e11).abs() <= 1e-4 * s.sqrt());
    }
}

#[test]
fn harmonic_degree_two_scaling() {
    // a|p| + b r²: E(sa, b) = s^{2/3} E(a, b)
    let cfg = SolverConfig::default();
    let harm = PairPotential::harmonic(1.0).unwrap();
    let e1 = ground_energy(&ReducedHamiltonian::new(1.0, 1.0, 1.0, 0.0, harm).unwrap(), &cfg)
        .unwrap()
        .ground_energy;
    let e2 = ground_energy(&ReducedHamiltonian::new(2.0, 1.0, 1.0, 0.0, harm).unwrap(), &cfg)
        .unwrap()
        .ground_energy;
    assert!((e2 - 2f64.powf(2.0 / 3.0) * e1).abs() < 1e-6 * e2);
}

#[test]
fn stability_guard() {
    let c = PairPotential::coulomb(0.8).unwrap();
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 0.0, c).unwrap();
    assert!(matches!(
        ground_energy(&h, &SolverConfig::default()),
        Err(SolverError::Unstable { .. })
    ));
    // mass does not regularize the short-distance collapse
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 2.0, c).unwrap();
    assert!(ground_energy(&h, &SolverConfig::default()).is_err());
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 0.0, PairPotential::coulomb(2.0 / PI).unwrap()).unwrap();
    assert!(ground_energy(&h, &SolverConfig::default()).is_err());
}

#[test]
fn massless_subcritical_coulomb_hits_scale_endpoint() {
    // |p| - 0.3/r has no bound state; the scale search runs to an endpoint
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 0.0, PairPotential::coulomb(0.3).unwrap()).unwrap();
    let r = ground_energy(&h, &SolverConfig::default()).unwrap();
    assert!(r.at_scale_boundary);
    assert!(r.warnings.iter().any(|w| w.contains("endpoint")));
}

#[test]
fn heavy_mass_limit_rate() {
    // residual of m + 3 sqrt(λγv/(2m)) shrinks ~100x per decade
    let cfg = SolverConfig::default();
    let mut residuals = Vec::new();
    for m in [1e2, 1e3, 1e4] {
        let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, m, PairPotential::harmonic(1.0).unwrap()).unwrap();
        let e = ground_energy(&h, &cfg).unwrap().ground_energy;
        residuals.push((e - (m + 3.0 * (1.0 / (2.0 * m)).sqrt())).abs());
    }
    for w in residuals.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 50.0 && ratio < 200.0, "{residuals:?}");
    }
}

#[test]
fn invalid_inputs() {
    assert!(ReducedHamiltonian::new(0.0, 1.0, 1.0, 0.0, linear()).is_err());
    assert!(ReducedHamiltonian::new(1.0, -1.0, 1.0, 0.0, linear()).is_err());
    assert!(ReducedHamiltonian::new(1.0, 1.0, 1.0, -0.1, linear()).is_err());
    let h = ReducedHamiltonian::new(1.0, 1.0, 1.0, 0.0, linear()).unwrap();
    for cfg in [
        SolverConfig { basis_size: 1, ..SolverConfig::default() },
        SolverConfig { scale_search_interval: (2.0, 1.0), ..SolverConfig::default() },
        SolverConfig { scale_search_interval: (0.0, 1.0), ..SolverConfig::default() },
        SolverConfig { quadrature_order: 8, ..SolverConfig::default() },
        SolverConfig { convergence_check: ConvergenceCheck::Size(40), ..SolverConfig::default() },
    ] {
        assert!(matches!(ground_energy(&h, &cfg), Err(SolverError::InvalidConfig(_))));
    }
    assert!(kinetic_matrix(1.0, 1.0, 0.0, 4, 0.0, 200).is_err());
}

#[test]
fn scaled_energy_linear_examples() {
    assert_eq!(scaled_energy_linear(1.0, 1.0).unwrap(), 2.2322);
    assert!((scaled_energy_linear(2.0, 1.0).unwrap() - 3.1568).abs() < 1e-4);
    assert!((scaled_energy_linear(4.0, 9.0).unwrap() - 13.3932).abs() < 1e-12);
    assert!(scaled_energy_linear(0.0, 1.0).is_err());
}
