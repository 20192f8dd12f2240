//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use salbound::bounds::{
    compute_bounds, conjectured_lower, linear_bound_table, ratio_column, ratio_table,
    ProblemSpec, TableColumn, PUBLISHED_COLUMNS,
};
use salbound::delta_verify::{
    delta_value, equilateral_triangle, jacobi_inverse, jacobi_transform, pair_sum_identity_residual,
    regular_tetrahedron, run_corpus, CorpusConfig, JacobiFrame, MomentumConfiguration, Vec3,
    DEFAULT_SHARDS,
};
use salbound::{ground_energy, PairPotential, ReducedHamiltonian, SolverConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const MASTER_SEED: u64 = 20_240_601;

fn linear_energy(beta: f64, slope: f64) -> f64 {
    let h = ReducedHamiltonian::new(beta, 1.0, 1.0, 0.0, PairPotential::linear(slope).unwrap()).unwrap();
    ground_energy(&h, &SolverConfig::default()).unwrap().ground_energy
}

fn solver_accuracy() -> Outcome {
    let start = Instant::now();
    let e = linear_energy(1.0, 1.0);
    let elapsed = start.elapsed();
    let detail = format!("E = {e:.7}, |E - 2.2322| = {:.2e}, {elapsed:.2?}", (e - 2.2322).abs());
    if (e - 2.2322).abs() <= 1e-3 && elapsed < Duration::from_secs(10) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn two_body_exactness() -> Outcome {
    let spec = ProblemSpec::new(2, 0.0, PairPotential::linear(1.0).unwrap()).unwrap();
    let set = compute_bounds(&spec, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let lower = set.lower_n2.value;
    let conj = set.lower_conjectured.value;
    let upper = set.upper_gaussian.value;
    let target = 2f64.sqrt() * 2.2322;
    let detail = format!("lower {lower:.6}, conjectured {conj:.6}, upper {upper:.6}");
    if (lower - target).abs() <= 2e-3
        && (conj - target).abs() <= 2e-3
        && lower == conj
        && (upper - 3.19154).abs() <= 1e-4
    {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn table_reproduction() -> Outcome {
    let published: [[Option<f64>; 7]; 4] = [
        [Some(1.011), Some(1.08639), Some(1.11886), Some(1.13706), Some(1.14872), Some(1.17104), Some(1.20229)],
        [None, Some(1.011), Some(1.04121), Some(1.05815), Some(1.069), Some(1.08977), Some(1.11886)],
        [None, None, Some(1.011), Some(1.02745), Some(1.03799), Some(1.05815), Some(1.08639)],
        [Some(1.011); 7],
    ];
    let table = ratio_table(&PUBLISHED_COLUMNS).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (j, col) in table.iter().enumerate() {
        let computed = [col.r_n2, col.r_n3, col.r_n4, col.r_c];
        for (row, value) in computed.iter().enumerate() {
            match (value, published[row][j]) {
                (Some(v), Some(p)) => {
                    worst = worst.max((v - p).abs());
                    count += 1;
                }
                (None, None) => {}
                _ => return Err(format!("entry presence mismatch at row {row}, column {j}")),
            }
        }
    }
    let rc: Vec<f64> = (2..=50)
        .map(|n| ratio_column(TableColumn::Finite(n)).unwrap().r_c.unwrap())
        .collect();
    let spread = rc.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - rc.iter().cloned().fold(f64::INFINITY, f64::min);
    let detail = format!("{count} entries, max deviation {worst:.2e}; R_c spread over N=2..50 {spread:.1e}");
    if worst <= 1e-4 && spread <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn closed_form_consistency() -> Outcome {
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        let spec = ProblemSpec::new(n, 0.0, PairPotential::linear(1.0).unwrap()).unwrap();
        let set = compute_bounds(&spec, &cfg).map_err(|e| e.to_string())?;
        let t = linear_bound_table(n).unwrap();
        let pairs = [
            (Some(set.lower_n2.value), Some(t.lower_n2)),
            (set.lower_n3.as_ref().map(|b| b.value), t.lower_n3),
            (set.lower_n4.as_ref().map(|b| b.value), t.lower_n4),
            (Some(set.lower_conjectured.value), Some(t.lower_conjectured)),
            (Some(set.upper_gaussian.value), Some(t.upper_gaussian)),
        ];
        for (s, c) in pairs {
            match (s, c) {
                (Some(s), Some(c)) => worst = worst.max((s - c).abs() / c),
                (None, None) => {}
                _ => return Err(format!("N={n}: bound presence differs")),
            }
        }
    }
    let detail = format!("max relative deviation {worst:.2e} over N=2..6");
    if worst <= 2e-3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scaling_law() -> Outcome {
    let base = linear_energy(1.0, 1.0);
    let mut worst: f64 = 0.0;
    for (a, b) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (3.0, 5.0)] {
        let e = linear_energy(a, b);
        let s = f64::sqrt(a * b);
        worst = worst.max((e - s * base).abs() / s);
    }
    let detail = format!("max |E(a,b) - sqrt(ab) E(1,1)| / sqrt(ab) = {worst:.2e}");
    if worst <= 1e-4 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn delta_suites() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut failed = false;
    for (n, mass) in [(3usize, 0.0), (3, 1.0), (4, 0.0)] {
        let report = run_corpus(&CorpusConfig {
            n,
            mass,
            states: 100,
            samples: 100_000,
            seed: MASTER_SEED,
            shards: DEFAULT_SHARDS,
        })
        .map_err(|e| e.to_string())?;
        let worst = report
            .results
            .iter()
            .map(|r| r.stats.z_score())
            .fold(f64::INFINITY, f64::min);
        failed |= !report.findings.is_empty();
        parts.push(format!(
            "(N={n}, m={mass}): {}/100 states below -3 SE, min z {worst:.1}",
            report.findings.len()
        ));
    }
    let elapsed = start.elapsed();
    let detail = format!("{}; {elapsed:.2?}", parts.join("; "));
    if failed || elapsed >= Duration::from_secs(300) {
        Err(detail)
    } else {
        Ok(detail)
    }
}

fn pointwise_geometry() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in [0.0, 1.0, 10.0] {
        let cfg = MomentumConfiguration::new(equilateral_triangle(1.3).to_vec()).unwrap();
        worst = worst.max(delta_value(m, 3, &cfg).unwrap().abs());
    }
    let tet = MomentumConfiguration::new(regular_tetrahedron(0.9).to_vec()).unwrap();
    worst = worst.max(delta_value(0.0, 4, &tet).unwrap().abs());
    let neg = MomentumConfiguration::new(vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0; 3]]).unwrap();
    let d = delta_value(0.0, 3, &neg).unwrap();
    let neg_err = (d - (2.0 - 4.0 / 3f64.sqrt())).abs();
    let detail = format!("max |δ| on centroid configurations {worst:.1e}; negative example δ = {d:.6} (error {neg_err:.1e})");
    if worst <= 1e-12 && neg_err <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn jacobi_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED);
    let mut norm_residual: f64 = 0.0;
    let mut last_residual: f64 = 0.0;
    let mut pair_residual: f64 = 0.0;
    for n in 2..=6 {
        let frame = JacobiFrame::new(n).unwrap();
        for _ in 0..1000 {
            let p: Vec<Vec3> = (0..n)
                .map(|_| std::array::from_fn(|_| rng.random_range(-2.0..2.0)))
                .collect();
            let pi = jacobi_transform(&frame, &p).unwrap();
            let sq = |v: &[Vec3]| v.iter().map(|x| x.iter().map(|c| c * c).sum::<f64>()).sum::<f64>();
            norm_residual = norm_residual.max((sq(&p) - sq(&pi)).abs());
            let nf = n as f64;
            for c in 0..3 {
                let pn = pi[0][c] / nf.sqrt() - ((nf - 1.0) / nf).sqrt() * pi[n - 1][c];
                last_residual = last_residual.max((pn - p[n - 1][c]).abs());
            }
            let back = jacobi_inverse(&frame, &pi).unwrap();
            for (a, b) in back.iter().zip(&p) {
                for c in 0..3 {
                    last_residual = last_residual.max((a[c] - b[c]).abs());
                }
            }
            pair_residual = pair_residual.max(pair_sum_identity_residual(&p).abs());
        }
    }
    let detail = format!(
        "norm identity {norm_residual:.1e}, last-particle reconstruction {last_residual:.1e}, pair-sum identity {pair_residual:.1e}"
    );
    if norm_residual <= 1e-12 && last_residual <= 1e-12 && pair_residual <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn nonrelativistic_limit() -> Outcome {
    let cfg = SolverConfig::default();
    let mut ratios = Vec::new();
    for n in [3usize, 5] {
        let nf = n as f64;
        let mut residuals = Vec::new();
        for m in [1e2, 1e3, 1e4] {
            let spec = ProblemSpec::new(n, m, PairPotential::harmonic(1.0).unwrap()).unwrap();
            let (entry, _) = conjectured_lower(&spec, &cfg).map_err(|e| e.to_string())?;
            let oracle = nf * m + 3.0 * (nf - 1.0) * (nf / (2.0 * m)).sqrt();
            residuals.push((entry.value - oracle).abs());
        }
        for w in residuals.windows(2) {
            ratios.push((n, w[0] / w[1]));
        }
    }
    let min = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let list: Vec<String> = ratios.iter().map(|(n, r)| format!("N={n}: {r:.1}")).collect();
    let detail = format!("residual ratios per decade {}", list.join(", "));
    if min >= 50.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sandwich() -> Outcome {
    let cfg = SolverConfig::default();
    let potentials = [
        "linear:1",
        "harmonic:1",
        "coulomb:0.1",
        "coulomb+linear:0.2,1",
        "power:1,0.5",
        "power:0.5,3",
    ];
    let mut checked = 0;
    let mut min_gap = f64::INFINITY;
    for n in 2..=6 {
        for mass in [0.0, 1.0, 10.0] {
            for v in potentials {
                let potential: PairPotential = v.parse().unwrap();
                let spec = ProblemSpec::new(n, mass, potential).unwrap();
                let set = compute_bounds(&spec, &cfg).map_err(|e| format!("N={n} m={mass} {v}: {e}"))?;
                let top = set.lowers().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
                min_gap = min_gap.min((set.upper_gaussian.value - top) / set.upper_gaussian.value.abs());
                checked += 1;
            }
        }
    }
    let detail = format!("{checked} (N, m, V) combinations, min relative gap upper - max lower = {min_gap:.2e}");
    if min_gap >= -1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("solver accuracy", solver_accuracy),
        ("two-body exactness", two_body_exactness),
        ("ratio table reproduction", table_reproduction),
        ("closed form vs solver", closed_form_consistency),
        ("scaling law", scaling_law),
        ("delta positivity suites", delta_suites),
        ("pointwise geometry", pointwise_geometry),
        ("Jacobi identities", jacobi_identities),
        ("nonrelativistic limit", nonrelativistic_limit),
        ("bound sandwich", sandwich),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  criterion {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  criterion {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
