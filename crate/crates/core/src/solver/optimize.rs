//! One-dimensional minimization over a positive scale, in `ln σ`.

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const SCAN_POINTS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleMinimum {
    pub scale: f64,
    pub value: f64,
    /// The minimum sits within tolerance of an interval endpoint.
    pub at_boundary: bool,
    pub evaluations: usize,
}

/// Minimizes `f(σ)` for `σ ∈ [lo, hi]` by a coarse logarithmic scan followed
/// by golden-section refinement of the bracket around the best scan point.
/// `rel_tol` is the relative precision in `σ`.
pub fn minimize_log_scale<E>(
    (lo, hi): (f64, f64),
    rel_tol: f64,
    mut f: impl FnMut(f64) -> Result<f64, E>,
) -> Result<ScaleMinimum, E> {
    debug_assert!(0.0 < lo && lo < hi && rel_tol > 0.0);
    let (t_lo, t_hi) = (lo.ln(), hi.ln());
    let mut evaluations = 0;
    let mut eval = |t: f64| -> Result<f64, E> {
        evaluations += 1;
        f(t.exp())
    };

    let step = (t_hi - t_lo) / (SCAN_POINTS - 1) as f64;
    let mut best = (0, f64::INFINITY);
    let mut scan = Vec::with_capacity(SCAN_POINTS);
    for i in 0..SCAN_POINTS {
        let t = if i == SCAN_POINTS - 1 { t_hi } else { t_lo + step * i as f64 };
        let v = eval(t)?;
        scan.push((t, v));
        if v < best.1 {
            best = (i, v);
        }
    }
    let (ib, _) = best;
    let mut a = scan[ib.saturating_sub(1)].0;
    let mut b = scan[(ib + 1).min(SCAN_POINTS - 1)].0;
    let (mut best_t, mut best_v) = scan[ib];

    // golden section on [a, b]
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while (b - a) > rel_tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    for (t, v) in [(c, fc), (d, fd)] {
        if v < best_v {
            best_t = t;
            best_v = v;
        }
    }
    let at_boundary = best_t - t_lo <= 2.0 * rel_tol || t_hi - best_t <= 2.0 * rel_tol;
    Ok(ScaleMinimum {
        scale: best_t.exp(),
        value: best_v,
        at_boundary,
        evaluations,
    })
}
