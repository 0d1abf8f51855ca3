use crate::error::{QrError, Result};

/// Settings for [`minimize_scalar_convex`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarConfig {
    /// Final interval width relative to `max(1, bracket width)`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for ScalarConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_iter: 500,
        }
    }
}

// 1 / golden ratio
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a convex function on
/// `[lo, hi]`.
///
/// Returns the midpoint of the final interval. If the objective is flat
/// there, the point of the flat region closest to zero is returned instead.
pub fn minimize_scalar_convex<F>(f: F, bracket: (f64, f64), config: &ScalarConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = bracket;
    if !a.is_finite() || !b.is_finite() {
        return Err(QrError::InvalidConfig(format!(
            "bracket endpoints must be finite, got [{a}, {b}]"
        )));
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let (lo, hi) = (a, b);
    let tol = config.rel_tol * (b - a).max(1.0);

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0;
    while b - a > tol && iter < config.max_iter {
        iter += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    Ok(toward_zero_on_plateau(&f, mid, lo, hi, tol))
}

/// Walks from `x` toward zero while `f` stays at its value at `x`.
fn toward_zero_on_plateau<F: Fn(f64) -> f64>(f: &F, x: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let target = 0.0f64.clamp(lo, hi);
    if (x - target).abs() <= tol {
        return x;
    }
    let fx = f(x);
    let level = 8.0 * f64::EPSILON * fx.abs().max(1.0);
    let flat = |y: f64| f(y) <= fx + level;

    // A strictly convex function rises by far more than `level` over this
    // probe distance, so only genuine plateaus pass.
    let probe = 1e-6 * (hi - lo).max(1.0);
    let dir = (target - x).signum();
    let first = x + dir * probe.min((target - x).abs());
    if !flat(first) {
        return x;
    }
    if flat(target) {
        return target;
    }
    // Bisect for the plateau edge between `first` (flat) and `target`.
    let (mut inside, mut outside) = (first, target);
    while (outside - inside).abs() > tol {
        let m = 0.5 * (inside + outside);
        if flat(m) {
            inside = m;
        } else {
            outside = m;
        }
    }
    inside
}
