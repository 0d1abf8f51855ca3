use super::{inf_norm, SolveReport, Status};
use crate::error::{QrError, Result};

/// Settings for [`minimize_qn`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QNConfig {
    /// Converged once `|grad|_inf <= grad_tol * max(1, |x|_inf)`.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo_c: f64,
    pub backtrack_factor: f64,
}

impl Default for QNConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            max_iter: 500,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
        }
    }
}

impl QNConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.grad_tol > 0.0
            && self.backtrack_factor > 0.0
            && self.backtrack_factor < 1.0
            && self.armijo_c > 0.0
            && self.armijo_c < 1.0;
        if ok {
            Ok(())
        } else {
            Err(QrError::InvalidConfig(format!("invalid QNConfig {self:?}")))
        }
    }
}

const CURVATURE_GUARD: f64 = 1e-12;
const MIN_STEP: f64 = 1e-20;

/// BFGS on the inverse Hessian with Armijo backtracking.
///
/// `objective(x, grad)` returns `f(x)` and writes the gradient into `grad`.
/// The inverse-Hessian update is skipped whenever `s'y <= 1e-12`.
pub fn minimize_qn<F>(mut objective: F, x0: &[f64], config: &QNConfig) -> Result<SolveReport>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    config.validate()?;
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = objective(&x, &mut g);
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(QrError::Solver(format!(
            "objective not finite at the initial point (f = {f})"
        )));
    }

    let mut h = identity(n);
    let mut fresh_h = true;
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut yv = vec![0.0; n];
    let mut hy = vec![0.0; n];
    let mut x_try = vec![0.0; n];
    let mut g_try = vec![0.0; n];
    let mut flat = false;

    let converged = |x: &[f64], g: &[f64]| inf_norm(g) <= config.grad_tol * inf_norm(x).max(1.0);
    let mut best = Best::new(&x, f, &g);

    for iter in 0..config.max_iter {
        if converged(&x, &g) {
            return Ok(report(x, f, iter, Status::Converged));
        }

        mat_vec(&h, &g, &mut d);
        d.iter_mut().for_each(|v| *v = -*v);
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            // Lost descent; restart from steepest descent.
            h = identity(n);
            fresh_h = true;
            d.iter_mut().zip(&g).for_each(|(di, gi)| *di = -gi);
            slope = dot(&g, &d);
        }

        let accepted = line_search(
            &mut objective,
            config,
            &x,
            f,
            &g,
            &d,
            slope,
            &mut x_new,
            &mut g_new,
        )?;
        let f_new = match accepted {
            // Saturated (locally linear) region: the full step carries no
            // curvature information, so keep stretching it while f drops.
            Some((f_new, t)) if flat && t == 1.0 => expand_step(
                &mut objective,
                &x,
                &d,
                f_new,
                &mut x_new,
                &mut g_new,
                &mut x_try,
                &mut g_try,
            ),
            Some((f_new, _)) => f_new,
            None if !fresh_h => {
                h = identity(n);
                fresh_h = true;
                continue;
            }
            None => {
                // No progress possible even along -g: round-off floor.
                if converged(&x, &g) {
                    return Ok(report(x, f, iter, Status::Converged));
                }
                let status = if converged(&best.x, &best.g) {
                    Status::Converged
                } else {
                    Status::IterationCap
                };
                return Ok(report(best.x, best.f, iter, status));
            }
        };

        for i in 0..n {
            s[i] = x_new[i] - x[i];
            yv[i] = g_new[i] - g[i];
        }
        let sy = dot(&s, &yv);
        flat = sy <= CURVATURE_GUARD;
        if !flat {
            if fresh_h {
                // Scale the initial matrix to the observed curvature.
                let scale = sy / dot(&yv, &yv);
                h.iter_mut().for_each(|v| *v *= scale);
                fresh_h = false;
            }
            bfgs_update(&mut h, &s, &yv, sy, &mut hy);
        }

        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
        best.offer(&x, f, &g);
    }

    if converged(&x, &g) {
        return Ok(report(x, f, config.max_iter, Status::Converged));
    }
    let status = if converged(&best.x, &best.g) {
        Status::Converged
    } else {
        Status::IterationCap
    };
    Ok(report(best.x, best.f, config.max_iter, status))
}

/// Lowest objective seen; values within rounding of each other are ranked
/// by gradient norm instead.
struct Best {
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
    g_norm: f64,
}

impl Best {
    fn new(x: &[f64], f: f64, g: &[f64]) -> Self {
        Self {
            x: x.to_vec(),
            f,
            g: g.to_vec(),
            g_norm: inf_norm(g),
        }
    }

    fn offer(&mut self, x: &[f64], f: f64, g: &[f64]) {
        let noise = 16.0 * f64::EPSILON * self.f.abs().max(1.0);
        let g_norm = inf_norm(g);
        let better = if (f - self.f).abs() <= noise {
            g_norm < self.g_norm
        } else {
            f < self.f
        };
        if better {
            self.x.copy_from_slice(x);
            self.f = f;
            self.g.copy_from_slice(g);
            self.g_norm = g_norm;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn line_search<F>(
    objective: &mut F,
    config: &QNConfig,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    slope: f64,
    x_new: &mut [f64],
    g_new: &mut [f64],
) -> Result<Option<(f64, f64)>>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    // Near the optimum, decreases fall below the rounding level of f; a step
    // is then accepted if it does not raise f beyond that level and it
    // shrinks the gradient.
    let noise = 16.0 * f64::EPSILON * f.abs().max(1.0);
    let g_norm = inf_norm(g);
    // Once the predicted decrease is below the rounding level, f comparisons
    // carry no information and only the gradient tests are used.
    let below_noise = -slope <= noise;
    let mut t = 1.0;
    while t >= MIN_STEP {
        for i in 0..x.len() {
            x_new[i] = x[i] + t * d[i];
        }
        let f_new = objective(x_new, g_new);
        if !f_new.is_finite() || g_new.iter().any(|v| !v.is_finite()) {
            return Err(QrError::Solver(format!(
                "objective became non-finite during line search (f = {f_new}, step = {t:e})"
            )));
        }
        if !below_noise && f_new <= f + config.armijo_c * t * slope {
            return Ok(Some((f_new, t)));
        }
        if f_new <= f + noise && (inf_norm(g_new) < g_norm || dot(g_new, d) <= 0.0) {
            return Ok(Some((f_new, t)));
        }
        t *= config.backtrack_factor;
    }
    Ok(None)
}

const MAX_DOUBLINGS: usize = 60;

/// Doubles the step along `d` from `x + d` while the objective keeps
/// decreasing; leaves the best point in `x_new`/`g_new`.
#[allow(clippy::too_many_arguments)]
fn expand_step<F>(
    objective: &mut F,
    x: &[f64],
    d: &[f64],
    mut f_best: f64,
    x_new: &mut [f64],
    g_new: &mut [f64],
    x_try: &mut [f64],
    g_try: &mut [f64],
) -> f64
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut t = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        t *= 2.0;
        for i in 0..x.len() {
            x_try[i] = x[i] + t * d[i];
        }
        let f_try = objective(x_try, g_try);
        if !(f_try.is_finite() && f_try < f_best) || g_try.iter().any(|v| !v.is_finite()) {
            break;
        }
        f_best = f_try;
        x_new.copy_from_slice(x_try);
        g_new.copy_from_slice(g_try);
    }
    f_best
}

fn report(solution: Vec<f64>, objective: f64, iterations: usize, status: Status) -> SolveReport {
    SolveReport {
        solution,
        objective,
        iterations,
        status,
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_vec(m: &[f64], v: &[f64], out: &mut [f64]) {
    let n = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = dot(&m[i * n..(i + 1) * n], v);
    }
}

/// `H <- (I - rho s y') H (I - rho y s') + rho s s'` with `rho = 1 / s'y`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, hy: &mut [f64]) {
    let n = s.len();
    let rho = 1.0 / sy;
    mat_vec(h, y, hy);
    let yhy = dot(y, hy);
    let coef = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
    // Keep H exactly symmetric.
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (h[i * n + j] + h[j * n + i]);
            h[i * n + j] = avg;
            h[j * n + i] = avg;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::log_cosh;

    fn run<F: FnMut(&[f64], &mut [f64]) -> f64>(f: F, x0: &[f64]) -> SolveReport {
        minimize_qn(f, x0, &QNConfig::default()).unwrap()
    }

    #[test]
    fn quadratic_1d() {
        let r = run(
            |x, g| {
                g[0] = 2.0 * (x[0] - 3.0);
                (x[0] - 3.0).powi(2)
            },
            &[0.0],
        );
        assert_eq!(r.status, Status::Converged);
        assert!((r.solution[0] - 3.0).abs() <= 1e-8);
    }

    #[test]
    fn log_cosh_1d() {
        let r = run(
            |x, g| {
                let z = 10.0 * (x[0] - 2.0);
                g[0] = 0.5 * z.tanh();
                log_cosh(z) / 20.0
            },
            &[0.0],
        );
        assert_eq!(r.status, Status::Converged);
        assert!((r.solution[0] - 2.0).abs() <= 1e-6);
    }

    #[test]
    fn separable_quadratic() {
        let r = run(
            |x, g| {
                g[0] = 2.0 * (x[0] - 1.0);
                g[1] = 20.0 * (x[1] + 2.0);
                (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2)
            },
            &[0.0, 0.0],
        );
        assert_eq!(r.status, Status::Converged);
        assert!((r.solution[0] - 1.0).abs() <= 1e-7);
        assert!((r.solution[1] + 2.0).abs() <= 1e-7);
    }

    #[test]
    fn rosenbrock() {
        let r = minimize_qn(
            |x, g| {
                let (a, b) = (x[0], x[1]);
                g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
                g[1] = 200.0 * (b - a * a);
                (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
            },
            &[-1.2, 1.0],
            &QNConfig {
                max_iter: 2000,
                ..QNConfig::default()
            },
        )
        .unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.solution[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn iteration_cap_returns_best_point() {
        let r = minimize_qn(
            |x, g| {
                g[0] = 2.0 * (x[0] - 3.0);
                g[1] = 2e4 * (x[1] + 1.0);
                (x[0] - 3.0).powi(2) + 1e4 * (x[1] + 1.0).powi(2)
            },
            &[0.0, 0.0],
            &QNConfig {
                max_iter: 1,
                ..QNConfig::default()
            },
        )
        .unwrap();
        assert_eq!(r.status, Status::IterationCap);
        assert!(r.objective < 9.0 + 1e4);
    }

    #[test]
    fn non_finite_start_is_an_error() {
        let e = minimize_qn(
            |_, g| {
                g[0] = 0.0;
                f64::NAN
            },
            &[0.0],
            &QNConfig::default(),
        );
        assert!(matches!(e, Err(QrError::Solver(_))));
    }

    #[test]
    fn non_finite_during_search_aborts() {
        let e = minimize_qn(
            |x, g| {
                g[0] = -1.0;
                if x[0] > 0.5 {
                    f64::INFINITY
                } else {
                    -x[0]
                }
            },
            &[0.0],
            &QNConfig::default(),
        );
        assert!(matches!(e, Err(QrError::Solver(_))));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = QNConfig {
            backtrack_factor: 1.0,
            ..QNConfig::default()
        };
        assert!(minimize_qn(|_, _| 0.0, &[0.0], &cfg).is_err());
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64], g: &mut [f64]| {
            g[0] = (x[0] - 1.0).tanh() + 0.1 * x[1];
            g[1] = 0.1 * x[0] + 2.0 * x[1];
            (x[0] - 1.0).cosh().ln() + 0.1 * x[0] * x[1] + x[1] * x[1]
        };
        assert_eq!(run(f, &[5.0, -3.0]), run(f, &[5.0, -3.0]));
    }
}
