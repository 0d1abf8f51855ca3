//! Quantile estimators: smooth-loss fits (SRQ, SMRQ, arbitrary flexible
//! parameters), the linear-programming baseline (RQ), restricted regression
//! quantiles (RRQ) and tau-grid drivers.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::diagnostics::{count_curve, detect_events, CountCurve, GridResult};
use crate::error::{QrError, Result};
use crate::losses::{loss_and_grad, pinball, FlexCheckParams, Tau};
use crate::optim::{
    inf_norm, minimize_qn, minimize_scalar_convex, solve_lp_simplex, LPProblem, QNConfig,
    ScalarConfig, SolveReport, Status,
};

/// Estimation method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Rq,
    Rrq,
    Srq,
    Smrq,
    Flex(FlexCheckParams),
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Rq => "rq",
            Method::Rrq => "rrq",
            Method::Srq => "srq",
            Method::Smrq => "smrq",
            Method::Flex(_) => "flex",
        }
    }

    /// Check-function parameters for the smooth methods.
    pub fn params(&self) -> Option<FlexCheckParams> {
        match self {
            Method::Srq => Some(FlexCheckParams::SRQ),
            Method::Smrq => Some(FlexCheckParams::SMRQ),
            Method::Flex(p) => Some(*p),
            Method::Rq | Method::Rrq => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = QrError;

    /// Parses the parameter-free tags; `flex` needs explicit parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rq" => Ok(Method::Rq),
            "rrq" => Ok(Method::Rrq),
            "srq" => Ok(Method::Srq),
            "smrq" => Ok(Method::Smrq),
            other => Err(QrError::InvalidConfig(format!(
                "unknown method '{other}' (expected rq, rrq, srq or smrq)"
            ))),
        }
    }
}

/// Fitted coefficients for one quantile level.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFit {
    pub tau: f64,
    pub beta: Vec<f64>,
    pub method: Method,
    /// Solver report; `solution` holds `beta`.
    pub report: SolveReport,
}

/// Strictly increasing quantile levels inside (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct TauGrid(Vec<f64>);

impl TauGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(QrError::InvalidGrid("empty grid".into()));
        }
        if let Some(t) = values.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
            return Err(QrError::InvalidGrid(format!("{t} is outside (0, 1)")));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QrError::InvalidGrid(
                "values must be strictly increasing".into(),
            ));
        }
        Ok(Self(values))
    }

    /// `tau_i = i / (m + 1)` for `i = 1..=m`.
    pub fn from_count(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(QrError::InvalidGrid("count must be positive".into()));
        }
        Self::new((1..=m).map(|i| i as f64 / (m + 1) as f64).collect())
    }

    /// `start, start + step, ..., end`, keeping only values inside (0, 1).
    /// `(0, 1, 0.01)` therefore yields `0.01, ..., 0.99`.
    pub fn from_step(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 || end < start
        {
            return Err(QrError::InvalidGrid(format!(
                "bad step grid ({start}, {end}, {step})"
            )));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        let values: Vec<f64> = (0..=count)
            .map(|k| round12(start + k as f64 * step))
            .filter(|&t| t > 0.0 && t < 1.0)
            .collect();
        Self::new(values)
    }

    /// `"start,end,step"` or a bare count `"m"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| QrError::InvalidGrid(format!("cannot parse '{s}' in grid '{text}'")))
        };
        match parts.as_slice() {
            [m] => {
                let m: usize = m
                    .parse()
                    .map_err(|_| QrError::InvalidGrid(format!("bad grid count '{m}'")))?;
                Self::from_count(m)
            }
            [a, b, c] => Self::from_step(num(a)?, num(b)?, num(c)?),
            _ => Err(QrError::InvalidGrid(format!(
                "expected 'start,end,step' or a count, got '{text}'"
            ))),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Minimizes the smooth quantile loss from `init` (zero vector if `None`).
pub fn fit_smooth(
    ds: &Dataset,
    tau: Tau,
    params: &FlexCheckParams,
    init: Option<&[f64]>,
) -> Result<QuantileFit> {
    fit_smooth_with(ds, tau, params, init, &QNConfig::default())
}

pub fn fit_smooth_with(
    ds: &Dataset,
    tau: Tau,
    params: &FlexCheckParams,
    init: Option<&[f64]>,
    config: &QNConfig,
) -> Result<QuantileFit> {
    let report = smooth_report(ds, tau, params, init, config)?;
    if report.status != Status::Converged {
        return Err(QrError::Solver(format!(
            "quasi-Newton stopped with status {} after {} iterations at tau = {}",
            report.status,
            report.iterations,
            tau.value()
        )));
    }
    Ok(smooth_fit(tau, params, report))
}

fn smooth_fit(tau: Tau, params: &FlexCheckParams, report: SolveReport) -> QuantileFit {
    let method = if *params == FlexCheckParams::SRQ {
        Method::Srq
    } else if *params == FlexCheckParams::SMRQ {
        Method::Smrq
    } else {
        Method::Flex(*params)
    };
    QuantileFit {
        tau: tau.value(),
        beta: report.solution.clone(),
        method,
        report,
    }
}

fn smooth_report(
    ds: &Dataset,
    tau: Tau,
    params: &FlexCheckParams,
    init: Option<&[f64]>,
    config: &QNConfig,
) -> Result<SolveReport> {
    params.validate()?;
    let t = tau.value();
    // The derivative lies in (t - s - 1/2, t - s + 1/2); without a sign change
    // the intercept can drive the loss to minus infinity.
    if (t - params.s).abs() >= 0.5 {
        return Err(QrError::InvalidParams(format!(
            "loss is unbounded below when |tau - s| >= 0.5 (tau = {t}, s = {})",
            params.s
        )));
    }
    let zero = vec![0.0; ds.p()];
    let x0 = init.unwrap_or(&zero);
    ds.check_beta(x0)?;
    minimize_qn(|b, g| loss_and_grad(ds, b, t, params, g), x0, config)
}

/// Exact classic regression quantile via the simplex method.
///
/// Variables are `(beta+, beta-, u, v) >= 0` with
/// `X (beta+ - beta-) + u - v = y` and cost `tau 1'u + (1 - tau) 1'v`.
pub fn fit_rq_lp(ds: &Dataset, tau: Tau) -> Result<QuantileFit> {
    let (n, p) = (ds.n(), ds.p());
    let t = tau.value();
    let cols = 2 * p + 2 * n;
    let mut a = vec![0.0; n * cols];
    for (i, row) in ds.rows().enumerate() {
        let r = &mut a[i * cols..(i + 1) * cols];
        for (j, &x) in row.iter().enumerate() {
            r[j] = x;
            r[p + j] = -x;
        }
        r[2 * p + i] = 1.0;
        r[2 * p + n + i] = -1.0;
    }
    let mut cost = vec![0.0; cols];
    cost[2 * p..2 * p + n].iter_mut().for_each(|c| *c = t);
    cost[2 * p + n..].iter_mut().for_each(|c| *c = 1.0 - t);
    let lp = LPProblem::new(cost, a, ds.y().to_vec())?;
    let sol = solve_lp_simplex(&lp)?;
    if !sol.status.is_optimal() {
        return Err(QrError::Solver(format!(
            "simplex ended with status {} at tau = {t}",
            sol.status
        )));
    }
    let beta: Vec<f64> = (0..p)
        .map(|j| sol.solution[j] - sol.solution[p + j])
        .collect();
    Ok(QuantileFit {
        tau: t,
        beta: beta.clone(),
        method: Method::Rq,
        report: SolveReport {
            solution: beta,
            objective: sol.objective,
            iterations: sol.iterations,
            status: sol.status,
        },
    })
}

/// Restricted regression quantiles: planes `beta_med + c_tau * gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct RRQModel {
    /// Median-regression coefficients.
    pub beta_med: Vec<f64>,
    /// Coefficients of the median regression of `|r_i|` on `x_i`.
    pub gamma: Vec<f64>,
    /// Median residuals `r_i`.
    pub residuals: Vec<f64>,
    /// Fitted scales `s_i = x_i' gamma`.
    pub scales: Vec<f64>,
    pub taus: Vec<f64>,
    /// One `c_tau` per grid value.
    pub c: Vec<f64>,
    /// All scales vanished; every `c_tau` was set to zero.
    pub degenerate_scale: bool,
    /// Some fitted scale is negative.
    pub negative_scale: bool,
}

impl RRQModel {
    pub fn plane(&self, k: usize) -> Vec<f64> {
        self.beta_med
            .iter()
            .zip(&self.gamma)
            .map(|(b, g)| b + self.c[k] * g)
            .collect()
    }

    pub fn planes(&self) -> Vec<Vec<f64>> {
        (0..self.c.len()).map(|k| self.plane(k)).collect()
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.degenerate_scale {
            w.push("rrq: all fitted scales are zero; c_tau set to 0".to_string());
        }
        if self.negative_scale {
            w.push("rrq: some fitted scales x_i'gamma are negative".to_string());
        }
        w
    }
}

/// Three-step RRQ: median fit, median regression of absolute residuals,
/// then a scalar quantile fit of `c` per tau.
pub fn fit_rrq(ds: &Dataset, grid: &TauGrid) -> Result<RRQModel> {
    fit_rrq_with(ds, grid, true)
}

/// As [`fit_rrq`]; with `exact_step3 = false` the scalar step always uses
/// golden-section search instead of enumerating the kinks.
pub fn fit_rrq_with(ds: &Dataset, grid: &TauGrid, exact_step3: bool) -> Result<RRQModel> {
    let half = Tau::new(0.5)?;
    let med = fit_rq_lp(ds, half)?;
    let residuals = ds.residuals(&med.beta)?;
    let abs_r: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
    let scale_ds = Dataset::from_design(ds.design().to_vec(), abs_r, ds.names().to_vec())?;
    let gamma = fit_rq_lp(&scale_ds, half)?.beta;
    let scales: Vec<f64> = ds
        .rows()
        .map(|row| crate::dataset::dot(row, &gamma))
        .collect();

    let r_max = inf_norm(&residuals);
    let s_max = inf_norm(&scales);
    let zero_level = 1e-12 * r_max.max(1.0);
    let degenerate_scale = s_max <= zero_level;
    let negative_scale = scales.iter().any(|&s| s < -zero_level);

    let c = grid
        .values()
        .iter()
        .map(|&t| {
            if degenerate_scale {
                Ok(0.0)
            } else if exact_step3 {
                Ok(rrq_scalar_exact(&residuals, &scales, t, zero_level))
            } else {
                let bound = 10.0 * r_max / s_max.max(1e-12);
                let f = |c: f64| rrq_objective(&residuals, &scales, t, c);
                minimize_scalar_convex(f, (-bound, bound), &ScalarConfig::default())
            }
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(RRQModel {
        beta_med: med.beta,
        gamma,
        residuals,
        scales,
        taus: grid.values().to_vec(),
        c,
        degenerate_scale,
        negative_scale,
    })
}

fn rrq_objective(r: &[f64], s: &[f64], tau: f64, c: f64) -> f64 {
    r.iter()
        .zip(s)
        .map(|(ri, si)| pinball(ri - c * si, tau))
        .sum()
}

/// The objective is piecewise linear with kinks at `r_i / s_i` (terms with
/// `s_i = 0` are constant in `c`); its minimum is attained at a kink. Zero is
/// also tried so that a flat minimum containing zero resolves to zero.
fn rrq_scalar_exact(r: &[f64], s: &[f64], tau: f64, zero_level: f64) -> f64 {
    let candidates: Vec<(f64, f64)> = std::iter::once(0.0)
        .chain(
            r.iter()
                .zip(s)
                .filter(|(_, si)| si.abs() > zero_level)
                .map(|(ri, si)| ri / si),
        )
        .map(|c| (c, rrq_objective(r, s, tau, c)))
        .collect();
    let f_min = candidates.iter().fold(f64::INFINITY, |m, &(_, f)| m.min(f));
    let tie = 1e-12 * f_min.abs().max(1.0);
    candidates
        .into_iter()
        .filter(|&(_, f)| f <= f_min + tie)
        .map(|(c, _)| c)
        .fold(
            f64::INFINITY,
            |best, c| if c.abs() < best.abs() { c } else { best },
        )
}

/// Fits every tau of `grid` with `method`.
///
/// With `warm_start` each smooth fit starts from the previous solution;
/// otherwise every fit starts from zero and the grid runs in parallel.
/// Per-tau failures are recorded and the grid carries on.
pub fn fit_grid(
    ds: &Dataset,
    grid: &TauGrid,
    method: Method,
    warm_start: bool,
) -> Result<GridResult> {
    let taus = grid.values().to_vec();
    let p = ds.p();
    let mut warnings = Vec::new();
    let mut failures = Vec::new();

    let (coefficients, statuses): (Vec<Vec<f64>>, Vec<Status>) = match method {
        Method::Rrq => {
            let model = fit_rrq(ds, grid)?;
            warnings = model.warnings();
            let planes = model.planes();
            let statuses = vec![Status::Converged; planes.len()];
            (planes, statuses)
        }
        Method::Rq => {
            let fits: Vec<Result<QuantileFit>> = taus
                .par_iter()
                .map(|&t| fit_rq_lp(ds, Tau::new(t)?))
                .collect();
            collect_fits(fits, p, &mut failures)
        }
        _ => {
            let params = method.params().expect("smooth method");
            params.validate()?;
            let config = QNConfig::default();
            if warm_start {
                let mut out = Vec::with_capacity(taus.len());
                let mut prev: Option<Vec<f64>> = None;
                for &t in &taus {
                    let rep = smooth_report(ds, Tau::new(t)?, &params, prev.as_deref(), &config);
                    if let Ok(r) = &rep {
                        prev = Some(r.solution.clone());
                    }
                    out.push(rep);
                }
                collect_reports(out, &taus, p, &mut failures)
            } else {
                let out: Vec<Result<SolveReport>> = taus
                    .par_iter()
                    .map(|&t| smooth_report(ds, Tau::new(t)?, &params, None, &config))
                    .collect();
                collect_reports(out, &taus, p, &mut failures)
            }
        }
    };

    let mut result = GridResult {
        method: method.tag().to_string(),
        taus: taus.clone(),
        coefficients,
        curve: CountCurve {
            taus,
            counts: Vec::new(),
            n: ds.n(),
        },
        events: None,
        statuses,
        failures,
        warnings,
        suppression_incomplete: None,
    };
    result.curve = count_curve(ds, &result)?;
    if result.len() >= 3 {
        result.events = Some(detect_events(&result.curve)?);
    }
    Ok(result)
}

fn collect_fits(
    fits: Vec<Result<QuantileFit>>,
    p: usize,
    failures: &mut Vec<(usize, String)>,
) -> (Vec<Vec<f64>>, Vec<Status>) {
    fits.into_iter()
        .enumerate()
        .map(|(k, fit)| match fit {
            Ok(f) => (f.beta, f.report.status),
            Err(e) => {
                failures.push((k, e.to_string()));
                (vec![f64::NAN; p], Status::IterationCap)
            }
        })
        .unzip()
}

fn collect_reports(
    reports: Vec<Result<SolveReport>>,
    taus: &[f64],
    p: usize,
    failures: &mut Vec<(usize, String)>,
) -> (Vec<Vec<f64>>, Vec<Status>) {
    reports
        .into_iter()
        .enumerate()
        .map(|(k, rep)| match rep {
            Ok(r) => {
                if r.status != Status::Converged {
                    failures.push((
                        k,
                        format!("tau = {}: stopped with status {}", taus[k], r.status),
                    ));
                }
                (r.solution, r.status)
            }
            Err(e) => {
                failures.push((k, e.to_string()));
                (vec![f64::NAN; p], Status::IterationCap)
            }
        })
        .unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::{classic_total, grad_total, loss_total};

    fn tau(t: f64) -> Tau {
        Tau::new(t).unwrap()
    }

    /// Root of `sum_i tanh(10 (y_i - b)) = 0` by bisection.
    fn srq_intercept_oracle(y: &[f64]) -> f64 {
        let g = |b: f64| y.iter().map(|&yi| (10.0 * (yi - b)).tanh()).sum::<f64>();
        let (mut lo, mut hi) = (-100.0, 100.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(m) > 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn smooth_intercept_matches_bisection() {
        let y = [1.0, 2.0, 4.0];
        let ds = Dataset::intercept_only(&y).unwrap();
        let fit = fit_smooth(&ds, tau(0.5), &FlexCheckParams::SRQ, None).unwrap();
        let oracle = srq_intercept_oracle(&y);
        assert!((fit.beta[0] - oracle).abs() < 1e-7);
        assert!((fit.beta[0] - 2.0).abs() < 1e-3);
        assert_eq!(fit.method, Method::Srq);
    }

    #[test]
    fn smooth_recovers_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let ds = Dataset::simple(&x, &y).unwrap();
        let fits: Vec<_> = [0.1, 0.5, 0.9]
            .iter()
            .map(|&t| fit_smooth(&ds, tau(t), &FlexCheckParams::SRQ, None).unwrap())
            .collect();
        // Every residual sits where the loss derivative vanishes:
        // tanh(10 r) = 1 - 2 tau.
        for (f, t) in fits.iter().zip([0.1f64, 0.5, 0.9]) {
            let offset = (1.0 - 2.0 * t).atanh() / 10.0;
            assert!((f.beta[0] - 2.0).abs() < 1e-3, "{:?}", f.beta);
            assert!((f.beta[1] - (1.0 - offset)).abs() < 1e-6, "{:?}", f.beta);
        }
        for w in fits.windows(2) {
            assert!((w[0].beta[0] - w[1].beta[0]).abs() < 1e-3);
        }
    }

    #[test]
    fn smooth_gradient_is_small_at_solution() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [1.2, 1.9, 3.5, 3.9, 5.4, 5.8];
        let ds = Dataset::simple(&x, &y).unwrap();
        for params in [FlexCheckParams::SRQ, FlexCheckParams::SMRQ] {
            for t in [0.1, 0.37, 0.9] {
                let f = fit_smooth(&ds, tau(t), &params, None).unwrap();
                let g = grad_total(&ds, &f.beta, tau(t), &params).unwrap();
                assert!(inf_norm(&g) <= 1e-6 * inf_norm(&f.beta).max(1.0));
            }
        }
    }

    #[test]
    fn smooth_rejects_bad_init() {
        let ds = Dataset::intercept_only(&[1.0, 2.0]).unwrap();
        assert!(fit_smooth(&ds, tau(0.5), &FlexCheckParams::SRQ, Some(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn rq_median_and_upper_quartile() {
        let ds = Dataset::intercept_only(&[1.0, 2.0, 4.0]).unwrap();
        let med = fit_rq_lp(&ds, tau(0.5)).unwrap();
        assert!((med.beta[0] - 2.0).abs() < 1e-12);
        let q = fit_rq_lp(&ds, tau(0.75)).unwrap();
        assert!((q.beta[0] - 4.0).abs() < 1e-12);
        assert!(
            (q.report.objective - classic_total(&ds, &q.beta, tau(0.75)).unwrap()).abs() < 1e-12
        );
    }

    #[test]
    fn rq_through_two_points() {
        let ds = Dataset::simple(&[0.0, 2.0], &[1.0, 5.0]).unwrap();
        for t in [0.1, 0.5, 0.9] {
            let f = fit_rq_lp(&ds, tau(t)).unwrap();
            assert!((f.beta[0] - 2.0).abs() < 1e-12);
            assert!((f.beta[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rq_flags_non_unique_median() {
        // Even sample: any value in [2, 3] is a median.
        let ds = Dataset::intercept_only(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let f = fit_rq_lp(&ds, tau(0.5)).unwrap();
        assert_eq!(f.report.status, Status::DegenerateMultiple);
        assert!(f.beta[0] >= 2.0 - 1e-12 && f.beta[0] <= 3.0 + 1e-12);
    }

    #[test]
    fn lp_beats_smooth_on_classic_loss_and_vice_versa() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let y = [1.2, 1.9, 3.5, 3.9, 5.4, 5.8, 8.0];
        let ds = Dataset::simple(&x, &y).unwrap();
        for t in [0.2, 0.5, 0.8] {
            let lp = fit_rq_lp(&ds, tau(t)).unwrap();
            let sm = fit_smooth(&ds, tau(t), &FlexCheckParams::SRQ, None).unwrap();
            let p = FlexCheckParams::SRQ;
            assert!(
                classic_total(&ds, &lp.beta, tau(t)).unwrap()
                    <= classic_total(&ds, &sm.beta, tau(t)).unwrap() + 1e-9
            );
            assert!(
                loss_total(&ds, &sm.beta, tau(t), &p).unwrap()
                    <= loss_total(&ds, &lp.beta, tau(t), &p).unwrap() + 1e-9
            );
        }
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(
            TauGrid::parse("0.25,0.75,0.25").unwrap().values(),
            &[0.25, 0.5, 0.75]
        );
        let g = TauGrid::parse("0,1,0.01").unwrap();
        assert_eq!(g.len(), 99);
        assert_eq!(g.values()[0], 0.01);
        assert_eq!(g.values()[2], 0.03);
        assert_eq!(g.values()[98], 0.99);
        let g = TauGrid::parse("99").unwrap();
        assert_eq!(g.len(), 99);
        assert_eq!(g.values()[49], 0.5);
        assert!(TauGrid::parse("0.5,0.2,0.1").is_err());
        assert!(TauGrid::parse("abc").is_err());
        assert!(TauGrid::parse("0").is_err());
        assert!(TauGrid::new(vec![0.5, 0.5]).is_err());
        assert!(TauGrid::new(vec![0.0, 0.5]).is_err());
    }

    #[test]
    fn rrq_noise_free_line() {
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let ds = Dataset::simple(&x, &x).unwrap();
        let grid = TauGrid::from_count(9).unwrap();
        let m = fit_rrq(&ds, &grid).unwrap();
        assert!(m.degenerate_scale);
        for plane in m.planes() {
            assert!((plane[0] - m.beta_med[0]).abs() <= 1e-9);
            assert!((plane[1] - m.beta_med[1]).abs() <= 1e-9);
        }
    }

    #[test]
    fn rrq_golden_fallback_matches_exact() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
        let y = [1.3, 2.9, 2.2, 5.5, 4.1, 8.7, 5.0, 11.0, 6.2];
        let ds = Dataset::simple(&x, &y).unwrap();
        let grid = TauGrid::from_count(9).unwrap();
        let exact = fit_rrq(&ds, &grid).unwrap();
        let golden = fit_rrq_with(&ds, &grid, false).unwrap();
        for (k, t) in grid.values().iter().enumerate() {
            let fe = rrq_objective(&exact.residuals, &exact.scales, *t, exact.c[k]);
            let fg = rrq_objective(&golden.residuals, &golden.scales, *t, golden.c[k]);
            assert!(fe <= fg + 1e-12);
            assert!(fg - fe <= 1e-6, "{fg} {fe}");
        }
    }

    #[test]
    fn rrq_median_coefficient_is_zero() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let y = [1.0, 2.5, 2.0, 5.5, 4.0, 8.0, 5.0, 11.0];
        let ds = Dataset::simple(&x, &y).unwrap();
        let grid = TauGrid::from_count(9).unwrap();
        let m = fit_rrq(&ds, &grid).unwrap();
        assert!(m.c[4].abs() <= 1e-8, "{}", m.c[4]);
        assert_eq!(m.plane(4), m.beta_med);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("SRQ".parse::<Method>().unwrap(), Method::Srq);
        assert_eq!("rrq".parse::<Method>().unwrap(), Method::Rrq);
        assert!("flex".parse::<Method>().is_err());
    }

    #[test]
    fn small_grid_counts_nondecreasing() {
        let ds = Dataset::simple(&[0.0, 1.0], &[0.0, 1.0]).unwrap();
        let grid = TauGrid::new(vec![0.25, 0.5, 0.75]).unwrap();
        let g = fit_grid(&ds, &grid, Method::Srq, false).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.curve.is_monotone());
    }

    #[test]
    fn warm_start_and_cold_start_agree() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let y = [1.2, 1.9, 3.5, 3.9, 5.4, 5.8, 8.0];
        let ds = Dataset::simple(&x, &y).unwrap();
        let grid = TauGrid::from_count(19).unwrap();
        let cold = fit_grid(&ds, &grid, Method::Smrq, false).unwrap();
        let warm = fit_grid(&ds, &grid, Method::Smrq, true).unwrap();
        for (a, b) in cold.coefficients.iter().zip(&warm.coefficients) {
            assert!((a[0] - b[0]).abs() < 1e-5 && (a[1] - b[1]).abs() < 1e-5);
        }
    }
}
