//! Monotonicity diagnostics over a tau grid.
//!
//! For every fitted plane the number of observations strictly below it is
//! counted. An ideal estimator produces a nondecreasing count curve; local
//! departures are classified as spikes (one grid point), pulses (two) or
//! wide events (three or more).
//!
//! Events are found by a left-to-right scan. At each descent
//! `v[k] > v[k+1]` the narrowest window of consecutive indices covering `k`
//! or `k + 1` is chosen whose outer neighbours are in order
//! (`v[a-1] <= v[b+1]`); clamping the window into that band removes the
//! descent. Windows are tried left to right, so a positive spike at `k` wins
//! over a negative spike at `k + 1`. The scan continues on the repaired
//! curve, which makes events disjoint.

use crate::dataset::Dataset;
use crate::error::{QrError, Result};
use crate::optim::Status;

/// Number of observations strictly below a grid of planes.
#[derive(Debug, Clone, PartialEq)]
pub struct CountCurve {
    pub taus: Vec<f64>,
    pub counts: Vec<usize>,
    pub n: usize,
}

impl CountCurve {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.counts.windows(2).all(|w| w[0] <= w[1])
    }

    /// Straight line from `(tau_min, 0)` to `(tau_max, n)`.
    pub fn ideal(&self, tau: f64) -> f64 {
        match (self.taus.first(), self.taus.last()) {
            (Some(&lo), Some(&hi)) if hi > lo => self.n as f64 * (tau - lo) / (hi - lo),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spike {
    pub index: usize,
    pub polarity: Polarity,
}

/// Two adjacent offending grid points starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pulse {
    pub start: usize,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WideEvent {
    pub start: usize,
    pub width: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventReport {
    pub spikes: Vec<Spike>,
    pub pulses: Vec<Pulse>,
    pub wide_events: Vec<WideEvent>,
}

impl EventReport {
    pub fn spike_count(&self) -> usize {
        self.spikes.len()
    }

    pub fn pulse_count(&self) -> usize {
        self.pulses.len()
    }

    pub fn wide_count(&self) -> usize {
        self.wide_events.len()
    }

    pub fn total(&self) -> usize {
        self.spike_count() + self.pulse_count() + self.wide_count()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Grid indices inside any event, ascending.
    pub fn covered_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .spikes
            .iter()
            .map(|s| s.index)
            .chain(self.pulses.iter().flat_map(|p| [p.start, p.start + 1]))
            .chain(
                self.wide_events
                    .iter()
                    .flat_map(|w| w.start..w.start + w.width),
            )
            .collect();
        idx.sort_unstable();
        idx
    }

    /// `"spikes/pulses"` cell as printed in the event tables.
    pub fn summary(&self) -> String {
        format!("{}/{}", self.spike_count(), self.pulse_count())
    }
}

/// Coefficients over a tau grid with their count curve.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    /// Method tag, e.g. `srq` or `smrq-s`.
    pub method: String,
    pub taus: Vec<f64>,
    /// One coefficient vector per tau, intercept last.
    pub coefficients: Vec<Vec<f64>>,
    pub curve: CountCurve,
    pub events: Option<EventReport>,
    /// Per-tau solver status.
    pub statuses: Vec<Status>,
    /// Per-tau failure messages; the grid carries on past failures.
    pub failures: Vec<(usize, String)>,
    /// Flags raised by the estimator (e.g. degenerate RRQ scale fit).
    pub warnings: Vec<String>,
    /// Set by [`suppress_events`]: true when spikes or pulses survived.
    pub suppression_incomplete: Option<bool>,
}

impl GridResult {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

/// Number of observations with `y_i < x_i' beta` (strict).
pub fn count_below(ds: &Dataset, beta: &[f64]) -> Result<usize> {
    ds.check_beta(beta)?;
    Ok((0..ds.n())
        .filter(|&i| ds.y()[i] < ds.fitted_unchecked(i, beta))
        .count())
}

/// Applies [`count_below`] to every plane of `grid`, order preserved.
pub fn count_curve(ds: &Dataset, grid: &GridResult) -> Result<CountCurve> {
    let counts = grid
        .coefficients
        .iter()
        .map(|b| count_below(ds, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(CountCurve {
        taus: grid.taus.clone(),
        counts,
        n: ds.n(),
    })
}

pub fn detect_events(curve: &CountCurve) -> Result<EventReport> {
    let values: Vec<i64> = curve.counts.iter().map(|&c| c as i64).collect();
    detect_events_in(&values)
}

/// Event detection on arbitrary integer sequences.
pub fn detect_events_in(values: &[i64]) -> Result<EventReport> {
    let len = values.len();
    if len < 3 {
        return Err(QrError::CurveTooShort(len));
    }
    let mut w = values.to_vec();
    let mut report = EventReport::default();
    let mut next_free = 0usize;
    let mut k = 0usize;
    while k + 1 < len {
        if w[k] <= w[k + 1] {
            k += 1;
            continue;
        }
        let (a, b) = find_window(&w, k, next_free);
        let (lo, hi) = band(&w, a, b);
        let width = b - a + 1;
        match width {
            1 => report.spikes.push(Spike {
                index: a,
                polarity: if w[a] > hi {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                },
            }),
            2 => report.pulses.push(Pulse {
                start: a,
                polarity: pulse_polarity(w[a], w[a + 1], lo, hi),
            }),
            _ => report.wide_events.push(WideEvent { start: a, width }),
        }
        repair(&mut w, a, b, lo, hi);
        next_free = b + 1;
        k = b.max(k);
    }
    Ok(report)
}

/// Neighbour band `[v[a-1], v[b+1]]`, open-ended at the curve boundaries.
fn band(w: &[i64], a: usize, b: usize) -> (i64, i64) {
    let lo = if a == 0 { i64::MIN } else { w[a - 1] };
    let hi = if b + 1 == w.len() { i64::MAX } else { w[b + 1] };
    (lo, hi)
}

fn find_window(w: &[i64], k: usize, next_free: usize) -> (usize, usize) {
    let len = w.len();
    for width in 1..=len {
        let first = (k + 1).saturating_sub(width).max(next_free);
        for a in first..=k + 1 {
            let b = a + width - 1;
            if b >= len {
                break;
            }
            let (lo, hi) = band(w, a, b);
            if lo <= hi {
                return (a, b);
            }
        }
    }
    // [k + 1, len - 1] always qualifies since its upper band is open.
    unreachable!("no repair window for descent at {k}")
}

fn excursion(v: i64, lo: i64, hi: i64) -> i64 {
    if v > hi {
        v - hi
    } else if v < lo {
        lo - v
    } else {
        0
    }
}

fn pulse_polarity(first: i64, second: i64, lo: i64, hi: i64) -> Polarity {
    let worse = if excursion(second, lo, hi) > excursion(first, lo, hi) {
        second
    } else {
        first
    };
    if worse > hi {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

fn repair(w: &mut [i64], a: usize, b: usize, lo: i64, hi: i64) {
    let mut floor = lo;
    for v in &mut w[a..=b] {
        *v = (*v).clamp(lo, hi).max(floor);
        floor = *v;
    }
}

/// Maximum number of full suppression passes.
pub const MAX_SUPPRESSION_PASSES: usize = 3;

/// Replaces offending planes using their neighbours.
///
/// Spikes take the best of {midpoint of the neighbours, copy of the lower
/// neighbour, copy of the upper neighbour}, ranked by the local violations
/// left after recounting. Pulses are first reduced to a spike by copying the
/// outer neighbour onto the index farther from the neighbour band. Wide
/// events are left alone. Counts are always recomputed from the data.
pub fn suppress_events(
    ds: &Dataset,
    grid: &GridResult,
    report: &EventReport,
) -> Result<GridResult> {
    let mut out = grid.clone();
    if report.spikes.is_empty() && report.pulses.is_empty() {
        if !report.is_empty() {
            out.events = Some(report.clone());
            out.suppression_incomplete = Some(false);
        }
        return Ok(out);
    }
    let len = out.len();
    if len < 3 {
        return Err(QrError::CurveTooShort(len));
    }
    let mut counts = count_curve(ds, &out)?.counts;
    let mut current = report.clone();
    for _ in 0..MAX_SUPPRESSION_PASSES {
        if current.spikes.is_empty() && current.pulses.is_empty() {
            break;
        }
        let mut work: Vec<(usize, Option<Polarity>)> = current
            .spikes
            .iter()
            .map(|s| (s.index, None))
            .chain(current.pulses.iter().map(|p| (p.start, Some(p.polarity))))
            .collect();
        work.sort_by_key(|&(i, _)| i);
        for (start, pulse) in work {
            match pulse {
                None => suppress_spike(ds, &mut out.coefficients, &mut counts, start)?,
                Some(_) => {
                    let a = start;
                    let lo = if a == 0 {
                        i64::MIN
                    } else {
                        counts[a - 1] as i64
                    };
                    let hi = if a + 2 >= len {
                        i64::MAX
                    } else {
                        counts[a + 2] as i64
                    };
                    let ea = excursion(counts[a] as i64, lo, hi);
                    let eb = excursion(counts[a + 1] as i64, lo, hi);
                    let (worse, other) = if eb > ea { (a + 1, a) } else { (a, a + 1) };
                    let outer = if worse == a {
                        if a > 0 {
                            a - 1
                        } else {
                            a + 2
                        }
                    } else if a + 2 < len {
                        a + 2
                    } else {
                        a - 1
                    };
                    if outer < len {
                        out.coefficients[worse] = out.coefficients[outer].clone();
                        counts[worse] = count_below(ds, &out.coefficients[worse])?;
                    }
                    suppress_spike(ds, &mut out.coefficients, &mut counts, other)?;
                }
            }
        }
        let values: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
        current = detect_events_in(&values)?;
    }
    out.curve = CountCurve {
        taus: out.taus.clone(),
        counts,
        n: ds.n(),
    };
    out.suppression_incomplete = Some(!(current.spikes.is_empty() && current.pulses.is_empty()));
    out.events = Some(current);
    if !out.method.ends_with("-s") {
        out.method.push_str("-s");
    }
    Ok(out)
}

fn suppress_spike(
    ds: &Dataset,
    coefs: &mut [Vec<f64>],
    counts: &mut [usize],
    j: usize,
) -> Result<()> {
    let len = coefs.len();
    let prev = j.checked_sub(1);
    let next = (j + 1 < len).then_some(j + 1);
    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(3);
    if let (Some(p), Some(q)) = (prev, next) {
        candidates.push(
            coefs[p]
                .iter()
                .zip(&coefs[q])
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        );
    }
    candidates.extend(prev.map(|p| coefs[p].clone()));
    candidates.extend(next.map(|q| coefs[q].clone()));

    let violations = |c: usize| {
        usize::from(prev.is_some_and(|p| c < counts[p]))
            + usize::from(next.is_some_and(|q| counts[q] < c))
    };
    let mut best: Option<(usize, Vec<f64>, usize)> = None;
    for cand in candidates {
        let c = count_below(ds, &cand)?;
        let v = violations(c);
        if best.as_ref().is_none_or(|(bv, _, _)| v < *bv) {
            best = Some((v, cand, c));
        }
    }
    if let Some((_, beta, c)) = best {
        coefs[j] = beta;
        counts[j] = c;
    }
    Ok(())
}

/// Intersection of two adjacent lines inside the observed x range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub x: f64,
}

/// Crossings of adjacent simple-regression lines (`[slope, intercept]`)
/// within `x_range`.
pub fn detect_crossings_1d(grid: &GridResult, x_range: (f64, f64)) -> Result<Vec<Crossing>> {
    if let Some(b) = grid.coefficients.iter().find(|b| b.len() != 2) {
        return Err(QrError::UnsupportedDimension(b.len()));
    }
    let (lo, hi) = if x_range.0 <= x_range.1 {
        x_range
    } else {
        (x_range.1, x_range.0)
    };
    let mut out = Vec::new();
    for (i, pair) in grid.coefficients.windows(2).enumerate() {
        let (s1, c1) = (pair[0][0], pair[0][1]);
        let (s2, c2) = (pair[1][0], pair[1][1]);
        let ds = s1 - s2;
        if ds.abs() <= 1e-15 * s1.abs().max(s2.abs()).max(1.0) {
            continue;
        }
        let x = (c2 - c1) / ds;
        if x >= lo && x <= hi {
            out.push(Crossing {
                tau_lo: grid.taus[i],
                tau_hi: grid.taus[i + 1],
                x,
            });
        }
    }
    Ok(out)
}
