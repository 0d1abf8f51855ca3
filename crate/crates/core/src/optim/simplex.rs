use super::{SolveReport, Status};
use crate::error::{QrError, Result};

/// `min c'x  s.t.  A x = b,  x >= 0` with a dense row-major `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LPProblem {
    objective: Vec<f64>,
    a: Vec<f64>,
    rhs: Vec<f64>,
}

impl LPProblem {
    pub fn new(objective: Vec<f64>, a: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        let m = rhs.len();
        if a.len() != n * m {
            return Err(QrError::DimensionMismatch {
                expected: n * m,
                got: a.len(),
            });
        }
        if let Some(v) = objective
            .iter()
            .chain(&a)
            .chain(&rhs)
            .find(|v| !v.is_finite())
        {
            return Err(QrError::NonFinite {
                what: "LP data",
                value: *v,
            });
        }
        Ok(Self { objective, a, rhs })
    }

    /// Builds from a list of constraint rows.
    pub fn from_rows(objective: Vec<f64>, rows: &[Vec<f64>], rhs: Vec<f64>) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(QrError::DimensionMismatch {
                expected: rhs.len(),
                got: rows.len(),
            });
        }
        let n = objective.len();
        let mut a = Vec::with_capacity(n * rows.len());
        for row in rows {
            if row.len() != n {
                return Err(QrError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            a.extend_from_slice(row);
        }
        Self::new(objective, a, rhs)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    fn coef(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.num_vars() + j]
    }
}

const EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

/// Dense tableau. Columns `0..n` are the problem variables, then one column
/// per artificial variable, then the right-hand side.
struct Tableau {
    rows: usize,
    width: usize,
    n_vars: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    reduced: Vec<f64>,
    value: f64,
    pivots: usize,
    nz: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    /// Sets the cost row to `cost` reduced against the current basis.
    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        self.reduced.clear();
        self.reduced.extend_from_slice(cost);
        self.reduced.resize(w - 1, 0.0);
        self.value = 0.0;
        for i in 0..self.rows {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                let row = &self.t[i * w..(i + 1) * w];
                for (d, &v) in self.reduced.iter_mut().zip(row) {
                    *d -= cb * v;
                }
                self.value -= cb * row[w - 1];
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(r, q);
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            self.nz.clear();
            for (j, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v *= inv;
                    self.nz.push(j);
                }
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for other in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let factor = other[q];
            if factor != 0.0 {
                for &j in &self.nz {
                    other[j] -= factor * prow[j];
                }
                other[q] = 0.0;
            }
        }
        let factor = self.reduced[q];
        if factor != 0.0 {
            for &j in &self.nz {
                if j + 1 < w {
                    self.reduced[j] -= factor * prow[j];
                }
            }
            self.value -= factor * prow[w - 1];
            self.reduced[q] = 0.0;
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    /// Runs primal simplex with Bland's rule over columns `0..allowed`.
    fn optimize(&mut self, allowed: usize) -> Status {
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Status::IterationCap;
            }
            let Some(q) = (0..allowed).find(|&j| self.reduced[j] < -EPS) else {
                return Status::Converged;
            };
            let rhs = self.rhs_col();
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, q);
                if a > EPS {
                    let ratio = self.at(i, rhs) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - EPS
                                || (ratio <= best + EPS && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Status::Unbounded,
                Some((r, _)) => self.pivot(r, q),
            }
        }
    }
}

/// Solves an [`LPProblem`] with the two-phase primal simplex method and
/// Bland's anti-cycling rule.
///
/// Rows that already contain a unit column are started from it, so phase one
/// only runs over rows that need an artificial variable.
pub fn solve_lp_simplex(problem: &LPProblem) -> Result<SolveReport> {
    let n = problem.num_vars();
    let m = problem.num_constraints();

    // Normalize to b >= 0.
    let sign: Vec<f64> = problem
        .rhs
        .iter()
        .map(|&b| if b < 0.0 { -1.0 } else { 1.0 })
        .collect();

    // Rows that own a column which is positive there and zero elsewhere.
    let mut row_basis: Vec<Option<usize>> = vec![None; m];
    let mut column_nnz = vec![0usize; n];
    let mut column_row = vec![0usize; n];
    for i in 0..m {
        for j in 0..n {
            if problem.coef(i, j) != 0.0 {
                column_nnz[j] += 1;
                column_row[j] = i;
            }
        }
    }
    for j in 0..n {
        if column_nnz[j] == 1 {
            let i = column_row[j];
            if row_basis[i].is_none() && sign[i] * problem.coef(i, j) > 0.0 {
                row_basis[i] = Some(j);
            }
        }
    }
    let artificial_rows: Vec<usize> = (0..m).filter(|&i| row_basis[i].is_none()).collect();
    let n_art = artificial_rows.len();
    let width = n + n_art + 1;

    let mut t = vec![0.0; m * width];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        let row = &mut t[i * width..(i + 1) * width];
        for (j, cell) in row[..n].iter_mut().enumerate() {
            *cell = sign[i] * problem.coef(i, j);
        }
        row[width - 1] = sign[i] * problem.rhs[i];
    }
    for (k, &i) in artificial_rows.iter().enumerate() {
        t[i * width + n + k] = 1.0;
        basis[i] = n + k;
    }
    for i in 0..m {
        if let Some(j) = row_basis[i] {
            let scale = 1.0 / t[i * width + j];
            t[i * width..(i + 1) * width]
                .iter_mut()
                .for_each(|v| *v *= scale);
            basis[i] = j;
        }
    }

    let mut tab = Tableau {
        rows: m,
        width,
        n_vars: n,
        t,
        basis,
        reduced: Vec::with_capacity(width),
        value: 0.0,
        pivots: 0,
        nz: Vec::with_capacity(width),
    };

    if n_art > 0 {
        let mut phase1_cost = vec![0.0; n + n_art];
        phase1_cost[n..].iter_mut().for_each(|c| *c = 1.0);
        tab.price(&phase1_cost);
        if tab.optimize(n + n_art) == Status::IterationCap {
            return Ok(no_solution(Status::IterationCap, tab.pivots));
        }
        let infeasibility: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= n)
            .map(|i| tab.at(i, tab.rhs_col()))
            .sum();
        let scale = problem.rhs.iter().fold(1.0f64, |acc, b| acc.max(b.abs()));
        if infeasibility > EPS * scale {
            return Ok(no_solution(Status::Infeasible, tab.pivots));
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= n {
                if let Some(q) = (0..n).find(|&j| tab.at(i, j).abs() > EPS) {
                    tab.pivot(i, q);
                }
            }
        }
    }

    tab.price(&problem.objective);
    let status = tab.optimize(n);
    match status {
        Status::Unbounded | Status::IterationCap => return Ok(no_solution(status, tab.pivots)),
        _ => {}
    }

    let mut solution = vec![0.0; n];
    for i in 0..m {
        let j = tab.basis[i];
        if j < n {
            solution[j] = tab.at(i, tab.rhs_col());
        }
    }
    let objective = problem
        .objective
        .iter()
        .zip(&solution)
        .map(|(c, x)| c * x)
        .sum();

    let status = if has_alternative_optimum(problem, &tab) {
        Status::DegenerateMultiple
    } else {
        Status::Converged
    };
    Ok(SolveReport {
        solution,
        objective,
        iterations: tab.pivots,
        status,
    })
}

/// A non-basic column with zero reduced cost signals multiple optima, unless
/// it is the mirror image of a basic column (the two halves of a split free
/// variable), which cannot move the solution.
fn has_alternative_optimum(problem: &LPProblem, tab: &Tableau) -> bool {
    let n = tab.n_vars;
    let mut is_basic = vec![false; n];
    for &j in &tab.basis {
        if j < n {
            is_basic[j] = true;
        }
    }
    let basic: Vec<usize> = (0..n).filter(|&j| is_basic[j]).collect();
    (0..n)
        .filter(|&j| !is_basic[j] && tab.reduced[j].abs() <= EPS)
        .any(|j| !basic.iter().any(|&k| is_mirror(problem, j, k)))
}

fn is_mirror(problem: &LPProblem, j: usize, k: usize) -> bool {
    problem.objective[j] == -problem.objective[k]
        && (0..problem.num_constraints()).all(|i| problem.coef(i, j) == -problem.coef(i, k))
}

fn no_solution(status: Status, iterations: usize) -> SolveReport {
    SolveReport {
        solution: Vec::new(),
        objective: f64::NAN,
        iterations,
        status,
    }
}
