//! Classic and flexible (log-cosh) check functions.
//!
//! The flexible check function is
//!
//! ```text
//! F(r, tau) = log(cosh(c (r - h))) / (2c) + (tau - s) r + v
//! ```
//!
//! With `c = 10, h = 0, s = 0.5, v = 0` it is the continuous check function
//! used by SRQ; with `c = 0.7, v = 0.4` it is the smoother SMRQ variant.
//! Its derivative `tanh(c (r - h)) / 2 + (tau - s)` has the same asymptotic
//! slopes as the classic check function when `s = 0.5`.

use std::f64::consts::LN_2;

use crate::dataset::Dataset;
use crate::error::{ensure_finite, QrError, Result};

/// Quantile level in the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tau(f64);

impl Tau {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(QrError::InvalidTau(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Tau {
    type Error = QrError;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

/// Parameters `(c, h, s, v)` of the flexible check function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlexCheckParams {
    /// Curvature; larger values sharpen the kink.
    pub c: f64,
    /// Horizontal shift.
    pub h: f64,
    /// Slope offset subtracted from tau.
    pub s: f64,
    /// Vertical shift. Moves loss values only, never the minimizer.
    pub v: f64,
}

impl FlexCheckParams {
    /// Continuous check function (SRQ).
    pub const SRQ: Self = Self {
        c: 10.0,
        h: 0.0,
        s: 0.5,
        v: 0.0,
    };

    /// Smoother check function (SMRQ).
    pub const SMRQ: Self = Self {
        c: 0.7,
        h: 0.0,
        s: 0.5,
        v: 0.4,
    };

    pub fn new(c: f64, h: f64, s: f64, v: f64) -> Result<Self> {
        let p = Self { c, h, s, v };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.h.is_finite() && self.s.is_finite() && self.v.is_finite()) {
            return Err(QrError::InvalidParams(format!(
                "non-finite parameter in {self:?}"
            )));
        }
        if self.c <= 0.0 {
            return Err(QrError::InvalidParams(format!(
                "c must be > 0, got {}",
                self.c
            )));
        }
        if !(0.0..=1.0).contains(&self.s) {
            return Err(QrError::InvalidParams(format!(
                "s must lie in [0, 1], got {}",
                self.s
            )));
        }
        Ok(())
    }

    /// Loss value without input validation.
    #[inline]
    pub fn value(&self, r: f64, tau: f64) -> f64 {
        log_cosh(self.c * (r - self.h)) / (2.0 * self.c) + (tau - self.s) * r + self.v
    }

    /// Derivative in `r` without input validation.
    #[inline]
    pub fn deriv(&self, r: f64, tau: f64) -> f64 {
        0.5 * (self.c * (r - self.h)).tanh() + (tau - self.s)
    }

    /// Second derivative in `r`; strictly positive.
    #[inline]
    pub fn second_deriv(&self, r: f64) -> f64 {
        let sech = 1.0 / (self.c * (r - self.h)).cosh();
        0.5 * self.c * sech * sech
    }
}

/// Above this magnitude `cosh` is bypassed.
const LOG_COSH_SWITCH: f64 = 30.0;

/// Overflow-safe `log(cosh(z))`.
#[inline]
pub fn log_cosh(z: f64) -> f64 {
    let a = z.abs();
    if a > LOG_COSH_SWITCH {
        a - LN_2 + (-2.0 * a).exp().ln_1p()
    } else {
        a.cosh().ln()
    }
}

/// Classic check (pinball) function, unchecked.
#[inline]
pub fn pinball(r: f64, tau: f64) -> f64 {
    if r < 0.0 {
        -(1.0 - tau) * r
    } else {
        tau * r
    }
}

pub fn check_classic(r: f64, tau: Tau) -> Result<f64> {
    ensure_finite("residual", r)?;
    Ok(pinball(r, tau.value()))
}

pub fn check_smooth(r: f64, tau: Tau, params: &FlexCheckParams) -> Result<f64> {
    ensure_finite("residual", r)?;
    params.validate()?;
    Ok(params.value(r, tau.value()))
}

pub fn check_smooth_deriv(r: f64, tau: Tau, params: &FlexCheckParams) -> Result<f64> {
    ensure_finite("residual", r)?;
    params.validate()?;
    Ok(params.deriv(r, tau.value()))
}

/// `Q_S(beta) = sum_i F(y_i - x_i' beta, tau)`.
pub fn loss_total(ds: &Dataset, beta: &[f64], tau: Tau, params: &FlexCheckParams) -> Result<f64> {
    ds.check_beta(beta)?;
    let t = tau.value();
    let total: f64 = (0..ds.n())
        .map(|i| params.value(ds.y()[i] - ds.fitted_unchecked(i, beta), t))
        .sum();
    ensure_finite("loss_total", total)
}

/// Gradient of [`loss_total`] with respect to `beta`.
pub fn grad_total(
    ds: &Dataset,
    beta: &[f64],
    tau: Tau,
    params: &FlexCheckParams,
) -> Result<Vec<f64>> {
    ds.check_beta(beta)?;
    let mut grad = vec![0.0; ds.p()];
    loss_and_grad(ds, beta, tau.value(), params, &mut grad);
    Ok(grad)
}

/// Loss and gradient in one pass. `grad` is overwritten.
pub(crate) fn loss_and_grad(
    ds: &Dataset,
    beta: &[f64],
    tau: f64,
    params: &FlexCheckParams,
    grad: &mut [f64],
) -> f64 {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut total = 0.0;
    for (row, &y) in ds.rows().zip(ds.y()) {
        let r = y - crate::dataset::dot(row, beta);
        total += params.value(r, tau);
        let d = params.deriv(r, tau);
        for (g, &x) in grad.iter_mut().zip(row) {
            *g -= x * d;
        }
    }
    total
}

/// `Q_C(beta) = sum_i rho_tau(y_i - x_i' beta)`.
pub fn classic_total(ds: &Dataset, beta: &[f64], tau: Tau) -> Result<f64> {
    ds.check_beta(beta)?;
    let t = tau.value();
    Ok((0..ds.n())
        .map(|i| pinball(ds.y()[i] - ds.fitted_unchecked(i, beta), t))
        .sum())
}
