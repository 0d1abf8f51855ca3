//! Quantile regression with a flexible log-cosh check function.
//!
//! Besides the smooth estimators (SRQ, SMRQ and arbitrary
//! [`FlexCheckParams`]), the crate provides the classic linear-programming
//! regression quantiles, restricted regression quantiles (RRQ), count-curve
//! monotonicity diagnostics with spike/pulse suppression, and seeded
//! synthetic benchmark generators.
//!
//! ```
//! use flexqr::{fit_smooth, Dataset, FlexCheckParams, Tau};
//!
//! let ds = Dataset::intercept_only(&[1.0, 2.0, 4.0]).unwrap();
//! let fit = fit_smooth(&ds, Tau::new(0.5).unwrap(), &FlexCheckParams::SRQ, None).unwrap();
//! assert!((fit.beta[0] - 2.0).abs() < 1e-3);
//! ```

pub mod datagen;
pub mod dataset;
pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod losses;
pub mod optim;

pub use datagen::{
    gen_hetero_normal, gen_pareto, generate, load_csv, read_csv, write_csv, CounterRng, CsvSchema,
    NoiseKind, SynthConfig, PRNG_NAME,
};
pub use dataset::{Dataset, INTERCEPT};
pub use diagnostics::{
    count_below, count_curve, detect_crossings_1d, detect_events, detect_events_in,
    suppress_events, CountCurve, Crossing, EventReport, GridResult, Polarity, Pulse, Spike,
    WideEvent,
};
pub use error::{QrError, Result};
pub use estimators::{
    fit_grid, fit_rq_lp, fit_rrq, fit_smooth, fit_smooth_with, Method, QuantileFit, RRQModel,
    TauGrid,
};
pub use losses::{
    check_classic, check_smooth, check_smooth_deriv, classic_total, grad_total, log_cosh,
    loss_total, pinball, FlexCheckParams, Tau,
};
pub use optim::{
    minimize_qn, minimize_scalar_convex, solve_lp_simplex, LPProblem, QNConfig, ScalarConfig,
    SolveReport, Status,
};

/// Directory holding the bundled `swiss.csv` and `anscombe.csv`.
pub fn bundled_data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}
