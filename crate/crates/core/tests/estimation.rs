use flexqr::{
    bundled_data_dir, classic_total, count_below, fit_grid, fit_rq_lp, fit_rrq, fit_smooth,
    generate, grad_total, load_csv, loss_total, minimize_qn, CounterRng, CsvSchema, Dataset,
    FlexCheckParams, Method, NoiseKind, QNConfig, SynthConfig, Tau, TauGrid,
};
use proptest::prelude::*;

fn tau(t: f64) -> Tau {
    Tau::new(t).unwrap()
}

fn swiss() -> Dataset {
    load_csv(
        bundled_data_dir().join("swiss.csv"),
        &CsvSchema::new("Fertility"),
    )
    .unwrap()
}

fn random_dataset(seed: u64, n: usize, p: usize) -> Dataset {
    let rng = CounterRng::new(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..p - 1)
                .map(|j| 10.0 * rng.uniform_at((i * p + j) as u64) - 5.0)
                .collect()
        })
        .collect();
    let y = (0..n)
        .map(|i| {
            let signal: f64 = rows[i].iter().sum();
            signal + 3.0 * rng.normal_at(1_000_000 + i as u64)
        })
        .collect();
    Dataset::from_rows((1..p).map(|j| format!("x{j}")).collect(), &rows, y).unwrap()
}

#[test]
fn sharp_check_function_approaches_lp_objective() {
    let sharp = FlexCheckParams::new(200.0, 0.0, 0.5, 0.0).unwrap();
    for (k, kind) in [NoiseKind::HeteroNormal, NoiseKind::Pareto]
        .into_iter()
        .enumerate()
    {
        for n in [20, 60, 100] {
            let ds = generate(&SynthConfig::new(kind, n, 17 + k as u64)).unwrap();
            for t in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let lp = classic_total(&ds, &fit_rq_lp(&ds, tau(t)).unwrap().beta, tau(t)).unwrap();
                let sm = fit_smooth(&ds, tau(t), &sharp, None).unwrap();
                let qc = classic_total(&ds, &sm.beta, tau(t)).unwrap();
                assert!(qc >= lp - 1e-9);
                assert!(qc - lp <= 1e-2 * (1.0 + lp), "n={n} tau={t}: {qc} vs {lp}");
            }
        }
    }
}

#[test]
fn unbounded_parameter_combination_is_rejected() {
    let ds = swiss();
    let params = FlexCheckParams::new(1.0, 0.0, 0.9, 0.0).unwrap();
    assert!(fit_smooth(&ds, tau(0.3), &params, None).is_err());
    assert!(fit_smooth(&ds, tau(0.5), &params, None).is_ok());
}

#[test]
fn smooth_fits_meet_gradient_tolerance() {
    let ds = swiss();
    for params in [FlexCheckParams::SRQ, FlexCheckParams::SMRQ] {
        for t in [0.01, 0.1, 0.5, 0.9, 0.99] {
            let fit = fit_smooth(&ds, tau(t), &params, None).unwrap();
            let g = grad_total(&ds, &fit.beta, tau(t), &params).unwrap();
            let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let bmax = fit.beta.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            assert!(gmax <= 1e-6 * bmax, "tau={t}: {gmax}");
        }
    }
}

#[test]
fn rrq_median_plane_is_the_median_lp_fit() {
    let ds = swiss();
    let grid = TauGrid::from_count(9).unwrap();
    let model = fit_rrq(&ds, &grid).unwrap();
    let lp = fit_rq_lp(&ds, tau(0.5)).unwrap();
    assert_eq!(model.plane(4), lp.beta);
}

#[test]
fn parallel_grid_matches_sequential_fits() {
    let ds = swiss();
    let grid = TauGrid::from_count(19).unwrap();
    for method in [Method::Rq, Method::Srq] {
        let g = fit_grid(&ds, &grid, method, false).unwrap();
        for (k, &t) in grid.values().iter().enumerate() {
            let single = match method {
                Method::Rq => fit_rq_lp(&ds, tau(t)).unwrap().beta,
                _ => {
                    fit_smooth(&ds, tau(t), &FlexCheckParams::SRQ, None)
                        .unwrap()
                        .beta
                }
            };
            assert_eq!(g.coefficients[k], single);
        }
        assert_eq!(g, fit_grid(&ds, &grid, method, false).unwrap());
    }
}

#[test]
fn solve_reports_are_bit_identical() {
    let ds = random_dataset(8, 120, 4);
    let a = fit_smooth(&ds, tau(0.3), &FlexCheckParams::SMRQ, None).unwrap();
    let b = fit_smooth(&ds, tau(0.3), &FlexCheckParams::SMRQ, None).unwrap();
    assert_eq!(a.report, b.report);
    let a = fit_rq_lp(&ds, tau(0.3)).unwrap();
    let b = fit_rq_lp(&ds, tau(0.3)).unwrap();
    assert_eq!(a.report, b.report);
}

#[test]
fn count_below_ignores_row_order() {
    let ds = swiss();
    let beta = fit_rq_lp(&ds, tau(0.4)).unwrap().beta;
    let perm: Vec<usize> = (0..ds.n()).rev().collect();
    let shuffled = ds.permuted(&perm).unwrap();
    assert_eq!(
        count_below(&ds, &beta).unwrap(),
        count_below(&shuffled, &beta).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qn_reaches_gradient_tolerance(
        seed in 0u64..1_000_000,
        n_extra in 0usize..480,
        p in 1usize..=16,
        t in 0.02f64..0.98,
        c in 0.3f64..15.0,
        h in -1.0f64..1.0,
        s_offset in -0.45f64..0.45,
    ) {
        // Bounded below only when |tau - s| < 1/2.
        let s = (t + s_offset).clamp(0.0, 1.0);
        let n = p + 4 + n_extra;
        let ds = random_dataset(seed, n, p);
        let params = FlexCheckParams::new(c, h, s, 0.0).unwrap();
        let report = minimize_qn(
            |b, g| {
                g.copy_from_slice(&grad_total(&ds, b, tau(t), &params).unwrap());
                loss_total(&ds, b, tau(t), &params).unwrap()
            },
            &vec![0.0; p],
            &QNConfig::default(),
        )
        .unwrap();
        let g = grad_total(&ds, &report.solution, tau(t), &params).unwrap();
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(gmax <= 1e-6, "status {} after {} iterations, |g| {}", report.status, report.iterations, gmax);
    }

    #[test]
    fn lp_never_worse_than_smooth_in_classic_loss(seed in 0u64..10_000, t in 0.05f64..0.95) {
        let ds = random_dataset(seed, 40, 3);
        let lp = fit_rq_lp(&ds, tau(t)).unwrap();
        let sm = fit_smooth(&ds, tau(t), &FlexCheckParams::SRQ, None).unwrap();
        prop_assert!(
            classic_total(&ds, &lp.beta, tau(t)).unwrap()
                <= classic_total(&ds, &sm.beta, tau(t)).unwrap() + 1e-9
        );
    }
}
