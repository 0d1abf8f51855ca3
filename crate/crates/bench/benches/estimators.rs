use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use flexqr::{
    bundled_data_dir, check_smooth, detect_events_in, fit_grid, fit_rq_lp, fit_rrq, fit_smooth,
    generate, load_csv, CsvSchema, FlexCheckParams, Method, NoiseKind, SynthConfig, Tau, TauGrid,
};

fn losses(c: &mut Criterion) {
    let tau = Tau::new(0.3).unwrap();
    let rs: Vec<f64> = (0..1000).map(|i| -5.0 + i as f64 * 0.01).collect();
    c.bench_function("check_smooth/1000", |b| {
        b.iter(|| {
            rs.iter()
                .map(|&r| check_smooth(black_box(r), tau, &FlexCheckParams::SRQ).unwrap())
                .sum::<f64>()
        })
    });
}

fn single_fits(c: &mut Criterion) {
    let swiss = load_csv(
        bundled_data_dir().join("swiss.csv"),
        &CsvSchema::new("Fertility"),
    )
    .unwrap();
    let tau = Tau::new(0.5).unwrap();
    c.bench_function("fit_smooth/swiss/srq", |b| {
        b.iter(|| fit_smooth(&swiss, tau, &FlexCheckParams::SRQ, None).unwrap())
    });
    c.bench_function("fit_smooth/swiss/smrq", |b| {
        b.iter(|| fit_smooth(&swiss, tau, &FlexCheckParams::SMRQ, None).unwrap())
    });

    let mut group = c.benchmark_group("fit_rq_lp");
    group.sample_size(10);
    for n in [20, 100, 400] {
        let ds = generate(&SynthConfig::new(NoiseKind::Pareto, n, 1)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &ds, |b, ds| {
            b.iter(|| fit_rq_lp(ds, tau).unwrap())
        });
    }
    group.finish();
}

fn grids(c: &mut Criterion) {
    let grid = TauGrid::from_count(99).unwrap();
    let ds = generate(&SynthConfig::new(NoiseKind::HeteroNormal, 100, 2)).unwrap();
    let mut group = c.benchmark_group("fit_grid/normal100/99");
    group.sample_size(10);
    for method in [Method::Rq, Method::Srq, Method::Smrq] {
        group.bench_function(method.tag(), |b| {
            b.iter(|| fit_grid(&ds, &grid, method, false).unwrap())
        });
    }
    group.bench_function("rrq", |b| b.iter(|| fit_rrq(&ds, &grid).unwrap()));
    group.finish();

    let curve: Vec<i64> = (0..999)
        .map(|i| i / 10 + if i % 37 == 0 { 5 } else { 0 })
        .collect();
    c.bench_function("detect_events/999", |b| {
        b.iter(|| detect_events_in(black_box(&curve)).unwrap())
    });
}

criterion_group!(benches, losses, single_fits, grids);
criterion_main!(benches);
