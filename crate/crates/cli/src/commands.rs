use std::fmt::Write as _;
use std::path::Path;

use flexqr::{
    classic_total, count_below, fit_grid, fit_rq_lp, fit_rrq, fit_smooth, generate, load_csv,
    loss_total, suppress_events, CsvSchema, Dataset, FlexCheckParams, GridResult, Method,
    NoiseKind, SynthConfig, Tau, TauGrid,
};
use rayon::prelude::*;

use crate::args::{BenchArgs, DataArgs, FitArgs, FlexArgs, GridArgs, KindArg, MethodArg};
use crate::error::{CliError, CliResult};
use crate::manifest::{Fingerprint, ManifestBuilder};
use crate::output::{self, Column};

pub fn resolve_method(method: MethodArg, flex: &FlexArgs) -> CliResult<Method> {
    let given = [flex.c, flex.h, flex.s, flex.v];
    match method {
        MethodArg::Flex => match given {
            [Some(c), Some(h), Some(s), Some(v)] => {
                let params = FlexCheckParams::new(c, h, s, v)?;
                Ok(Method::Flex(params))
            }
            _ => Err(CliError::Usage(
                "method flex requires all of --c, --h, --s and --v".into(),
            )),
        },
        _ if given.iter().any(Option::is_some) => Err(CliError::Usage(
            "--c, --h, --s and --v only apply to method flex".into(),
        )),
        MethodArg::Rq => Ok(Method::Rq),
        MethodArg::Rrq => Ok(Method::Rrq),
        MethodArg::Srq => Ok(Method::Srq),
        MethodArg::Smrq => Ok(Method::Smrq),
    }
}

fn resolve_methods(methods: &[MethodArg], flex: &FlexArgs) -> CliResult<Vec<Method>> {
    if methods.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    if !methods.contains(&MethodArg::Flex)
        && [flex.c, flex.h, flex.s, flex.v].iter().any(Option::is_some)
    {
        return Err(CliError::Usage(
            "--c, --h, --s and --v only apply to method flex".into(),
        ));
    }
    let mut out = Vec::new();
    for &m in methods {
        let resolved = match m {
            MethodArg::Flex => resolve_method(m, flex)?,
            other => resolve_method(other, &FlexArgs::default())?,
        };
        if !out.contains(&resolved) {
            out.push(resolved);
        }
    }
    Ok(out)
}

fn load(data: &DataArgs) -> CliResult<Dataset> {
    let mut schema = CsvSchema::new(data.response.clone());
    if let Some(p) = &data.predictors {
        schema = schema.with_predictors(p.clone());
    }
    load_csv(&data.data, &schema).map_err(|e| CliError::data_at(&data.data, e))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::data_at(dir, e))
}

/// Single-quantile fit; returns the text report.
pub fn cmd_fit(args: &FitArgs, argv: Vec<String>) -> CliResult<String> {
    let builder = ManifestBuilder::start(argv, args);
    let method = resolve_method(args.method, &args.flex)?;
    let tau = Tau::new(args.tau)?;
    let ds = load(&args.data)?;
    let fingerprint = Fingerprint::of_file(&args.data.data, &ds)?;

    let mut warnings = Vec::new();
    let (beta, status, iterations) = match method {
        Method::Rq => {
            let fit = fit_rq_lp(&ds, tau)?;
            (fit.beta, fit.report.status, fit.report.iterations)
        }
        Method::Rrq => {
            let model = fit_rrq(&ds, &TauGrid::new(vec![tau.value()])?)?;
            warnings.extend(model.warnings());
            (model.plane(0), flexqr::Status::Converged, 0)
        }
        _ => {
            let params = method.params().expect("smooth method");
            let init = if args.warm_start {
                Some(fit_rq_lp(&ds, tau)?.beta)
            } else {
                None
            };
            let fit = fit_smooth(&ds, tau, &params, init.as_deref())?;
            (fit.beta, fit.report.status, fit.report.iterations)
        }
    };

    let loss_params = method.params().unwrap_or(FlexCheckParams::SRQ);
    let q_c = classic_total(&ds, &beta, tau)?;
    let q_s = loss_total(&ds, &beta, tau, &loss_params)?;
    let below = count_below(&ds, &beta)?;

    let mut out = String::new();
    writeln!(out, "method\t{method}").unwrap();
    writeln!(out, "tau\t{}", tau.value()).unwrap();
    writeln!(out, "status\t{status}").unwrap();
    writeln!(out, "iterations\t{iterations}").unwrap();
    writeln!(out, "coefficient\testimate").unwrap();
    for (name, b) in ds.names().iter().zip(&beta) {
        writeln!(out, "{name}\t{b}").unwrap();
    }
    writeln!(out, "below\t{below}").unwrap();
    writeln!(out, "n\t{}", ds.n()).unwrap();
    writeln!(out, "Q_C\t{q_c}").unwrap();
    let q_s_label = if method.params().is_some() {
        "Q_S"
    } else {
        "Q_S(srq)"
    };
    writeln!(out, "{q_s_label}\t{q_s}").unwrap();
    for w in &warnings {
        writeln!(out, "warning\t{w}").unwrap();
    }
    let manifest = builder.finish(vec![], vec![fingerprint], warnings);
    writeln!(
        out,
        "manifest\t{}",
        serde_json::to_string(&manifest).unwrap()
    )
    .unwrap();
    Ok(out)
}

fn grid_warnings(grid: &GridResult, label: &str) -> Vec<String> {
    let mut w: Vec<String> = grid
        .warnings
        .iter()
        .map(|m| format!("{label}: {m}"))
        .collect();
    w.extend(grid.failures.iter().map(|(_, m)| format!("{label}: {m}")));
    if grid.suppression_incomplete == Some(true) {
        w.push(format!(
            "{label}: suppression left spikes or pulses after the pass limit"
        ));
    }
    w
}

fn label_of(method: &Method) -> String {
    method.tag().to_string()
}

/// Runs the grid command and returns the stdout summary.
pub fn cmd_grid(args: &GridArgs, argv: Vec<String>) -> CliResult<String> {
    let builder = ManifestBuilder::start(argv, args);
    let grid = TauGrid::parse(&args.grid)?;
    let methods = resolve_methods(&args.methods, &args.flex)?;
    if args.suppress && grid.len() < 3 {
        return Err(CliError::Usage(
            "--suppress needs at least 3 grid points".into(),
        ));
    }
    let ds = load(&args.data)?;
    let fingerprint = Fingerprint::of_file(&args.data.data, &ds)?;

    let mut results: Vec<(String, GridResult)> = Vec::new();
    for method in &methods {
        let fitted = fit_grid(&ds, &grid, *method, args.warm_start)?;
        let label = label_of(method);
        let suppressed = if args.suppress {
            let report = fitted.events.clone().unwrap_or_default();
            Some(suppress_events(&ds, &fitted, &report)?)
        } else {
            None
        };
        results.push((label.clone(), fitted));
        if let Some(s) = suppressed {
            results.push((format!("{label}-s"), s));
        }
    }

    let columns: Vec<Column> = results
        .iter()
        .map(|(label, g)| Column {
            label: label.clone(),
            grid: g,
        })
        .collect();
    let warnings: Vec<String> = results
        .iter()
        .flat_map(|(l, g)| grid_warnings(g, l))
        .collect();
    let failures: usize = results.iter().map(|(_, g)| g.failures.len()).sum();

    create_dir(&args.out)?;
    let events = output::events_tsv(&columns);
    output::write_file(
        &args.out.join("counts.tsv"),
        &output::counts_tsv(grid.values(), &columns),
    )?;
    output::write_file(&args.out.join("events.tsv"), &events)?;
    output::write_file(
        &args.out.join("coefficients.tsv"),
        &output::coefficients_tsv(ds.names(), &columns),
    )?;
    if args.svg {
        output::write_file(
            &args.out.join("curves.svg"),
            &output::curves_svg(grid.values(), ds.n(), &columns),
        )?;
    }
    let manifest = builder.finish(vec![], vec![fingerprint], warnings.clone());
    manifest.write(&args.out)?;

    if failures > 0 {
        return Err(CliError::Solver(format!(
            "{failures} fit(s) failed; outputs written to {}:\n{}",
            args.out.display(),
            warnings.join("\n")
        )));
    }
    let mut out = events;
    for w in &warnings {
        writeln!(out, "warning\t{w}").unwrap();
    }
    Ok(out)
}

/// Seed of replicate `r` at size `n`.
pub fn replicate_seed(base: u64, n: usize, r: usize) -> u64 {
    base.wrapping_add((n as u64) << 20).wrapping_add(r as u64)
}

struct BenchRun {
    size_index: usize,
    counts: Vec<(usize, usize)>,
    fingerprint: Fingerprint,
    seed: u64,
    warnings: Vec<String>,
    failures: usize,
}

/// Runs the synthetic benchmark and returns bench.tsv.
pub fn cmd_bench(args: &BenchArgs, argv: Vec<String>) -> CliResult<String> {
    let builder = ManifestBuilder::start(argv, args);
    if args.sizes.is_empty() || args.replicates == 0 {
        return Err(CliError::Usage(
            "need at least one size and one replicate".into(),
        ));
    }
    let grid = TauGrid::from_count(args.grid)?;
    if grid.len() < 3 {
        return Err(CliError::Usage("--grid must be at least 3".into()));
    }
    let methods = resolve_methods(&args.methods, &args.flex)?;
    let kind = match args.kind {
        KindArg::Pareto => NoiseKind::Pareto,
        KindArg::Normal => NoiseKind::HeteroNormal,
    };

    let tasks: Vec<(usize, usize)> = (0..args.sizes.len())
        .flat_map(|i| (0..args.replicates).map(move |r| (i, r)))
        .collect();
    let runs: Vec<CliResult<BenchRun>> = tasks
        .par_iter()
        .map(|&(i, r)| {
            let n = args.sizes[i];
            let seed = replicate_seed(args.seed, n, r);
            let ds = generate(&SynthConfig::new(kind, n, seed))?;
            let mut counts = Vec::new();
            let mut warnings = Vec::new();
            let mut failures = 0;
            for m in &methods {
                let g = fit_grid(&ds, &grid, *m, false)?;
                let ev = g.events.clone().unwrap_or_default();
                counts.push((ev.spike_count(), ev.pulse_count()));
                failures += g.failures.len();
                warnings.extend(grid_warnings(&g, &format!("n={n} rep={r} {m}")));
            }
            let source = format!("{}:n={n}:seed={seed}", kind.as_str());
            Ok(BenchRun {
                size_index: i,
                counts,
                fingerprint: Fingerprint::of_dataset(source, &ds),
                seed,
                warnings,
                failures,
            })
        })
        .collect();
    let runs = runs.into_iter().collect::<CliResult<Vec<_>>>()?;

    let labels: Vec<String> = methods.iter().map(label_of).collect();
    let cells: Vec<Vec<(f64, f64)>> = (0..args.sizes.len())
        .map(|i| {
            (0..methods.len())
                .map(|j| {
                    let mine: Vec<&BenchRun> = runs.iter().filter(|r| r.size_index == i).collect();
                    let s: Vec<usize> = mine.iter().map(|r| r.counts[j].0).collect();
                    let p: Vec<usize> = mine.iter().map(|r| r.counts[j].1).collect();
                    (output::median(&s), output::median(&p))
                })
                .collect()
        })
        .collect();
    let table = output::bench_tsv(&args.sizes, &labels, &cells);

    let mut detail = String::from("points\treplicate\tseed\tmethod\tspikes\tpulses\n");
    for (run, &(i, r)) in runs.iter().zip(&tasks) {
        for (j, label) in labels.iter().enumerate() {
            let (s, p) = run.counts[j];
            writeln!(
                detail,
                "{}\t{r}\t{}\t{label}\t{s}\t{p}",
                args.sizes[i], run.seed
            )
            .unwrap();
        }
    }

    create_dir(&args.out)?;
    output::write_file(&args.out.join("bench.tsv"), &table)?;
    output::write_file(&args.out.join("bench_runs.tsv"), &detail)?;
    let warnings: Vec<String> = runs.iter().flat_map(|r| r.warnings.clone()).collect();
    let failures: usize = runs.iter().map(|r| r.failures).sum();
    let manifest = builder.finish(
        runs.iter().map(|r| r.seed).collect(),
        runs.iter().map(|r| r.fingerprint.clone()).collect(),
        warnings.clone(),
    );
    manifest.write(&args.out)?;
    if failures > 0 {
        return Err(CliError::Solver(format!(
            "{failures} fit(s) failed; outputs written to {}:\n{}",
            args.out.display(),
            warnings.join("\n")
        )));
    }
    Ok(table)
}
