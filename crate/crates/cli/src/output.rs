//! Plain-text artifacts: TSV tables and the SVG count-curve plot.

use std::fmt::Write as _;
use std::path::Path;

use flexqr::{EventReport, GridResult};

use crate::error::{CliError, CliResult};

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::data_at(path, e))
}

/// One labelled curve: a column of counts.tsv.
pub struct Column<'a> {
    pub label: String,
    pub grid: &'a GridResult,
}

pub fn counts_tsv(taus: &[f64], columns: &[Column]) -> String {
    let mut out = String::from("tau");
    for c in columns {
        out.push('\t');
        out.push_str(&c.label);
    }
    out.push('\n');
    for (k, t) in taus.iter().enumerate() {
        write!(out, "{t}").unwrap();
        for c in columns {
            write!(out, "\t{}", c.grid.curve.counts[k]).unwrap();
        }
        out.push('\n');
    }
    out
}

fn events_of(grid: &GridResult) -> EventReport {
    grid.events.clone().unwrap_or_default()
}

/// Header row of labels; a spikes/pulses row keyed by the grid size, then a
/// row of wide-event counts.
pub fn events_tsv(columns: &[Column]) -> String {
    let m = columns.first().map_or(0, |c| c.grid.len());
    let mut out = String::from("quantiles");
    for c in columns {
        write!(out, "\t{}", c.label).unwrap();
    }
    write!(out, "\n{m}").unwrap();
    for c in columns {
        write!(out, "\t{}", events_of(c.grid).summary()).unwrap();
    }
    out.push_str("\nwide");
    for c in columns {
        write!(out, "\t{}", events_of(c.grid).wide_count()).unwrap();
    }
    out.push('\n');
    out
}

/// Long format: method, tau, status, then one column per coefficient.
pub fn coefficients_tsv(names: &[String], columns: &[Column]) -> String {
    let mut out = String::from("method\ttau\tstatus");
    for n in names {
        write!(out, "\t{n}").unwrap();
    }
    out.push('\n');
    for c in columns {
        for (k, beta) in c.grid.coefficients.iter().enumerate() {
            write!(
                out,
                "{}\t{}\t{}",
                c.label, c.grid.taus[k], c.grid.statuses[k]
            )
            .unwrap();
            for b in beta {
                write!(out, "\t{b}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// Median of small integer samples; halves print as `x.5`.
pub fn median(values: &[usize]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2] as f64,
        n => (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0,
    }
}

/// Rows are data sizes, columns methods, cells `median spikes/median pulses`.
pub fn bench_tsv(sizes: &[usize], labels: &[String], cells: &[Vec<(f64, f64)>]) -> String {
    let mut out = String::from("points");
    for l in labels {
        write!(out, "\t{l}").unwrap();
    }
    out.push('\n');
    for (row, n) in sizes.iter().enumerate() {
        write!(out, "{n}").unwrap();
        for (s, p) in &cells[row] {
            write!(out, "\t{s}/{p}").unwrap();
        }
        out.push('\n');
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

/// Count curves as straight polylines through the (tau, count) points,
/// plus the ideal line `n * tau` dashed.
pub fn curves_svg(taus: &[f64], n: usize, columns: &[Column]) -> String {
    let (w, h, margin) = (640.0, 400.0, 50.0);
    let px = |t: f64| margin + t * (w - 2.0 * margin);
    let py = |c: f64| h - margin - c / (n.max(1) as f64) * (h - 2.0 * margin);
    let mut out = String::new();
    writeln!(
        out,
        r##"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>
<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>
<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>
<text x="{xm}" y="{yl}" text-anchor="middle" font-size="12">tau</text>
<text x="12" y="{ym}" font-size="12" transform="rotate(-90 12 {ym})" text-anchor="middle">count below</text>
<text x="{x0}" y="{yt}" font-size="10" text-anchor="middle">0</text>
<text x="{x1}" y="{yt}" font-size="10" text-anchor="middle">1</text>
<text x="{xn}" y="{y1}" font-size="10" text-anchor="end">{n}</text>
<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#999999" stroke-dasharray="4 3"/>"##,
        x0 = px(0.0),
        x1 = px(1.0),
        y0 = py(0.0),
        y1 = py(n as f64),
        xm = w / 2.0,
        ym = h / 2.0,
        yl = h - 12.0,
        yt = py(0.0) + 14.0,
        xn = px(0.0) - 4.0,
    )
    .unwrap();
    for (j, c) in columns.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        let points: Vec<String> = taus
            .iter()
            .zip(&c.grid.curve.counts)
            .map(|(&t, &k)| format!("{:.3},{:.3}", px(t), py(k as f64)))
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"><title>{}</title></polyline>"#,
            points.join(" "),
            c.label
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            w - margin + 4.0,
            margin + 14.0 * j as f64,
            c.label
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use flexqr::{CountCurve, Status};

    fn grid(counts: Vec<usize>) -> GridResult {
        let taus = vec![0.25, 0.5, 0.75];
        GridResult {
            method: "rq".into(),
            taus: taus.clone(),
            coefficients: vec![vec![1.0, 2.0]; 3],
            curve: CountCurve {
                taus,
                counts: counts.clone(),
                n: 4,
            },
            events: Some(
                flexqr::detect_events_in(&counts.iter().map(|&c| c as i64).collect::<Vec<_>>())
                    .unwrap(),
            ),
            statuses: vec![Status::Converged; 3],
            failures: vec![],
            warnings: vec![],
            suppression_incomplete: None,
        }
    }

    #[test]
    fn counts_layout() {
        let g = grid(vec![1, 2, 3]);
        let cols = [Column {
            label: "rq".into(),
            grid: &g,
        }];
        assert_eq!(
            counts_tsv(&g.taus, &cols),
            "tau\trq\n0.25\t1\n0.5\t2\n0.75\t3\n"
        );
    }

    #[test]
    fn events_layout() {
        let a = grid(vec![1, 3, 2]);
        let b = grid(vec![1, 2, 3]);
        let cols = [
            Column {
                label: "rq".into(),
                grid: &a,
            },
            Column {
                label: "srq".into(),
                grid: &b,
            },
        ];
        assert_eq!(
            events_tsv(&cols),
            "quantiles\trq\tsrq\n3\t1/0\t0/0\nwide\t0\t0\n"
        );
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3, 1, 2]), 2.0);
        assert_eq!(median(&[4, 1, 2, 3]), 2.5);
        assert_eq!(median(&[]), 0.0);
        assert_eq!(format!("{}/{}", median(&[1, 1]), median(&[0, 1])), "1/0.5");
    }

    #[test]
    fn svg_has_one_polyline_per_column() {
        let g = grid(vec![1, 2, 3]);
        let cols = [Column {
            label: "rq".into(),
            grid: &g,
        }];
        let svg = curves_svg(&g.taus, 4, &cols);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
