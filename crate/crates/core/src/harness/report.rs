//! Experiment reports: per-trial rows, cell means, CSV and SVG output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::transforms::Signal;

/// Relative error below which a trial counts as exact recovery.
pub const EXACT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub scheme: String,
    pub fraction_or_m: f64,
    /// `inf` for noiseless cells.
    pub snr_db: f64,
    pub trial: usize,
    pub rel_err: f64,
    pub grad_rel_err: f64,
    pub residual: f64,
    pub iters: usize,
    pub converged: bool,
}

/// Mean over the trials of one `(scheme, fraction_or_m, snr_db)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub scheme: String,
    pub fraction_or_m: f64,
    pub snr_db: f64,
    pub trials: usize,
    pub mean_rel_err: f64,
    pub mean_grad_rel_err: f64,
    /// Trials with relative error below [`EXACT_THRESHOLD`].
    pub exact: usize,
    pub converged: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub name: String,
    pub rows: Vec<TrialRow>,
    /// Ground truth shared by every row.
    pub truth: Option<Signal>,
    /// Reconstructions aligned with `rows`, when requested.
    pub recons: Vec<Signal>,
}

impl ExperimentReport {
    /// Cells in order of first appearance.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells: Vec<Cell> = Vec::new();
        for r in &self.rows {
            let pos = cells.iter().position(|c| {
                c.scheme == r.scheme && c.fraction_or_m == r.fraction_or_m && c.snr_db == r.snr_db
            });
            let cell = match pos {
                Some(i) => &mut cells[i],
                None => {
                    cells.push(Cell {
                        scheme: r.scheme.clone(),
                        fraction_or_m: r.fraction_or_m,
                        snr_db: r.snr_db,
                        trials: 0,
                        mean_rel_err: 0.0,
                        mean_grad_rel_err: 0.0,
                        exact: 0,
                        converged: 0,
                    });
                    cells.last_mut().expect("just pushed")
                }
            };
            cell.trials += 1;
            cell.mean_rel_err += r.rel_err;
            cell.mean_grad_rel_err += r.grad_rel_err;
            cell.exact += usize::from(r.rel_err < EXACT_THRESHOLD);
            cell.converged += usize::from(r.converged);
        }
        for c in &mut cells {
            c.mean_rel_err /= c.trials as f64;
            c.mean_grad_rel_err /= c.trials as f64;
        }
        cells
    }

    /// Cells of one scheme, in order.
    pub fn scheme_cells(&self, scheme: &str) -> Vec<Cell> {
        self.cells()
            .into_iter()
            .filter(|c| c.scheme == scheme)
            .collect()
    }

    pub fn schemes(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.scheme) {
                out.push(r.scheme.clone());
            }
        }
        out
    }
}

pub const CSV_HEADER: &str =
    "scheme,fraction_or_m,snr_db,trial,rel_err,grad_rel_err,residual,iters,converged";

pub fn format_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.scheme,
            r.fraction_or_m,
            r.snr_db,
            r.trial,
            r.rel_err,
            r.grad_rel_err,
            r.residual,
            r.iters,
            r.converged
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<TrialRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::parse(1, "missing report header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let no = i + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(Error::parse(
                no,
                format!("expected 9 fields, found {}", f.len()),
            ));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(no, format!("bad number '{s}'")))
        };
        let int = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::parse(no, format!("bad integer '{s}'")))
        };
        rows.push(TrialRow {
            scheme: f[0].to_string(),
            fraction_or_m: num(f[1])?,
            snr_db: num(f[2])?,
            trial: int(f[3])?,
            rel_err: num(f[4])?,
            grad_rel_err: num(f[5])?,
            residual: num(f[6])?,
            iters: int(f[7])?,
            converged: f[8]
                .parse()
                .map_err(|_| Error::parse(no, format!("bad flag '{}'", f[8])))?,
        });
    }
    Ok(rows)
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

/// Line plot of mean relative error (log scale) per scheme, against SNR
/// when the report has noisy cells and against the sampling level otherwise.
pub fn format_svg(report: &ExperimentReport) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let cells = report.cells();
    let by_snr = cells.iter().any(|c| c.snr_db.is_finite());
    let finite: Vec<&Cell> = cells
        .iter()
        .filter(|c| !by_snr || c.snr_db.is_finite())
        .collect();
    let xs: Vec<f64> = finite
        .iter()
        .map(|c| if by_snr { c.snr_db } else { c.fraction_or_m })
        .collect();
    let ys: Vec<f64> = finite
        .iter()
        .map(|c| c.mean_rel_err.max(1e-12).log10())
        .collect();
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let px = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<title>{}</title>"#, report.name);
    let _ = writeln!(
        out,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 12.0,
        if by_snr { "SNR (dB)" } else { "sampling level" }
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">log10 mean relative error</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (i, scheme) in report.schemes().iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = finite
            .iter()
            .zip(xs.iter().zip(&ys))
            .filter(|(c, _)| &c.scheme == scheme)
            .map(|(_, (&x, &y))| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{colour}">{scheme}</text>"#,
            w - pad - 150.0,
            pad + 18.0 * (i + 1) as f64
        );
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Svg,
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => format_csv(report),
        ReportFormat::Svg => format_svg(report),
    };
    Ok(fs::write(path, text)?)
}
