//! Flattens a run report into plot-ready series.
//!
//! The output is a four-column CSV, `series,label,x,y`. A `series` names a
//! family of curves (what the axes mean); a `label` separates curves within
//! the family. Rows keep report order, so reruns of the same report give the
//! same bytes, and an empty report gives just the header.

use std::path::Path;

use crate::run::RunReport;
use crate::CliError;

pub const PLOT_HEADER: &str = "series,label,x,y";

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn push(out: &mut String, series: &str, label: &str, x: f64, y: f64) {
    out.push_str(series);
    out.push(',');
    out.push_str(label);
    out.push(',');
    out.push_str(&fmt(x));
    out.push(',');
    out.push_str(&fmt(y));
    out.push('\n');
}

/// Renders the series CSV for a report.
pub fn render_plotdata(report: &RunReport) -> String {
    let mut out = String::from(PLOT_HEADER);
    out.push('\n');

    for r in &report.ratios {
        let mode = r.mode.as_deref().unwrap_or("-");
        let curve = format!("{}|{}|d{}|{}", r.tag, r.symbol, r.dim, mode);
        let eps = r.eps_requested.unwrap_or(r.eps_achieved);
        push(&mut out, "ratio_vs_eps", &curve, eps, r.ratio);
        if let Some(alpha) = r.alpha {
            let curve = format!("{}|{}|d{}|eps{}", r.tag, r.symbol, r.dim, fmt(eps));
            push(&mut out, "ratio_vs_alpha", &curve, alpha, r.ratio);
        }
    }

    for c in &report.hard_checks {
        let curve = format!("{}|{}|eps{}", report.suite, c.mode, fmt(c.eps));
        push(
            &mut out,
            "defect_vs_dim",
            &curve,
            c.dim as f64,
            c.value / c.bound,
        );
    }

    for entry in &report.weak_tables {
        let curve = format!(
            "{}|d{}|{}|eps{}",
            entry.symbol,
            entry.dim,
            entry.mode,
            fmt(entry.eps)
        );
        for row in &entry.table.rows {
            push(&mut out, "singular_values", &curve, row.j as f64, row.s);
            push(
                &mut out,
                "weighted_singular_values",
                &curve,
                row.j as f64,
                row.weighted,
            );
        }
    }

    for entry in &report.partial_sums {
        let curve = format!(
            "{}|d{}|{}|eps{}",
            entry.symbol,
            entry.dim,
            entry.mode,
            fmt(entry.eps)
        );
        for row in &entry.table.rows {
            if let Some(ratio) = row.ratio {
                push(&mut out, "partial_sum_ratio", &curve, row.l as f64, ratio);
            }
        }
    }

    for est in &report.estimates {
        push(
            &mut out,
            "search_best",
            &est.tag,
            est.evaluations as f64,
            est.best_ratio,
        );
    }

    out
}

/// Reads `report.json`, writes the series CSV. A malformed report is a
/// configuration-class error; nothing is written in that case.
pub fn emit_plotdata(report_path: &Path, out_path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(report_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", report_path.display())))?;
    let report: RunReport = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("report {}: {e}", report_path.display())))?;
    std::fs::write(out_path, render_plotdata(&report))?;
    Ok(())
}
