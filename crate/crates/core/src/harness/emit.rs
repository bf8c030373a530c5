use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::run::{Evaluation, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Human,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(ReportFormat::Human),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Usage(format!("unknown report format `{other}` (human, json, csv)"))),
        }
    }
}

pub const CSV_HEADER: &str = "theorem,slack,tolerance,pass,seed,dims";

fn dims_label(dims: &[usize]) -> String {
    dims.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

fn slack_text(e: &Evaluation) -> String {
    e.slack().map(|s| format!("{s:.6e}")).unwrap_or_default()
}

/// Renders a report. `format` is one of `human`, `json`, `csv`.
pub fn emit_report(report: &RunReport, format: &str) -> Result<String> {
    Ok(render(report, format.parse()?))
}

pub fn render(report: &RunReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::Csv => csv(report),
        ReportFormat::Human => human(report),
    }
}

fn csv(report: &RunReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for e in &report.evaluations {
        let seed = e.seed.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{:e},{},{},{}",
            e.theorem,
            slack_text(e),
            e.tolerance,
            e.pass,
            seed,
            dims_label(&e.dims)
        );
    }
    out
}

fn human(report: &RunReport) -> String {
    let rows: Vec<[String; 5]> = report
        .evaluations
        .iter()
        .map(|e| {
            [
                e.theorem.to_string(),
                e.trial.map(|t| t.to_string()).unwrap_or_else(|| "-".into()),
                dims_label(&e.dims),
                if e.error.is_some() { "error".into() } else { slack_text(e) },
                if e.pass { "pass".into() } else { "FAIL".into() },
            ]
        })
        .collect();
    let header = ["theorem", "trial", "dims", "slack", "result"];
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = String::new();
    let _ = writeln!(out, "{}", line(&header.map(String::from)));
    for (row, e) in rows.iter().zip(&report.evaluations) {
        let _ = writeln!(out, "{}", line(row));
        if let Some(err) = &e.error {
            let _ = writeln!(out, "    {err}");
        }
        if let Some(r) = &e.report {
            for l in r.links.iter().filter(|l| !l.pass) {
                let _ = writeln!(out, "    link {} failed: gap {:.3e}", l.name, l.gap);
            }
        }
    }
    let agg = &report.aggregate;
    let min = agg.min_slack.map(|s| format!("{s:.6e}")).unwrap_or_else(|| "n/a".into());
    let _ = writeln!(out, "min slack: {min}");
    let _ = writeln!(
        out,
        "passed {} of {} ({} failed)",
        agg.pass_count,
        agg.pass_count + agg.fail_count,
        agg.fail_count
    );
    if let Some(t) = agg.wall_time_seconds {
        let _ = writeln!(out, "wall time: {t:.3} s");
    }
    out
}

/// Parses a JSON report produced by [`emit_report`].
pub fn parse_report(text: &str) -> Result<RunReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fuzz::{fuzz, FuzzConfig};
    use crate::harness::run::selftest;

    #[test]
    fn empty_report_csv_is_header_only() {
        let r = RunReport::assemble(None, None, Vec::new(), Vec::new());
        assert_eq!(emit_report(&r, "csv").unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn json_round_trip() {
        let config = FuzzConfig {
            trials: 5,
            theorems: crate::certifier::Theorem::ALL
                .into_iter()
                .filter(|t| crate::harness::scenario::scenario_theorem(*t))
                .collect(),
            ..Default::default()
        };
        for r in [fuzz(&config).unwrap(), selftest()] {
            let text = emit_report(&r, "json").unwrap();
            assert_eq!(parse_report(&text).unwrap(), r);
        }
    }

    #[test]
    fn human_has_summary() {
        let text = emit_report(&selftest(), "human").unwrap();
        assert!(text.contains("min slack:"));
        assert!(text.lines().next().unwrap().starts_with("theorem"));
    }

    #[test]
    fn unknown_format() {
        let r = selftest();
        assert!(matches!(emit_report(&r, "xml"), Err(Error::Usage(_))));
    }
}
