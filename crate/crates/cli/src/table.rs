//! Comparison table over several reports: one row per dataset with the
//! summed click number, the three verdicts and `𝔑`, values given as
//! `x(1±r%)` with their relative bootstrap error.

use crate::error::{CliError, Result};
use crate::report_json::{ReportFile, StatisticJson, VerdictJson};

pub const HEADERS: [&str; 6] = ["State", "E(a+b)", "κ>κ^cl.max", "|γ|>γ^cl.max", "𝔑<0", "𝔑"];

pub fn mark(v: &VerdictJson) -> &'static str {
    match v.violated {
        Some(true) => "✓",
        Some(false) => "✗",
        None => "?",
    }
}

/// Two significant digits of a percentage, e.g. `0.20%`, `43%`.
fn percent(rel: f64) -> String {
    let p = rel * 100.0;
    if p == 0.0 {
        return "0%".into();
    }
    let digits = (1 - p.abs().log10().floor() as i32).max(0) as usize;
    format!("{p:.digits$}%")
}

pub fn with_relative_error(s: &StatisticJson) -> String {
    let Some(value) = s.value else {
        return "undefined".into();
    };
    let shown = if value != 0.0 && (value.abs() < 1e-2 || value.abs() >= 1e4) {
        format!("{value:.3e}")
    } else {
        format!("{value:.5}")
    };
    match s.relative_error() {
        Some(rel) => format!("{shown}(1±{})", percent(rel)),
        None => shown,
    }
}

pub fn rows(reports: &[ReportFile]) -> Vec<[String; 6]> {
    reports
        .iter()
        .map(|r| {
            [
                r.label.clone(),
                with_relative_error(&r.summed_click_mean),
                mark(&r.kappa_test).into(),
                mark(&r.pearson_test).into(),
                mark(&r.higher_order_test).into(),
                with_relative_error(&r.frak_n),
            ]
        })
        .collect()
}

pub fn render_text(reports: &[ReportFile]) -> Result<String> {
    if reports.is_empty() {
        return Err(CliError::Usage("no reports given".into()));
    }
    let body = rows(reports);
    let mut widths = HEADERS.map(|h| h.chars().count());
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join(" | ").trim_end().to_string()
    };
    let header: Vec<String> = HEADERS.iter().map(|h| h.to_string()).collect();
    let rule = widths
        .iter()
        .map(|&w| "-".repeat(w))
        .collect::<Vec<_>>()
        .join("-+-");
    let mut out = vec![line(&header), rule];
    out.extend(body.iter().map(|r| line(r)));
    Ok(out.join("\n") + "\n")
}

pub fn render_csv(reports: &[ReportFile]) -> Result<String> {
    if reports.is_empty() {
        return Err(CliError::Usage("no reports given".into()));
    }
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let flag = |v: &VerdictJson| match v.violated {
        Some(b) => b.to_string(),
        None => String::new(),
    };
    let mut out = String::from(
        "label,summed_click_mean,summed_click_mean_rel_err,kappa_test,pearson_test,higher_order_test,frak_n,frak_n_rel_err\n",
    );
    for r in reports {
        let label = if r.label.contains([',', '"']) {
            format!("\"{}\"", r.label.replace('"', "\"\""))
        } else {
            r.label.clone()
        };
        out.push_str(&format!(
            "{label},{},{},{},{},{},{},{}\n",
            cell(r.summed_click_mean.value),
            cell(r.summed_click_mean.relative_error()),
            flag(&r.kappa_test),
            flag(&r.pearson_test),
            flag(&r.higher_order_test),
            cell(r.frak_n.value),
            cell(r.frak_n.relative_error()),
        ));
    }
    Ok(out)
}
