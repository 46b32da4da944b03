//! CSV and JSON writers for experiment results.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::experiment::ReportRow;
use crate::error::{Error, Result};

pub const REPORT_HEADER: &str = "delta,alpha,error,residual,bound,ratio";
pub const PLOT_HEADER: &str = "log10_delta,log10_alpha,log10_error,log10_residual,log10_bound";

/// 17 significant digits; infinite values as `inf`.
fn fmt(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let cells = [r.delta, r.alpha, r.error, r.residual, r.bound, r.ratio].map(fmt);
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn plot_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(PLOT_HEADER);
    out.push('\n');
    for r in rows {
        let cells = [r.delta, r.alpha, r.error, r.residual, r.bound].map(|v| fmt(v.log10()));
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::config("<json>", e.to_string()))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}
