//! Convergence-history CSV: one row per iteration, 17 significant digits.

use std::path::Path;

use singular_gmres::krylov::{ConvergenceHistory, IterateRecord};

use crate::mm::write_atomic;
use crate::CliError;

pub const HEADER: &str =
    "iter,rel_res,at_rel_res,h_subdiag,sigma_max_h,sigma_min_h,rank_used,tol_used";

/// Renders the history as CSV text.
pub fn render(history: &ConvergenceHistory) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in &history.records {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
            r.iter,
            r.rel_res,
            r.at_rel_res,
            r.h_subdiag,
            r.sigma_max_h,
            r.sigma_min_h,
            r.rank_used,
            r.tol_used
        ));
    }
    out
}

/// Writes the history CSV to `path`.
pub fn write(path: &Path, history: &ConvergenceHistory) -> Result<(), CliError> {
    write_atomic(path, &render(history))
}

/// Parses a history CSV produced by [`write`] back into records.
pub fn parse(path: &Path, text: &str) -> Result<Vec<IterateRecord>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER => {}
        _ => return Err(CliError::parse(path, "missing or unexpected CSV header")),
    }
    let mut records = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(CliError::parse(path, "row must have 8 columns"));
        }
        let num = |s: &str| -> Result<f64, CliError> {
            s.parse().map_err(|_| CliError::parse(path, "bad float"))
        };
        records.push(IterateRecord {
            iter: f[0]
                .parse()
                .map_err(|_| CliError::parse(path, "bad iteration number"))?,
            rel_res: num(f[1])?,
            at_rel_res: num(f[2])?,
            h_subdiag: num(f[3])?,
            sigma_max_h: num(f[4])?,
            sigma_min_h: num(f[5])?,
            rank_used: f[6]
                .parse()
                .map_err(|_| CliError::parse(path, "bad rank"))?,
            tol_used: num(f[7])?,
        });
    }
    Ok(records)
}
