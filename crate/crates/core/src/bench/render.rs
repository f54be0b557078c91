use std::fmt::Write as _;
use std::str::FromStr;

use super::{ResultTable, SolverSummary};
use crate::error::{DcError, Result};
use crate::solvers::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = DcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "md" | "markdown" => Ok(Self::Markdown),
            other => Err(DcError::Parse(format!("unknown table format {other:?}"))),
        }
    }
}

const HEADER: [&str; 13] = [
    "n",
    "m",
    "s",
    "t_lmax",
    "iter_gist",
    "iter_pdcae",
    "iter_pdca",
    "cpu_gist",
    "cpu_pdcae",
    "cpu_pdca",
    "fval_gist",
    "fval_pdcae",
    "fval_pdca",
];

/// Five significant digits, two-digit signed exponent: `2.9743e-02`.
pub fn format_fval(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn iter_cell(s: Option<&SolverSummary>) -> String {
    match s {
        None => String::new(),
        Some(s) if s.runs > 0 && s.capped == s.runs => "max".to_string(),
        Some(s) => format!("{:.0}", s.mean_iterations),
    }
}

fn cells(table: &ResultTable) -> Vec<Vec<String>> {
    let order = [Algorithm::Gist, Algorithm::PdcaE, Algorithm::Pdca];
    table
        .rows
        .iter()
        .map(|row| {
            let mut out = vec![
                row.cell.n.to_string(),
                row.cell.m.to_string(),
                row.cell.s.to_string(),
                format!("{:.2}", row.t_lmax),
            ];
            out.extend(order.iter().map(|a| iter_cell(row.solvers.get(a))));
            out.extend(
                order
                    .iter()
                    .map(|a| row.solvers.get(a).map_or(String::new(), |s| format!("{:.2}", s.mean_cpu_seconds))),
            );
            out.extend(order.iter().map(|a| row.solvers.get(a).map_or(String::new(), |s| format_fval(s.mean_fval))));
            out
        })
        .collect()
}

/// One line per `(cell, lambda)` row under the fixed header. Iteration
/// cells read `max` when every run hit the cap; solvers absent from the
/// plan leave empty cells.
pub fn render_table(table: &ResultTable, format: TableFormat) -> Result<String> {
    if table.rows.is_empty() {
        return Err(DcError::Contract("render_table: empty table".into()));
    }
    let body = cells(table);
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(&HEADER.join(","));
            out.push('\n');
            for row in body {
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        TableFormat::Markdown => {
            let _ = writeln!(out, "| {} |", HEADER.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
            for row in body {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
        }
    }
    Ok(out)
}
