//! The manipulation-probability table and its published reference values.

use serde::{Deserialize, Serialize};

use super::{p_manipulate_any, p_manipulate_specific_fraction, AnalysisError};

/// One parameter tuple of the manipulation table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    /// Decision stake in units of `s_max`, i.e. votes per proposition.
    pub dv_over_smax: u64,
    pub list_size: u64,
    pub q: f64,
    /// Share of all votes held by the adversary, `n / (|P| * D_v)`.
    pub fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManipulationRow {
    pub dv_over_smax: u64,
    pub list_size: u64,
    pub q: f64,
    pub fraction: f64,
    pub p_specific: f64,
    pub p_any: f64,
}

pub fn manipulation_table(rows: &[GridRow]) -> Result<Vec<ManipulationRow>, AnalysisError> {
    rows.iter()
        .map(|row| {
            if row.fraction >= 1.0 {
                return Err(AnalysisError::Domain(format!(
                    "adversary fraction {} must be below 1",
                    row.fraction
                )));
            }
            let p_specific = p_manipulate_specific_fraction(row.q, row.fraction, row.dv_over_smax)?;
            Ok(ManipulationRow {
                dv_over_smax: row.dv_over_smax,
                list_size: row.list_size,
                q: row.q,
                fraction: row.fraction,
                p_specific,
                p_any: p_manipulate_any(p_specific, row.list_size)?,
            })
        })
        .collect()
}

/// A published table cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Expected {
    /// Printed to four decimals, stored in units of 1e-4.
    FourDecimals(i64),
    /// Printed as an order of magnitude `10^exponent`; the value must be below `10^(exponent+1)`.
    Order(i32),
    /// Printed as "≈ 1": value above 0.999.
    NearOne,
    /// Printed as "≈ 0": value below 1e-12.
    NearZero,
}

impl Expected {
    pub fn matches(&self, value: f64) -> bool {
        match *self {
            Expected::FourDecimals(units) => round_half_up(value, 4) == units,
            Expected::Order(exp) => value < 10f64.powi(exp + 1),
            Expected::NearOne => value > 0.999,
            Expected::NearZero => value < 1e-12,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Expected::FourDecimals(units) => format!("{:.4}", units as f64 / 1e4),
            Expected::Order(exp) => format!("~1e{exp}"),
            Expected::NearOne => "~1".into(),
            Expected::NearZero => "~0".into(),
        }
    }
}

/// `value` rounded half-up to `places` decimals, as an integer count of `10^-places`.
pub fn round_half_up(value: f64, places: i32) -> i64 {
    (value * 10f64.powi(places) + 0.5).floor() as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub grid: GridRow,
    pub expected_specific: Expected,
    pub expected_any: Expected,
}

/// The twelve published rows.
pub fn builtin_table() -> Vec<TableEntry> {
    use Expected::{FourDecimals as D, NearOne, NearZero, Order};
    let row = |dv, q, fraction, specific, any| TableEntry {
        grid: GridRow {
            dv_over_smax: dv,
            list_size: 100,
            q,
            fraction,
        },
        expected_specific: specific,
        expected_any: any,
    };
    vec![
        row(20, 0.8, 0.0, D(6), D(548)),
        row(20, 0.8, 0.05, D(28), D(2438)),
        row(20, 0.8, 0.25, D(1275), NearOne),
        row(20, 0.95, 0.0, Order(-9), Order(-7)),
        row(20, 0.95, 0.05, Order(-6), Order(-4)),
        row(20, 0.95, 0.25, D(123), D(7100)),
        row(100, 0.8, 0.0, Order(-11), Order(-9)),
        row(100, 0.8, 0.05, Order(-8), Order(-6)),
        row(100, 0.8, 0.25, D(168), D(8156)),
        row(100, 0.95, 0.0, NearZero, NearZero),
        row(100, 0.95, 0.05, NearZero, NearZero),
        row(100, 0.95, 0.25, Order(-5), D(2)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableCheck {
    pub row: ManipulationRow,
    pub expected_specific: Expected,
    pub expected_any: Expected,
    pub pass: bool,
}

/// Computes every built-in row and compares it with the published cell.
pub fn check_builtin_table() -> Result<Vec<TableCheck>, AnalysisError> {
    let entries = builtin_table();
    let grid: Vec<GridRow> = entries.iter().map(|e| e.grid).collect();
    let rows = manipulation_table(&grid)?;
    Ok(rows
        .into_iter()
        .zip(entries)
        .map(|(row, entry)| TableCheck {
            pass: entry.expected_specific.matches(row.p_specific)
                && entry.expected_any.matches(row.p_any),
            row,
            expected_specific: entry.expected_specific,
            expected_any: entry.expected_any,
        })
        .collect())
}
