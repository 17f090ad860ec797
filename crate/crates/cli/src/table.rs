// SPDX-License-Identifier: Apache-2.0

//! Tab-separated result tables with a single `name[unit]` header row.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

/// Nine significant digits in scientific notation.
pub fn format_num(v: f64) -> String {
    if v == 0.0 {
        // avoid "-0.00000000e0"
        return format!("{:.8e}", 0.0);
    }
    format!("{v:.8e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<(String, String)>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    /// `columns` are `(name, unit)`; use `"1"` for dimensionless and `""`
    /// for labels.
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns
                .iter()
                .map(|(n, u)| (n.to_string(), u.to_string()))
                .collect(),
            rows: Vec::new(),
        }
    }

    /// # Panics
    /// If the row length differs from the column count.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row length must match columns"
        );
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|(n, u)| {
                if u.is_empty() {
                    n.clone()
                } else {
                    format!("{n}[{u}]")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", header.join("\t"));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_num(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_num(0.05625), "5.62500000e-2");
        assert_eq!(format_num(-0.0), "0.00000000e0");
        assert_eq!(format_num(651.7225e9), "6.51722500e11");
    }

    #[test]
    fn header_carries_units() {
        let mut t = ResultTable::new(&[("t", "us"), ("p_s", "1"), ("label", "")]);
        t.push(vec![1.0.into(), 0.5.into(), "a".into()]);
        assert_eq!(
            t.render(),
            "t[us]\tp_s[1]\tlabel\n1.00000000e0\t5.00000000e-1\ta\n"
        );
    }

    #[test]
    #[should_panic]
    fn ragged_rows_rejected() {
        let mut t = ResultTable::new(&[("a", "1")]);
        t.push(vec![1.0.into(), 2.0.into()]);
    }
}
