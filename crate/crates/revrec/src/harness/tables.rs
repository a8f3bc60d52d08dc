//! Result tables: named systems by named metrics, rendered as CSV and
//! aligned text, plus relative-gain aggregation against a baseline row.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub dataset: String,
    pub seed: u64,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl ResultTable {
    pub fn new(
        name: impl Into<String>,
        dataset: impl Into<String>,
        seed: u64,
        columns: Vec<String>,
    ) -> Self {
        ResultTable {
            name: name.into(),
            dataset: dataset.into(),
            seed,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, system: impl Into<String>, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push((system.into(), values));
    }

    pub fn get(&self, system: &str, column: &str) -> Option<f64> {
        let col = self.columns.iter().position(|c| c == column)?;
        self.rows
            .iter()
            .find(|(s, _)| s == system)
            .map(|(_, values)| values[col])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("system");
        for c in &self.columns {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
        for (system, values) in &self.rows {
            out.push_str(system);
            for v in values {
                let _ = write!(out, ",{v:.6}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses a table previously written by [`ResultTable::to_csv`].
    pub fn from_csv(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Data("empty CSV table".into()))?;
        let mut fields = header.split(',');
        if fields.next() != Some("system") {
            return Err(Error::Data("CSV header must start with 'system'".into()));
        }
        let columns: Vec<String> = fields.map(str::to_string).collect();
        if columns.is_empty() {
            return Err(Error::Data("CSV table has no metric columns".into()));
        }
        let mut table = ResultTable::new(name, "", 0, columns);
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let system = parts
                .next()
                .ok_or_else(|| Error::Data(format!("CSV line {}: no system", lineno + 2)))?;
            let values: Result<Vec<f64>> = parts
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        Error::Data(format!("CSV line {}: bad number '{v}'", lineno + 2))
                    })
                })
                .collect();
            let values = values?;
            if values.len() != table.columns.len() {
                return Err(Error::Data(format!(
                    "CSV line {}: expected {} values, got {}",
                    lineno + 2,
                    table.columns.len(),
                    values.len()
                )));
            }
            table.rows.push((system.to_string(), values));
        }
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|(s, _)| s.len())
            .chain(std::iter::once("system".len()))
            .max()
            .unwrap_or(6);
        let mut out = String::new();
        let _ = writeln!(out, "# {} (dataset={}, seed={})", self.name, self.dataset, self.seed);
        let _ = write!(out, "{:width$}", "system");
        for c in &self.columns {
            let _ = write!(out, "  {c:>10}");
        }
        out.push('\n');
        for (system, values) in &self.rows {
            let _ = write!(out, "{system:width$}");
            for v in values {
                let _ = write!(out, "  {v:>10.4}");
            }
            out.push('\n');
        }
        out
    }
}

/// Relative gains in percent against a baseline row, averaged over every
/// (table, column) cell in which a system appears. For error metrics the
/// gain is `(baseline - system) / baseline`; with `higher_is_better` the
/// orientation flips. Cells whose baseline value is exactly 0 carry no
/// relative information and are left out of the average.
pub fn compute_gains(
    tables: &[&ResultTable],
    baseline: &str,
    higher_is_better: bool,
) -> Result<ResultTable> {
    if tables.is_empty() {
        return Err(Error::Config("no tables to aggregate".into()));
    }
    for table in tables {
        if !table.rows.iter().any(|(s, _)| s == baseline) {
            return Err(Error::Config(format!(
                "baseline row '{baseline}' missing from table '{}'",
                table.name
            )));
        }
    }
    let mut systems: Vec<String> = Vec::new();
    for table in tables {
        for (system, _) in &table.rows {
            if !systems.contains(system) {
                systems.push(system.clone());
            }
        }
    }
    let mut out = ResultTable::new(
        "gains",
        tables[0].dataset.clone(),
        tables[0].seed,
        vec!["gain_pct".to_string()],
    );
    for system in systems {
        let mut sum = 0.0;
        let mut count = 0usize;
        for table in tables {
            for column in &table.columns {
                let Some(value) = table.get(&system, column) else {
                    continue;
                };
                let base = table
                    .get(baseline, column)
                    .expect("baseline presence checked above");
                if base == 0.0 {
                    continue;
                }
                let gain = if higher_is_better {
                    (value - base) / base
                } else {
                    (base - value) / base
                };
                sum += gain * 100.0;
                count += 1;
            }
        }
        if count > 0 {
            out.push_row(system, vec![sum / count as f64]);
        }
    }
    Ok(out)
}
