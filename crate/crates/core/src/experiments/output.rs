//! CSV and JSON encodings of [`SweepTable`].
//!
//! Every number is written with [`OUTPUT_DIGITS`] significant digits. JSON has
//! no infinities, so non-finite values become `null` there.

use serde_json::{json, Value};

use super::sweep::SweepTable;
use crate::format::{fmt_out, round_sig, OUTPUT_DIGITS};

impl SweepTable {
    /// `#`-prefixed metadata lines, a header row, then one line per axis
    /// point with a trailing `flags` column.
    pub fn to_csv(&self) -> String {
        let m = &self.metadata;
        let fixed: Vec<String> = m.fixed.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut out = String::new();
        for (key, value) in [
            ("label", m.label.clone()),
            ("model", m.model.to_string()),
            ("axis", m.axis.clone()),
            ("fixed", fixed.join(", ")),
            ("rules", m.rules.join("; ")),
            ("notes", m.notes.join("; ")),
            ("tol", m.tol.to_string()),
            ("code_version", m.code_version.clone()),
        ] {
            out.push_str(&format!("# {key}: {value}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push_str(",flags\n");
        for row in &self.rows {
            let cells: Vec<String> = row.values.iter().map(|&v| fmt_out(v)).collect();
            out.push_str(&cells.join(","));
            out.push(',');
            out.push_str(&row.flags.label());
            out.push('\n');
        }
        out
    }

    /// `{"metadata": {...}, "columns": [{"name", "values"}, ...]}`.
    pub fn to_json(&self) -> Value {
        let mut columns: Vec<Value> = self
            .columns
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let values: Vec<Value> = self.rows.iter().map(|r| number(r.values[k])).collect();
                json!({ "name": name, "values": values })
            })
            .collect();
        columns.push(json!({
            "name": "flags",
            "values": self.rows.iter().map(|r| r.flags.label()).collect::<Vec<_>>(),
        }));
        let m = &self.metadata;
        let fixed: serde_json::Map<String, Value> =
            m.fixed.iter().map(|(k, v)| (k.clone(), number(*v))).collect();
        let errors: Vec<Value> = self
            .rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.error.as_ref().map(|e| json!({ "row": i, "error": e })))
            .collect();
        json!({
            "metadata": {
                "label": m.label,
                "model": m.model,
                "axis": m.axis,
                "fixed": fixed,
                "rules": m.rules,
                "tol": number(m.tol),
                "code_version": m.code_version,
                "max_residual": number(m.max_residual),
                "flagged_rows": m.flagged_rows,
                "row_errors": errors,
                "notes": m.notes,
                "digits": OUTPUT_DIGITS,
            },
            "columns": columns,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("table serializes") + "\n"
    }
}

fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x, OUTPUT_DIGITS))
    } else {
        Value::Null
    }
}

/// Parses a CSV produced by [`SweepTable::to_csv`] into its header and numeric
/// rows (comment lines and the flags column dropped).
pub fn parse_csv(text: &str) -> Option<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let mut header: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
    if header.last().map(String::as_str) != Some("flags") {
        return None;
    }
    header.pop();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            cells[..header.len()]
                .iter()
                .map(|c| c.parse::<f64>().ok())
                .collect::<Option<Vec<f64>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((header, rows))
}
