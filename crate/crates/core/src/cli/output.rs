use serde::Serialize;

use super::Format;

/// A command's result. JSON and pretty output come from `Serialize`; CSV
/// from [`Report::csv`].
pub(crate) trait Report: Serialize {
    /// Header and rows.
    fn csv(&self) -> (Vec<String>, Vec<Vec<String>>);
}

/// Floats print exactly as in the JSON reports (shortest round-trip,
/// non-finite values as `null`).
pub(crate) fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("f64 serializes")
}

pub(crate) fn coord_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub(crate) fn render<R: Report>(report: &R, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(report).expect("reports serialize") + "\n",
        Format::Pretty => serde_json::to_string_pretty(report).expect("reports serialize") + "\n",
        Format::Csv => {
            let (header, rows) = report.csv();
            let mut s = String::new();
            for row in std::iter::once(&header).chain(&rows) {
                let line: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s
        }
    }
}
