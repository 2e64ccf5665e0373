//! Minimal CSV output with fixed significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Formats `x` with 6 significant digits, `%g` style.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A table with a fixed header; cells are pre-formatted strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.render()).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
    }
}

/// Formats an optional number; absent values become empty cells.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_g(34.938_123), "34.9381");
        assert_eq!(fmt_g(450.0), "450");
        assert_eq!(fmt_g(0.1), "0.1");
        assert_eq!(fmt_g(-2.5), "-2.5");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333");
        assert_eq!(fmt_g(123_456_789.0), "1.23457e+08");
        assert_eq!(fmt_g(999_999.7), "1e+06");
        assert_eq!(fmt_g(1.234_567e-7), "1.23457e-07");
        assert_eq!(fmt_g(0.000_123_456_7), "0.000123457");
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(4.444_53e-5), "4.44453e-05");
    }

    #[test]
    fn render_layout() {
        let mut c = Csv::new(&["a", "b"]);
        c.push(vec!["1".into(), String::new()]);
        assert_eq!(c.render(), "a,b\n1,\n");
    }
}
