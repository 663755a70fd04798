//! Fixed-format numbers and CSV preambles shared by every report.

use std::fmt::Write;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats `x` with 12 significant digits, trimming trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mant, exp) = s.split_once('e').expect("scientific format");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{exp}")
    }
}

/// The `#` lines opening a report: command, version, seed and every parameter.
#[derive(Debug, Clone, Default)]
pub struct RunHeader {
    pub command: String,
    pub seed: Option<u64>,
    pub params: Vec<(String, String)>,
}

impl RunHeader {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), ..Default::default() }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# concentro {VERSION} {}", self.command).unwrap();
        match self.seed {
            Some(s) => writeln!(out, "# seed={s}").unwrap(),
            None => writeln!(out, "# seed=none").unwrap(),
        }
        for (k, v) in &self.params {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out
    }
}

/// Renders rows as CSV under a header; fields are assumed comma-free or are
/// quoted when they contain commas.
pub fn csv(header: &RunHeader, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.render();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| if c.contains(',') || c.contains('"') { format!("\"{}\"", c.replace('"', "\"\"")) } else { c.clone() })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_num(4.0), "4");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2f64.sqrt() * 1000.0), "1414.21356237");
        assert_eq!(fmt_num(-0.5), "-0.5");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(0.0), "0");
    }

    #[test]
    fn csv_layout() {
        let h = RunHeader::new("bounds").seed(3).param("p", 2);
        let s = csv(&h, &["a", "b"], &[vec!["1,2".into(), "x".into()]]);
        assert!(s.starts_with("# concentro"));
        assert!(s.contains("# seed=3\n# p=2\na,b\n\"1,2\",x\n"));
    }
}
