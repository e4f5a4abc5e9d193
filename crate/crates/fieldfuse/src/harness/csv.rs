//! CSV assembly with fixed-precision number formatting.

use std::path::Path;

use crate::error::{Error, Result};

/// Format with 6 significant digits, shortest form: plain decimal for
/// exponents in [-4, 6), otherwise `m e exp` scientific, trailing zeros
/// trimmed either way.
pub fn fmt_g6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Exponent after rounding to 6 significant digits.
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("{:e} always contains an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..6).contains(&exp) {
        let prec = (5 - exp).max(0) as usize;
        let s = format!("{:.*}", prec, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{exp}")
    }
}

/// In-memory CSV assembled single-threaded, written as UTF-8 with a versioned
/// comment line followed by the header row.
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub const CSV_VERSION: &str = "# fieldfuse-csv v1";

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::InvalidArgument(format!(
                "csv row has {} cells, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_VERSION);
        out.push('\n');
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_g6(0.0), "0");
        assert_eq!(fmt_g6(1.0), "1");
        assert_eq!(fmt_g6(0.1), "0.1");
        assert_eq!(fmt_g6(2.0 / 3.0), "0.666667");
        assert_eq!(fmt_g6(123456.0), "123456");
        assert_eq!(fmt_g6(1234567.0), "1.23457e6");
        assert_eq!(fmt_g6(0.000123456789), "0.000123457");
        assert_eq!(fmt_g6(0.0000123456789), "1.23457e-5");
        assert_eq!(fmt_g6(-3.14159265), "-3.14159");
        assert_eq!(fmt_g6(1e-9), "1e-9");
        assert_eq!(fmt_g6(f64::INFINITY), "inf");
        assert_eq!(fmt_g6(1000.0), "1000");
        assert_eq!(fmt_g6(0.01), "0.01");
    }

    #[test]
    fn rounding_carry_crosses_magnitude() {
        assert_eq!(fmt_g6(0.9999999), "1");
        assert_eq!(fmt_g6(999999.9), "1e6");
    }

    #[test]
    fn table_layout() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push_row(vec!["1".into(), "2".into()]).unwrap();
        assert!(t.push_row(vec!["1".into()]).is_err());
        assert_eq!(t.render(), format!("{CSV_VERSION}\na,b\n1,2\n"));
    }
}
