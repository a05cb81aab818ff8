//! Tables written as CSV with six significant digits.

use std::fmt;
use std::io::Write;

use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => f.write_str(&significant(*v, 6)),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(u8, u16, u32, u64, usize, i32, i64);

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// `%g`-style formatting: fixed notation for exponents in [-5, digits),
/// scientific otherwise, trailing zeros dropped.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| (*h).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Cell at `row` in the column called `name`.
    pub fn get(&self, row: usize, name: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column(name)?)
    }

    /// Appends extra columns, filling rows that `f` leaves out with empty cells.
    pub fn extend_columns(&mut self, names: &[&str], mut f: impl FnMut(usize, &[Cell]) -> Option<Vec<Cell>>) {
        self.header.extend(names.iter().map(|n| (*n).to_owned()));
        for (i, row) in self.rows.iter_mut().enumerate() {
            let extra = f(i, row).unwrap_or_else(|| vec![Cell::Empty; names.len()]);
            assert_eq!(extra.len(), names.len());
            row.extend(extra);
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(ToString::to_string))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(significant(0.0625, 6), "0.0625");
        assert_eq!(significant(22713.0, 6), "22713");
        assert_eq!(significant(22713.46, 6), "22713.5");
        assert_eq!(significant(0.054128764, 6), "0.0541288");
        assert_eq!(significant(4.76341e10, 6), "4.76341e+10");
        assert_eq!(significant(1_908_874_353.7, 6), "1.90887e+09");
        assert_eq!(significant(999_999.7, 6), "1e+06");
        assert_eq!(significant(0.000001234567, 6), "1.23457e-06");
        assert_eq!(significant(-0.5, 6), "-0.5");
        assert_eq!(significant(0.0, 6), "0");
    }

    #[test]
    fn csv_has_one_header() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1u32.into(), 0.5.into()]);
        t.push(vec!["x".into(), Cell::Empty]);
        assert_eq!(t.to_csv_string(), "a,b\n1,0.5\nx,\n");
        assert_eq!(t.get(1, "a"), Some(&Cell::Text("x".into())));
    }
}
