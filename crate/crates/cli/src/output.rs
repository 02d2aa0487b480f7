//! Tables printed as CSV or JSON with 12 significant digits.

use serde_json::{Map, Value};

/// `%.12g`: 12 significant digits, trailing zeros dropped, scientific
/// notation outside `[1e-5, 1e12)`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{exp}", trim(mant));
    }
    let decimals = (11 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Round through the printed form so both formats agree.
            Cell::Num(x) if x.is_finite() => fmt_num(*x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn row_json(&self, r: &[Cell]) -> Value {
        Value::Object(self.header.iter().zip(r).map(|(h, c)| (h.to_string(), c.json())).collect::<Map<_, _>>())
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self.rows.iter().map(|r| self.row_json(r)).collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("plain values");
        s.push('\n');
        s
    }

    /// The only row as one compact JSON object.
    pub fn to_json_record(&self) -> String {
        debug_assert_eq!(self.rows.len(), 1);
        let mut s = self.row_json(&self.rows[0]).to_string();
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(5.0 / 3.0), "1.66666666667");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(0.1111111111111111), "0.111111111111");
        assert_eq!(fmt_num(1.0 / 0.64), "1.5625");
        assert_eq!(fmt_num(-0.25), "-0.25");
        assert_eq!(fmt_num(1.5e-9), "1.5e-9");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(0.99999999999999), "1");
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new(vec!["a", "b", "c"]);
        t.push(vec![Cell::Text("x,y".into()), Cell::Num(f64::INFINITY), Cell::Empty]);
        assert_eq!(t.to_csv(), "a,b,c\n\"x,y\",inf,\n");
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["a"], "x,y");
        assert!(v[0]["b"].is_null());
    }
}
