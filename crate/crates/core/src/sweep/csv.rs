//! The grid CSV format: `x,y,class,near_boundary,blp,rhp,singular_count`.

use super::PhaseDiagramGrid;
use crate::divisibility::DivisibilityClass;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "x,y,class,near_boundary,blp,rhp,singular_count";

/// Formats like C's `%.9g`: nine significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 ≤ |v| < 1e9`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn optional(v: Option<f64>) -> String {
    v.map(format_sig9).unwrap_or_default()
}

pub fn encode_csv(grid: &PhaseDiagramGrid) -> String {
    let mut out = String::with_capacity(64 * (grid.cells.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in &grid.cells {
        let class = c.class.map_or("ERR", |k| k.name());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_sig9(c.x),
            format_sig9(c.y),
            class,
            u8::from(c.near_boundary),
            optional(c.blp),
            optional(c.rhp),
            c.singular_count
        ));
    }
    out
}

/// One parsed data row; `class` is `None` for `ERR`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub x: f64,
    pub y: f64,
    pub class: Option<DivisibilityClass>,
    pub near_boundary: bool,
    pub blp: Option<f64>,
    pub rhp: Option<f64>,
    pub singular_count: usize,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        other => return Err(Error::InvalidParameters(format!("unexpected CSV header {other:?}"))),
    }
    let bad = |line: usize, what: &str| Error::InvalidParameters(format!("CSV line {line}: {what}"));
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 7 {
            return Err(bad(n, "expected 7 fields"));
        }
        let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(n, what));
        let opt = |s: &str, what: &str| if s.is_empty() { Ok(None) } else { num(s, what).map(Some) };
        rows.push(CsvRow {
            x: num(fields[0], "bad x")?,
            y: num(fields[1], "bad y")?,
            class: match fields[2] {
                "ERR" => None,
                s => Some(s.parse().map_err(|_| bad(n, "bad class"))?),
            },
            near_boundary: match fields[3] {
                "1" => true,
                "0" => false,
                _ => return Err(bad(n, "bad near_boundary flag")),
            },
            blp: opt(fields[4], "bad blp")?,
            rhp: opt(fields[5], "bad rhp")?,
            singular_count: fields[6].parse().map_err(|_| bad(n, "bad singular_count"))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelFamily;
    use crate::sweep::{Axis, Cell, GridSpec};

    #[test]
    fn sig9_matches_printf_g() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (std::f64::consts::PI, "3.14159265"),
            (-2.5e-7, "-2.5e-07"),
            (1.23456789012e10, "1.23456789e+10"),
            (0.0001, "0.0001"),
            (123456789.0, "123456789"),
            (1e9, "1e+09"),
            (0.00001, "1e-05"),
            (99.9999999999, "100"),
        ];
        for (v, s) in cases {
            assert_eq!(format_sig9(v), s, "{v}");
        }
    }

    fn grid() -> PhaseDiagramGrid {
        let spec = GridSpec::new(ModelFamily::AmplitudeDamping, Axis::new("gamma0", 0.1, 0.2, 2), Axis::new("lambda", 1.0, 2.0, 2));
        let cell = |x, y, class| Cell {
            x,
            y,
            class,
            near_boundary: false,
            blp: None,
            rhp: Some(0.0),
            singular_count: 0,
            error: None,
        };
        PhaseDiagramGrid {
            spec,
            cells: vec![
                cell(0.1, 1.0, Some(DivisibilityClass::PD2)),
                cell(0.2, 1.0, Some(DivisibilityClass::PD2)),
                cell(0.1, 2.0, None),
                cell(0.2, 2.0, Some(DivisibilityClass::PD2)),
            ],
        }
    }

    #[test]
    fn rows_follow_the_header() {
        let text = encode_csv(&grid());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "0.1,1,PD2,0,,0,0");
        assert_eq!(lines[3], "0.1,2,ERR,0,,0,0");
    }

    #[test]
    fn parse_inverts_encode() {
        let g = grid();
        let rows = parse_csv(&encode_csv(&g)).unwrap();
        assert_eq!(rows.len(), 4);
        for (r, c) in rows.iter().zip(&g.cells) {
            assert_eq!((r.x, r.y, r.class, r.blp, r.rhp), (c.x, c.y, c.class, c.blp, c.rhp));
        }
        assert!(parse_csv("a,b\n").is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\n1,2,PD9,0,,,0\n")).is_err());
    }
}
