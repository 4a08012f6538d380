//! Deterministic JSON and CSV emission.

use std::io::{self, Write};

use anyhow::Result;
use serde_json::ser::Formatter;
use serde_json::Value;

/// Shortest form of `v` printed with 17 significant digits: positional for
/// exponents in `-5..17`, scientific otherwise; trailing zeros dropped.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{:.16e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if v < 0.0 { "-" } else { "" };
    let trim = |s: &str| -> String {
        let t = s.trim_end_matches('0');
        if t.is_empty() { "0".into() } else { t.into() }
    };
    if (-5..17).contains(&exp) {
        let (int, frac) = if exp >= 0 {
            let k = exp as usize + 1;
            (digits[..k].to_string(), digits[k..].to_string())
        } else {
            ("0".to_string(), "0".repeat((-exp - 1) as usize) + &digits)
        };
        format!("{sign}{int}.{}", trim(&frac))
    } else {
        let frac = trim(&digits[1..]);
        format!("{sign}{}.{frac}e{exp}", &digits[..1])
    }
}

struct SigFormatter;

impl Formatter for SigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        w.write_all(format_f64(v as f64).as_bytes())
    }
}

pub fn to_json(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter);
    serde::Serialize::serialize(v, &mut ser).expect("in-memory JSON");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn csv_cell(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.as_f64().map_or_else(|| n.to_string(), format_f64)),
        Value::String(s) => Some(s.clone()),
        Value::Array(_) | Value::Object(_) => None,
    }
}

/// One JSON line per record; CSV keeps the scalar fields of the first
/// record as columns.
pub fn emit(records: &[Value], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => {
            for r in records {
                writeln!(out, "{}", to_json(r))?;
            }
        }
        Format::Csv => {
            let Some(Value::Object(first)) = records.first() else {
                return Ok(());
            };
            let columns: Vec<&String> = first.iter().filter(|(_, v)| csv_cell(v).is_some()).map(|(k, _)| k).collect();
            let mut w = csv::Writer::from_writer(out);
            w.write_record(columns.iter().map(|c| c.as_str()))?;
            for r in records {
                w.write_record(columns.iter().map(|c| r.get(c.as_str()).and_then(csv_cell).unwrap_or_default()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(36.0), "36.0");
        assert_eq!(format_f64(-0.338), "-0.33800000000000002");
        assert_eq!(format_f64(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_f64(0.25), "0.25");
        assert_eq!(format_f64(1.5e20), "1.5e20");
        for v in [std::f64::consts::PI, -1.0 / 3.0, 6.02e23, 1e-300, 123456.789] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
