//! CSV and JSON-lines encodings of command results.
//!
//! Every command builds a [`Records`] value; both encodings are derived from
//! it, so they always carry the same data. CSV: header row, LF endings,
//! metadata in trailing `# key=value` comments. JSON: one object per row, then
//! one `{"meta": {...}}` object when there is metadata.

use std::io::{self, Write};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde_json::{Map, Number, Value as Json};

use crate::cli::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Str(String),
    Int(BigInt),
    Float(f64),
    /// Empty CSV cell, JSON `null`.
    Null,
    List(Vec<String>),
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<BigUint> for Value {
    fn from(v: BigUint) -> Self {
        Value::Int(v.into())
    }
}

impl From<BigInt> for Value {
    fn from(v: BigInt) -> Self {
        Value::Int(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v.into())
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v.into())
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

/// Fixed 4-decimal rendering truncates toward zero, the convention of the
/// published entropy tables. A small offset, relative for large values,
/// absorbs representation error in values that are exact at 4 decimals
/// (1.5 computed as 1.4999999999999998).
pub fn fixed4(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let raw = v.abs() * 1e4;
    let scaled = (raw + 1e-6_f64.max(raw * 16.0 * f64::EPSILON)).floor();
    let out = if v < 0.0 && scaled > 0.0 {
        -scaled / 1e4
    } else {
        scaled / 1e4
    };
    format!("{out:.4}")
}

#[derive(Clone, Copy, Debug)]
pub struct FloatStyle {
    pub full_precision: bool,
}

impl FloatStyle {
    pub fn render(self, v: f64) -> String {
        if self.full_precision {
            format!("{v}")
        } else {
            fixed4(v)
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Records {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub meta: Vec<(&'static str, Value)>,
}

impl Records {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &'static str, value: impl Into<Value>) {
        self.meta.push((key, value.into()));
    }

    pub fn encode(&self, format: Format, style: FloatStyle) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf, format, style)
            .expect("writing to memory");
        String::from_utf8(buf).expect("encoders emit UTF-8")
    }

    pub fn write_to<W: Write>(&self, w: W, format: Format, style: FloatStyle) -> io::Result<()> {
        let mut enc = Encoder::new(w, format, style, &self.header)?;
        for row in &self.rows {
            enc.row(row)?;
        }
        enc.finish(&self.meta)
    }
}

/// Row-at-a-time writer, for outputs too large to hold in memory.
pub struct Encoder<'h, W: Write> {
    w: W,
    format: Format,
    style: FloatStyle,
    header: &'h [&'static str],
}

impl<'h, W: Write> Encoder<'h, W> {
    pub fn new(
        mut w: W,
        format: Format,
        style: FloatStyle,
        header: &'h [&'static str],
    ) -> io::Result<Self> {
        if format == Format::Csv {
            writeln!(w, "{}", header.join(","))?;
        }
        Ok(Self {
            w,
            format,
            style,
            header,
        })
    }

    pub fn row(&mut self, row: &[Value]) -> io::Result<()> {
        debug_assert_eq!(row.len(), self.header.len());
        match self.format {
            Format::Csv => {
                let cells: Vec<String> = row.iter().map(|v| csv_cell(v, self.style)).collect();
                writeln!(self.w, "{}", cells.join(","))
            }
            Format::Json => {
                let obj: Map<String, Json> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.to_string(), json_value(v, self.style)))
                    .collect();
                writeln!(self.w, "{}", Json::Object(obj))
            }
        }
    }

    pub fn finish(mut self, meta: &[(&'static str, Value)]) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                for (k, v) in meta {
                    match v {
                        // one comment line per item keeps each line a single key=value
                        Value::List(items) => {
                            for item in items {
                                writeln!(self.w, "# {k}={item}")?;
                            }
                        }
                        other => writeln!(self.w, "# {k}={}", csv_cell(other, self.style))?,
                    }
                }
            }
            Format::Json if !meta.is_empty() => {
                let obj: Map<String, Json> = meta
                    .iter()
                    .map(|(k, v)| (k.to_string(), json_value(v, self.style)))
                    .collect();
                let mut wrapper = Map::new();
                wrapper.insert("meta".into(), Json::Object(obj));
                writeln!(self.w, "{}", Json::Object(wrapper))?;
            }
            Format::Json => {}
        }
        self.w.flush()
    }
}

fn csv_cell(v: &Value, style: FloatStyle) -> String {
    let raw = match v {
        Value::Str(s) => s.clone(),
        Value::Int(i) => i.to_string(),
        Value::Float(f) => style.render(*f),
        Value::Null => String::new(),
        Value::List(items) => items.join(";"),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn json_value(v: &Value, style: FloatStyle) -> Json {
    match v {
        Value::Str(s) => Json::String(s.clone()),
        // integers beyond u64 travel as decimal strings
        Value::Int(i) => match (i.to_u64(), i.to_i64()) {
            (Some(u), _) => Json::Number(u.into()),
            (None, Some(s)) => Json::Number(s.into()),
            (None, None) => Json::String(i.to_string()),
        },
        Value::Null => Json::Null,
        Value::Float(f) => style
            .render(*f)
            .parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map_or(Json::Null, Json::Number),
        Value::List(items) => Json::Array(items.iter().cloned().map(Json::String).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_four_truncates() {
        assert_eq!(fixed4(5.464955585487936), "5.4649");
        assert_eq!(fixed4(5.883850988849419), "5.8838");
        assert_eq!(fixed4(1.4999999999999998), "1.5000");
        assert_eq!(fixed4(0.0), "0.0000");
        assert_eq!(fixed4(-0.25049), "-0.2504");
        assert_eq!(fixed4(-0.00001), "0.0000");
        assert_eq!(fixed4(9599999.999999998), "9600000.0000");
        assert_eq!(fixed4(42666.666666666664), "42666.6666");
    }

    #[test]
    fn csv_and_json_carry_the_same_cells() {
        let mut r = Records::new(&["pattern", "kappa2", "H_bits", "w"]);
        r.push(vec![
            "01".into(),
            Value::from(4u64),
            Value::from(1.23456),
            Value::List(vec!["a".into(), "b".into()]),
        ]);
        r.meta("n", 8usize);
        let style = FloatStyle {
            full_precision: false,
        };
        assert_eq!(
            r.encode(Format::Csv, style),
            "pattern,kappa2,H_bits,w\n01,4,1.2345,a;b\n# n=8\n"
        );
        assert_eq!(
            r.encode(Format::Json, style),
            "{\"pattern\":\"01\",\"kappa2\":4,\"H_bits\":1.2345,\"w\":[\"a\",\"b\"]}\n{\"meta\":{\"n\":8}}\n"
        );
    }

    #[test]
    fn huge_integers_in_json() {
        let big: BigUint = BigUint::from(1u32) << 80usize;
        let mut r = Records::new(&["v", "w", "z"]);
        r.push(vec![
            Value::from(big.clone()),
            Value::from(BigInt::from(-3)),
            Value::Null,
        ]);
        let style = FloatStyle {
            full_precision: true,
        };
        assert_eq!(
            r.encode(Format::Json, style),
            format!("{{\"v\":\"{big}\",\"w\":-3,\"z\":null}}\n")
        );
        assert_eq!(r.encode(Format::Csv, style), format!("v,w,z\n{big},-3,\n"));
    }
}
