//! Report serialization: canonical JSON (sorted keys, 17 significant digits)
//! and flat CSV.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::{Error, Result};

/// Formats every float in scientific notation with 17 significant digits.
struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn format_float(value: f64) -> String {
    if value == 0.0 {
        // no negative zero in reports
        return format!("{:.16e}", 0.0);
    }
    format!("{value:.16e}")
}

/// Canonical JSON text of any serializable value: keys sorted, floats at 17
/// significant digits, non-finite floats as `null`, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // going through `Value` sorts object keys and maps non-finite floats to null
    let tree = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    tree.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(num) => match (num.as_i64(), num.as_u64(), num.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => format_float(f),
            _ => num.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => {
            let mut inner = Vec::new();
            flatten("", value, &mut inner);
            inner.into_iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
        }
    }
}

/// One CSV row per record: nested objects become dotted columns, arrays are
/// joined with `;`. The header is the sorted union of all columns.
pub fn records_to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let rows: Vec<Vec<(String, String)>> = records
        .iter()
        .map(|r| {
            let v = serde_json::to_value(r).map_err(|e| Error::Io(e.to_string()))?;
            let mut cells = Vec::new();
            flatten("", &v, &mut cells);
            Ok(cells)
        })
        .collect::<Result<_>>()?;
    let mut header: Vec<String> = rows.iter().flatten().map(|(k, _)| k.clone()).collect();
    header.sort();
    header.dedup();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for row in rows {
        let line: Vec<&str> = header
            .iter()
            .map(|h| row.iter().find(|(k, _)| k == h).map(|(_, v)| v.as_str()).unwrap_or(""))
            .collect();
        writer.write_record(&line).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}
