//! Rendering records as JSON lines or CSV.

use std::io::Write;

use serde_json::Value;

use crate::args::Format;
use crate::error::CliError;

pub fn render(records: &[Value], format: Format, out: &mut impl Write) -> Result<(), CliError> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => render_csv(records, out)?,
    }
    out.flush()?;
    Ok(())
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

/// Item records as a table whose columns are the keys in order of first
/// appearance; the summary follows as a `#` comment line of JSON.
fn render_csv(records: &[Value], out: &mut impl Write) -> Result<(), CliError> {
    let (summary, items): (Vec<&Value>, Vec<&Value>) = records.iter().partition(|r| r["record"] == "summary");
    let mut columns: Vec<String> = Vec::new();
    for r in &items {
        if let Value::Object(m) = r {
            for k in m.keys() {
                if !columns.contains(k) {
                    columns.push(k.clone());
                }
            }
        }
    }
    if !items.is_empty() {
        let mut w = csv::Writer::from_writer(&mut *out);
        w.write_record(&columns).map_err(|e| CliError::Io(e.into()))?;
        for r in &items {
            let row: Vec<String> = columns.iter().map(|c| cell(r.get(c))).collect();
            w.write_record(&row).map_err(|e| CliError::Io(e.into()))?;
        }
        w.flush()?;
    }
    for s in summary {
        writeln!(out, "# {s}")?;
    }
    Ok(())
}
