use std::io::Write;

use serde_json::{Map, Value};

use crate::args::Format;

/// What a command produced, before formatting.
pub enum Report {
    Table {
        headers: Vec<&'static str>,
        rows: Vec<Vec<String>>,
    },
    /// A JSON document together with its tabular view.
    Document { json: Value, table: Box<Report> },
}

impl Report {
    pub fn table(headers: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Report::Table { headers, rows }
    }

    fn natural_format(&self) -> Format {
        match self {
            Report::Table { .. } => Format::Csv,
            Report::Document { .. } => Format::Json,
        }
    }

    pub fn write(&self, format: Option<Format>, out: &mut dyn Write) -> std::io::Result<()> {
        match (self, format.unwrap_or_else(|| self.natural_format())) {
            (Report::Table { headers, rows }, Format::Csv) => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(headers)?;
                for row in rows {
                    w.write_record(row)?;
                }
                w.flush()
            }
            (Report::Table { headers, rows }, Format::Json) => {
                let objects: Vec<Value> = rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = headers
                            .iter()
                            .zip(row)
                            .map(|(h, v)| (h.to_string(), Value::String(v.clone())))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                write_json(&Value::Array(objects), out)
            }
            (Report::Document { json, .. }, Format::Json) => write_json(json, out),
            (Report::Document { table, .. }, Format::Csv) => table.write(Some(Format::Csv), out),
        }
    }
}

fn write_json(v: &Value, out: &mut dyn Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    out.write_all(b"\n")
}
