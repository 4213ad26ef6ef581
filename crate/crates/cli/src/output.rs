use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

pub type Record = Vec<(&'static str, Field)>;

/// 17 significant digits, `NaN`/`inf` spelled out.
pub fn fmt17(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Field {
    pub fn plain(&self) -> String {
        match self {
            Field::Num(v) => fmt17(*v),
            Field::Int(v) => v.to_string(),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Num(v) => Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Field::Int(v) => Value::from(*v),
            Field::Text(s) => Value::String(s.clone()),
            Field::Bool(b) => Value::Bool(*b),
        }
    }
}

fn object(rec: &Record) -> Value {
    let mut m = Map::new();
    for (k, v) in rec {
        m.insert((*k).to_string(), v.json());
    }
    Value::Object(m)
}

pub fn write_json(rec: &Record, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, &object(rec))?;
    writeln!(out)?;
    Ok(())
}

pub fn write_json_array(rows: &[Record], out: &mut dyn Write) -> Result<(), CliError> {
    let v = Value::Array(rows.iter().map(object).collect());
    serde_json::to_writer_pretty(&mut *out, &v)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_csv(rows: &[Record], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|(k, _)| *k))?;
    }
    for r in rows {
        w.write_record(r.iter().map(|(_, v)| v.plain()))?;
    }
    w.flush()?;
    Ok(())
}
