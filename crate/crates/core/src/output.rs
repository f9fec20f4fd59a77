//! Versioned CSV and JSON output.

use std::io::Write;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::SCHEMA_VERSION;

/// First line of every CSV file.
pub fn schema_line() -> String {
    format!("# schema_version={SCHEMA_VERSION}")
}

/// Writes the schema line, one `# `-prefixed line per entry of `comments`,
/// then `rows` with a header derived from their field names.
pub fn write_csv<W: Write, T: Serialize>(
    mut out: W,
    rows: &[T],
    comments: &[String],
) -> Result<()> {
    writeln!(out, "{}", schema_line())?;
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`], skipping comment lines.
pub fn read_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Pretty JSON of `value` with a top-level `schema_version` field.
pub fn json_with_schema<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    match v.as_object_mut() {
        Some(map) => {
            map.insert("schema_version".into(), SCHEMA_VERSION.into());
        }
        None => {
            return Err(Error::Argument(
                "only JSON objects carry a schema version".into(),
            ))
        }
    }
    Ok(serde_json::to_string_pretty(&v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        a: f64,
        b: String,
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            Row {
                a: 1.5,
                b: "x".into(),
            },
            Row {
                a: f64::NEG_INFINITY,
                b: "y".into(),
            },
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows, &["config={\"k\": 1}".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# schema_version=1\n# config="));
        assert!(text.contains("\na,b\n"));
        assert_eq!(read_csv::<Row>(&text).unwrap(), rows);
    }

    #[test]
    fn json_gets_version() {
        let text = json_with_schema(&Row {
            a: 2.0,
            b: "z".into(),
        })
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert!(json_with_schema(&3.0).is_err());
    }
}
