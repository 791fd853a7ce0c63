use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};

use crate::eventlog::{Column, Event, Timestamp};

/// A result cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Null,
    Text(String),
    Time(Timestamp),
}

impl Value {
    pub fn of(ev: &Event, column: Column) -> Value {
        match column {
            Column::Eid => Value::Text(ev.eid.clone()),
            Column::Cid => Value::Text(ev.cid.clone()),
            Column::Ts => Value::Time(ev.ts),
            Column::Attr(i) => ev.attrs[i].clone().map_or(Value::Null, Value::Text),
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Null => serde_json::Value::Null,
            Value::Text(s) => serde_json::Value::String(s.clone()),
            Value::Time(t) => serde_json::Value::from(t.millis()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Text(s) => f.write_str(s),
            Value::Time(t) => write!(f, "{t}"),
        }
    }
}

/// Multiset (SQL-style) or set semantics for projection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Semantics {
    #[default]
    Multiset,
    Set,
}

/// Query output. Rows follow the `(cid, ts)` order of their source events.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl ResultTable {
    /// Drops repeated rows, keeping first occurrences.
    pub fn dedup(&mut self) {
        let mut seen = HashSet::new();
        self.rows.retain(|r| seen.insert(r.clone()));
    }

    /// CSV in the ingestion dialect; nulls are empty fields.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// One JSON object per row. Timestamps are numbers, nulls are `null`.
    pub fn write_jsonl<W: Write>(&self, mut sink: W) -> io::Result<()> {
        for row in &self.rows {
            let obj: serde_json::Map<String, serde_json::Value> = self
                .columns
                .iter()
                .cloned()
                .zip(row.iter().map(Value::to_json))
                .collect();
            writeln!(sink, "{}", serde_json::Value::Object(obj))?;
        }
        Ok(())
    }

    /// Column-aligned text for terminals.
    pub fn write_pretty<W: Write>(&self, mut sink: W) -> io::Result<()> {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([self.columns[i].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |sink: &mut W, row: &[String]| -> io::Result<()> {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            writeln!(sink, "{}", padded.join(" | ").trim_end())
        };
        line(&mut sink, &self.columns)?;
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        writeln!(sink, "{}", rule.join("-+-"))?;
        for row in &cells {
            line(&mut sink, row)?;
        }
        writeln!(sink, "({} rows)", self.rows.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        ResultTable {
            columns: vec!["case_id".into(), "ts".into(), "note".into()],
            rows: vec![
                vec![
                    Value::Text("a,b".into()),
                    Value::Time(Timestamp::from_millis(5)),
                    Value::Null,
                ],
                vec![
                    Value::Text("c".into()),
                    Value::Time(Timestamp::from_millis(6)),
                    Value::Text("x".into()),
                ],
            ],
        }
    }

    #[test]
    fn csv_quotes_and_blanks() {
        let mut out = Vec::new();
        table().write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "case_id,ts,note\n\"a,b\",5,\nc,6,x\n"
        );
        let mut out = Vec::new();
        ResultTable {
            columns: vec!["a".into()],
            rows: vec![],
        }
        .write_csv(&mut out)
        .unwrap();
        assert_eq!(out, b"a\n");
    }

    #[test]
    fn jsonl_rows() {
        let mut out = Vec::new();
        table().write_jsonl(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["case_id"], "a,b");
        assert_eq!(first["ts"], 5);
        assert!(first["note"].is_null());
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn pretty_aligns() {
        let mut out = Vec::new();
        table().write_pretty(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("case_id | ts | note\n"));
        assert!(text.ends_with("(2 rows)\n"));
    }
}
