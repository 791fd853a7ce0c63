//! CSV ingestion and serialization of event logs.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use thiserror::Error;

use super::{CaseSet, Event, EventLog, Timestamp};

/// Names of the CSV columns holding the event id, case id and timestamp.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColumnRoles {
    pub eid: String,
    pub cid: String,
    pub ts: String,
}

impl ColumnRoles {
    pub fn new(eid: impl Into<String>, cid: impl Into<String>, ts: impl Into<String>) -> Self {
        ColumnRoles {
            eid: eid.into(),
            cid: cid.into(),
            ts: ts.into(),
        }
    }
}

impl Default for ColumnRoles {
    fn default() -> Self {
        ColumnRoles::new("event_id", "case_id", "timestamp")
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed CSV{}: {message}", line_suffix(*.line))]
    MalformedCsv { line: Option<u64>, message: String },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("bad timestamp `{value}`{}", line_suffix(*.line))]
    BadTimestamp { line: Option<u64>, value: String },
    #[error("key violation: {0}")]
    KeyViolation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn line_suffix(line: Option<u64>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

impl From<csv::Error> for LoadError {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line());
        match err.into_kind() {
            csv::ErrorKind::Io(io) => LoadError::Io(io),
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => LoadError::MalformedCsv {
                line,
                message: format!("expected {expected_len} fields, found {len}"),
            },
            other => LoadError::MalformedCsv {
                line,
                message: format!("{other:?}"),
            },
        }
    }
}

/// Reads an event log from CSV with a mandatory header row.
///
/// The three role columns are located by name; every other column becomes
/// an event attribute, in header order. Empty fields are null.
pub fn load_event_log<R: Read>(source: R, roles: &ColumnRoles) -> Result<EventLog, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| LoadError::MissingColumn(name.to_owned()))
    };
    let (eid_at, cid_at, ts_at) = (find(&roles.eid)?, find(&roles.cid)?, find(&roles.ts)?);
    let attr_cols: Vec<usize> = (0..header.len())
        .filter(|i| ![eid_at, cid_at, ts_at].contains(i))
        .collect();
    let schema = attr_cols.iter().map(|&i| header[i].clone()).collect();

    let mut events = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line());
        let ts = Timestamp::parse(&record[ts_at]).ok_or_else(|| LoadError::BadTimestamp {
            line,
            value: record[ts_at].to_owned(),
        })?;
        let attrs = attr_cols
            .iter()
            .map(|&i| Some(record[i].to_owned()).filter(|v| !v.is_empty()))
            .collect();
        events.push(Event::new(&record[eid_at], &record[cid_at], ts, attrs));
    }
    EventLog::new(roles.clone(), schema, events)
}

/// Writes the log as CSV: role columns first, then attributes. Timestamps
/// are emitted as epoch milliseconds and nulls as empty fields.
pub fn write_event_log<W: Write>(log: &EventLog, sink: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(sink);
    let roles = log.roles();
    let header = [&roles.eid, &roles.cid, &roles.ts]
        .into_iter()
        .chain(log.schema())
        .map(String::as_str);
    writer.write_record(header)?;
    for ev in log.events() {
        let ts = ev.ts.to_string();
        let row = [ev.eid.as_str(), ev.cid.as_str(), ts.as_str()]
            .into_iter()
            .chain(ev.attrs.iter().map(|a| a.as_deref().unwrap_or("")));
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a case set; `cid_column` names the key column.
pub fn load_case_set<R: Read>(source: R, cid_column: &str) -> Result<CaseSet, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let key = header
        .iter()
        .position(|h| h == cid_column)
        .ok_or_else(|| LoadError::MissingColumn(cid_column.to_owned()))?;
    let schema: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != key)
        .map(|(_, h)| h.clone())
        .collect();
    let mut rows = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let values = record
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != key)
            .map(|(_, v)| Some(v.to_owned()).filter(|v| !v.is_empty()))
            .collect();
        if rows.insert(record[key].to_owned(), values).is_some() {
            return Err(LoadError::KeyViolation(format!(
                "duplicate case id {}",
                &record[key]
            )));
        }
    }
    Ok(CaseSet { schema, rows })
}
