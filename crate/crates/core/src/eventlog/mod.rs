//! Event logs, cases and segments.
//!
//! An [`EventLog`] is a flat relation `(eid, cid, ts, A_1 .. A_n)` in which
//! both `(eid, cid)` and `(cid, ts)` are keys. The second key makes the
//! events of every case totally ordered by timestamp, which is what the
//! pattern machinery relies on. Events are stored sorted by `(cid, ts)`, so
//! the [`EventSet`] of a case is a contiguous slice of the log.

mod io;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

pub use io::{load_case_set, load_event_log, write_event_log, ColumnRoles, LoadError};

/// Milliseconds since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(u64);

impl Timestamp {
    pub const fn from_millis(millis: u64) -> Self {
        Timestamp(millis)
    }

    pub const fn millis(self) -> u64 {
        self.0
    }

    /// Parses decimal epoch milliseconds or ISO-8601 text.
    ///
    /// Accepted ISO forms are RFC 3339 (`2023-10-15T08:00:00Z`, with any
    /// offset), naive date-times (`2023-10-15T08:00:00`, `2023-10-15 08:00:00`,
    /// both with optional fractional seconds, read as UTC) and plain dates
    /// (`2023-10-15`, midnight UTC). Instants before the epoch are rejected.
    pub fn parse(text: &str) -> Option<Self> {
        use chrono::{DateTime, NaiveDate, NaiveDateTime};

        let text = text.trim();
        if !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit()) {
            return text.parse().ok().map(Timestamp);
        }
        let millis = if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
            dt.timestamp_millis()
        } else if let Some(dt) = ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"]
            .iter()
            .find_map(|fmt| NaiveDateTime::parse_from_str(text, fmt).ok())
        {
            dt.and_utc().timestamp_millis()
        } else {
            NaiveDate::parse_from_str(text, "%Y-%m-%d")
                .ok()?
                .and_hms_opt(0, 0, 0)?
                .and_utc()
                .timestamp_millis()
        };
        u64::try_from(millis).ok().map(Timestamp)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One row of an event log. `attrs` is aligned with the log's schema; `None`
/// is a null value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub eid: String,
    pub cid: String,
    pub ts: Timestamp,
    pub attrs: Vec<Option<String>>,
}

impl Event {
    pub fn new(
        eid: impl Into<String>,
        cid: impl Into<String>,
        ts: Timestamp,
        attrs: Vec<Option<String>>,
    ) -> Self {
        Event {
            eid: eid.into(),
            cid: cid.into(),
            ts,
            attrs,
        }
    }

    pub fn attr(&self, index: usize) -> Option<&str> {
        self.attrs.get(index).and_then(|v| v.as_deref())
    }
}

/// A column of the event-log relation, resolved from a name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    Eid,
    Cid,
    Ts,
    Attr(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    roles: ColumnRoles,
    schema: Vec<String>,
    events: Vec<Event>,
}

impl EventLog {
    /// Builds a log, checking arity and both key candidates.
    pub fn new(
        roles: ColumnRoles,
        schema: Vec<String>,
        mut events: Vec<Event>,
    ) -> Result<Self, LoadError> {
        let mut names = HashSet::new();
        for name in [&roles.eid, &roles.cid, &roles.ts]
            .into_iter()
            .chain(&schema)
        {
            if !names.insert(name.as_str()) {
                return Err(LoadError::DuplicateColumn(name.clone()));
            }
        }
        let mut ids = HashSet::new();
        let mut times = HashSet::new();
        for ev in &events {
            if ev.attrs.len() != schema.len() {
                return Err(LoadError::MalformedCsv {
                    line: None,
                    message: format!(
                        "event {} has {} attributes, schema has {}",
                        ev.eid,
                        ev.attrs.len(),
                        schema.len()
                    ),
                });
            }
            if !ids.insert((ev.eid.as_str(), ev.cid.as_str())) {
                return Err(LoadError::KeyViolation(format!(
                    "duplicate (eid, cid) = ({}, {})",
                    ev.eid, ev.cid
                )));
            }
            if !times.insert((ev.cid.as_str(), ev.ts)) {
                return Err(LoadError::KeyViolation(format!(
                    "duplicate (cid, ts) = ({}, {})",
                    ev.cid, ev.ts
                )));
            }
        }
        events.sort_by(|a, b| a.cid.cmp(&b.cid).then(a.ts.cmp(&b.ts)));
        Ok(EventLog {
            roles,
            schema,
            events,
        })
    }

    pub fn roles(&self) -> &ColumnRoles {
        &self.roles
    }

    /// Event-attribute names `A_1 .. A_n`.
    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    /// All events, ordered by `(cid, ts)`.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Resolves a column name. The names given by the column roles win,
    /// then event attributes, then the aliases `eid`, `cid` and `ts`.
    pub fn column(&self, name: &str) -> Option<Column> {
        resolve_column(&self.roles, &self.schema, name)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|a| a == name)
    }

    /// Per-case event sets in ascending `cid` order.
    pub fn event_sets(&self) -> impl Iterator<Item = EventSet<'_>> {
        self.events
            .chunk_by(|a, b| a.cid == b.cid)
            .map(|chunk| EventSet {
                cid: &chunk[0].cid,
                events: chunk,
            })
    }

    /// Keeps only the events for which `keep` holds.
    pub fn filter(&self, mut keep: impl FnMut(&Event) -> bool) -> EventLog {
        EventLog {
            roles: self.roles.clone(),
            schema: self.schema.clone(),
            events: self.events.iter().filter(|e| keep(e)).cloned().collect(),
        }
    }
}

pub(crate) fn resolve_column(roles: &ColumnRoles, schema: &[String], name: &str) -> Option<Column> {
    if name == roles.eid {
        Some(Column::Eid)
    } else if name == roles.cid {
        Some(Column::Cid)
    } else if name == roles.ts {
        Some(Column::Ts)
    } else if let Some(i) = schema.iter().position(|a| a == name) {
        Some(Column::Attr(i))
    } else {
        match name {
            "eid" => Some(Column::Eid),
            "cid" => Some(Column::Cid),
            "ts" => Some(Column::Ts),
            _ => None,
        }
    }
}

/// The events of one case, ascending by timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventSet<'a> {
    cid: &'a str,
    events: &'a [Event],
}

impl<'a> EventSet<'a> {
    pub fn cid(&self) -> &'a str {
        self.cid
    }

    pub fn events(&self) -> &'a [Event] {
        self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Position of the event with timestamp `ts`.
    pub fn position(&self, ts: Timestamp) -> Option<usize> {
        self.events.binary_search_by(|e| e.ts.cmp(&ts)).ok()
    }

    /// Number of events a segment covers.
    pub fn segment_len(&self, seg: Segment) -> usize {
        match seg {
            Segment::Empty => 0,
            Segment::Interval { start, end } => self
                .events
                .iter()
                .filter(|e| start <= e.ts && e.ts <= end)
                .count(),
        }
    }
}

/// A contiguous run of a case's events, named by its first and last
/// timestamps, or the empty segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Segment {
    Empty,
    Interval { start: Timestamp, end: Timestamp },
}

impl Segment {
    pub fn interval(start: Timestamp, end: Timestamp) -> Self {
        debug_assert!(start <= end);
        Segment::Interval { start, end }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Segment::Empty)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Empty => f.write_str("empty"),
            Segment::Interval { start, end } => write!(f, "({start}, {end})"),
        }
    }
}

/// Distinct case identifiers of the log.
pub fn cases(log: &EventLog) -> BTreeSet<String> {
    log.event_sets().map(|es| es.cid.to_owned()).collect()
}

/// Events of `cid` in timestamp order; empty when the case is absent.
pub fn case_events<'a>(log: &'a EventLog, cid: &str) -> EventSet<'a> {
    let events = log.events();
    let lo = events.partition_point(|e| e.cid.as_str() < cid);
    let hi = lo + events[lo..].partition_point(|e| e.cid == cid);
    EventSet {
        cid: if lo < hi { &events[lo].cid } else { "" },
        events: &events[lo..hi],
    }
}

/// Every non-empty segment of `es`, ascending by `(start, end)`.
pub fn enumerate_segments(es: &EventSet<'_>) -> Vec<Segment> {
    let ev = es.events();
    let mut out = Vec::with_capacity(ev.len() * (ev.len() + 1) / 2);
    for (i, first) in ev.iter().enumerate() {
        for last in &ev[i..] {
            out.push(Segment::interval(first.ts, last.ts));
        }
    }
    out
}

/// Case id given to every event by [`merge_cases`].
pub const MERGED_CASE: &str = "merged";

/// Collapses all cases into the single case [`MERGED_CASE`].
///
/// Events are ranked by their original `(ts, cid, eid)` and the rank
/// `1..=n` becomes the new timestamp in milliseconds. Event ids that would
/// collide once the case id is gone get a `#rank` suffix.
pub fn merge_cases(log: &EventLog) -> EventLog {
    let mut order: Vec<&Event> = log.events().iter().collect();
    order.sort_by(|a, b| (a.ts, &a.cid, &a.eid).cmp(&(b.ts, &b.cid, &b.eid)));

    let mut eid_count: HashMap<&str, usize> = HashMap::new();
    for ev in &order {
        *eid_count.entry(ev.eid.as_str()).or_default() += 1;
    }
    let events = order
        .iter()
        .enumerate()
        .map(|(i, ev)| {
            let rank = i as u64 + 1;
            let eid = if eid_count[ev.eid.as_str()] > 1 {
                format!("{}#{rank}", ev.eid)
            } else {
                ev.eid.clone()
            };
            Event::new(eid, MERGED_CASE, Timestamp(rank), ev.attrs.clone())
        })
        .collect();
    EventLog::new(log.roles.clone(), log.schema.clone(), events)
        .expect("merged log keeps both keys by construction")
}

/// Case attributes `(cid, B_1 .. B_l)`. Loadable and validated, never queried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseSet {
    pub schema: Vec<String>,
    pub rows: BTreeMap<String, Vec<Option<String>>>,
}
