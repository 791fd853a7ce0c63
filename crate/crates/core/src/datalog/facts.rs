use std::collections::HashSet;

use super::ast::{Const, FactSet};
use crate::eventlog::{enumerate_segments, EventLog, Segment};

pub const EVENT: &str = "event";
pub const SEGMENT: &str = "segment";

/// Predicate names for event attributes, aligned with the schema.
///
/// `status` becomes `attr_status`; characters outside `[A-Za-z0-9_]` turn
/// into `_`, and a positional suffix separates names that collide after
/// that.
pub fn attribute_predicates(schema: &[String]) -> Vec<String> {
    let mut taken = HashSet::new();
    schema
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let clean: String = name
                .chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        c
                    } else {
                        '_'
                    }
                })
                .collect();
            let mut pred = format!("attr_{clean}");
            if !taken.insert(pred.clone()) {
                pred = format!("attr_{clean}_{i}");
                taken.insert(pred.clone());
            }
            pred
        })
        .collect()
}

/// Extensional facts for a log: `event(c,e,t)`, one `attr_*(c,e,v)` per
/// non-null attribute value, and `segment(ts,te,c)` for every segment of
/// every case.
pub fn facts_from_log(log: &EventLog) -> FactSet {
    let preds = attribute_predicates(log.schema());
    let mut facts = FactSet::new();
    for ev in log.events() {
        let (c, e) = (Const::Case(ev.cid.clone()), Const::Event(ev.eid.clone()));
        facts.insert(
            EVENT,
            vec![c.clone(), e.clone(), Const::Time(ev.ts.millis())],
        );
        for (pred, value) in preds.iter().zip(&ev.attrs) {
            if let Some(v) = value {
                facts.insert(pred, vec![c.clone(), e.clone(), Const::Value(v.clone())]);
            }
        }
    }
    for es in log.event_sets() {
        for seg in enumerate_segments(&es) {
            if let Segment::Interval { start, end } = seg {
                facts.insert(
                    SEGMENT,
                    vec![
                        Const::Time(start.millis()),
                        Const::Time(end.millis()),
                        Const::Case(es.cid().to_owned()),
                    ],
                );
            }
        }
    }
    facts
}
