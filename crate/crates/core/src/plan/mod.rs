//! Queries as relational-algebra plans extended with pattern selection.
//!
//! A query compiles to `π[cols](σ[eq_k](..σ[eq_1](σ_P_m(..σ_P_1(log)))))`.
//! Pattern selections run first and always see each case's complete event
//! set; equality selections then filter individual events. The two kinds
//! of selection do not commute, so the order is part of the semantics.

mod result;

use std::collections::BTreeSet;

pub use result::{ResultTable, Semantics, Value};

use crate::error::CompileError;
use crate::eventlog::{resolve_column, Column, ColumnRoles, Event, EventLog, Timestamp};
use crate::pattern::{compile, matching_cases, CompiledPattern};
use crate::query::{print_behaviour, print_pattern, Condition, Constant, Query};

/// Name, column roles and attributes of a queryable log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSchema {
    pub name: String,
    pub roles: ColumnRoles,
    pub attributes: Vec<String>,
}

impl TableSchema {
    pub fn of(name: impl Into<String>, log: &EventLog) -> Self {
        TableSchema {
            name: name.into(),
            roles: log.roles().clone(),
            attributes: log.schema().to_vec(),
        }
    }

    pub fn column(&self, name: &str) -> Result<Column, CompileError> {
        resolve_column(&self.roles, &self.attributes, name)
            .ok_or_else(|| CompileError::UnknownColumn(name.to_owned()))
    }
}

/// Right-hand side of an equality selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Column(Column),
    Text(String),
    Time(Timestamp),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSelection {
    pub column: Column,
    pub operand: Operand,
    label: String,
}

impl RowSelection {
    /// Null never equals anything.
    pub fn holds(&self, ev: &Event) -> bool {
        let left = Value::of(ev, self.column);
        match &self.operand {
            Operand::Column(c) => !left.is_null() && left == Value::of(ev, *c),
            Operand::Text(t) => matches!(&left, Value::Text(v) if v == t),
            Operand::Time(t) => left == Value::Time(*t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSelection {
    pub pattern: CompiledPattern,
    label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub source: String,
    pub pattern_selections: Vec<PatternSelection>,
    pub row_selections: Vec<RowSelection>,
    /// Output column names as written, with their resolved columns.
    pub projection: Vec<(String, Column)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    EventId,
    CaseId,
    Time,
    Value,
}

fn sort_of(c: Column) -> Sort {
    match c {
        Column::Eid => Sort::EventId,
        Column::Cid => Sort::CaseId,
        Column::Ts => Sort::Time,
        Column::Attr(_) => Sort::Value,
    }
}

/// Resolves an equality `name = constant` to a row selection operand.
pub(crate) fn constant_operand(
    column: Column,
    name: &str,
    k: &Constant,
) -> Result<Operand, CompileError> {
    if column != Column::Ts {
        return Ok(Operand::Text(k.as_text()));
    }
    let time = match k {
        Constant::Int(n) => u64::try_from(*n).ok().map(Timestamp::from_millis),
        Constant::Str(s) => Timestamp::parse(s),
    };
    time.map(Operand::Time)
        .ok_or_else(|| CompileError::TypeMismatch {
            left: name.to_owned(),
            right: k.to_string(),
        })
}

pub fn compile_plan(q: &Query, schema: &TableSchema) -> Result<Plan, CompileError> {
    if q.source != schema.name {
        return Err(CompileError::UnknownSource {
            expected: schema.name.clone(),
            found: q.source.clone(),
        });
    }
    let projection = q
        .projection
        .iter()
        .map(|name| Ok((name.clone(), schema.column(name)?)))
        .collect::<Result<_, CompileError>>()?;

    let mut pattern_selections = Vec::new();
    let mut row_selections = Vec::new();
    for cond in &q.conditions {
        match cond {
            Condition::AttrEqAttr(a, b) => {
                let (left, right) = (schema.column(a)?, schema.column(b)?);
                if sort_of(left) != sort_of(right) {
                    return Err(CompileError::TypeMismatch {
                        left: a.clone(),
                        right: b.clone(),
                    });
                }
                row_selections.push(RowSelection {
                    column: left,
                    operand: Operand::Column(right),
                    label: format!("{a} = {b}"),
                });
            }
            Condition::AttrEqConst(a, k) => {
                let column = schema.column(a)?;
                row_selections.push(RowSelection {
                    column,
                    operand: constant_operand(column, a, k)?,
                    label: format!("{a} = {k}"),
                });
            }
            Condition::SimpleMatch(attr, p) => pattern_selections.push(PatternSelection {
                pattern: compile(cond, &schema.attributes)?,
                label: format!("{attr}: {}", print_pattern(p)),
            }),
            Condition::BehaviourMatch(defs, p) => {
                let defs: Vec<String> = defs.iter().map(print_behaviour).collect();
                pattern_selections.push(PatternSelection {
                    pattern: compile(cond, &schema.attributes)?,
                    label: format!("BEHAVIOUR {}: {}", defs.join(", "), print_pattern(p)),
                })
            }
        }
    }
    Ok(Plan {
        source: q.source.clone(),
        pattern_selections,
        row_selections,
        projection,
    })
}

pub fn execute(plan: &Plan, log: &EventLog) -> ResultTable {
    execute_with(plan, log, Semantics::Multiset)
}

pub fn execute_with(plan: &Plan, log: &EventLog, semantics: Semantics) -> ResultTable {
    let mut surviving: Option<BTreeSet<&str>> = None;
    for sel in &plan.pattern_selections {
        let matched: BTreeSet<&str> = matching_cases(&sel.pattern, log).collect();
        surviving = Some(match surviving {
            None => matched,
            Some(prev) => prev.intersection(&matched).copied().collect(),
        });
    }
    let rows = log
        .events()
        .iter()
        .filter(|ev| {
            surviving
                .as_ref()
                .is_none_or(|s| s.contains(ev.cid.as_str()))
        })
        .filter(|ev| plan.row_selections.iter().all(|r| r.holds(ev)))
        .map(|ev| {
            plan.projection
                .iter()
                .map(|(_, c)| Value::of(ev, *c))
                .collect()
        })
        .collect();
    let mut table = ResultTable {
        columns: plan.projection.iter().map(|(n, _)| n.clone()).collect(),
        rows,
    };
    if semantics == Semantics::Set {
        table.dedup();
    }
    table
}

/// The plan as a `π`/`σ`/`σ_P` expression, innermost operator applied first.
pub fn explain(plan: &Plan) -> String {
    let mut expr = plan.source.clone();
    for sel in &plan.pattern_selections {
        expr = format!("σ_P[{}]({expr})", sel.label);
    }
    for sel in &plan.row_selections {
        expr = format!("σ[{}]({expr})", sel.label);
    }
    let cols: Vec<&str> = plan.projection.iter().map(|(n, _)| n.as_str()).collect();
    format!("π[{}]({expr})", cols.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;

    fn table1() -> EventLog {
        crate::eventlog::load_event_log(
            crate::fixtures::TABLE1_CSV.as_bytes(),
            &ColumnRoles::default(),
        )
        .unwrap()
    }

    fn run(text: &str) -> ResultTable {
        let log = table1();
        let plan = compile_plan(
            &parse_query(text).unwrap(),
            &TableSchema::of("eventlog", &log),
        )
        .unwrap();
        execute(&plan, &log)
    }

    #[test]
    fn example_plan_explains_like_the_algebra() {
        let log = EventLog::new(
            ColumnRoles::new("event_id", "case_id", "event_time"),
            vec!["event_name".into()],
            vec![],
        )
        .unwrap();
        let q = parse_query(
            "SELECT case_id, event_name, event_time FROM eventlog WHERE event_name MATCHES ('package_sent' ~> 'package_accepted')",
        )
        .unwrap();
        let plan = compile_plan(&q, &TableSchema::of("eventlog", &log)).unwrap();
        assert_eq!(plan.pattern_selections.len(), 1);
        assert!(plan.row_selections.is_empty());
        assert_eq!(
            explain(&plan),
            "π[case_id,event_name,event_time](σ_P[event_name: 'package_sent' ~> 'package_accepted'](eventlog))"
        );
        assert!(execute(&plan, &log).rows.is_empty());
    }

    #[test]
    fn explain_nests_one_operator_per_condition() {
        let log = table1();
        let schema = TableSchema::of("eventlog", &log);
        let plan = compile_plan(
            &parse_query("SELECT event_name FROM eventlog").unwrap(),
            &schema,
        )
        .unwrap();
        assert_eq!(explain(&plan), "π[event_name](eventlog)");
        let plan = compile_plan(
            &parse_query("SELECT status FROM eventlog WHERE event_name MATCHES 'a' AND status = 'WIP' AND BEHAVIOUR status = event_name AS s MATCHES s*").unwrap(),
            &schema,
        )
        .unwrap();
        assert_eq!(
            explain(&plan),
            "π[status](σ[status = 'WIP'](σ_P[BEHAVIOUR status = event_name AS s: s*](σ_P[event_name: 'a'](eventlog))))"
        );
    }

    #[test]
    fn bind_errors() {
        let log = table1();
        let schema = TableSchema::of("eventlog", &log);
        let err = |text: &str| compile_plan(&parse_query(text).unwrap(), &schema).unwrap_err();
        assert_eq!(
            err("SELECT foo FROM eventlog"),
            CompileError::UnknownColumn("foo".into())
        );
        assert!(matches!(
            err("SELECT status FROM other"),
            CompileError::UnknownSource { .. }
        ));
        assert!(matches!(
            err("SELECT status FROM eventlog WHERE case_id = event_name"),
            CompileError::TypeMismatch { .. }
        ));
        assert!(matches!(
            err("SELECT status FROM eventlog WHERE timestamp = 'noon'"),
            CompileError::TypeMismatch { .. }
        ));
        assert_eq!(
            err("SELECT status FROM eventlog WHERE missing MATCHES 'a'"),
            CompileError::UnknownAttribute("missing".into())
        );
    }

    #[test]
    fn whole_log_projection_in_case_order() {
        let t = run("SELECT event_name FROM eventlog");
        let names: Vec<String> = t.rows.iter().map(|r| r[0].to_string()).collect();
        assert_eq!(
            names,
            [
                "Review request",
                "Calculate terms",
                "Prepare contract",
                "Review request",
                "Define terms",
                "Prepare contract",
                "Send quote"
            ]
        );
    }

    #[test]
    fn pattern_selection_keeps_case_0002() {
        let t = run("SELECT case_id FROM eventlog WHERE event_name MATCHES ('Review request' ~> 'Send quote')");
        assert_eq!(t.rows.len(), 4);
        assert!(t.rows.iter().all(|r| r[0] == Value::Text("0002".into())));
    }

    #[test]
    fn patterns_see_unfiltered_cases() {
        // filtering on status first would drop 'Review request' and lose case 0002
        let t = run(
            "SELECT event_name FROM eventlog WHERE status = 'WIP' AND event_name MATCHES 'Review request' ~> 'Send quote'",
        );
        let names: Vec<String> = t.rows.iter().map(|r| r[0].to_string()).collect();
        assert_eq!(names, ["Define terms", "Prepare contract"]);
    }

    #[test]
    fn timestamps_compare_numerically_and_ids_textually() {
        let t = run("SELECT event_id FROM eventlog WHERE timestamp = 1675213914098");
        assert_eq!(t.rows, vec![vec![Value::Text("e0004".into())]]);
        assert!(run("SELECT event_id FROM eventlog WHERE case_id = 2")
            .rows
            .is_empty());
        assert_eq!(
            run("SELECT event_id FROM eventlog WHERE case_id = '0002'")
                .rows
                .len(),
            4
        );
    }

    #[test]
    fn set_semantics_drops_duplicates() {
        let log = table1();
        let plan = compile_plan(
            &parse_query("SELECT status FROM eventlog").unwrap(),
            &TableSchema::of("eventlog", &log),
        )
        .unwrap();
        assert_eq!(execute(&plan, &log).rows.len(), 7);
        let set = execute_with(&plan, &log, Semantics::Set);
        let got: Vec<String> = set.rows.iter().map(|r| r[0].to_string()).collect();
        assert_eq!(got, ["NEW", "WIP", "SENT"]);
    }
}
