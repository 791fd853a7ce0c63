use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::ast::{Const, DatalogProgram};
use super::eval::{evaluate, DatalogError};
use super::facts::facts_from_log;
use super::translate::{translate_query, OUTPUT};
use crate::error::CompileError;
use crate::eventlog::{Column, EventLog};
use crate::plan::{compile_plan, execute, Plan, TableSchema, Value};
use crate::query::Query;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Datalog(#[from] DatalogError),
}

/// Outcome of comparing the algebraic and the Datalog answers, both taken
/// as sets of typed tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub columns: Vec<String>,
    pub algebra: BTreeSet<Vec<Const>>,
    pub datalog: BTreeSet<Vec<Const>>,
}

impl CheckReport {
    pub fn is_equal(&self) -> bool {
        self.algebra == self.datalog
    }

    pub fn only_in_algebra(&self) -> impl Iterator<Item = &Vec<Const>> {
        self.algebra.difference(&self.datalog)
    }

    pub fn only_in_datalog(&self) -> impl Iterator<Item = &Vec<Const>> {
        self.datalog.difference(&self.algebra)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.is_equal() { "equal" } else { "MISMATCH" };
        writeln!(
            f,
            "{verdict}: {} algebra rows, {} datalog rows over ({})",
            self.algebra.len(),
            self.datalog.len(),
            self.columns.join(", ")
        )?;
        let row = |t: &Vec<Const>| {
            t.iter()
                .map(Const::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        for t in self.only_in_algebra() {
            writeln!(f, "- ({})", row(t))?;
        }
        for t in self.only_in_datalog() {
            writeln!(f, "+ ({})", row(t))?;
        }
        Ok(())
    }
}

fn typed(value: Value, column: Column) -> Const {
    match (value, column) {
        (Value::Null, _) => Const::Null,
        (Value::Time(t), _) => Const::Time(t.millis()),
        (Value::Text(s), Column::Eid) => Const::Event(s),
        (Value::Text(s), Column::Cid) => Const::Case(s),
        (Value::Text(s), _) => Const::Value(s),
    }
}

fn algebra_rows(plan: &Plan, log: &EventLog) -> BTreeSet<Vec<Const>> {
    execute(plan, log)
        .rows
        .into_iter()
        .map(|row| {
            row.into_iter()
                .zip(&plan.projection)
                .map(|(v, (_, c))| typed(v, *c))
                .collect()
        })
        .collect()
}

/// Compares the algebraic answer of `q` with the `Output` relation of an
/// arbitrary program, such as a hand-modified translation.
pub fn cross_check_program(
    q: &Query,
    log: &EventLog,
    schema: &TableSchema,
    prog: &DatalogProgram,
) -> Result<CheckReport, CheckError> {
    let plan = compile_plan(q, schema)?;
    let derived = evaluate(prog, &facts_from_log(log))?;
    Ok(CheckReport {
        columns: plan.projection.iter().map(|(n, _)| n.clone()).collect(),
        algebra: algebra_rows(&plan, log),
        datalog: derived.get(OUTPUT).cloned().unwrap_or_default(),
    })
}

/// Runs `q` through the algebra and through its Datalog translation.
pub fn cross_check(q: &Query, log: &EventLog, log_name: &str) -> Result<CheckReport, CheckError> {
    let schema = TableSchema::of(log_name, log);
    let prog = translate_query(q, &schema)?;
    cross_check_program(q, log, &schema, &prog)
}
