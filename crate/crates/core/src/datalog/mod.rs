//! Translation of queries and patterns into stratified Datalog with
//! negation, and a small evaluator for the result.
//!
//! An event log becomes the facts `event(C,E,T)`, one `attr_<name>(C,E,V)`
//! per non-null attribute value, and `segment(Ts,Te,C)` for every nonempty
//! contiguous slice of a case. Each pattern subformula gets a predicate
//! over `(Ts,Te,C)`, and a query's answer is the relation `Output`.

mod ast;
mod audit;
mod check;
mod eval;
mod facts;
mod translate;

pub use ast::{Atom, CmpOp, Const, DatalogProgram, FactSet, Literal, Rule, Term};
pub use audit::{audit, is_edb_defined, AuditViolation};
pub use check::{cross_check, cross_check_program, CheckError, CheckReport};
pub use eval::{check_safety, evaluate, stratify, unsafe_variable, DatalogError};
pub use facts::{attribute_predicates, facts_from_log, EVENT, SEGMENT};
pub use translate::{
    pattern_program, support_rules, translate_pattern, translate_query, PatternRules, HAS_BETWEEN,
    HAS_EARLIER, HAS_LATER, NEXT, OUTPUT,
};
