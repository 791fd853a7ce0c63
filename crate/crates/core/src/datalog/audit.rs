use std::fmt;

use super::ast::{DatalogProgram, Literal};
use super::eval::{stratify, unsafe_variable, DatalogError};

/// A rule that breaks the well-formedness conditions for generated
/// programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditViolation {
    Unsafe {
        rule: String,
        variable: String,
    },
    /// Negation of a predicate that is neither EDB nor defined from EDB
    /// atoms alone.
    NegatesDerived {
        rule: String,
        predicate: String,
    },
    NotStratified {
        predicate: String,
    },
}

impl fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditViolation::Unsafe { rule, variable } => {
                write!(f, "unsafe variable {variable} in `{rule}`")
            }
            AuditViolation::NegatesDerived { rule, predicate } => {
                write!(f, "`{rule}` negates derived predicate {predicate}")
            }
            AuditViolation::NotStratified { predicate } => {
                write!(f, "no stratification for {predicate}")
            }
        }
    }
}

/// True for EDB predicates and for predicates whose every rule uses only
/// positive EDB atoms and comparisons.
pub fn is_edb_defined(prog: &DatalogProgram, predicate: &str) -> bool {
    if prog.edb.contains(predicate) {
        return true;
    }
    let mut rules = prog.rules_for(predicate).peekable();
    rules.peek().is_some()
        && rules.all(|r| {
            r.body.iter().all(|l| match l {
                Literal::Pos(a) => prog.edb.contains(&a.predicate),
                Literal::Neg(_) => false,
                Literal::Cmp(..) => true,
            })
        })
}

/// Every violation in `prog`; empty when the program is safe, stratified
/// and only negates EDB-defined predicates.
pub fn audit(prog: &DatalogProgram) -> Vec<AuditViolation> {
    let mut out = Vec::new();
    for rule in &prog.rules {
        if let Some(variable) = unsafe_variable(rule) {
            out.push(AuditViolation::Unsafe {
                rule: rule.to_string(),
                variable,
            });
        }
        for lit in &rule.body {
            if let Literal::Neg(a) = lit {
                if !is_edb_defined(prog, &a.predicate) {
                    out.push(AuditViolation::NegatesDerived {
                        rule: rule.to_string(),
                        predicate: a.predicate.clone(),
                    });
                }
            }
        }
    }
    if let Err(DatalogError::StratificationViolation { predicate }) = stratify(prog) {
        out.push(AuditViolation::NotStratified { predicate });
    }
    out
}
