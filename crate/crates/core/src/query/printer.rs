use super::ast::*;

/// Canonical query text. Operators use their ASCII spellings and string
/// constants are single-quoted.
pub fn pretty_print(q: &Query) -> String {
    let mut out = format!("SELECT {} FROM {}", q.projection.join(", "), q.source);
    for (i, c) in q.conditions.iter().enumerate() {
        out.push_str(if i == 0 { " WHERE " } else { " AND " });
        out.push_str(&print_condition(c));
    }
    out
}

pub fn print_condition(c: &Condition) -> String {
    match c {
        Condition::AttrEqAttr(a, b) => format!("{a} = {b}"),
        Condition::AttrEqConst(a, k) => format!("{a} = {}", print_constant(k)),
        Condition::SimpleMatch(a, p) => format!("{a} MATCHES {}", print_pattern(p)),
        Condition::BehaviourMatch(defs, p) => {
            let defs: Vec<String> = defs.iter().map(print_behaviour).collect();
            format!("BEHAVIOUR {} MATCHES {}", defs.join(", "), print_pattern(p))
        }
    }
}

pub fn print_behaviour(def: &BehaviourDef) -> String {
    let conj: Vec<String> = def
        .conjuncts
        .iter()
        .map(|eq| match eq {
            Equality::AttrAttr(a, b) => format!("{a} = {b}"),
            Equality::AttrConst(a, k) => format!("{a} = {}", print_constant(k)),
        })
        .collect();
    format!("{} AS {}", conj.join(" AND "), def.name)
}

pub fn print_constant(k: &Constant) -> String {
    match k {
        Constant::Str(s) => quote(s),
        Constant::Int(n) => n.to_string(),
    }
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

// Binding strength; higher binds tighter.
const FOLLOWS: u8 = 1;
const DIRECTLY: u8 = 2;
const PREFIX: u8 = 3;
const POSTFIX: u8 = 4;
const ATOM: u8 = 5;

fn strength(p: &PatternFormula) -> u8 {
    match p {
        PatternFormula::Follows(..) => FOLLOWS,
        PatternFormula::DirectlyFollows(..) => DIRECTLY,
        PatternFormula::Start(_) => PREFIX,
        PatternFormula::Star(_) | PatternFormula::End(_) => POSTFIX,
        PatternFormula::Id(_) | PatternFormula::Any => ATOM,
    }
}

pub fn print_pattern(p: &PatternFormula) -> String {
    at_least(p, FOLLOWS)
}

fn at_least(p: &PatternFormula, min: u8) -> String {
    let text = match p {
        PatternFormula::Id(idx) => print_identifier(idx),
        PatternFormula::Any => "ANY".to_owned(),
        PatternFormula::Follows(a, b) => {
            format!("{} ~> {}", at_least(a, FOLLOWS), at_least(b, DIRECTLY))
        }
        PatternFormula::DirectlyFollows(a, b) => {
            format!("{} -> {}", at_least(a, DIRECTLY), at_least(b, PREFIX))
        }
        PatternFormula::Start(a) => format!("START {}", at_least(a, PREFIX)),
        PatternFormula::Star(a) => format!("{}*", at_least(a, POSTFIX)),
        PatternFormula::End(a) => format!("{} END", at_least(a, POSTFIX)),
    };
    if strength(p) < min {
        format!("({text})")
    } else {
        text
    }
}

pub fn print_identifier(idx: &IdentifierExpr) -> String {
    match idx {
        IdentifierExpr::Lit(v) => quote(v),
        IdentifierExpr::Ref(name) => name.clone(),
        IdentifierExpr::Or(a, b) => {
            let right = match **b {
                IdentifierExpr::Or(..) => format!("({})", print_identifier(b)),
                _ => print_identifier(b),
            };
            format!("{} OR {right}", print_identifier(a))
        }
        IdentifierExpr::Not(a) => format!("NOT ({})", print_identifier(a)),
    }
}
