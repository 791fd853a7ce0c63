use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A ground value. Each sort prints with its own prefix so that, say, case
/// `2` and attribute value `2` never unify.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Const {
    Case(String),
    Event(String),
    Time(u64),
    Value(String),
    Null,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(Const),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }
}

/// Body element: a positive or negated atom, or a built-in comparison.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Pos(Atom),
    Neg(Atom),
    Cmp(Term, CmpOp, Term),
}

impl Literal {
    pub fn vars(&self) -> Vec<&str> {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => a.args.iter().filter_map(Term::as_var).collect(),
            Literal::Cmp(l, _, r) => [l, r].into_iter().filter_map(Term::as_var).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatalogProgram {
    pub rules: Vec<Rule>,
    /// Predicates supplied as facts.
    pub edb: BTreeSet<String>,
    /// Free-text notes per predicate, printed as comments.
    pub notes: BTreeMap<String, String>,
}

impl DatalogProgram {
    /// Appends a rule unless an identical one is already present.
    pub fn push(&mut self, rule: Rule) {
        if !self.rules.contains(&rule) {
            self.rules.push(rule);
        }
    }

    pub fn extend(&mut self, rules: impl IntoIterator<Item = Rule>) {
        rules.into_iter().for_each(|r| self.push(r));
    }

    pub fn rules_for<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules
            .iter()
            .filter(move |r| r.head.predicate == predicate)
    }
}

/// Ground tuples per predicate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactSet {
    relations: BTreeMap<String, BTreeSet<Vec<Const>>>,
}

impl FactSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns whether the tuple was new.
    pub fn insert(&mut self, predicate: &str, tuple: Vec<Const>) -> bool {
        self.relations
            .entry(predicate.to_owned())
            .or_default()
            .insert(tuple)
    }

    pub fn get(&self, predicate: &str) -> Option<&BTreeSet<Vec<Const>>> {
        self.relations.get(predicate)
    }

    pub fn count(&self, predicate: &str) -> usize {
        self.get(predicate).map_or(0, BTreeSet::len)
    }

    pub fn contains(&self, predicate: &str, tuple: &[Const]) -> bool {
        self.get(predicate).is_some_and(|r| r.contains(tuple))
    }

    /// Total number of tuples.
    pub fn len(&self) -> usize {
        self.relations.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn predicates(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Vec<Const>)> {
        self.relations
            .iter()
            .flat_map(|(p, ts)| ts.iter().map(move |t| (p.as_str(), t)))
    }

    /// True when every tuple of `self` is also in `other`.
    pub fn is_subset(&self, other: &FactSet) -> bool {
        self.iter().all(|(p, t)| other.contains(p, t))
    }
}

fn write_str_const(f: &mut fmt::Formatter<'_>, prefix: &str, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    f.write_str(prefix)?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Case(s) => write_str_const(f, "c:", s),
            Const::Event(s) => write_str_const(f, "e:", s),
            Const::Value(s) => write_str_const(f, "v:", s),
            Const::Time(t) => write!(f, "{t}"),
            Const::Null => f.write_str("\"n:\""),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(Term::to_string).collect();
        write!(f, "{}({})", self.predicate, args.join(","))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(a) => write!(f, "{a}"),
            Literal::Neg(a) => write!(f, "!{a}"),
            Literal::Cmp(l, op, r) => {
                let op = match op {
                    CmpOp::Lt => "<",
                    CmpOp::Gt => ">",
                    CmpOp::Eq => "=",
                };
                write!(f, "{l} {op} {r}")
            }
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.body.is_empty() {
            return write!(f, "{}.", self.head);
        }
        let body: Vec<String> = self.body.iter().map(Literal::to_string).collect();
        write!(f, "{} :- {}.", self.head, body.join(", "))
    }
}

/// One rule per line, preceded by `%` comment lines for the notes.
impl fmt::Display for DatalogProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pred, note) in &self.notes {
            writeln!(f, "% {pred}: {note}")?;
        }
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

/// `pred(c1,c2,c3).` per tuple, grouped by predicate.
impl fmt::Display for FactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pred, tuple) in self.iter() {
            let args: Vec<String> = tuple.iter().map(Const::to_string).collect();
            writeln!(f, "{pred}({}).", args.join(","))?;
        }
        Ok(())
    }
}
