use std::fmt;

/// `SELECT projection FROM source [WHERE c_1 AND .. AND c_k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub projection: Vec<String>,
    pub source: String,
    pub conditions: Vec<Condition>,
}

/// A literal on the right-hand side of an equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constant {
    Str(String),
    Int(i64),
}

impl Constant {
    /// The text an attribute value must equal for the constant to match.
    pub fn as_text(&self) -> String {
        match self {
            Constant::Str(s) => s.clone(),
            Constant::Int(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    AttrEqAttr(String, String),
    AttrEqConst(String, Constant),
    SimpleMatch(String, PatternFormula),
    BehaviourMatch(Vec<BehaviourDef>, PatternFormula),
}

impl Condition {
    pub fn is_pattern(&self) -> bool {
        matches!(
            self,
            Condition::SimpleMatch(..) | Condition::BehaviourMatch(..)
        )
    }
}

/// `conj_1 AND .. AND conj_k AS name`: a named predicate over one event.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BehaviourDef {
    pub name: String,
    pub conjuncts: Vec<Equality>,
}

/// Equality atom inside a behaviour definition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Equality {
    AttrAttr(String, String),
    AttrConst(String, Constant),
}

/// Temporal pattern over the ordered events of a case.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternFormula {
    Id(IdentifierExpr),
    Any,
    /// `a ~> b`: `b` starts somewhere after `a` ends.
    Follows(Box<PatternFormula>, Box<PatternFormula>),
    /// `a -> b`: `b` starts at the event right after `a` ends.
    DirectlyFollows(Box<PatternFormula>, Box<PatternFormula>),
    Star(Box<PatternFormula>),
    Start(Box<PatternFormula>),
    End(Box<PatternFormula>),
}

impl PatternFormula {
    pub fn lit(value: impl Into<String>) -> Self {
        PatternFormula::Id(IdentifierExpr::Lit(value.into()))
    }

    pub fn reference(name: impl Into<String>) -> Self {
        PatternFormula::Id(IdentifierExpr::Ref(name.into()))
    }

    pub fn follows(a: PatternFormula, b: PatternFormula) -> Self {
        PatternFormula::Follows(Box::new(a), Box::new(b))
    }

    pub fn directly_follows(a: PatternFormula, b: PatternFormula) -> Self {
        PatternFormula::DirectlyFollows(Box::new(a), Box::new(b))
    }

    pub fn star(a: PatternFormula) -> Self {
        PatternFormula::Star(Box::new(a))
    }

    pub fn start(a: PatternFormula) -> Self {
        PatternFormula::Start(Box::new(a))
    }

    pub fn end(a: PatternFormula) -> Self {
        PatternFormula::End(Box::new(a))
    }

    /// Whether the empty segment satisfies the formula. Only a star does;
    /// composition and anchoring both need concrete segment bounds.
    pub fn nullable(&self) -> bool {
        matches!(self, PatternFormula::Star(_))
    }

    pub fn depth(&self) -> usize {
        match self {
            PatternFormula::Id(_) | PatternFormula::Any => 1,
            PatternFormula::Follows(a, b) | PatternFormula::DirectlyFollows(a, b) => {
                1 + a.depth().max(b.depth())
            }
            PatternFormula::Star(a) | PatternFormula::Start(a) | PatternFormula::End(a) => {
                1 + a.depth()
            }
        }
    }

    /// Visits every identifier expression in the formula, left to right.
    pub fn identifiers(&self) -> Vec<&IdentifierExpr> {
        fn walk<'a>(p: &'a PatternFormula, out: &mut Vec<&'a IdentifierExpr>) {
            match p {
                PatternFormula::Id(idx) => out.push(idx),
                PatternFormula::Any => {}
                PatternFormula::Follows(a, b) | PatternFormula::DirectlyFollows(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                PatternFormula::Star(a) | PatternFormula::Start(a) | PatternFormula::End(a) => {
                    walk(a, out)
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

/// Boolean combination of identifiers, evaluated on a single event.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IdentifierExpr {
    /// An attribute value (simple patterns).
    Lit(String),
    /// A behaviour name (behavioural patterns).
    Ref(String),
    Or(Box<IdentifierExpr>, Box<IdentifierExpr>),
    Not(Box<IdentifierExpr>),
}

impl IdentifierExpr {
    pub fn or(a: IdentifierExpr, b: IdentifierExpr) -> Self {
        IdentifierExpr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: IdentifierExpr) -> Self {
        IdentifierExpr::Not(Box::new(a))
    }

    pub fn leaves(&self) -> Vec<&IdentifierExpr> {
        match self {
            IdentifierExpr::Lit(_) | IdentifierExpr::Ref(_) => vec![self],
            IdentifierExpr::Or(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
            IdentifierExpr::Not(a) => a.leaves(),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::pretty_print(self))
    }
}

impl fmt::Display for PatternFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::print_pattern(self))
    }
}

impl fmt::Display for IdentifierExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::print_identifier(self))
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::print_constant(self))
    }
}
