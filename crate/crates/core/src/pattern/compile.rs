use crate::error::CompileError;
use crate::eventlog::Event;
use crate::query::{BehaviourDef, Condition, Equality, IdentifierExpr, PatternFormula};

/// A pattern bound to a log schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledPattern {
    formula: PatternFormula,
    mode: PatternMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternMode {
    /// Identifiers are values of one attribute.
    Simple { attribute: String, index: usize },
    /// Identifiers are named event predicates.
    Behavioural { behaviours: Vec<Behaviour> },
}

/// A named conjunction of equalities over one event's attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behaviour {
    pub name: String,
    pub conjuncts: Vec<BoundEquality>,
}

/// Equality with attribute names resolved to schema positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundEquality {
    AttrAttr(usize, usize),
    AttrConst(usize, String),
}

impl Behaviour {
    /// True iff every conjunct holds. Nulls equal nothing, not even nulls.
    pub fn holds(&self, ev: &Event) -> bool {
        self.conjuncts.iter().all(|c| match c {
            BoundEquality::AttrAttr(a, b) => match (ev.attr(*a), ev.attr(*b)) {
                (Some(x), Some(y)) => x == y,
                _ => false,
            },
            BoundEquality::AttrConst(a, k) => ev.attr(*a) == Some(k.as_str()),
        })
    }
}

impl CompiledPattern {
    pub fn formula(&self) -> &PatternFormula {
        &self.formula
    }

    pub fn mode(&self) -> &PatternMode {
        &self.mode
    }

    pub fn behaviour(&self, name: &str) -> Option<&Behaviour> {
        match &self.mode {
            PatternMode::Behavioural { behaviours } => behaviours.iter().find(|b| b.name == name),
            PatternMode::Simple { .. } => None,
        }
    }

    /// Whether a single event satisfies an identifier expression.
    ///
    /// A literal compares against the pattern attribute, so a null value
    /// fails `'a'` and passes `NOT ('a')`.
    pub fn event_matches(&self, idx: &IdentifierExpr, ev: &Event) -> bool {
        match idx {
            IdentifierExpr::Lit(value) => match &self.mode {
                PatternMode::Simple { index, .. } => ev.attr(*index) == Some(value.as_str()),
                PatternMode::Behavioural { .. } => false,
            },
            IdentifierExpr::Ref(name) => self.behaviour(name).is_some_and(|b| b.holds(ev)),
            IdentifierExpr::Or(a, b) => self.event_matches(a, ev) || self.event_matches(b, ev),
            IdentifierExpr::Not(a) => !self.event_matches(a, ev),
        }
    }
}

/// Free-function form of [`CompiledPattern::event_matches`].
pub fn event_matches_identifier(idx: &IdentifierExpr, ev: &Event, p: &CompiledPattern) -> bool {
    p.event_matches(idx, ev)
}

/// Binds a `MATCHES` or `BEHAVIOUR .. MATCHES` condition to a schema.
pub fn compile(cond: &Condition, schema: &[String]) -> Result<CompiledPattern, CompileError> {
    match cond {
        Condition::SimpleMatch(attr, formula) => compile_simple(attr, formula, schema),
        Condition::BehaviourMatch(defs, formula) => compile_behavioural(defs, formula, schema),
        _ => Err(CompileError::NotAPattern),
    }
}

pub fn compile_simple(
    attribute: &str,
    formula: &PatternFormula,
    schema: &[String],
) -> Result<CompiledPattern, CompileError> {
    let index = attribute_index(schema, attribute)?;
    for leaf in formula.identifiers().into_iter().flat_map(|i| i.leaves()) {
        if let IdentifierExpr::Ref(name) = leaf {
            return Err(CompileError::MixedIdentifiers(name.clone()));
        }
    }
    Ok(CompiledPattern {
        formula: formula.clone(),
        mode: PatternMode::Simple {
            attribute: attribute.to_owned(),
            index,
        },
    })
}

pub fn compile_behavioural(
    defs: &[BehaviourDef],
    formula: &PatternFormula,
    schema: &[String],
) -> Result<CompiledPattern, CompileError> {
    let mut behaviours = Vec::with_capacity(defs.len());
    for def in defs {
        let conjuncts = def
            .conjuncts
            .iter()
            .map(|eq| {
                Ok(match eq {
                    Equality::AttrAttr(a, b) => BoundEquality::AttrAttr(
                        attribute_index(schema, a)?,
                        attribute_index(schema, b)?,
                    ),
                    Equality::AttrConst(a, k) => {
                        BoundEquality::AttrConst(attribute_index(schema, a)?, k.as_text())
                    }
                })
            })
            .collect::<Result<_, CompileError>>()?;
        behaviours.push(Behaviour {
            name: def.name.clone(),
            conjuncts,
        });
    }
    for leaf in formula.identifiers().into_iter().flat_map(|i| i.leaves()) {
        match leaf {
            IdentifierExpr::Ref(name) if !behaviours.iter().any(|b| &b.name == name) => {
                return Err(CompileError::UnboundBehaviourName(name.clone()))
            }
            IdentifierExpr::Lit(v) => return Err(CompileError::MixedIdentifiers(format!("'{v}'"))),
            _ => {}
        }
    }
    Ok(CompiledPattern {
        formula: formula.clone(),
        mode: PatternMode::Behavioural { behaviours },
    })
}

fn attribute_index(schema: &[String], name: &str) -> Result<usize, CompileError> {
    schema
        .iter()
        .position(|a| a == name)
        .ok_or_else(|| CompileError::UnknownAttribute(name.to_owned()))
}
