//! Reference satisfaction check by exhaustive search.
//!
//! Decides `segment satisfies formula` for one candidate at a time, trying
//! every split of the candidate into sub-segments. Exponential, and only
//! meant for small event sets. It does not call into the matcher or into
//! [`CompiledPattern::event_matches`].

use std::collections::BTreeSet;

use thiserror::Error;

use super::{BoundEquality, CompiledPattern, MatchResult, PatternMode};
use crate::eventlog::{Event, EventSet, Segment};
use crate::query::{IdentifierExpr, PatternFormula};

pub const DEFAULT_ORACLE_BOUND: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("event set has {size} events, oracle bound is {bound}")]
pub struct OracleBoundExceeded {
    pub size: usize,
    pub bound: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Span {
    Empty,
    Events(usize, usize),
}

struct Oracle<'a> {
    pattern: &'a CompiledPattern,
    events: &'a [Event],
}

pub fn oracle_satisfying_segments(
    p: &CompiledPattern,
    es: &EventSet<'_>,
    bound: usize,
) -> Result<MatchResult, OracleBoundExceeded> {
    if es.len() > bound {
        return Err(OracleBoundExceeded {
            size: es.len(),
            bound,
        });
    }
    let oracle = Oracle {
        pattern: p,
        events: es.events(),
    };
    let n = es.len();
    let mut candidates = vec![Span::Empty];
    for i in 0..n {
        for j in i..n {
            candidates.push(Span::Events(i, j));
        }
    }
    let segments: BTreeSet<Segment> = candidates
        .into_iter()
        .filter(|&s| oracle.sat(p.formula(), s))
        .map(|s| match s {
            Span::Empty => Segment::Empty,
            Span::Events(i, j) => Segment::interval(es.events()[i].ts, es.events()[j].ts),
        })
        .collect();
    Ok(MatchResult { segments })
}

impl Oracle<'_> {
    fn sat(&self, f: &PatternFormula, s: Span) -> bool {
        match f {
            PatternFormula::Id(idx) => match s {
                Span::Events(i, j) if i == j => self.identifier(idx, &self.events[i]),
                _ => false,
            },
            PatternFormula::Any => matches!(s, Span::Events(i, j) if i == j),
            PatternFormula::Follows(a, b) => self
                .splits(s, false)
                .any(|(x, y)| self.sat(a, x) && self.sat(b, y)),
            PatternFormula::DirectlyFollows(a, b) => self
                .splits(s, true)
                .any(|(x, y)| self.sat(a, x) && self.sat(b, y)),
            PatternFormula::Star(a) => match s {
                Span::Empty => true,
                // strip a non-empty prefix satisfying `a`; the rest must
                // satisfy the star again
                Span::Events(i, l) => (i..=l).any(|j| {
                    let rest = if j == l {
                        Span::Empty
                    } else {
                        Span::Events(j + 1, l)
                    };
                    self.sat(a, Span::Events(i, j)) && self.sat(f, rest)
                }),
            },
            PatternFormula::Start(a) => matches!(s, Span::Events(0, _)) && self.sat(a, s),
            PatternFormula::End(a) => {
                matches!(s, Span::Events(_, l) if l + 1 == self.events.len()) && self.sat(a, s)
            }
        }
    }

    /// Pairs of non-empty sub-segments `(x, y)` with `x` starting where `s`
    /// starts, `y` ending where `s` ends and `x` ending before `y` starts.
    fn splits(&self, s: Span, adjacent: bool) -> impl Iterator<Item = (Span, Span)> {
        let (i, l) = match s {
            Span::Events(i, l) => (i, l),
            Span::Empty => (1, 0),
        };
        (i..=l).flat_map(move |j| {
            (j + 1..=l)
                .filter(move |&k| !adjacent || k == j + 1)
                .map(move |k| (Span::Events(i, j), Span::Events(k, l)))
        })
    }

    fn identifier(&self, idx: &IdentifierExpr, ev: &Event) -> bool {
        match idx {
            IdentifierExpr::Lit(value) => match self.pattern.mode() {
                PatternMode::Simple { index, .. } => {
                    matches!(&ev.attrs[*index], Some(v) if v == value)
                }
                PatternMode::Behavioural { .. } => false,
            },
            IdentifierExpr::Ref(name) => match self.pattern.mode() {
                PatternMode::Behavioural { behaviours } => {
                    behaviours.iter().filter(|b| &b.name == name).any(|b| {
                        b.conjuncts.iter().all(|c| match c {
                            BoundEquality::AttrConst(a, k) => ev.attrs[*a].as_ref() == Some(k),
                            BoundEquality::AttrAttr(a, b) => {
                                ev.attrs[*a].is_some() && ev.attrs[*a] == ev.attrs[*b]
                            }
                        })
                    })
                }
                PatternMode::Simple { .. } => false,
            },
            IdentifierExpr::Or(a, b) => self.identifier(a, ev) || self.identifier(b, ev),
            IdentifierExpr::Not(a) => !self.identifier(a, ev),
        }
    }
}
