//! Seeded random logs, patterns and queries for testing and benchmarks.
//!
//! Everything here is driven by a caller-supplied [`Rng`]; use [`rng`] for
//! a reproducible ChaCha stream.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eventlog::{ColumnRoles, Event, EventLog, Timestamp};
use crate::query::{
    BehaviourDef, Condition, Constant, Equality, IdentifierExpr, PatternFormula, Query,
};

pub const NAME_ATTRIBUTE: &str = "event_name";
pub const STATUS_ATTRIBUTE: &str = "status";
pub const STATUSES: [&str; 2] = ["OK", "SENT"];
pub const SOURCE: &str = "eventlog";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn default_vocab() -> Vec<String> {
    ["a", "b", "c"].map(String::from).to_vec()
}

/// Size and value distribution of a generated log.
#[derive(Debug, Clone, PartialEq)]
pub struct LogShape {
    pub cases: usize,
    pub min_events: usize,
    pub max_events: usize,
    pub vocab: Vec<String>,
    /// Probability that an attribute value is null.
    pub null_rate: f64,
}

impl Default for LogShape {
    fn default() -> Self {
        LogShape {
            cases: 4,
            min_events: 0,
            max_events: 7,
            vocab: default_vocab(),
            null_rate: 0.1,
        }
    }
}

/// A log with attributes `event_name` (from the vocabulary) and `status`.
/// Cases are `c0`, `c1`, ..; timestamps grow by 1 to 3 within a case.
pub fn random_log<R: Rng>(rng: &mut R, shape: &LogShape) -> EventLog {
    let mut events = Vec::new();
    for k in 0..shape.cases {
        let n = rng.gen_range(shape.min_events..=shape.max_events.max(shape.min_events));
        let mut ts = rng.gen_range(0..5u64);
        for _ in 0..n {
            let name = (!rng.gen_bool(shape.null_rate))
                .then(|| shape.vocab.choose(rng).cloned())
                .flatten();
            let status = (!rng.gen_bool(shape.null_rate))
                .then(|| STATUSES.choose(rng).map(|s| s.to_string()))
                .flatten();
            events.push(Event::new(
                format!("e{}", events.len()),
                format!("c{k}"),
                Timestamp::from_millis(ts),
                vec![name, status],
            ));
            ts += rng.gen_range(1..=3);
        }
    }
    EventLog::new(
        ColumnRoles::default(),
        vec![NAME_ATTRIBUTE.into(), STATUS_ATTRIBUTE.into()],
        events,
    )
    .expect("generated keys are unique")
}

/// A single case with `n` events named from the vocabulary, no nulls.
pub fn random_case<R: Rng>(rng: &mut R, n: usize, vocab: &[String]) -> EventLog {
    random_log(
        rng,
        &LogShape {
            cases: 1,
            min_events: n,
            max_events: n,
            vocab: vocab.to_vec(),
            null_rate: 0.0,
        },
    )
}

fn random_identifier<R: Rng>(
    rng: &mut R,
    leaves: &[IdentifierExpr],
    depth: usize,
) -> IdentifierExpr {
    if depth <= 1 || rng.gen_bool(0.6) {
        return leaves.choose(rng).cloned().expect("at least one leaf");
    }
    if rng.gen_bool(0.5) {
        IdentifierExpr::not(random_identifier(rng, leaves, depth - 1))
    } else {
        IdentifierExpr::or(
            random_identifier(rng, leaves, depth - 1),
            random_identifier(rng, leaves, depth - 1),
        )
    }
}

fn random_formula<R: Rng>(rng: &mut R, leaves: &[IdentifierExpr], depth: usize) -> PatternFormula {
    if depth <= 1 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.1) {
            PatternFormula::Any
        } else {
            PatternFormula::Id(random_identifier(rng, leaves, 2))
        };
    }
    let sub = |rng: &mut R| random_formula(rng, leaves, depth - 1);
    match rng.gen_range(0..6) {
        0 | 1 => PatternFormula::follows(sub(rng), sub(rng)),
        2 => PatternFormula::directly_follows(sub(rng), sub(rng)),
        3 => PatternFormula::star(sub(rng)),
        4 => PatternFormula::start(sub(rng)),
        _ => PatternFormula::end(sub(rng)),
    }
}

/// A simple pattern of depth at most `depth` over literals from `vocab`.
pub fn random_pattern<R: Rng>(rng: &mut R, depth: usize, vocab: &[String]) -> PatternFormula {
    let leaves: Vec<IdentifierExpr> = vocab.iter().cloned().map(IdentifierExpr::Lit).collect();
    random_formula(rng, &leaves, depth)
}

/// A `BEHAVIOUR .. MATCHES ..` condition over the generated schema.
pub fn random_behaviour_condition<R: Rng>(
    rng: &mut R,
    depth: usize,
    vocab: &[String],
) -> Condition {
    let name = vocab.choose(rng).cloned().unwrap_or_default();
    let status = STATUSES.choose(rng).unwrap().to_string();
    let mut defs = vec![
        BehaviourDef {
            name: "x".into(),
            conjuncts: vec![Equality::AttrConst(
                NAME_ATTRIBUTE.into(),
                Constant::Str(name),
            )],
        },
        BehaviourDef {
            name: "y".into(),
            conjuncts: vec![Equality::AttrConst(
                STATUS_ATTRIBUTE.into(),
                Constant::Str(status),
            )],
        },
    ];
    if rng.gen_bool(0.3) {
        defs[1].conjuncts.push(Equality::AttrAttr(
            NAME_ATTRIBUTE.into(),
            STATUS_ATTRIBUTE.into(),
        ));
    }
    let leaves = [
        IdentifierExpr::Ref("x".into()),
        IdentifierExpr::Ref("y".into()),
    ];
    Condition::BehaviourMatch(defs, random_formula(rng, &leaves, depth))
}

/// Column names of logs from [`random_log`].
pub fn columns() -> [&'static str; 5] {
    [
        "event_id",
        "case_id",
        "timestamp",
        NAME_ATTRIBUTE,
        STATUS_ATTRIBUTE,
    ]
}

fn random_row_condition<R: Rng>(rng: &mut R, vocab: &[String], cases: usize) -> Condition {
    match rng.gen_range(0..6) {
        0 | 1 => Condition::AttrEqConst(
            NAME_ATTRIBUTE.into(),
            Constant::Str(vocab.choose(rng).cloned().unwrap_or_default()),
        ),
        2 => Condition::AttrEqConst(
            STATUS_ATTRIBUTE.into(),
            Constant::Str(STATUSES.choose(rng).unwrap().to_string()),
        ),
        3 => Condition::AttrEqAttr(NAME_ATTRIBUTE.into(), STATUS_ATTRIBUTE.into()),
        4 => Condition::AttrEqConst(
            "case_id".into(),
            Constant::Str(format!("c{}", rng.gen_range(0..cases.max(1)))),
        ),
        _ => Condition::AttrEqConst("timestamp".into(), Constant::Int(rng.gen_range(0..12))),
    }
}

/// A query against [`random_log`] output: one to three projected columns,
/// at most two equality conditions and at most one pattern condition.
pub fn random_query<R: Rng>(rng: &mut R, vocab: &[String], cases: usize) -> Query {
    let cols = columns();
    let k = rng.gen_range(1..=3);
    let projection = cols
        .choose_multiple(rng, k)
        .map(|c| c.to_string())
        .collect();
    let mut conditions: Vec<Condition> = (0..rng.gen_range(0..=2))
        .map(|_| random_row_condition(rng, vocab, cases))
        .collect();
    match rng.gen_range(0..10) {
        0..=5 => {
            let p = random_pattern(rng, 3, vocab);
            conditions.push(Condition::SimpleMatch(NAME_ATTRIBUTE.into(), p));
        }
        6 | 7 => conditions.push(random_behaviour_condition(rng, 3, vocab)),
        _ => {}
    }
    conditions.shuffle(rng);
    Query {
        projection,
        source: SOURCE.into(),
        conditions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{parse_query, pretty_print};

    #[test]
    fn same_seed_same_log() {
        let shape = LogShape::default();
        assert_eq!(
            random_log(&mut rng(7), &shape),
            random_log(&mut rng(7), &shape)
        );
    }

    #[test]
    fn patterns_respect_depth() {
        let mut r = rng(1);
        for _ in 0..200 {
            assert!(random_pattern(&mut r, 3, &default_vocab()).depth() <= 3);
        }
    }

    #[test]
    fn generated_queries_reparse() {
        let mut r = rng(2);
        for _ in 0..100 {
            let q = random_query(&mut r, &default_vocab(), 4);
            assert_eq!(parse_query(&pretty_print(&q)).unwrap(), q);
        }
    }
}
