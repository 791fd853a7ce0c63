use std::collections::BTreeSet;

use proptest::prelude::*;
use scc::datalog::cross_check;
use scc::eventlog::{
    load_event_log, merge_cases, write_event_log, Column, ColumnRoles, Event, EventLog, Timestamp,
};
use scc::gen::{self, LogShape};
use scc::pattern::{
    compile, oracle_satisfying_segments, pattern_select, satisfying_segments, CompiledPattern,
};
use scc::plan::{compile_plan, execute, TableSchema, Value};
use scc::query::{
    parse_pattern, parse_query, pretty_print, print_pattern, Condition, Constant, IdentifierExpr,
    PatternFormula, Query,
};

const VOCAB: [&str; 3] = ["a", "b", "c"];

fn identifier(leaf: BoxedStrategy<IdentifierExpr>) -> impl Strategy<Value = IdentifierExpr> {
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(IdentifierExpr::not),
            (inner.clone(), inner).prop_map(|(a, b)| IdentifierExpr::or(a, b)),
        ]
    })
}

fn formula(leaf: BoxedStrategy<IdentifierExpr>) -> impl Strategy<Value = PatternFormula> {
    let base = prop_oneof![
        1 => Just(PatternFormula::Any),
        6 => identifier(leaf).prop_map(PatternFormula::Id),
    ];
    base.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PatternFormula::follows(a, b)),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| PatternFormula::directly_follows(a, b)),
            inner.clone().prop_map(PatternFormula::star),
            inner.clone().prop_map(PatternFormula::start),
            inner.prop_map(PatternFormula::end),
        ]
    })
}

fn simple_formula() -> impl Strategy<Value = PatternFormula> {
    formula(
        prop::sample::select(&VOCAB[..])
            .prop_map(|v| IdentifierExpr::Lit(v.into()))
            .boxed(),
    )
}

fn names() -> impl Strategy<Value = Option<String>> {
    prop_oneof![
        1 => Just(None),
        8 => prop::sample::select(&VOCAB[..]).prop_map(|s| Some(s.to_owned())),
    ]
}

fn statuses() -> impl Strategy<Value = Option<String>> {
    prop_oneof![
        1 => Just(None),
        4 => prop::sample::select(&gen::STATUSES[..]).prop_map(|s| Some(s.to_owned())),
    ]
}

/// Logs over the generator schema: up to 3 cases of up to 6 events.
fn logs() -> impl Strategy<Value = EventLog> {
    prop::collection::vec(
        prop::collection::vec((1u64..4, names(), statuses()), 0..=6),
        1..=3,
    )
    .prop_map(|cases| {
        let mut events = Vec::new();
        for (k, case) in cases.into_iter().enumerate() {
            let mut ts = 0;
            for (step, name, status) in case {
                ts += step;
                let eid = format!("e{}", events.len());
                events.push(Event::new(
                    eid,
                    format!("c{k}"),
                    Timestamp::from_millis(ts),
                    vec![name, status],
                ));
            }
        }
        EventLog::new(
            ColumnRoles::default(),
            vec![gen::NAME_ATTRIBUTE.into(), gen::STATUS_ATTRIBUTE.into()],
            events,
        )
        .unwrap()
    })
}

fn compiled(p: &PatternFormula, log: &EventLog) -> CompiledPattern {
    compile(
        &Condition::SimpleMatch(gen::NAME_ATTRIBUTE.into(), p.clone()),
        log.schema(),
    )
    .unwrap()
}

fn text_of(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::Text(s) => Some(s.clone()),
        Value::Time(t) => Some(t.to_string()),
    }
}

/// Event-at-a-time evaluation straight from the query text, using the
/// exhaustive matcher for patterns.
fn reference_eval(q: &Query, log: &EventLog) -> Vec<Vec<Value>> {
    let col = |name: &str| match name {
        "event_id" => Column::Eid,
        "case_id" => Column::Cid,
        "timestamp" => Column::Ts,
        other => Column::Attr(log.attribute_index(other).unwrap()),
    };
    let mut rows = Vec::new();
    for es in log.event_sets() {
        let case_ok = q.conditions.iter().filter(|c| c.is_pattern()).all(|c| {
            let p = compile(c, log.schema()).unwrap();
            oracle_satisfying_segments(&p, &es, 12)
                .unwrap()
                .is_satisfied()
        });
        if !case_ok {
            continue;
        }
        for ev in es.events() {
            let keep = q.conditions.iter().all(|c| match c {
                Condition::AttrEqAttr(a, b) => {
                    let (x, y) = (
                        text_of(&Value::of(ev, col(a))),
                        text_of(&Value::of(ev, col(b))),
                    );
                    x.is_some() && x == y
                }
                Condition::AttrEqConst(a, k) => {
                    let x = text_of(&Value::of(ev, col(a)));
                    match (col(a), k) {
                        (Column::Ts, Constant::Int(n)) => x == Some(n.to_string()),
                        (_, k) => x == Some(k.as_text()),
                    }
                }
                _ => true,
            });
            if keep {
                rows.push(q.projection.iter().map(|c| Value::of(ev, col(c))).collect());
            }
        }
    }
    rows
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pattern_text_round_trips(p in simple_formula()) {
        let text = print_pattern(&p);
        prop_assert_eq!(parse_pattern(&text).unwrap(), p, "{}", text);
    }

    #[test]
    fn query_text_round_trips(seed in any::<u64>()) {
        let q = gen::random_query(&mut gen::rng(seed), &gen::default_vocab(), 3);
        let text = pretty_print(&q);
        prop_assert_eq!(parse_query(&text).unwrap(), q);
    }

    #[test]
    fn matcher_agrees_with_oracle(p in simple_formula(), log in logs()) {
        let cp = compiled(&p, &log);
        for es in log.event_sets() {
            prop_assert_eq!(satisfying_segments(&cp, &es), oracle_satisfying_segments(&cp, &es, 12).unwrap());
        }
    }

    #[test]
    fn behaviour_matcher_agrees_with_oracle(seed in any::<u64>(), log in logs()) {
        let mut rng = gen::rng(seed);
        let cp = compile(&gen::random_behaviour_condition(&mut rng, 3, &gen::default_vocab()), log.schema()).unwrap();
        for es in log.event_sets() {
            prop_assert_eq!(satisfying_segments(&cp, &es), oracle_satisfying_segments(&cp, &es, 12).unwrap());
        }
    }

    #[test]
    fn segments_lie_inside_the_case(p in simple_formula(), log in logs()) {
        let cp = compiled(&p, &log);
        for es in log.event_sets() {
            for seg in satisfying_segments(&cp, &es).segments {
                if let scc::eventlog::Segment::Interval { start, end } = seg {
                    prop_assert!(start <= end);
                    prop_assert!(es.position(start).is_some() && es.position(end).is_some());
                }
            }
        }
    }

    #[test]
    fn star_accepts_empty_and_closes_under_adjacent_concatenation(p in simple_formula(), log in logs()) {
        let star = PatternFormula::star(p.clone());
        let (cp, cs) = (compiled(&p, &log), compiled(&star, &log));
        for es in log.event_sets() {
            let base = satisfying_segments(&cp, &es);
            let closed = satisfying_segments(&cs, &es);
            prop_assert!(closed.contains(scc::eventlog::Segment::Empty));
            for seg in base.segments.iter().filter(|s| !s.is_empty()) {
                prop_assert!(closed.contains(*seg));
            }
        }
    }

    #[test]
    fn selection_is_idempotent_and_case_closed(p in simple_formula(), log in logs()) {
        let cp = compiled(&p, &log);
        let once = pattern_select(&cp, &log);
        prop_assert_eq!(pattern_select(&cp, &once), once.clone());
        for es in once.event_sets() {
            prop_assert_eq!(scc::eventlog::case_events(&log, es.cid()).events(), es.events());
        }
    }

    #[test]
    fn selections_commute(p in simple_formula(), q in simple_formula(), log in logs()) {
        let (cp, cq) = (compiled(&p, &log), compiled(&q, &log));
        prop_assert_eq!(
            pattern_select(&cp, &pattern_select(&cq, &log)),
            pattern_select(&cq, &pattern_select(&cp, &log))
        );
    }

    #[test]
    fn selection_is_case_local(p in simple_formula(), log in logs()) {
        // selecting on each case alone and on the whole log agree
        let cp = compiled(&p, &log);
        let whole: BTreeSet<String> = pattern_select(&cp, &log).events().iter().map(|e| e.eid.clone()).collect();
        let mut parts = BTreeSet::new();
        for es in log.event_sets() {
            let single = log.filter(|e| e.cid == es.cid());
            parts.extend(pattern_select(&cp, &single).events().iter().map(|e| e.eid.clone()));
        }
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn load_after_write_is_identity(log in logs()) {
        let mut csv = Vec::new();
        write_event_log(&log, &mut csv).unwrap();
        let back = load_event_log(csv.as_slice(), &ColumnRoles::default()).unwrap();
        prop_assert_eq!(&back, &log);
        let mut again = Vec::new();
        write_event_log(&back, &mut again).unwrap();
        prop_assert_eq!(csv, again);
    }

    #[test]
    fn merging_is_idempotent(log in logs()) {
        let merged = merge_cases(&log);
        prop_assert!(merged.event_sets().count() <= 1);
        prop_assert_eq!(merged.len(), log.len());
        prop_assert_eq!(merge_cases(&merged), merged);
    }

    #[test]
    fn algebra_agrees_with_reference_evaluator(seed in any::<u64>(), log in logs()) {
        let q = gen::random_query(&mut gen::rng(seed), &gen::default_vocab(), 3);
        let plan = compile_plan(&q, &TableSchema::of(gen::SOURCE, &log)).unwrap();
        prop_assert_eq!(execute(&plan, &log).rows, reference_eval(&q, &log), "{}", q);
    }

    #[test]
    fn datalog_agrees_with_algebra(seed in any::<u64>(), log in logs()) {
        let q = gen::random_query(&mut gen::rng(seed), &gen::default_vocab(), 3);
        let report = cross_check(&q, &log, gen::SOURCE).unwrap();
        prop_assert!(report.is_equal(), "{}\n{}", q, report);
    }

    #[test]
    fn generated_logs_reload(seed in any::<u64>(), cases in 0usize..5) {
        let shape = LogShape { cases, null_rate: 0.2, ..LogShape::default() };
        let log = gen::random_log(&mut gen::rng(seed), &shape);
        let mut csv = Vec::new();
        write_event_log(&log, &mut csv).unwrap();
        prop_assert!(load_event_log(csv.as_slice(), &ColumnRoles::default()).is_ok());
    }
}

#[test]
fn adding_a_row_condition_never_adds_rows() {
    let mut rng = gen::rng(11);
    for _ in 0..200 {
        let log = gen::random_log(&mut rng, &LogShape::default());
        let mut q = gen::random_query(&mut rng, &gen::default_vocab(), 4);
        let schema = TableSchema::of(gen::SOURCE, &log);
        let before = execute(&compile_plan(&q, &schema).unwrap(), &log)
            .rows
            .len();
        q.conditions.push(Condition::AttrEqConst(
            "event_name".into(),
            Constant::Str("a".into()),
        ));
        let after = execute(&compile_plan(&q, &schema).unwrap(), &log)
            .rows
            .len();
        assert!(after <= before);
    }
}
