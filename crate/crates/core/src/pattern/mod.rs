//! Temporal patterns over the events of a case.
//!
//! A case matches a pattern when at least one segment of its event set
//! satisfies it; [`pattern_select`] keeps exactly the events of matching
//! cases. Satisfaction is existential: the engine reports the full set of
//! satisfying segments, and [`MatchResult::ranked`] orders them by size
//! then start for presentation.

mod compile;
mod matcher;
mod oracle;

use std::collections::{BTreeSet, HashSet};

pub use compile::{
    compile, compile_behavioural, compile_simple, event_matches_identifier, Behaviour,
    BoundEquality, CompiledPattern, PatternMode,
};
pub use matcher::satisfying_segments;
pub use oracle::{oracle_satisfying_segments, OracleBoundExceeded, DEFAULT_ORACLE_BOUND};

use crate::eventlog::{EventLog, EventSet, Segment};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchResult {
    pub segments: BTreeSet<Segment>,
}

impl MatchResult {
    pub fn is_satisfied(&self) -> bool {
        !self.segments.is_empty()
    }

    pub fn contains(&self, seg: Segment) -> bool {
        self.segments.contains(&seg)
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Segments ordered by number of covered events, then start.
    pub fn ranked(&self, es: &EventSet<'_>) -> Vec<Segment> {
        let mut out: Vec<Segment> = self.segments.iter().copied().collect();
        out.sort_by_key(|s| (es.segment_len(*s), *s));
        out
    }

    /// Smallest member by [`ranked`](Self::ranked) order.
    pub fn minimal(&self, es: &EventSet<'_>) -> Option<Segment> {
        self.ranked(es).into_iter().next()
    }
}

/// Keeps the events of every case that has a satisfying segment for `p`.
pub fn pattern_select(p: &CompiledPattern, log: &EventLog) -> EventLog {
    let keep: HashSet<&str> = matching_cases(p, log).collect();
    log.filter(|ev| keep.contains(ev.cid.as_str()))
}

/// Case ids of `log` that satisfy `p`, ascending.
pub fn matching_cases<'a>(
    p: &'a CompiledPattern,
    log: &'a EventLog,
) -> impl Iterator<Item = &'a str> + 'a {
    log.event_sets()
        .filter(move |es| satisfying_segments(p, es).is_satisfied())
        .map(|es| es.cid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::{case_events, ColumnRoles, Event, Timestamp};
    use crate::query::{
        parse_pattern, BehaviourDef, Constant, Equality, IdentifierExpr, PatternFormula,
    };

    fn log(names: &[Option<&str>]) -> EventLog {
        let events = names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                Event::new(
                    format!("e{i}"),
                    "c",
                    Timestamp::from_millis(i as u64 + 1),
                    vec![n.map(str::to_owned)],
                )
            })
            .collect();
        EventLog::new(ColumnRoles::default(), vec!["event_name".into()], events).unwrap()
    }

    fn seg(a: u64, b: u64) -> Segment {
        Segment::interval(Timestamp::from_millis(a), Timestamp::from_millis(b))
    }

    fn matches(pattern: &str, names: &[Option<&str>]) -> MatchResult {
        let l = log(names);
        let p = compile_simple("event_name", &parse_pattern(pattern).unwrap(), l.schema()).unwrap();
        let es = case_events(&l, "c");
        let fast = satisfying_segments(&p, &es);
        assert_eq!(
            fast,
            oracle_satisfying_segments(&p, &es, 12).unwrap(),
            "{pattern}"
        );
        fast
    }

    #[test]
    fn identifiers_denote_single_events() {
        let r = matches("'a'", &[Some("a"), Some("b"), Some("a")]);
        assert_eq!(r.segments, BTreeSet::from([seg(1, 1), seg(3, 3)]));
        let r = matches("NOT ('a')", &[Some("a"), None, Some("b")]);
        assert_eq!(r.segments, BTreeSet::from([seg(2, 2), seg(3, 3)]));
        let r = matches("'a' OR 'b'", &[Some("a"), None, Some("b")]);
        assert_eq!(r.segments, BTreeSet::from([seg(1, 1), seg(3, 3)]));
    }

    #[test]
    fn any_is_every_single_event() {
        let r = matches("ANY", &[Some("a"), Some("b"), Some("a")]);
        assert_eq!(
            r.segments,
            BTreeSet::from([seg(1, 1), seg(2, 2), seg(3, 3)])
        );
        assert!(matches("ANY", &[]).is_empty());
    }

    #[test]
    fn follows_versus_directly_follows() {
        let names = [Some("a"), Some("x"), Some("b")];
        assert_eq!(
            matches("'a' ~> 'b'", &names).segments,
            BTreeSet::from([seg(1, 3)])
        );
        assert!(matches("'a' -> 'b'", &names).is_empty());
        assert_eq!(
            matches("'a' -> 'x' -> 'b'", &names).segments,
            BTreeSet::from([seg(1, 3)])
        );
        // b before a never matches
        assert!(matches("'b' ~> 'a'", &names).is_empty());
    }

    #[test]
    fn star_concatenates_adjacent_runs() {
        let names = [Some("a"), Some("a"), Some("b"), Some("a")];
        let r = matches("'a'*", &names);
        assert_eq!(
            r.segments,
            BTreeSet::from([Segment::Empty, seg(1, 1), seg(2, 2), seg(1, 2), seg(4, 4)])
        );
        // the empty segment does not absorb into composition
        let r = matches("'b' -> 'a'*", &names);
        assert_eq!(r.segments, BTreeSet::from([seg(3, 4)]));
    }

    #[test]
    fn anchors_need_boundary_events() {
        let names = [Some("a"), Some("b"), Some("a")];
        assert_eq!(
            matches("START 'a'", &names).segments,
            BTreeSet::from([seg(1, 1)])
        );
        assert_eq!(
            matches("'a' END", &names).segments,
            BTreeSet::from([seg(3, 3)])
        );
        assert!(matches("START 'a'* END", &names).is_empty());
        assert_eq!(
            matches("START ANY* END", &names).segments,
            BTreeSet::from([seg(1, 3)])
        );
    }

    #[test]
    fn ranked_orders_by_size_then_start() {
        let names = [Some("x"), Some("y"), Some("z"), Some("e4")];
        let l = log(&names);
        let p = compile_simple(
            "event_name",
            &parse_pattern("ANY ~> 'e4'").unwrap(),
            l.schema(),
        )
        .unwrap();
        let es = case_events(&l, "c");
        let r = satisfying_segments(&p, &es);
        assert_eq!(r.ranked(&es), vec![seg(3, 4), seg(2, 4), seg(1, 4)]);
        assert_eq!(r.minimal(&es), Some(seg(3, 4)));
    }

    #[test]
    fn behaviour_patterns_use_all_attributes() {
        let events = vec![
            Event::new(
                "1",
                "c",
                Timestamp::from_millis(1),
                vec![Some("x".into()), Some("x".into())],
            ),
            Event::new(
                "2",
                "c",
                Timestamp::from_millis(2),
                vec![Some("x".into()), Some("y".into())],
            ),
            Event::new("3", "c", Timestamp::from_millis(3), vec![None, None]),
        ];
        let l =
            EventLog::new(ColumnRoles::default(), vec!["a".into(), "b".into()], events).unwrap();
        let same = BehaviourDef {
            name: "same".into(),
            conjuncts: vec![Equality::AttrAttr("a".into(), "b".into())],
        };
        let ax = BehaviourDef {
            name: "ax".into(),
            conjuncts: vec![Equality::AttrConst("a".into(), Constant::Str("x".into()))],
        };
        let formula = PatternFormula::Id(IdentifierExpr::not(IdentifierExpr::Ref("same".into())));
        let p = compile_behavioural(&[same.clone(), ax.clone()], &formula, l.schema()).unwrap();
        let es = case_events(&l, "c");
        let r = satisfying_segments(&p, &es);
        // null = null is not equal, so event 3 is not `same`
        assert_eq!(r.segments, BTreeSet::from([seg(2, 2), seg(3, 3)]));
        assert_eq!(r, oracle_satisfying_segments(&p, &es, 12).unwrap());

        let unbound = PatternFormula::reference("nope");
        assert_eq!(
            compile_behavioural(&[ax], &unbound, l.schema()),
            Err(crate::CompileError::UnboundBehaviourName("nope".into()))
        );
        let bad_attr = BehaviourDef {
            name: "w".into(),
            conjuncts: vec![Equality::AttrAttr("a".into(), "zzz".into())],
        };
        assert_eq!(
            compile_behavioural(&[bad_attr], &PatternFormula::reference("w"), l.schema()),
            Err(crate::CompileError::UnknownAttribute("zzz".into()))
        );
    }

    #[test]
    fn simple_compile_errors() {
        let schema = vec!["event_name".to_owned()];
        assert_eq!(
            compile_simple("missing_attr", &PatternFormula::Any, &schema),
            Err(crate::CompileError::UnknownAttribute("missing_attr".into()))
        );
        assert!(matches!(
            compile_simple("event_name", &PatternFormula::reference("w"), &schema),
            Err(crate::CompileError::MixedIdentifiers(_))
        ));
    }

    #[test]
    fn oracle_respects_its_bound() {
        let l = log(&[Some("a"); 5]);
        let p = compile_simple("event_name", &PatternFormula::Any, l.schema()).unwrap();
        assert_eq!(
            oracle_satisfying_segments(&p, &case_events(&l, "c"), 4),
            Err(OracleBoundExceeded { size: 5, bound: 4 })
        );
    }

    #[test]
    fn selection_keeps_whole_cases() {
        let events = vec![
            Event::new("1", "a", Timestamp::from_millis(1), vec![Some("x".into())]),
            Event::new("2", "a", Timestamp::from_millis(2), vec![Some("y".into())]),
            Event::new("3", "b", Timestamp::from_millis(1), vec![Some("y".into())]),
        ];
        let l = EventLog::new(ColumnRoles::default(), vec!["event_name".into()], events).unwrap();
        let p = compile_simple("event_name", &PatternFormula::lit("x"), l.schema()).unwrap();
        let out = pattern_select(&p, &l);
        assert_eq!(out.len(), 2);
        assert!(out.events().iter().all(|e| e.cid == "a"));
        let star =
            compile_simple("event_name", &parse_pattern("'q'*").unwrap(), l.schema()).unwrap();
        assert_eq!(pattern_select(&star, &l), l);
    }
}
