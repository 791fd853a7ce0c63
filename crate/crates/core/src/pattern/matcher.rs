//! Bottom-up segment satisfaction.
//!
//! Every subformula is turned into the full set of segments it denotes in
//! one event set, as an `n x n` upper-triangular table over event positions
//! plus a flag for the empty segment. Identifiers and `ANY` denote single
//! events; `~>` and `->` join an `a`-segment to a later `b`-segment (with no
//! event in between for `->`); `*` is the empty segment plus every run of
//! adjacent `a`-segments; `START`/`END` keep segments touching the first or
//! last event.

use std::collections::BTreeSet;

use super::{CompiledPattern, MatchResult};
use crate::eventlog::{EventSet, Segment};
use crate::query::PatternFormula;

struct Table {
    n: usize,
    empty: bool,
    cells: Vec<bool>,
}

impl Table {
    fn new(n: usize) -> Self {
        Table {
            n,
            empty: false,
            cells: vec![false; n * n],
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize) {
        self.cells[i * self.n + j] = true;
    }
}

pub fn satisfying_segments(p: &CompiledPattern, es: &EventSet<'_>) -> MatchResult {
    let table = denote(p, p.formula(), es);
    let events = es.events();
    let mut segments = BTreeSet::new();
    if table.empty {
        segments.insert(Segment::Empty);
    }
    for i in 0..table.n {
        for j in i..table.n {
            if table.get(i, j) {
                segments.insert(Segment::interval(events[i].ts, events[j].ts));
            }
        }
    }
    MatchResult { segments }
}

fn denote(p: &CompiledPattern, f: &PatternFormula, es: &EventSet<'_>) -> Table {
    let n = es.len();
    let mut out = Table::new(n);
    match f {
        PatternFormula::Id(idx) => {
            for (i, ev) in es.events().iter().enumerate() {
                if p.event_matches(idx, ev) {
                    out.set(i, i);
                }
            }
        }
        PatternFormula::Any => (0..n).for_each(|i| out.set(i, i)),
        PatternFormula::Follows(a, b) => {
            let (a, b) = (denote(p, a, es), denote(p, b, es));
            // (i, l) is a join iff the earliest end of an a-segment starting
            // at i lies before the latest start of a b-segment ending at l
            let first_end: Vec<Option<usize>> =
                (0..n).map(|i| (i..n).find(|&j| a.get(i, j))).collect();
            let last_start: Vec<Option<usize>> = (0..n)
                .map(|l| (0..=l).rev().find(|&k| b.get(k, l)))
                .collect();
            for (i, fe) in first_end.iter().enumerate() {
                for (l, ls) in last_start.iter().enumerate().skip(i) {
                    if let (Some(j), Some(k)) = (*fe, *ls) {
                        if j < k {
                            out.set(i, l);
                        }
                    }
                }
            }
        }
        PatternFormula::DirectlyFollows(a, b) => {
            let (a, b) = (denote(p, a, es), denote(p, b, es));
            for i in 0..n {
                for j in i..n.saturating_sub(1) {
                    if a.get(i, j) {
                        for l in j + 1..n {
                            if b.get(j + 1, l) {
                                out.set(i, l);
                            }
                        }
                    }
                }
            }
        }
        PatternFormula::Star(a) => {
            let a = denote(p, a, es);
            out.empty = true;
            for i in (0..n).rev() {
                for j in i..n {
                    if !a.get(i, j) {
                        continue;
                    }
                    out.set(i, j);
                    for l in j + 1..n {
                        if out.get(j + 1, l) {
                            out.set(i, l);
                        }
                    }
                }
            }
        }
        PatternFormula::Start(a) => {
            let a = denote(p, a, es);
            for j in 0..n {
                if a.get(0, j) {
                    out.set(0, j);
                }
            }
        }
        PatternFormula::End(a) => {
            let a = denote(p, a, es);
            for i in 0..n {
                if a.get(i, n - 1) {
                    out.set(i, n - 1);
                }
            }
        }
    }
    out
}
