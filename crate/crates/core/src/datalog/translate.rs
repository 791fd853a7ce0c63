use std::collections::BTreeMap;

use super::ast::{Atom, CmpOp, Const, DatalogProgram, Literal, Rule, Term};
use super::facts::{attribute_predicates, EVENT, SEGMENT};
use crate::error::CompileError;
use crate::eventlog::Column;
use crate::pattern::{BoundEquality, CompiledPattern, PatternMode};
use crate::plan::{compile_plan, Operand, TableSchema};
use crate::query::{print_pattern, IdentifierExpr, PatternFormula, Query};

pub const OUTPUT: &str = "Output";
pub const HAS_EARLIER: &str = "hasEarlier";
pub const HAS_LATER: &str = "hasLater";
pub const HAS_BETWEEN: &str = "hasBetween";
pub const NEXT: &str = "next";

fn v(name: &str) -> Term {
    Term::var(name)
}

fn atom(pred: &str, args: &[&str]) -> Atom {
    Atom::new(pred, args.iter().map(|a| v(a)).collect())
}

fn pos(pred: &str, args: &[&str]) -> Literal {
    Literal::Pos(atom(pred, args))
}

fn neg(pred: &str, args: &[&str]) -> Literal {
    Literal::Neg(atom(pred, args))
}

fn cmp(l: &str, op: CmpOp, r: &str) -> Literal {
    Literal::Cmp(v(l), op, v(r))
}

fn rule(head: Atom, body: Vec<Literal>) -> Rule {
    Rule { head, body }
}

/// Order helpers over a case's timestamps, plus the two rules that derive
/// `segment` from `event`. The negated helpers are defined from `event`
/// alone, so negation never depends on derived predicates. `next(C,T1,T2)`
/// links consecutive events and turns adjacency into an equality join.
pub fn support_rules() -> Vec<Rule> {
    vec![
        rule(
            atom(HAS_EARLIER, &["C", "T"]),
            vec![
                pos(EVENT, &["C", "E", "T"]),
                pos(EVENT, &["C", "E2", "T2"]),
                cmp("T2", CmpOp::Lt, "T"),
            ],
        ),
        rule(
            atom(HAS_LATER, &["C", "T"]),
            vec![
                pos(EVENT, &["C", "E", "T"]),
                pos(EVENT, &["C", "E2", "T2"]),
                cmp("T2", CmpOp::Gt, "T"),
            ],
        ),
        rule(
            atom(HAS_BETWEEN, &["C", "T1", "T2"]),
            vec![
                pos(EVENT, &["C", "E1", "T1"]),
                pos(EVENT, &["C", "E2", "T2"]),
                pos(EVENT, &["C", "E3", "T3"]),
                cmp("T1", CmpOp::Lt, "T3"),
                cmp("T3", CmpOp::Lt, "T2"),
            ],
        ),
        rule(
            atom(NEXT, &["C", "T1", "T2"]),
            vec![
                pos(EVENT, &["C", "E1", "T1"]),
                pos(EVENT, &["C", "E2", "T2"]),
                cmp("T1", CmpOp::Lt, "T2"),
                neg(HAS_BETWEEN, &["C", "T1", "T2"]),
            ],
        ),
        rule(
            atom(SEGMENT, &["T", "T", "C"]),
            vec![pos(EVENT, &["C", "E", "T"])],
        ),
        rule(
            atom(SEGMENT, &["Ts", "Te2", "C"]),
            vec![
                pos(SEGMENT, &["Ts", "Te", "C"]),
                pos(NEXT, &["C", "Te", "Ts2"]),
                pos(SEGMENT, &["Ts2", "Te2", "C"]),
            ],
        ),
    ]
}

/// Rules defining one pattern. `root(Ts,Te,C)` holds for the nonempty
/// satisfying segments `(Ts,Te)` of case `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRules {
    pub root: String,
    pub rules: Vec<Rule>,
    /// Whether the empty segment also satisfies the pattern; it has no
    /// tuple in `root`.
    pub nullable: bool,
    pub notes: BTreeMap<String, String>,
}

struct Translator<'a> {
    prefix: String,
    pattern: &'a CompiledPattern,
    attr_preds: &'a [String],
    counter: usize,
    rules: Vec<Rule>,
    notes: BTreeMap<String, String>,
    cache: BTreeMap<(String, bool), String>,
}

impl Translator<'_> {
    fn fresh(&mut self, note: String) -> String {
        let name = format!("{}_{}", self.prefix, self.counter);
        self.counter += 1;
        self.notes.insert(name.clone(), note);
        name
    }

    fn behaviour_pred(&self, name: &str) -> String {
        let clean: String = name
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        format!("{}_beh_{clean}", self.prefix)
    }

    fn formula(&mut self, f: &PatternFormula) -> String {
        if let PatternFormula::Id(idx) = f {
            return self.identifier(idx, false);
        }
        let name = self.fresh(print_pattern(f));
        let head = |args: &[&str]| atom(&name, args);
        match f {
            PatternFormula::Id(_) => unreachable!(),
            PatternFormula::Any => self.rules.push(rule(
                head(&["T", "T", "C"]),
                vec![pos(SEGMENT, &["T", "T", "C"]), pos(EVENT, &["C", "E", "T"])],
            )),
            PatternFormula::Follows(a, b) | PatternFormula::DirectlyFollows(a, b) => {
                let (pa, pb) = (self.formula(a), self.formula(b));
                let link = if matches!(f, PatternFormula::DirectlyFollows(..)) {
                    pos(NEXT, &["C", "Te", "Ts2"])
                } else {
                    cmp("Te", CmpOp::Lt, "Ts2")
                };
                let body = vec![
                    pos(SEGMENT, &["Ts", "Te2", "C"]),
                    pos(&pa, &["Ts", "Te", "C"]),
                    link,
                    pos(&pb, &["Ts2", "Te2", "C"]),
                ];
                self.rules.push(rule(head(&["Ts", "Te2", "C"]), body));
            }
            PatternFormula::Star(a) => {
                let pa = self.formula(a);
                self.rules.push(rule(
                    head(&["Ts", "Te", "C"]),
                    vec![pos(&pa, &["Ts", "Te", "C"])],
                ));
                self.rules.push(rule(
                    head(&["Ts", "Te2", "C"]),
                    vec![
                        pos(&pa, &["Ts", "Te", "C"]),
                        pos(NEXT, &["C", "Te", "Ts2"]),
                        pos(&name, &["Ts2", "Te2", "C"]),
                    ],
                ));
            }
            PatternFormula::Start(a) => {
                let pa = self.formula(a);
                self.rules.push(rule(
                    head(&["Ts", "Te", "C"]),
                    vec![pos(&pa, &["Ts", "Te", "C"]), neg(HAS_EARLIER, &["C", "Ts"])],
                ));
            }
            PatternFormula::End(a) => {
                let pa = self.formula(a);
                self.rules.push(rule(
                    head(&["Ts", "Te", "C"]),
                    vec![pos(&pa, &["Ts", "Te", "C"]), neg(HAS_LATER, &["C", "Te"])],
                ));
            }
        }
        name
    }

    /// Predicate for the single-event segments satisfying `idx`, or its
    /// negation when `negated` is set.
    fn identifier(&mut self, idx: &IdentifierExpr, negated: bool) -> String {
        let text = crate::query::print_pattern(&PatternFormula::Id(idx.clone()));
        let key = (text.clone(), negated);
        if let Some(name) = self.cache.get(&key) {
            return name.clone();
        }
        if let (IdentifierExpr::Not(inner), false) = (idx, negated) {
            let name = self.identifier(inner, true);
            self.cache.insert(key, name.clone());
            return name;
        }
        let name = self.fresh(if negated {
            format!("NOT ({text})")
        } else {
            text
        });
        self.cache.insert(key, name.clone());
        let single = |test: Literal| {
            vec![
                pos(SEGMENT, &["T", "T", "C"]),
                pos(EVENT, &["C", "E", "T"]),
                test,
            ]
        };
        let wrap = |test: Literal| match (negated, test) {
            (false, l) => l,
            (true, Literal::Pos(a)) => Literal::Neg(a),
            (true, l) => l,
        };
        match idx {
            IdentifierExpr::Lit(value) => {
                if let PatternMode::Simple { index, .. } = self.pattern.mode() {
                    let test = Atom::new(
                        &self.attr_preds[*index],
                        vec![v("C"), v("E"), Term::Const(Const::Value(value.clone()))],
                    );
                    self.rules.push(rule(
                        atom(&name, &["T", "T", "C"]),
                        single(wrap(Literal::Pos(test))),
                    ));
                } else if negated {
                    // literals never hold in behavioural mode
                    self.rules.push(rule(
                        atom(&name, &["T", "T", "C"]),
                        vec![pos(SEGMENT, &["T", "T", "C"]), pos(EVENT, &["C", "E", "T"])],
                    ));
                }
            }
            IdentifierExpr::Ref(b) => {
                let pred = self.behaviour_pred(b);
                if let Some(beh) = self.pattern.behaviour(b) {
                    let mut body = vec![pos(EVENT, &["C", "E", "T"])];
                    for (k, conj) in beh.conjuncts.iter().enumerate() {
                        match conj {
                            BoundEquality::AttrAttr(x, y) => {
                                let var = format!("V{k}");
                                body.push(pos(&self.attr_preds[*x], &["C", "E", &var]));
                                body.push(pos(&self.attr_preds[*y], &["C", "E", &var]));
                            }
                            BoundEquality::AttrConst(x, value) => {
                                body.push(Literal::Pos(Atom::new(
                                    &self.attr_preds[*x],
                                    vec![v("C"), v("E"), Term::Const(Const::Value(value.clone()))],
                                )))
                            }
                        }
                    }
                    let def = rule(atom(&pred, &["C", "E"]), body);
                    if !self.rules.contains(&def) {
                        self.notes.insert(pred.clone(), format!("behaviour {b}"));
                        self.rules.push(def);
                    }
                }
                self.rules.push(rule(
                    atom(&name, &["T", "T", "C"]),
                    single(wrap(pos(&pred, &["C", "E"]))),
                ));
            }
            IdentifierExpr::Or(a, b) => {
                let (pa, pb) = (self.identifier(a, negated), self.identifier(b, negated));
                let args = ["Ts", "Te", "C"];
                if negated {
                    self.rules.push(rule(
                        atom(&name, &args),
                        vec![pos(&pa, &args), pos(&pb, &args)],
                    ));
                } else {
                    self.rules
                        .push(rule(atom(&name, &args), vec![pos(&pa, &args)]));
                    self.rules
                        .push(rule(atom(&name, &args), vec![pos(&pb, &args)]));
                }
            }
            IdentifierExpr::Not(inner) => {
                // only reached with `negated` set: a double negation
                let pa = self.identifier(inner, false);
                let args = ["Ts", "Te", "C"];
                self.rules
                    .push(rule(atom(&name, &args), vec![pos(&pa, &args)]));
            }
        }
        name
    }
}

fn translate_with_prefix(p: &CompiledPattern, attr_preds: &[String], prefix: &str) -> PatternRules {
    let mut t = Translator {
        prefix: prefix.to_owned(),
        pattern: p,
        attr_preds,
        counter: 0,
        rules: Vec::new(),
        notes: BTreeMap::new(),
        cache: BTreeMap::new(),
    };
    let root = t.formula(p.formula());
    PatternRules {
        root,
        rules: t.rules,
        nullable: p.formula().nullable(),
        notes: t.notes,
    }
}

/// Rules for one compiled pattern over a log with the given attributes.
/// Predicates are named `p0_<n>`; the support rules are not included.
pub fn translate_pattern(p: &CompiledPattern, schema: &[String]) -> PatternRules {
    translate_with_prefix(p, &attribute_predicates(schema), "p0")
}

fn edb_predicates(schema: &[String]) -> impl Iterator<Item = String> {
    [EVENT.to_owned(), SEGMENT.to_owned()]
        .into_iter()
        .chain(attribute_predicates(schema))
}

/// A complete program for one pattern: support rules plus the pattern's
/// rules, with the log's predicates declared as EDB.
pub fn pattern_program(p: &CompiledPattern, schema: &[String]) -> (DatalogProgram, String) {
    let pr = translate_pattern(p, schema);
    let mut prog = DatalogProgram {
        edb: edb_predicates(schema).collect(),
        notes: pr.notes,
        ..Default::default()
    };
    prog.extend(support_rules());
    prog.extend(pr.rules);
    (prog, pr.root)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let root = self.find(self.0[i]);
            self.0[i] = root;
        }
        self.0[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra.max(rb)] = ra.min(rb);
    }
}

fn column_var(c: Column, uf: &mut UnionFind) -> String {
    match c {
        Column::Eid => "E".into(),
        Column::Cid => "C".into(),
        Column::Ts => "T".into(),
        Column::Attr(i) => format!("V{}", uf.find(i)),
    }
}

/// Translates a query into a program whose `Output` relation holds the
/// query's answer under set semantics.
///
/// Equalities between attributes share a variable. A projected attribute
/// that no condition mentions may be null, so the output rule is split
/// into a variant where its fact exists and one where it does not (the
/// head then carries the null constant). A pattern that accepts the empty
/// segment adds a variant without its pattern atom.
pub fn translate_query(q: &Query, schema: &TableSchema) -> Result<DatalogProgram, CompileError> {
    let plan = compile_plan(q, schema)?;
    let attr_preds = attribute_predicates(&schema.attributes);
    let mut prog = DatalogProgram {
        edb: edb_predicates(&schema.attributes).collect(),
        ..Default::default()
    };
    prog.extend(support_rules());

    let mut uf = UnionFind((0..schema.attributes.len()).collect());
    let mut constrained = Vec::new();
    for sel in &plan.row_selections {
        if let Column::Attr(i) = sel.column {
            constrained.push(i);
        }
        if let Operand::Column(Column::Attr(j)) = sel.operand {
            constrained.push(j);
            if let Column::Attr(i) = sel.column {
                uf.union(i, j);
            }
        }
    }
    constrained.sort_unstable();
    constrained.dedup();

    let mut base = vec![pos(EVENT, &["C", "E", "T"])];
    for &i in &constrained {
        let var = column_var(Column::Attr(i), &mut uf);
        base.push(pos(&attr_preds[i], &["C", "E", &var]));
    }
    for sel in &plan.row_selections {
        let left = column_var(sel.column, &mut uf);
        let right = match &sel.operand {
            Operand::Column(c) => Term::Var(column_var(*c, &mut uf)),
            Operand::Time(t) => Term::Const(Const::Time(t.millis())),
            Operand::Text(s) => Term::Const(match sel.column {
                Column::Eid => Const::Event(s.clone()),
                Column::Cid => Const::Case(s.clone()),
                _ => Const::Value(s.clone()),
            }),
        };
        if Term::Var(left.clone()) != right {
            base.push(Literal::Cmp(v(&left), CmpOp::Eq, right));
        }
    }

    // Each alternative is a list of body literals; the variants multiply.
    let mut alternatives: Vec<Vec<Vec<Literal>>> = Vec::new();
    for (k, sel) in plan.pattern_selections.iter().enumerate() {
        let pr = translate_with_prefix(&sel.pattern, &attr_preds, &format!("p{k}"));
        let call = pos(&pr.root, &[&format!("Ts{k}"), &format!("Te{k}"), "C"]);
        alternatives.push(if pr.nullable {
            vec![vec![call], vec![]]
        } else {
            vec![vec![call]]
        });
        prog.notes.extend(pr.notes);
        prog.extend(pr.rules);
    }

    let mut free: Vec<usize> = plan
        .projection
        .iter()
        .filter_map(|(_, c)| match c {
            Column::Attr(i) if !constrained.contains(i) => Some(*i),
            _ => None,
        })
        .collect();
    free.sort_unstable();
    free.dedup();
    for &i in &free {
        let has = format!("has_{}", attr_preds[i]);
        prog.push(rule(
            atom(&has, &["C", "E"]),
            vec![pos(&attr_preds[i], &["C", "E", "V"])],
        ));
        let var = column_var(Column::Attr(i), &mut uf);
        alternatives.push(vec![
            vec![pos(&attr_preds[i], &["C", "E", &var])],
            vec![neg(&has, &["C", "E"])],
        ]);
    }

    let mut bodies = vec![base];
    for alts in &alternatives {
        bodies = bodies
            .iter()
            .flat_map(|b| {
                alts.iter().map(move |alt| {
                    let mut b = b.clone();
                    b.extend(alt.iter().cloned());
                    b
                })
            })
            .collect();
    }
    for body in bodies {
        let head_args = plan
            .projection
            .iter()
            .map(|(_, c)| {
                let var = column_var(*c, &mut uf);
                let present = body.iter().any(|l| l.vars().contains(&var.as_str()));
                if present {
                    Term::Var(var)
                } else {
                    Term::Const(Const::Null)
                }
            })
            .collect();
        prog.push(rule(Atom::new(OUTPUT, head_args), body));
    }
    Ok(prog)
}
