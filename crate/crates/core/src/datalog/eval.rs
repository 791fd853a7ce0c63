//! Stratified, semi-naive bottom-up evaluation.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use super::ast::{CmpOp, Const, DatalogProgram, FactSet, Literal, Rule, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatalogError {
    #[error("unsafe rule `{rule}`: variable {variable} does not occur in a positive atom")]
    UnsafeRule { rule: String, variable: String },
    #[error("predicate `{predicate}` depends negatively on itself")]
    StratificationViolation { predicate: String },
    #[error("predicate `{predicate}` is used with arities {first} and {second}")]
    ArityMismatch {
        predicate: String,
        first: usize,
        second: usize,
    },
}

/// The first variable of `rule` that no positive body atom binds.
pub fn unsafe_variable(rule: &Rule) -> Option<String> {
    let bound: HashSet<&str> = rule
        .body
        .iter()
        .filter(|l| matches!(l, Literal::Pos(_)))
        .flat_map(Literal::vars)
        .collect();
    let head = rule.head.args.iter().filter_map(Term::as_var);
    let others = rule
        .body
        .iter()
        .filter(|l| !matches!(l, Literal::Pos(_)))
        .flat_map(Literal::vars);
    head.chain(others)
        .find(|v| !bound.contains(v))
        .map(str::to_owned)
}

pub fn check_safety(prog: &DatalogProgram) -> Result<(), DatalogError> {
    for rule in &prog.rules {
        if let Some(variable) = unsafe_variable(rule) {
            return Err(DatalogError::UnsafeRule {
                rule: rule.to_string(),
                variable,
            });
        }
    }
    Ok(())
}

fn check_arities(prog: &DatalogProgram, facts: &FactSet) -> Result<(), DatalogError> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let note =
        |p: &'_ str, n: usize, seen: &mut HashMap<&str, usize>| -> Result<(), DatalogError> {
            match seen.get(p) {
                Some(&m) if m != n => Err(DatalogError::ArityMismatch {
                    predicate: p.to_owned(),
                    first: m,
                    second: n,
                }),
                _ => Ok(()),
            }
        };
    for (p, t) in facts.iter() {
        note(p, t.len(), &mut seen)?;
        seen.insert(p, t.len());
    }
    for rule in &prog.rules {
        let atoms = std::iter::once(&rule.head).chain(rule.body.iter().filter_map(|l| match l {
            Literal::Pos(a) | Literal::Neg(a) => Some(a),
            Literal::Cmp(..) => None,
        }));
        for a in atoms {
            note(&a.predicate, a.args.len(), &mut seen)?;
            seen.insert(&a.predicate, a.args.len());
        }
    }
    Ok(())
}

/// Stratum number per predicate: each predicate sits at or above the
/// predicates it uses, and strictly above those it negates.
pub fn stratify(prog: &DatalogProgram) -> Result<BTreeMap<String, usize>, DatalogError> {
    let mut strata: BTreeMap<String, usize> = BTreeMap::new();
    for rule in &prog.rules {
        strata.entry(rule.head.predicate.clone()).or_insert(0);
        for lit in &rule.body {
            if let Literal::Pos(a) | Literal::Neg(a) = lit {
                strata.entry(a.predicate.clone()).or_insert(0);
            }
        }
    }
    let limit = strata.len();
    loop {
        let mut changed = false;
        for rule in &prog.rules {
            let mut need = strata[&rule.head.predicate];
            for lit in &rule.body {
                match lit {
                    Literal::Pos(a) => need = need.max(strata[&a.predicate]),
                    Literal::Neg(a) => need = need.max(strata[&a.predicate] + 1),
                    Literal::Cmp(..) => {}
                }
            }
            if need > strata[&rule.head.predicate] {
                if need > limit {
                    return Err(DatalogError::StratificationViolation {
                        predicate: rule.head.predicate.clone(),
                    });
                }
                strata.insert(rule.head.predicate.clone(), need);
                changed = true;
            }
        }
        if !changed {
            return Ok(strata);
        }
    }
}

type Index = HashMap<Vec<Const>, Vec<usize>>;

#[derive(Default)]
struct Relation {
    tuples: Vec<Vec<Const>>,
    members: HashSet<Vec<Const>>,
    indexes: RefCell<HashMap<Vec<usize>, Index>>,
}

impl Relation {
    fn insert(&mut self, t: Vec<Const>) -> bool {
        if self.members.contains(&t) {
            return false;
        }
        self.members.insert(t.clone());
        self.tuples.push(t);
        self.indexes.get_mut().clear();
        true
    }

    /// Positions of tuples whose `cols` equal `key`.
    fn lookup(&self, cols: &[usize], key: &[Const]) -> Vec<usize> {
        if cols.is_empty() {
            return (0..self.tuples.len()).collect();
        }
        let mut indexes = self.indexes.borrow_mut();
        let index = indexes.entry(cols.to_vec()).or_insert_with(|| {
            let mut idx: Index = HashMap::new();
            for (i, t) in self.tuples.iter().enumerate() {
                idx.entry(cols.iter().map(|&c| t[c].clone()).collect())
                    .or_default()
                    .push(i);
            }
            idx
        });
        index.get(key).cloned().unwrap_or_default()
    }
}

#[derive(Clone)]
enum Slot {
    Var(usize),
    Const(Const),
}

#[derive(Clone)]
enum Step {
    Scan {
        pred: String,
        args: Vec<Slot>,
        delta: bool,
    },
    Absent {
        pred: String,
        args: Vec<Slot>,
    },
    Compare(Slot, CmpOp, Slot),
}

struct Plan {
    head_pred: String,
    head: Vec<Slot>,
    steps: Vec<Step>,
    vars: usize,
}

fn slot(t: &Term, vars: &mut HashMap<String, usize>) -> Slot {
    match t {
        Term::Const(c) => Slot::Const(c.clone()),
        Term::Var(name) => {
            let next = vars.len();
            Slot::Var(*vars.entry(name.clone()).or_insert(next))
        }
    }
}

/// Orders the body greedily: after the optional delta atom, always take
/// the positive atom with the most bound arguments, and place filters as
/// soon as their variables are bound.
fn body_order(rule: &Rule, delta_at: Option<usize>) -> Vec<usize> {
    let mut bound: HashSet<&str> = HashSet::new();
    let mut order = Vec::new();
    let mut positives: Vec<usize> = Vec::new();
    let mut filters: Vec<usize> = Vec::new();
    for (i, lit) in rule.body.iter().enumerate() {
        match lit {
            Literal::Pos(_) if Some(i) == delta_at => {}
            Literal::Pos(_) => positives.push(i),
            _ => filters.push(i),
        }
    }
    let mut next = delta_at;
    loop {
        if let Some(i) = next {
            order.push(i);
            bound.extend(rule.body[i].vars());
        }
        filters.retain(|&f| {
            let ready = rule.body[f].vars().iter().all(|v| bound.contains(v));
            if ready {
                order.push(f);
            }
            !ready
        });
        if positives.is_empty() {
            return order;
        }
        let best = (0..positives.len())
            .max_by_key(|&k| {
                let lit = &rule.body[positives[k]];
                let n = lit.vars().iter().filter(|v| bound.contains(*v)).count();
                let Literal::Pos(a) = lit else { unreachable!() };
                let consts = a.args.iter().filter(|t| t.as_var().is_none()).count();
                (n + consts, std::cmp::Reverse(k))
            })
            .unwrap();
        next = Some(positives.remove(best));
    }
}

fn plan_rule(rule: &Rule, delta_at: Option<usize>) -> Plan {
    let mut vars = HashMap::new();
    let steps = body_order(rule, delta_at)
        .into_iter()
        .map(|i| match &rule.body[i] {
            Literal::Pos(a) => Step::Scan {
                pred: a.predicate.clone(),
                args: a.args.iter().map(|t| slot(t, &mut vars)).collect(),
                delta: Some(i) == delta_at,
            },
            Literal::Neg(a) => Step::Absent {
                pred: a.predicate.clone(),
                args: a.args.iter().map(|t| slot(t, &mut vars)).collect(),
            },
            Literal::Cmp(l, op, r) => Step::Compare(slot(l, &mut vars), *op, slot(r, &mut vars)),
        })
        .collect();
    let head = rule.head.args.iter().map(|t| slot(t, &mut vars)).collect();
    Plan {
        head_pred: rule.head.predicate.clone(),
        head,
        vars: vars.len(),
        steps,
    }
}

struct Db {
    full: HashMap<String, Relation>,
    delta: HashMap<String, Relation>,
    empty: Relation,
}

impl Db {
    fn rel(&self, pred: &str, delta: bool) -> &Relation {
        let map = if delta { &self.delta } else { &self.full };
        map.get(pred).unwrap_or(&self.empty)
    }
}

fn value<'a>(s: &'a Slot, env: &'a [Option<Const>]) -> &'a Const {
    match s {
        Slot::Const(c) => c,
        Slot::Var(i) => env[*i].as_ref().expect("filter variables are bound"),
    }
}

fn run(plan: &Plan, step: usize, env: &mut Vec<Option<Const>>, db: &Db, out: &mut Vec<Vec<Const>>) {
    let Some(s) = plan.steps.get(step) else {
        out.push(plan.head.iter().map(|h| value(h, env).clone()).collect());
        return;
    };
    match s {
        Step::Compare(l, op, r) => {
            let (a, b) = (value(l, env), value(r, env));
            let ok = match op {
                CmpOp::Eq => a == b,
                CmpOp::Lt | CmpOp::Gt => match (a, b) {
                    (Const::Time(x), Const::Time(y)) => {
                        if *op == CmpOp::Lt {
                            x < y
                        } else {
                            x > y
                        }
                    }
                    _ => false,
                },
            };
            if ok {
                run(plan, step + 1, env, db, out);
            }
        }
        Step::Absent { pred, args } => {
            let t: Vec<Const> = args.iter().map(|a| value(a, env).clone()).collect();
            if !db.rel(pred, false).members.contains(&t) {
                run(plan, step + 1, env, db, out);
            }
        }
        Step::Scan { pred, args, delta } => {
            let rel = db.rel(pred, *delta);
            let mut cols = Vec::new();
            let mut key = Vec::new();
            for (i, a) in args.iter().enumerate() {
                match a {
                    Slot::Const(c) => {
                        cols.push(i);
                        key.push(c.clone());
                    }
                    Slot::Var(v) => {
                        if let Some(c) = &env[*v] {
                            cols.push(i);
                            key.push(c.clone());
                        }
                    }
                }
            }
            'tuples: for pos in rel.lookup(&cols, &key) {
                let tuple = &rel.tuples[pos];
                let mut newly = Vec::new();
                for (i, a) in args.iter().enumerate() {
                    if let Slot::Var(v) = a {
                        match &env[*v] {
                            Some(c) if *c != tuple[i] => {
                                for n in newly {
                                    env[n] = None;
                                }
                                continue 'tuples;
                            }
                            Some(_) => {}
                            None => {
                                env[*v] = Some(tuple[i].clone());
                                newly.push(*v);
                            }
                        }
                    }
                }
                run(plan, step + 1, env, db, out);
                for n in newly {
                    env[n] = None;
                }
            }
        }
    }
}

fn fire(plan: &Plan, db: &Db) -> Vec<Vec<Const>> {
    let mut env = vec![None; plan.vars];
    let mut out = Vec::new();
    run(plan, 0, &mut env, db, &mut out);
    out
}

/// Evaluates `prog` over `facts` and returns every fact that holds, input
/// facts included.
pub fn evaluate(prog: &DatalogProgram, facts: &FactSet) -> Result<FactSet, DatalogError> {
    check_safety(prog)?;
    check_arities(prog, facts)?;
    let strata = stratify(prog)?;

    let mut db = Db {
        full: HashMap::new(),
        delta: HashMap::new(),
        empty: Relation::default(),
    };
    for (p, t) in facts.iter() {
        db.full.entry(p.to_owned()).or_default().insert(t.clone());
    }

    let levels: BTreeSet<usize> = strata.values().copied().collect();
    for level in levels {
        let preds: HashSet<&str> = strata
            .iter()
            .filter(|(_, &s)| s == level)
            .map(|(p, _)| p.as_str())
            .collect();
        let rules: Vec<&Rule> = prog
            .rules
            .iter()
            .filter(|r| preds.contains(r.head.predicate.as_str()))
            .collect();
        if rules.is_empty() {
            continue;
        }
        let full_plans: Vec<Plan> = rules.iter().map(|r| plan_rule(r, None)).collect();
        let delta_plans: Vec<Plan> = rules
            .iter()
            .flat_map(|r| {
                r.body.iter().enumerate().filter_map(|(i, l)| match l {
                    Literal::Pos(a) if preds.contains(a.predicate.as_str()) => {
                        Some(plan_rule(r, Some(i)))
                    }
                    _ => None,
                })
            })
            .collect();

        let mut derived: Vec<(String, Vec<Const>)> = full_plans
            .iter()
            .flat_map(|p| fire(p, &db).into_iter().map(|t| (p.head_pred.clone(), t)))
            .collect();
        loop {
            let mut delta: HashMap<String, Relation> = HashMap::new();
            for (p, t) in derived.drain(..) {
                let rel = db.full.entry(p.clone()).or_default();
                if rel.insert(t.clone()) {
                    delta.entry(p).or_default().insert(t);
                }
            }
            if delta.is_empty() {
                break;
            }
            db.delta = delta;
            for plan in &delta_plans {
                let Some(Step::Scan { pred, .. }) = plan.steps.first() else {
                    continue;
                };
                if db.delta.contains_key(pred) {
                    derived.extend(
                        fire(plan, &db)
                            .into_iter()
                            .map(|t| (plan.head_pred.clone(), t)),
                    );
                }
            }
        }
        db.delta.clear();
    }

    let mut result = facts.clone();
    for (p, rel) in db.full {
        for t in rel.tuples {
            result.insert(&p, t);
        }
    }
    Ok(result)
}
