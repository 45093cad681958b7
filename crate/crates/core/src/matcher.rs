//! Homomorphism enumeration for rule, constraint and query bodies.
//!
//! A body is compiled once into goals over numbered variable slots. The search
//! picks the next goal dynamically: ready filters first, then lookups through
//! bound identifiers, then the atom with the most bound arguments (ties go to
//! the leftmost), and generators over predicate names last.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use crate::error::Error;
use crate::kb::{Atom, CmpOp, Constant, FactIx, KbView, Literal, Name, PredTerm, Term, Value, Var};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum SlotKey {
    Term(Var),
    Pred(Var),
}

#[derive(Clone, Debug)]
enum Arg {
    Slot(usize),
    Val(Value),
    Any,
}

#[derive(Clone, Debug)]
enum PredArg {
    Name(Name),
    Slot(usize),
}

#[derive(Clone, Debug)]
enum NegArg {
    Outer(usize),
    Local(usize),
    Val(Value),
    Any,
}

#[derive(Clone, Debug)]
enum NegPred {
    Name(Name),
    Outer(usize),
    Local,
}

#[derive(Clone, Debug)]
enum Goal {
    /// Positive dataset atom; `id` is set for id-binding literals.
    Data { pred: PredArg, args: Vec<Arg>, id: Option<usize> },
    Meta { pred: Name, args: Vec<Arg> },
    Sub(PredArg, PredArg),
    Cmp(Arg, CmpOp, Arg),
    Not { meta: bool, pred: NegPred, args: Vec<NegArg>, locals: usize },
}

/// A compiled conjunctive body.
#[derive(Clone, Debug)]
pub struct Body {
    slots: Vec<SlotKey>,
    goals: Vec<Goal>,
}

impl Body {
    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    /// Slot of a term variable, if it occurs outside negation.
    pub fn slot(&self, var: &str) -> Option<usize> {
        self.slots.iter().position(|k| matches!(k, SlotKey::Term(v) if &**v == var))
    }

    /// Slot of a predicate variable (`%Var`), if it occurs outside negation.
    pub fn pred_slot(&self, var: &str) -> Option<usize> {
        self.slots.iter().position(|k| matches!(k, SlotKey::Pred(v) if &**v == var))
    }
}

/// One homomorphism: values per slot and the dataset facts used by positive atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub values: Vec<Option<Value>>,
    pub support: Vec<FactIx>,
}

/// Borrowed view of a match handed to streaming callbacks.
pub struct MatchRef<'s> {
    pub values: &'s [Option<Value>],
    /// In goal-execution order, possibly with repeats.
    pub support: &'s [FactIx],
}

impl MatchRef<'_> {
    pub fn value(&self, slot: usize) -> &Value {
        self.values[slot].as_ref().expect("slot bound in a complete match")
    }

    /// Support as a sorted, duplicate-free list.
    pub fn support_set(&self) -> Vec<FactIx> {
        let mut s = self.support.to_vec();
        s.sort_unstable();
        s.dedup();
        s
    }
}

#[derive(Default)]
struct SlotTable {
    index: BTreeMap<SlotKey, usize>,
    order: Vec<SlotKey>,
}

impl SlotTable {
    fn slot(&mut self, key: SlotKey) -> usize {
        if let Some(&s) = self.index.get(&key) {
            return s;
        }
        self.order.push(key.clone());
        self.index.insert(key, self.order.len() - 1);
        self.order.len() - 1
    }

    fn get(&self, key: &SlotKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    fn term(&mut self, t: &Term) -> Arg {
        match t {
            Term::Var(v) => Arg::Slot(self.slot(SlotKey::Term(v.clone()))),
            Term::Const(c) => Arg::Val(Value::Const(c.clone())),
            Term::Anon => Arg::Any,
        }
    }

    fn pred(&mut self, p: &PredTerm) -> PredArg {
        match p {
            PredTerm::Name(n) => PredArg::Name(n.clone()),
            PredTerm::Var(v) => PredArg::Slot(self.slot(SlotKey::Pred(v.clone()))),
        }
    }
}

pub struct Matcher<'a> {
    view: KbView<'a>,
    domain: Vec<Name>,
    data_preds: Vec<Name>,
}

struct State {
    values: Vec<Option<Value>>,
    support: Vec<FactIx>,
    done: Vec<bool>,
}

impl<'a> Matcher<'a> {
    pub fn new(view: KbView<'a>) -> Matcher<'a> {
        let domain: Vec<Name> = view.predicate_domain().into_iter().collect();
        let data_preds: BTreeSet<Name> = view.dataset.predicates().cloned().collect();
        Matcher { view, domain, data_preds: data_preds.into_iter().collect() }
    }

    pub fn view(&self) -> KbView<'a> {
        self.view
    }

    fn is_meta(&self, pred: &PredTerm) -> bool {
        matches!(pred, PredTerm::Name(n) if self.view.meta.contains_predicate(n))
    }

    /// Compiles a body. Variables of negated atoms that occur in no positive
    /// literal are local to that atom.
    pub fn compile(&self, literals: &[Literal]) -> Result<Body, Error> {
        let mut tab = SlotTable::default();
        let mut goals = Vec::new();
        let mut negated: Vec<&Atom> = Vec::new();
        for lit in literals {
            match lit {
                Literal::Atom { atom, negated: true } => negated.push(atom),
                Literal::Atom { atom, negated: false } => {
                    let args = atom.args.iter().map(|t| tab.term(t)).collect();
                    if self.is_meta(&atom.pred) {
                        goals.push(Goal::Meta { pred: atom.name().unwrap().clone(), args });
                    } else {
                        let pred = tab.pred(&atom.pred);
                        goals.push(Goal::Data { pred, args, id: None });
                    }
                }
                Literal::IdBind { var, atom } => {
                    let id = tab.slot(SlotKey::Term(var.clone()));
                    let pred = tab.pred(&atom.pred);
                    let args = atom.args.iter().map(|t| tab.term(t)).collect();
                    goals.push(Goal::Data { pred, args, id: Some(id) });
                }
                Literal::Sub(a, b) => goals.push(Goal::Sub(tab.pred(a), tab.pred(b))),
                Literal::Cmp(a, op, b) => goals.push(Goal::Cmp(tab.term(a), *op, tab.term(b))),
            }
        }
        for atom in negated {
            let mut locals: BTreeMap<Var, usize> = BTreeMap::new();
            let pred = match &atom.pred {
                PredTerm::Name(n) => NegPred::Name(n.clone()),
                PredTerm::Var(v) => match tab.get(&SlotKey::Pred(v.clone())) {
                    Some(s) => NegPred::Outer(s),
                    None => NegPred::Local,
                },
            };
            let args = atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => match tab.get(&SlotKey::Term(v.clone())) {
                        Some(s) => NegArg::Outer(s),
                        None => {
                            let n = locals.len();
                            NegArg::Local(*locals.entry(v.clone()).or_insert(n))
                        }
                    },
                    Term::Const(c) => NegArg::Val(Value::Const(c.clone())),
                    Term::Anon => NegArg::Any,
                })
                .collect();
            let meta = self.is_meta(&atom.pred);
            goals.push(Goal::Not { meta, pred, args, locals: locals.len() });
        }
        Ok(Body { slots: tab.order, goals })
    }

    /// Streams every match extending `seed`. Stops early when the callback breaks.
    pub fn for_each<F>(&self, body: &Body, seed: &[(usize, Value)], mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&MatchRef<'_>) -> ControlFlow<()>,
    {
        let mut st = State {
            values: vec![None; body.slots.len()],
            support: Vec::new(),
            done: vec![false; body.goals.len()],
        };
        for (s, v) in seed {
            st.values[*s] = Some(v.clone());
        }
        self.search(body, &mut st, body.goals.len(), &mut f)
    }

    /// Collects all matches extending `seed`.
    pub fn matches(&self, body: &Body, seed: &[(usize, Value)]) -> Vec<Match> {
        let mut out = Vec::new();
        let _ = self.for_each(body, seed, |m| {
            out.push(Match { values: m.values.to_vec(), support: m.support_set() });
            ControlFlow::Continue(())
        });
        out
    }

    /// True if at least one match extends `seed`.
    pub fn exists(&self, body: &Body, seed: &[(usize, Value)]) -> bool {
        self.for_each(body, seed, |_| ControlFlow::Break(())).is_break()
    }

    fn bound<'s>(st: &'s State, a: &'s Arg) -> Option<&'s Value> {
        match a {
            Arg::Slot(s) => st.values[*s].as_ref(),
            Arg::Val(v) => Some(v),
            Arg::Any => None,
        }
    }

    fn pred_bound<'s>(st: &'s State, p: &'s PredArg) -> Option<&'s str> {
        match p {
            PredArg::Name(n) => Some(n),
            PredArg::Slot(s) => match &st.values[*s] {
                Some(Value::Pred(n)) => Some(n),
                Some(_) => Some(""),
                None => None,
            },
        }
    }

    /// Lower is better; `None` when the goal cannot run yet.
    fn score(&self, st: &State, goal: &Goal) -> Option<(u8, usize)> {
        let bound_args = |args: &[Arg]| args.iter().filter(|a| Self::bound(st, a).is_some()).count();
        match goal {
            Goal::Cmp(a, op, b) => {
                let (ba, bb) = (Self::bound(st, a).is_some(), Self::bound(st, b).is_some());
                if ba && bb {
                    Some((0, 0))
                } else if *op == CmpOp::Eq && (ba || bb) {
                    Some((1, 0))
                } else {
                    None
                }
            }
            Goal::Sub(a, b) => match (Self::pred_bound(st, a).is_some(), Self::pred_bound(st, b).is_some()) {
                (true, true) => Some((0, 0)),
                (true, false) | (false, true) => Some((3, 0)),
                (false, false) => Some((5, 0)),
            },
            Goal::Not { pred, args, .. } => {
                let pred_ready = match pred {
                    NegPred::Outer(s) => st.values[*s].is_some(),
                    _ => true,
                };
                let args_ready = args.iter().all(|a| match a {
                    NegArg::Outer(s) => st.values[*s].is_some(),
                    _ => true,
                });
                (pred_ready && args_ready).then_some((0, 0))
            }
            Goal::Data { pred, args, id } => {
                if id.is_some_and(|s| st.values[s].is_some()) {
                    Some((1, 0))
                } else if Self::pred_bound(st, pred).is_some() {
                    Some((2, usize::MAX - bound_args(args)))
                } else {
                    Some((4, usize::MAX - bound_args(args)))
                }
            }
            Goal::Meta { args, .. } => Some((2, usize::MAX - bound_args(args))),
        }
    }

    fn search<F>(&self, body: &Body, st: &mut State, remaining: usize, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&MatchRef<'_>) -> ControlFlow<()>,
    {
        if remaining == 0 {
            return f(&MatchRef { values: &st.values, support: &st.support });
        }
        let mut best: Option<(usize, (u8, usize))> = None;
        for (i, g) in body.goals.iter().enumerate() {
            if st.done[i] {
                continue;
            }
            if let Some(sc) = self.score(st, g) {
                if best.as_ref().map_or(true, |(_, b)| sc < *b) {
                    best = Some((i, sc));
                }
            }
        }
        let Some((gi, _)) = best else {
            debug_assert!(false, "unsafe body: no goal can run");
            return ControlFlow::Continue(());
        };
        st.done[gi] = true;
        let r = self.run_goal(body, gi, st, remaining, f);
        st.done[gi] = false;
        r
    }

    fn run_goal<F>(&self, body: &Body, gi: usize, st: &mut State, remaining: usize, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&MatchRef<'_>) -> ControlFlow<()>,
    {
        match &body.goals[gi] {
            Goal::Cmp(a, op, b) => match (Self::bound(st, a).cloned(), Self::bound(st, b).cloned()) {
                (Some(x), Some(y)) => {
                    if op.holds(x.total_cmp(&y)) {
                        self.search(body, st, remaining - 1, f)
                    } else {
                        ControlFlow::Continue(())
                    }
                }
                (Some(x), None) => self.with_bound(body, st, b, x, remaining, f),
                (None, Some(y)) => self.with_bound(body, st, a, y, remaining, f),
                (None, None) => unreachable!("comparison scheduled before its arguments were bound"),
            },
            Goal::Sub(a, b) => {
                let pa = Self::pred_bound(st, a).map(Name::from);
                let pb = Self::pred_bound(st, b).map(Name::from);
                let tax = self.view.taxonomy;
                match (pa, pb) {
                    (Some(x), Some(y)) => {
                        if tax.subsumed(&x, &y) {
                            self.search(body, st, remaining - 1, f)
                        } else {
                            ControlFlow::Continue(())
                        }
                    }
                    (Some(x), None) => {
                        for y in &self.domain {
                            if tax.subsumed(&x, y) {
                                self.with_pred(body, st, b, y, remaining, f)?;
                            }
                        }
                        ControlFlow::Continue(())
                    }
                    (None, Some(y)) => {
                        for x in &self.domain {
                            if tax.subsumed(x, &y) {
                                self.with_pred(body, st, a, x, remaining, f)?;
                            }
                        }
                        ControlFlow::Continue(())
                    }
                    (None, None) => {
                        for x in &self.domain {
                            let PredArg::Slot(sa) = a else { unreachable!() };
                            st.values[*sa] = Some(Value::Pred(x.clone()));
                            for y in &self.domain {
                                if tax.subsumed(x, y) {
                                    let r = self.with_pred(body, st, b, y, remaining, f);
                                    if r.is_break() {
                                        st.values[*sa] = None;
                                        return r;
                                    }
                                }
                            }
                            st.values[*sa] = None;
                        }
                        ControlFlow::Continue(())
                    }
                }
            }
            Goal::Not { meta, pred, args, locals } => {
                if self.negation_holds(st, *meta, pred, args, *locals) {
                    self.search(body, st, remaining - 1, f)
                } else {
                    ControlFlow::Continue(())
                }
            }
            Goal::Meta { pred, args } => {
                let Some(rel) = self.view.meta.relation(pred) else { return ControlFlow::Continue(()) };
                if rel.arity != args.len() {
                    return ControlFlow::Continue(());
                }
                let key: Vec<(usize, Value)> = args
                    .iter()
                    .enumerate()
                    .filter_map(|(p, a)| Self::bound(st, a).map(|v| (p, v.clone())))
                    .collect();
                for &row in rel.lookup(&key) {
                    let vals: Vec<Value> = (0..args.len()).map(|p| self.view.meta.arg_value(row, p)).collect();
                    self.unify_row(body, st, args, &vals, None, remaining, f)?;
                }
                ControlFlow::Continue(())
            }
            Goal::Data { pred, args, id } => {
                if let Some(Some(v)) = id.map(|s| st.values[s].clone()) {
                    let Value::Fact(ix) = v else { return ControlFlow::Continue(()) };
                    let fact = self.view.dataset.fact(ix);
                    if fact.args.len() != args.len() {
                        return ControlFlow::Continue(());
                    }
                    return match Self::pred_bound(st, pred) {
                        Some(p) if p != &*fact.predicate => ControlFlow::Continue(()),
                        Some(_) => self.unify_fact(body, st, args, ix, None, remaining, f),
                        None => {
                            let PredArg::Slot(ps) = pred else { unreachable!() };
                            st.values[*ps] = Some(Value::Pred(fact.predicate.clone()));
                            let r = self.unify_fact(body, st, args, ix, None, remaining, f);
                            st.values[*ps] = None;
                            r
                        }
                    };
                }
                match Self::pred_bound(st, pred).map(Name::from) {
                    Some(p) => self.scan_relation(body, st, &p, args, *id, remaining, f),
                    None => {
                        let PredArg::Slot(ps) = pred else { unreachable!() };
                        for p in &self.data_preds {
                            st.values[*ps] = Some(Value::Pred(p.clone()));
                            let r = self.scan_relation(body, st, p, args, *id, remaining, f);
                            if r.is_break() {
                                st.values[*ps] = None;
                                return r;
                            }
                        }
                        st.values[*ps] = None;
                        ControlFlow::Continue(())
                    }
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn scan_relation<F>(
        &self,
        body: &Body,
        st: &mut State,
        pred: &str,
        args: &[Arg],
        id: Option<usize>,
        remaining: usize,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&MatchRef<'_>) -> ControlFlow<()>,
    {
        let Some(rel) = self.view.dataset.relation(pred) else { return ControlFlow::Continue(()) };
        if rel.arity != args.len() {
            return ControlFlow::Continue(());
        }
        let key: Vec<(usize, Value)> = args
            .iter()
            .enumerate()
            .filter_map(|(p, a)| Self::bound(st, a).map(|v| (p, v.clone())))
            .collect();
        for &row in rel.lookup(&key) {
            self.unify_fact(body, st, args, FactIx(row), id, remaining, f)?;
        }
        ControlFlow::Continue(())
    }

    #[allow(clippy::too_many_arguments)]
    fn unify_fact<F>(
        &self,
        body: &Body,
        st: &mut State,
        args: &[Arg],
        ix: FactIx,
        id: Option<usize>,
        remaining: usize,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&MatchRef<'_>) -> ControlFlow<()>,
    {
        let vals: Vec<Value> = self.view.dataset.fact(ix).args.iter().cloned().map(Value::Const).collect();
        st.support.push(ix);
        let r = self.unify_row(body, st, args, &vals, id.map(|s| (s, ix)), remaining, f);
        st.support.pop();
        r
    }

    #[allow(clippy::too_many_arguments)]
    fn unify_row<F>(
        &self,
        body: &Body,
        st: &mut State,
        args: &[Arg],
        vals: &[Value],
        id: Option<(usize, FactIx)>,
        remaining: usize,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&MatchRef<'_>) -> ControlFlow<()>,
    {
        let mut trail: Vec<usize> = Vec::new();
        let mut ok = true;
        let pairs = args.iter().zip(vals).map(|(a, v)| (a, v.clone()));
        let id_pair = id.map(|(s, ix)| (Arg::Slot(s), Value::Fact(ix)));
        for (a, v) in pairs.chain(id_pair.iter().map(|(a, v)| (a, v.clone()))) {
            match a {
                Arg::Any => {}
                Arg::Val(c) => {
                    if *c != v {
                        ok = false;
                        break;
                    }
                }
                Arg::Slot(s) => match &st.values[*s] {
                    Some(b) => {
                        if *b != v {
                            ok = false;
                            break;
                        }
                    }
                    None => {
                        st.values[*s] = Some(v);
                        trail.push(*s);
                    }
                },
            }
        }
        let r = if ok { self.search(body, st, remaining - 1, f) } else { ControlFlow::Continue(()) };
        for s in trail {
            st.values[s] = None;
        }
        r
    }

    fn with_bound<F>(&self, body: &Body, st: &mut State, target: &Arg, v: Value, remaining: usize, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&MatchRef<'_>) -> ControlFlow<()>,
    {
        let Arg::Slot(s) = target else { unreachable!("unbound comparison side is a variable") };
        st.values[*s] = Some(v);
        let r = self.search(body, st, remaining - 1, f);
        st.values[*s] = None;
        r
    }

    fn with_pred<F>(&self, body: &Body, st: &mut State, target: &PredArg, name: &Name, remaining: usize, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&MatchRef<'_>) -> ControlFlow<()>,
    {
        let PredArg::Slot(s) = target else { unreachable!("unbound predicate side is a variable") };
        st.values[*s] = Some(Value::Pred(name.clone()));
        let r = self.search(body, st, remaining - 1, f);
        st.values[*s] = None;
        r
    }

    /// True when no fact matches the negated atom under the current binding.
    fn negation_holds(&self, st: &State, meta: bool, pred: &NegPred, args: &[NegArg], locals: usize) -> bool {
        let names: Vec<Name> = match pred {
            NegPred::Name(n) => vec![n.clone()],
            NegPred::Outer(s) => match &st.values[*s] {
                Some(Value::Pred(n)) => vec![n.clone()],
                _ => return true,
            },
            NegPred::Local => self.data_preds.clone(),
        };
        let key: Vec<(usize, Value)> = args
            .iter()
            .enumerate()
            .filter_map(|(p, a)| match a {
                NegArg::Outer(s) => st.values[*s].clone().map(|v| (p, v)),
                NegArg::Val(v) => Some((p, v.clone())),
                _ => None,
            })
            .collect();
        for name in names {
            let rel = if meta { self.view.meta.relation(&name) } else { self.view.dataset.relation(&name) };
            let Some(rel) = rel else { continue };
            if rel.arity != args.len() {
                continue;
            }
            'rows: for &row in rel.lookup(&key) {
                let mut local: Vec<Option<Value>> = vec![None; locals];
                for (p, a) in args.iter().enumerate() {
                    let v = if meta {
                        self.view.meta.arg_value(row, p)
                    } else {
                        Value::Const(self.view.dataset.fact(FactIx(row)).args[p].clone())
                    };
                    match a {
                        NegArg::Local(l) => match &local[*l] {
                            Some(b) if *b != v => continue 'rows,
                            Some(_) => {}
                            None => local[*l] = Some(v),
                        },
                        NegArg::Outer(s) => {
                            if st.values[*s].as_ref() != Some(&v) {
                                continue 'rows;
                            }
                        }
                        NegArg::Val(c) => {
                            if *c != v {
                                continue 'rows;
                            }
                        }
                        NegArg::Any => {}
                    }
                }
                return false;
            }
        }
        true
    }
}

/// Convenience: the constant bound to a slot, if it is one.
pub fn as_constant(v: &Value) -> Option<&Constant> {
    match v {
        Value::Const(c) => Some(c),
        _ => None,
    }
}
