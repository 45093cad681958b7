//! Evaluation of leveled preference rules into preference statements.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::conflicts::Conflicts;
use crate::error::Error;
use crate::kb::{FactIx, KbView, Literal, PredTerm, PreferenceRule, Value};
use crate::matcher::{Body, Matcher};

/// A preference `from ≻ to` with the minimal level of any inducing rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefStatement {
    pub from: FactIx,
    pub to: FactIx,
    pub level: u32,
}

/// Induced pairs with every level that induces them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeveledPairs {
    pairs: BTreeMap<(FactIx, FactIx), Vec<u32>>,
}

impl LeveledPairs {
    pub fn insert(&mut self, from: FactIx, to: FactIx, level: u32) {
        if from == to {
            return;
        }
        let levels = self.pairs.entry((from, to)).or_default();
        if let Err(pos) = levels.binary_search(&level) {
            levels.insert(pos, level);
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Minimal level of a pair, if induced.
    pub fn level(&self, from: FactIx, to: FactIx) -> Option<u32> {
        self.pairs.get(&(from, to)).map(|l| l[0])
    }

    /// All pairs with their sorted level lists.
    pub fn iter(&self) -> impl Iterator<Item = ((FactIx, FactIx), &[u32])> {
        self.pairs.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    /// One statement per pair at its minimal level, sorted by pair.
    pub fn statements(&self) -> Vec<PrefStatement> {
        self.pairs.iter().map(|(&(from, to), l)| PrefStatement { from, to, level: l[0] }).collect()
    }

    /// Keeps the pairs whose facts co-occur in some conflict.
    pub fn restrict_to_conflicts(&self, conflicts: &Conflicts) -> LeveledPairs {
        LeveledPairs {
            pairs: self
                .pairs
                .iter()
                .filter(|((a, b), _)| conflicts.co_occur(*a, *b))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    fn merge(&mut self, other: LeveledPairs) {
        for ((a, b), levels) in other.pairs {
            for l in levels {
                self.insert(a, b, l);
            }
        }
    }
}

/// Checks that head variables are bound to fact identifiers: through an id
/// binding or an identifier position of a positive meta atom.
pub fn validate_rule(rule: &PreferenceRule, view: KbView<'_>) -> Result<(), Error> {
    for h in [&rule.head.0, &rule.head.1] {
        let mut ok = false;
        let mut bad_positions = Vec::new();
        for lit in &rule.body {
            match lit {
                Literal::IdBind { var, .. } if var == h => ok = true,
                Literal::Atom { atom, negated: false } => {
                    let PredTerm::Name(name) = &atom.pred else { continue };
                    let ids = view.meta.id_positions(name);
                    for (p, t) in atom.args.iter().enumerate() {
                        if t.var() != Some(h) {
                            continue;
                        }
                        match ids {
                            Some(ids) if ids.get(p) == Some(&true) => ok = true,
                            Some(_) => bad_positions.push(format!("{name} position {}", p + 1)),
                            None if view.dataset.arity(name).is_some() => {
                                bad_positions.push(format!("dataset atom {name}"))
                            }
                            None => ok = true,
                        }
                    }
                }
                _ => {}
            }
        }
        if !ok {
            return Err(Error::Validation(format!(
                "rule `{rule}`: head variable `{h}` occurs only at non-identifier positions ({})",
                bad_positions.join(", ")
            )));
        }
    }
    Ok(())
}

fn head_slots(rule: &PreferenceRule, body: &Body) -> (usize, usize) {
    (
        body.slot(&rule.head.0).expect("head variables occur in the body"),
        body.slot(&rule.head.1).expect("head variables occur in the body"),
    )
}

/// Σ(K, M): every pair induced by some rule, with all inducing levels.
pub fn evaluate_rules(rules: &[PreferenceRule], view: KbView<'_>) -> LeveledPairs {
    let matcher = Matcher::new(view);
    let parts: Vec<LeveledPairs> = rules
        .par_iter()
        .map(|rule| {
            let body = matcher.compile(&rule.body).expect("rule bodies compile");
            let (s1, s2) = head_slots(rule, &body);
            let mut out = LeveledPairs::default();
            let _ = matcher.for_each(&body, &[], |m| {
                if let (Value::Fact(a), Value::Fact(b)) = (m.value(s1), m.value(s2)) {
                    out.insert(*a, *b, rule.level);
                }
                ControlFlow::Continue(())
            });
            out
        })
        .collect();
    let mut all = LeveledPairs::default();
    for p in parts {
        all.merge(p);
    }
    all
}

/// The relations ≻Σi: rule evaluation seeded with both orientations of every
/// pair of facts sharing a conflict. Equal to restricting [`evaluate_rules`]
/// to conflicts, without materializing pairs that share none.
pub fn evaluate_on_conflicts(rules: &[PreferenceRule], view: KbView<'_>, conflicts: &Conflicts) -> LeveledPairs {
    let mut candidates: HashSet<(FactIx, FactIx)> = HashSet::new();
    for c in conflicts.sets() {
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                candidates.insert((a, b));
                candidates.insert((b, a));
            }
        }
    }
    let mut candidates: Vec<(FactIx, FactIx)> = candidates.into_iter().collect();
    candidates.sort_unstable();
    let matcher = Matcher::new(view);
    let parts: Vec<LeveledPairs> = rules
        .par_iter()
        .map(|rule| {
            let body = matcher.compile(&rule.body).expect("rule bodies compile");
            let (s1, s2) = head_slots(rule, &body);
            let mut out = LeveledPairs::default();
            for &(a, b) in &candidates {
                if matcher.exists(&body, &[(s1, Value::Fact(a)), (s2, Value::Fact(b))]) {
                    out.insert(a, b, rule.level);
                }
            }
            out
        })
        .collect();
    let mut all = LeveledPairs::default();
    for p in parts {
        all.merge(p);
    }
    all
}

/// Outcome of the instance-level strong acyclicity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acyclicity {
    Acyclic,
    /// A directed cycle as consecutive pairs.
    Cycle(Vec<(FactIx, FactIx)>),
}

/// Looks for a directed cycle among the given pairs.
pub fn strong_acyclicity(pairs: &[(FactIx, FactIx)]) -> Acyclicity {
    let mut adj: HashMap<FactIx, Vec<FactIx>> = HashMap::new();
    for &(a, b) in pairs {
        adj.entry(a).or_default().push(b);
    }
    for v in adj.values_mut() {
        v.sort_unstable();
    }
    let mut nodes: Vec<FactIx> = adj.keys().copied().collect();
    nodes.sort_unstable();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: HashMap<FactIx, u8> = HashMap::new();
    for &root in &nodes {
        if state.get(&root).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(FactIx, usize)> = vec![(root, 0)];
        state.insert(root, 1);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let succ = adj.get(&v).map(Vec::as_slice).unwrap_or(&[]);
            if *next < succ.len() {
                let w = succ[*next];
                *next += 1;
                match state.get(&w).copied().unwrap_or(0) {
                    0 => {
                        state.insert(w, 1);
                        stack.push((w, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(u, _)| u == w).unwrap();
                        let path: Vec<FactIx> = stack[start..].iter().map(|&(u, _)| u).collect();
                        let mut cycle: Vec<(FactIx, FactIx)> = path.windows(2).map(|p| (p[0], p[1])).collect();
                        cycle.push((*path.last().unwrap(), w));
                        return Acyclicity::Cycle(cycle);
                    }
                    _ => {}
                }
            } else {
                state.insert(v, 2);
                stack.pop();
            }
        }
    }
    Acyclicity::Acyclic
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_witness() {
        let p = [(FactIx(1), FactIx(2)), (FactIx(2), FactIx(1))];
        assert_eq!(strong_acyclicity(&p), Acyclicity::Cycle(p.to_vec()));
        assert_eq!(strong_acyclicity(&[]), Acyclicity::Acyclic);
    }

    #[test]
    fn min_level_kept() {
        let mut lp = LeveledPairs::default();
        lp.insert(FactIx(0), FactIx(1), 2);
        lp.insert(FactIx(0), FactIx(1), 1);
        lp.insert(FactIx(3), FactIx(3), 1);
        assert_eq!(lp.statements(), vec![PrefStatement { from: FactIx(0), to: FactIx(1), level: 1 }]);
    }
}
