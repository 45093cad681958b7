//! Causes of query answers: sets of facts whose matches produce the answer.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::conflicts::{minimize, Conflicts, FactSet};
use crate::kb::{Constant, Dataset, KbView, MetaDatabase, QueryRewriting, Taxonomy, Value};
use crate::matcher::Matcher;

/// Answer tuple of a query.
pub type Tuple = Vec<Constant>;

/// Causes grouped by answer tuple; each group sorted and duplicate-free.
pub type CauseMap = BTreeMap<Tuple, Vec<FactSet>>;

/// Supports of all rewriting-body matches keyed by answer tuple, minus those
/// containing a self-inconsistent fact.
pub fn candidate_causes(
    rewriting: &QueryRewriting,
    dataset: &Dataset,
    is_self_inconsistent: impl Fn(crate::kb::FactIx) -> bool,
) -> CauseMap {
    let meta = MetaDatabase::default();
    let tax = Taxonomy::default();
    let matcher = Matcher::new(KbView::new(dataset, &meta, &tax));
    let mut out: CauseMap = BTreeMap::new();
    for i in 0..rewriting.bodies.len() {
        let body = matcher.compile(&rewriting.body_literals(i)).expect("query bodies compile");
        let slots: Vec<usize> = rewriting
            .answer
            .iter()
            .map(|v| body.slot(v).expect("answer variables occur in every body"))
            .collect();
        let _ = matcher.for_each(&body, &[], |m| {
            let support = m.support_set();
            if support.iter().any(|f| is_self_inconsistent(*f)) {
                return ControlFlow::Continue(());
            }
            let tuple: Option<Tuple> = slots
                .iter()
                .map(|&s| match m.value(s) {
                    Value::Const(c) => Some(c.clone()),
                    _ => None,
                })
                .collect();
            if let Some(t) = tuple {
                out.entry(t).or_default().push(support);
            }
            ControlFlow::Continue(())
        });
    }
    for sets in out.values_mut() {
        sets.sort_unstable();
        sets.dedup();
    }
    out
}

/// Inclusion-minimal consistent candidates: minimize each group, then drop
/// sets containing a conflict.
pub fn exact_causes(rewriting: &QueryRewriting, dataset: &Dataset, conflicts: &Conflicts) -> CauseMap {
    let candidates = candidate_causes(rewriting, dataset, |f| conflicts.is_self_inconsistent(f));
    refine(candidates, conflicts)
}

/// Turns candidate causes into exact causes.
pub fn refine(candidates: CauseMap, conflicts: &Conflicts) -> CauseMap {
    candidates
        .into_iter()
        .filter_map(|(t, sets)| {
            let kept: Vec<FactSet> =
                minimize(&sets).into_iter().filter(|s| conflicts.is_consistent(s)).collect();
            (!kept.is_empty()).then_some((t, kept))
        })
        .collect()
}
