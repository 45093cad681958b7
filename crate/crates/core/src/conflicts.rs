//! Minimal inconsistent subsets of a dataset under denial constraints.

use std::collections::HashMap;
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::kb::{Dataset, DenialConstraint, FactIx, KbView, MetaDatabase, Taxonomy};
use crate::matcher::Matcher;

/// A sorted, duplicate-free set of facts.
pub type FactSet = Vec<FactIx>;

/// Every distinct support of a constraint-body match, sorted.
pub fn candidate_inconsistent_sets(dataset: &Dataset, constraints: &[DenialConstraint]) -> Vec<FactSet> {
    let meta = MetaDatabase::default();
    let tax = Taxonomy::default();
    let matcher = Matcher::new(KbView::new(dataset, &meta, &tax));
    let mut all: Vec<FactSet> = constraints
        .par_iter()
        .flat_map_iter(|dc| {
            let body = matcher.compile(&dc.body).expect("constraint bodies compile");
            let mut sets = Vec::new();
            let _ = matcher.for_each(&body, &[], |m| {
                sets.push(m.support_set());
                ControlFlow::Continue(())
            });
            sets.sort_unstable();
            sets.dedup();
            sets
        })
        .collect();
    all.par_sort_unstable();
    all.dedup();
    all
}

/// Facts whose singleton is a candidate set.
pub fn self_inconsistent_facts(candidates: &[FactSet]) -> Vec<FactIx> {
    let mut v: Vec<FactIx> = candidates.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Inclusion-minimal members of a family of sets.
///
/// Candidates are visited by increasing size; each is tested against the
/// accepted smaller sets through a per-fact inverted index.
pub fn minimize(candidates: &[FactSet]) -> Vec<FactSet> {
    let mut sorted: Vec<&FactSet> = candidates.iter().collect();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sorted.dedup();
    let mut kept: Vec<FactSet> = Vec::new();
    let mut index: HashMap<FactIx, Vec<usize>> = HashMap::new();
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for c in sorted {
        counts.clear();
        let mut subsumed = false;
        'facts: for f in c {
            for &k in index.get(f).map(Vec::as_slice).unwrap_or(&[]) {
                let n = counts.entry(k).or_insert(0);
                *n += 1;
                if *n == kept[k].len() {
                    subsumed = true;
                    break 'facts;
                }
            }
        }
        if !subsumed {
            for f in c {
                index.entry(*f).or_default().push(kept.len());
            }
            kept.push(c.clone());
        }
    }
    kept.sort_unstable();
    kept
}

/// Minimization when no candidate has more than two facts: drop pairs
/// touching a self-inconsistent fact.
pub fn minimize_binary(candidates: &[FactSet]) -> Vec<FactSet> {
    debug_assert!(candidates.iter().all(|c| c.len() <= 2));
    let selfinc = self_inconsistent_facts(candidates);
    let mut kept: Vec<FactSet> = candidates
        .iter()
        .filter(|c| c.len() == 1 || !c.iter().any(|f| selfinc.binary_search(f).is_ok()))
        .cloned()
        .collect();
    kept.sort_unstable();
    kept.dedup();
    kept
}

/// The conflicts of a KB with membership indexes.
#[derive(Clone, Debug, Default)]
pub struct Conflicts {
    sets: Vec<FactSet>,
    by_fact: Vec<Vec<u32>>,
    self_inconsistent: Vec<FactIx>,
}

impl Conflicts {
    /// Builds the index from minimal sets over a dataset of `num_facts` facts.
    pub fn from_sets(num_facts: usize, mut sets: Vec<FactSet>) -> Conflicts {
        sets.sort_unstable();
        sets.dedup();
        let mut by_fact = vec![Vec::new(); num_facts];
        for (i, c) in sets.iter().enumerate() {
            for f in c {
                by_fact[f.index()].push(i as u32);
            }
        }
        let self_inconsistent = sets.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
        Conflicts { sets, by_fact, self_inconsistent }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[FactSet] {
        &self.sets
    }

    pub fn get(&self, i: usize) -> &FactSet {
        &self.sets[i]
    }

    /// Indices of the conflicts containing a fact.
    pub fn containing(&self, f: FactIx) -> &[u32] {
        self.by_fact.get(f.index()).map_or(&[], Vec::as_slice)
    }

    pub fn self_inconsistent(&self) -> &[FactIx] {
        &self.self_inconsistent
    }

    pub fn is_self_inconsistent(&self, f: FactIx) -> bool {
        self.self_inconsistent.binary_search(&f).is_ok()
    }

    /// True if the two facts co-occur in some conflict.
    pub fn co_occur(&self, a: FactIx, b: FactIx) -> bool {
        let (ca, cb) = (self.containing(a), self.containing(b));
        let (small, other) = if ca.len() <= cb.len() { (ca, b) } else { (cb, a) };
        small.iter().any(|&i| self.sets[i as usize].binary_search(&other).is_ok())
    }

    /// True if the set contains no conflict.
    pub fn is_consistent(&self, set: &[FactIx]) -> bool {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.iter().all(|f| {
            self.containing(*f)
                .iter()
                .all(|&i| !self.sets[i as usize].iter().all(|g| sorted.binary_search(g).is_ok()))
        })
    }

    /// Number of conflicts each fact belongs to.
    pub fn degree(&self, f: FactIx) -> usize {
        self.containing(f).len()
    }
}

/// Conf(K): the inclusion-minimal inconsistent subsets, sorted by member ids.
pub fn conflicts(dataset: &Dataset, constraints: &[DenialConstraint]) -> Conflicts {
    let candidates = candidate_inconsistent_sets(dataset, constraints);
    let binary = constraints.iter().all(|dc| dc.atoms().count() <= 2);
    let sets = if binary { minimize_binary(&candidates) } else { minimize(&candidates) };
    Conflicts::from_sets(dataset.len(), sets)
}
