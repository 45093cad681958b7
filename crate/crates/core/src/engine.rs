//! End-to-end pipeline: conflicts, preference statements, priority, causes
//! and per-answer verdicts.

use rayon::prelude::*;

use crate::causes::{candidate_causes, exact_causes, CauseMap, Tuple};
use crate::conflicts::{conflicts, Conflicts};
use crate::error::Error;
use crate::kb::{
    parse_constraints, parse_dataset, parse_meta, parse_queries, parse_rules, parse_taxonomy, Dataset,
    DenialConstraint, KbView, MetaDatabase, PreferenceRule, QueryRewriting, Taxonomy,
};
use crate::preference::{evaluate_on_conflicts, evaluate_rules, strong_acyclicity, validate_rule, Acyclicity, LeveledPairs};
use crate::priority::{resolve, Priority, Strategy};
use crate::semantics::{Decider, RepairKind, Semantics};

/// Source texts of a knowledge base; absent parts are empty.
#[derive(Clone, Debug, Default)]
pub struct Sources<'a> {
    pub dataset: &'a str,
    pub meta: &'a str,
    pub constraints: &'a str,
    pub queries: &'a str,
    pub rules: &'a str,
    pub taxonomy: &'a str,
}

#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    pub dataset: Dataset,
    pub meta: MetaDatabase,
    pub taxonomy: Taxonomy,
    pub constraints: Vec<DenialConstraint>,
    pub queries: Vec<QueryRewriting>,
    pub rules: Vec<PreferenceRule>,
}

impl KnowledgeBase {
    pub fn parse(src: &Sources<'_>) -> Result<KnowledgeBase, Error> {
        let dataset = parse_dataset(src.dataset)?;
        let meta = parse_meta(src.meta, &dataset)?;
        let kb = KnowledgeBase {
            meta,
            taxonomy: parse_taxonomy(src.taxonomy)?,
            constraints: parse_constraints(src.constraints)?,
            queries: parse_queries(src.queries)?,
            rules: parse_rules(src.rules)?,
            dataset,
        };
        kb.validate()?;
        Ok(kb)
    }

    /// Checks rule heads against the meta-database identifier positions.
    pub fn validate(&self) -> Result<(), Error> {
        self.rules.iter().try_for_each(|r| validate_rule(r, self.view()))
    }

    pub fn view(&self) -> KbView<'_> {
        KbView::new(&self.dataset, &self.meta, &self.taxonomy)
    }

    pub fn query(&self, name: &str) -> Result<&QueryRewriting, Error> {
        self.queries.iter().find(|q| &*q.name == name).ok_or_else(|| Error::UnknownQuery(name.to_string()))
    }
}

/// Verdict for one answer tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub tuple: Tuple,
    pub semantics: Semantics,
    pub kind: RepairKind,
    pub entailed: bool,
}

/// A knowledge base with its conflicts and conflict-restricted preference
/// statements.
pub struct Engine {
    kb: KnowledgeBase,
    conflicts: Conflicts,
    pairs: LeveledPairs,
}

impl Engine {
    pub fn new(kb: KnowledgeBase) -> Engine {
        let conflicts = conflicts(&kb.dataset, &kb.constraints);
        let pairs = evaluate_on_conflicts(&kb.rules, kb.view(), &conflicts);
        Engine { kb, conflicts, pairs }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn conflicts(&self) -> &Conflicts {
        &self.conflicts
    }

    /// The relations ≻Σi with their levels.
    pub fn pairs(&self) -> &LeveledPairs {
        &self.pairs
    }

    pub fn priority(&self, strategy: Strategy) -> Priority {
        resolve(strategy, self.kb.dataset.len(), &self.pairs)
    }

    /// Cycle check over every induced pair, conflicting or not.
    pub fn strong_acyclicity(&self) -> Acyclicity {
        let all = evaluate_rules(&self.kb.rules, self.kb.view());
        let pairs: Vec<_> = all.iter().map(|(p, _)| p).collect();
        strong_acyclicity(&pairs)
    }

    pub fn causes(&self, query: &QueryRewriting, exact: bool) -> CauseMap {
        if exact {
            exact_causes(query, &self.kb.dataset, &self.conflicts)
        } else {
            candidate_causes(query, &self.kb.dataset, |f| self.conflicts.is_self_inconsistent(f))
        }
    }

    /// One verdict per candidate answer and requested semantics, sorted by
    /// tuple and then in request order.
    pub fn verdicts(
        &self,
        query: &QueryRewriting,
        priority: &Priority,
        requested: &[(Semantics, RepairKind)],
        exact: bool,
    ) -> Vec<Verdict> {
        let decider = Decider::new(&self.conflicts, priority);
        let causes: Vec<_> = self.causes(query, exact).into_iter().collect();
        causes
            .par_iter()
            .flat_map_iter(|(tuple, sets)| {
                let decider = &decider;
                requested.iter().map(move |&(semantics, kind)| Verdict {
                    tuple: tuple.clone(),
                    semantics,
                    kind,
                    entailed: decider.decide(semantics, kind, sets),
                })
            })
            .collect()
    }

    /// Answer tuples entailed under one semantics.
    pub fn answer_query(
        &self,
        query: &QueryRewriting,
        priority: &Priority,
        semantics: Semantics,
        kind: RepairKind,
    ) -> Vec<Tuple> {
        self.verdicts(query, priority, &[(semantics, kind)], false)
            .into_iter()
            .filter(|v| v.entailed)
            .map(|v| v.tuple)
            .collect()
    }
}
