#![allow(dead_code)]

use std::path::{Path, PathBuf};

use priorepair::engine::{KnowledgeBase, Sources};
use priorepair::kb::{Constant, FactId, FactIx};

pub fn fixture_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap_or_default()
}

/// The running example with the given preference file.
pub fn running(prefs: &str) -> KnowledgeBase {
    let dir = fixture_dir("running");
    let (d, m, c, q, r, t) =
        (read(&dir, "ex.dkb"), read(&dir, "ex.meta"), read(&dir, "ex.dc"), read(&dir, "ex.ucq"), read(&dir, prefs), read(&dir, "ex.tax"));
    KnowledgeBase::parse(&Sources { dataset: &d, meta: &m, constraints: &c, queries: &q, rules: &r, taxonomy: &t })
        .expect("running example parses")
}

/// One of the two cycle-resolution fixtures.
pub fn cycle_fixture(name: &str) -> KnowledgeBase {
    let dir = fixture_dir(name);
    let (d, m, c, r) = (read(&dir, "g.dkb"), read(&dir, "g.meta"), read(&dir, "g.dc"), read(&dir, "g.prefs"));
    KnowledgeBase::parse(&Sources { dataset: &d, meta: &m, constraints: &c, rules: &r, ..Sources::default() })
        .expect("fixture parses")
}

pub fn ix(kb: &KnowledgeBase, id: &str) -> FactIx {
    kb.dataset.lookup_id(&FactId::new(id)).expect("known id")
}

pub fn ids(kb: &KnowledgeBase, facts: &[FactIx]) -> Vec<String> {
    facts.iter().map(|f| kb.dataset.id(*f).as_str().to_string()).collect()
}

pub fn sym(s: &str) -> Constant {
    Constant::sym(s)
}

pub mod random {
    use priorepair::conflicts::{minimize, Conflicts, FactSet};
    use priorepair::kb::FactIx;
    use priorepair::preference::LeveledPairs;
    use priorepair::priority::{resolve, EdgeGraph, Priority, Strategy};
    use rand::seq::SliceRandom;
    use rand::Rng;

    /// Random leveled graph: nodes, edges (no self-loops, no duplicates), levels.
    pub fn graph(rng: &mut impl Rng, max_nodes: u32, max_edges: usize, max_levels: u32) -> EdgeGraph {
        let n = rng.gen_range(1..=max_nodes);
        let mut all: Vec<(u32, u32)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
        all.shuffle(rng);
        let m = rng.gen_range(0..=max_edges.min(all.len()));
        let levels = rng.gen_range(1..=max_levels);
        let triples: Vec<(u32, u32, u32)> = all[..m].iter().map(|&(a, b)| (a, b, rng.gen_range(1..=levels))).collect();
        EdgeGraph::new(n as usize, triples)
    }

    pub struct Instance {
        pub num_facts: usize,
        pub conflicts: Conflicts,
        pub pairs: LeveledPairs,
        pub strategy: Strategy,
        pub priority: Priority,
        pub causes: Vec<FactSet>,
    }

    fn subset(rng: &mut impl Rng, n: usize, max: usize) -> FactSet {
        let k = rng.gen_range(1..=max.min(n));
        let mut v: Vec<u32> = (0..n as u32).collect();
        v.shuffle(rng);
        let mut s: FactSet = v[..k].iter().map(|&i| FactIx(i)).collect();
        s.sort_unstable();
        s
    }

    /// Random conflicts, leveled preferences over conflicting pairs, a
    /// resolved priority and random candidate causes.
    pub fn instance(rng: &mut impl Rng, max_facts: usize, max_arity: usize, max_levels: u32) -> Instance {
        let n = rng.gen_range(1..=max_facts);
        let m = rng.gen_range(0..=n + 2);
        let mut raw: Vec<FactSet> = (0..m)
            .map(|_| {
                let mut s = subset(rng, n, max_arity);
                if s.len() == 1 && rng.gen_bool(0.7) && n > 1 {
                    s = subset(rng, n, max_arity);
                }
                s
            })
            .collect();
        raw.retain(|s| s.len() > 1 || rng.gen_bool(0.3));
        let conflicts = Conflicts::from_sets(n, minimize(&raw));
        let levels = rng.gen_range(1..=max_levels);
        let mut pairs = LeveledPairs::default();
        let density: f64 = rng.gen_range(0.0..1.0);
        for c in conflicts.sets() {
            for &a in c {
                for &b in c {
                    if a != b && rng.gen_bool(density * 0.6) {
                        pairs.insert(a, b, rng.gen_range(1..=levels));
                    }
                }
            }
        }
        let strategy = *Strategy::ALL.choose(rng).unwrap();
        let priority = resolve(strategy, n, &pairs);
        let k = rng.gen_range(0..=3);
        let mut causes: Vec<FactSet> = (0..k).map(|_| subset(rng, n, 3)).collect();
        causes.sort_unstable();
        causes.dedup();
        Instance { num_facts: n, conflicts, pairs, strategy, priority, causes }
    }
}
