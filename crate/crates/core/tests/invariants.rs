use priorepair::conflicts::conflicts;
use priorepair::engine::{Engine, KnowledgeBase, Sources};
use priorepair::gen::{generate, Fixture, GenParams};
use priorepair::kb::{
    parse_constraints, parse_dataset, parse_meta, parse_rules, write_constraints, write_dataset, write_meta,
    write_rules, FactIx,
};
use priorepair::oracle::{minimal_inconsistent_subsets, Caps, Oracle};
use priorepair::priority::Strategy as Resolution;
use priorepair::semantics::RepairKind;
use proptest::prelude::*;

fn params(max_facts: usize) -> impl Strategy<Value = GenParams> {
    (4..=max_facts, 0.0..=1.0f64, 2..=3usize, 1..=3u32, 0.0..=1.0f64, any::<u64>())
        .prop_map(|(facts, conflict_rate, max_conflict_arity, levels, pref_density, seed)| GenParams {
            facts,
            conflict_rate,
            max_conflict_arity,
            levels,
            pref_density,
            seed,
        })
        .prop_filter("feasible", |p| p.validate().is_ok())
}

fn load(f: &Fixture) -> KnowledgeBase {
    KnowledgeBase::parse(&Sources {
        dataset: &f.dataset,
        meta: &f.meta,
        constraints: &f.constraints,
        queries: &f.queries,
        rules: &f.rules,
        taxonomy: "",
    })
    .unwrap()
}

const STRATEGIES: [Resolution; 4] = [Resolution::Up, Resolution::Down, Resolution::RefinedUp, Resolution::Grounded];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn writers_are_a_fixpoint_of_parsing(p in params(40)) {
        let f = generate(&p).unwrap();
        let d = parse_dataset(&f.dataset).unwrap();
        let text = write_dataset(&d);
        prop_assert_eq!(write_dataset(&parse_dataset(&text).unwrap()), text.clone());
        let m = parse_meta(&f.meta, &d).unwrap();
        let meta = write_meta(&m, &d);
        prop_assert_eq!(write_meta(&parse_meta(&meta, &d).unwrap(), &d), meta);
        let dc = write_constraints(&parse_constraints(&f.constraints).unwrap());
        prop_assert_eq!(write_constraints(&parse_constraints(&dc).unwrap()), dc);
        let rules = write_rules(&parse_rules(&f.rules).unwrap());
        prop_assert_eq!(write_rules(&parse_rules(&rules).unwrap()), rules);
    }

    #[test]
    fn conflicts_are_the_minimal_inconsistent_subsets(p in params(11)) {
        let kb = load(&generate(&p).unwrap());
        let d = &kb.dataset;
        let inconsistent = |mask: u64| {
            let text: String = d
                .indices()
                .filter(|ix| mask >> ix.0 & 1 == 1)
                .map(|ix| format!("{} | {}\n", d.id(ix), d.fact(ix)))
                .collect();
            !conflicts(&parse_dataset(&text).unwrap(), &kb.constraints).is_empty()
        };
        let mut expected = minimal_inconsistent_subsets(d.len(), |m| !inconsistent(m));
        expected.sort();
        let mut got = conflicts(d, &kb.constraints).sets().to_vec();
        got.sort();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn repair_kinds_are_nested_and_maximal(p in params(14)) {
        let engine = Engine::new(load(&generate(&p).unwrap()));
        let n = engine.kb().dataset.len();
        let oracle = Oracle::new(n, engine.conflicts(), Caps { facts: 20, pairs: 64 }).unwrap();
        for s in STRATEGIES {
            let prio = engine.priority(s);
            let [sub, par, com] = RepairKind::ALL.map(|k| oracle.optimal_repairs(k, &prio).unwrap());
            prop_assert!(!com.is_empty());
            prop_assert!(com.iter().all(|r| par.contains(r)));
            prop_assert!(par.iter().all(|r| sub.contains(r)));
            for &r in &sub {
                prop_assert!(oracle.is_consistent(r));
                for f in 0..n {
                    if r >> f & 1 == 0 {
                        prop_assert!(!oracle.is_consistent(r | 1 << f));
                    }
                }
            }
        }
    }

    #[test]
    fn priorities_are_acyclic_and_relate_conflicting_facts(p in params(60)) {
        let engine = Engine::new(load(&generate(&p).unwrap()));
        let c = engine.conflicts();
        for s in STRATEGIES {
            let prio = engine.priority(s);
            for &(a, b) in prio.pairs() {
                prop_assert!(c.co_occur(a, b));
                prop_assert!(!reachable(&prio, b, a));
            }
        }
    }

    #[test]
    fn caps_parse_round_trips(facts in 0..=63usize, pairs in 0..10_000usize) {
        prop_assert_eq!(Caps::parse(&format!("{facts},{pairs}")).unwrap(), Caps { facts, pairs });
        prop_assert_eq!(Caps::parse(&facts.to_string()).unwrap().facts, facts);
    }

    #[test]
    fn caps_reject_oversized_fact_limits(facts in 64..10_000usize) {
        prop_assert!(Caps::parse(&facts.to_string()).is_err());
    }
}

fn reachable(prio: &priorepair::priority::Priority, from: FactIx, to: FactIx) -> bool {
    let mut stack = vec![from];
    let mut seen = vec![from];
    while let Some(x) = stack.pop() {
        if x == to {
            return true;
        }
        for &y in prio.successors(x) {
            if !seen.contains(&y) {
                seen.push(y);
                stack.push(y);
            }
        }
    }
    false
}
