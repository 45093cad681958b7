mod common;

use common::{ids, ix, running, sym};
use priorepair::engine::Engine;
use priorepair::kb::FactIx;
use priorepair::oracle::{decide_naive, to_mask, Caps, Oracle};
use priorepair::priority::{Priority, Strategy};
use priorepair::semantics::{RepairKind, Semantics};

fn mask(kb: &priorepair::engine::KnowledgeBase, list: &[&str]) -> u64 {
    to_mask(&list.iter().map(|i| ix(kb, i)).collect::<Vec<FactIx>>())
}

#[test]
fn conflicts_are_the_eight_binary_pairs() {
    let engine = Engine::new(running("fixed.prefs"));
    let kb = engine.kb();
    let got: Vec<Vec<String>> = engine.conflicts().sets().iter().map(|c| ids(kb, c)).collect();
    let want = [["1", "2"], ["1", "3"], ["1", "4"], ["2", "3"], ["2", "4"], ["3", "5"], ["4", "5"], ["6", "7"]];
    assert_eq!(got, want.map(|p| p.map(String::from).to_vec()).to_vec());
}

#[test]
fn fixed_rules_induce_the_example_priority() {
    let engine = Engine::new(running("fixed.prefs"));
    for s in Strategy::ALL {
        let p = engine.priority(s);
        let pairs: Vec<(String, String)> = p
            .pairs()
            .iter()
            .map(|&(a, b)| (engine.kb().dataset.id(a).to_string(), engine.kb().dataset.id(b).to_string()))
            .collect();
        let want = [("1", "3"), ("5", "4"), ("6", "7")].map(|(a, b)| (a.to_string(), b.to_string()));
        assert_eq!(pairs, want.to_vec(), "strategy {s}");
    }
}

#[test]
fn repairs_and_verdicts() {
    let engine = Engine::new(running("fixed.prefs"));
    let kb = engine.kb();
    let priority = engine.priority(Strategy::Down);
    let oracle = Oracle::new(kb.dataset.len(), engine.conflicts(), Caps::default()).unwrap();
    let r = [
        mask(kb, &["1", "5", "6"]),
        mask(kb, &["2", "5", "6"]),
        mask(kb, &["3", "4", "6"]),
        mask(kb, &["1", "5", "7"]),
        mask(kb, &["2", "5", "7"]),
        mask(kb, &["3", "4", "7"]),
    ];
    let mut all = oracle.repairs();
    let mut want = r.to_vec();
    all.sort();
    want.sort();
    assert_eq!(all, want);
    let mut p = oracle.optimal_repairs(RepairKind::P, &priority).unwrap();
    p.sort();
    let mut wp = vec![r[0], r[1], r[2]];
    wp.sort();
    assert_eq!(p, wp);
    let mut c = oracle.optimal_repairs(RepairKind::C, &priority).unwrap();
    c.sort();
    let mut wc = vec![r[0], r[1]];
    wc.sort();
    assert_eq!(c, wc);

    let check = |q: &str, x: &str, sem: Semantics, kind: RepairKind| {
        let query = kb.query(q).unwrap();
        let causes = engine.causes(query, false);
        let sets = causes.get(&vec![sym(x)]).cloned().unwrap_or_default();
        let decider = priorepair::semantics::Decider::new(engine.conflicts(), &priority);
        let fast = decider.decide(sem, kind, &sets);
        let reps = oracle.optimal_repairs(kind, &priority).unwrap();
        assert_eq!(fast, decide_naive(sem, &reps, &sets), "{q}({x}) {kind}-{sem}");
        fast
    };
    assert!(check("adm", "b", Semantics::IAR, RepairKind::P));
    assert!(!check("apr", "b", Semantics::Brave, RepairKind::P));
    assert!(!check("fpr", "a", Semantics::AR, RepairKind::P));
    assert!(check("fac", "a", Semantics::IAR, RepairKind::C));
}

#[test]
fn fac_answers_under_completion_iar() {
    let engine = Engine::new(running("fixed.prefs"));
    let p = engine.priority(Strategy::Grounded);
    let q = engine.kb().query("fac").unwrap();
    assert_eq!(engine.answer_query(q, &p, Semantics::IAR, RepairKind::C), vec![vec![sym("a")]]);
    let empty = Priority::empty();
    for kind in RepairKind::ALL {
        assert_eq!(engine.answer_query(q, &empty, Semantics::AR, kind), engine.answer_query(q, &empty, Semantics::AR, RepairKind::S));
    }
}
