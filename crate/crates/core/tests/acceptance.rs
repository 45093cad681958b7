//! Acceptance report: one PASS/FAIL line per criterion. Exits nonzero if a
//! hard criterion fails; the performance smoke test only reports.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{cycle_fixture, running, sym};
use priorepair::asp::{emit_minconf, emit_priority, emit_semantics};
use priorepair::conflicts::conflicts;
use priorepair::engine::{Engine, KnowledgeBase, Sources};
use priorepair::gen::{generate, GenParams};
use priorepair::kb::FactIx;
use priorepair::oracle::{decide_naive, down_removal_loop, poss_nondef_grd, simple_cycles, to_mask, Caps, Oracle};
use priorepair::preference::evaluate_on_conflicts;
use priorepair::priority::{
    resolve_down, resolve_grounded, resolve_refined_up, resolve_up, EdgeGraph, Priority, Strategy,
};
use priorepair::semantics::{Decider, RepairKind, Semantics};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const RUNNING_EXAMPLE_BUDGET: Duration = Duration::from_secs(1);
const STRATEGY_GRAPHS: usize = 1000;
const STRATEGY_BUDGET: Duration = Duration::from_secs(60);
const SEMANTICS_KBS: usize = 200;
const SEMANTICS_BUDGET: Duration = Duration::from_secs(300);
/// Completion enumeration cap for the random KBs; 12 facts can exceed the
/// default of 16 free pairs.
const ORACLE_PAIR_CAP: usize = 40;
const PERF_FACTS: usize = 50_000;
const PERF_BUDGET: Duration = Duration::from_secs(60);
const PERF_MEMORY_KB: u64 = 2 * 1024 * 1024;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ids(kb: &KnowledgeBase, pairs: &[(FactIx, FactIx)]) -> Vec<(String, String)> {
    let mut v: Vec<_> = pairs.iter().map(|&(a, b)| (kb.dataset.id(a).to_string(), kb.dataset.id(b).to_string())).collect();
    v.sort();
    v
}

fn owned(list: &[(&str, &str)]) -> Vec<(String, String)> {
    let mut v: Vec<_> = list.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect();
    v.sort();
    v
}

fn running_example() -> Outcome {
    let start = Instant::now();
    let engine = Engine::new(running("fixed.prefs"));
    let kb = engine.kb();
    ensure(engine.conflicts().len() == 8, || format!("{} conflicts", engine.conflicts().len()))?;
    let priority = engine.priority(Strategy::Down);
    let oracle = Oracle::new(kb.dataset.len(), engine.conflicts(), Caps::default()).map_err(|e| e.to_string())?;
    let m = |l: &[&str]| to_mask(&l.iter().map(|i| common::ix(kb, i)).collect::<Vec<_>>());
    let r = [
        m(&["1", "5", "6"]),
        m(&["2", "5", "6"]),
        m(&["3", "4", "6"]),
        m(&["1", "5", "7"]),
        m(&["2", "5", "7"]),
        m(&["3", "4", "7"]),
    ];
    let sorted = |mut v: Vec<u64>| {
        v.sort();
        v
    };
    ensure(sorted(oracle.repairs()) == sorted(r.to_vec()), || "repairs differ".into())?;
    let p = sorted(oracle.optimal_repairs(RepairKind::P, &priority).map_err(|e| e.to_string())?);
    ensure(p == sorted(vec![r[0], r[1], r[2]]), || "Pareto-optimal repairs differ".into())?;
    let c = sorted(oracle.optimal_repairs(RepairKind::C, &priority).map_err(|e| e.to_string())?);
    ensure(c == sorted(vec![r[0], r[1]]), || "completion-optimal repairs differ".into())?;
    let decider = Decider::new(engine.conflicts(), &priority);
    for (q, x, sem, kind, want) in [
        ("adm", "b", Semantics::IAR, RepairKind::P, true),
        ("apr", "b", Semantics::Brave, RepairKind::P, false),
        ("fpr", "a", Semantics::AR, RepairKind::P, false),
        ("fac", "a", Semantics::IAR, RepairKind::C, true),
    ] {
        let query = kb.query(q).map_err(|e| e.to_string())?;
        let sets = engine.causes(query, false).get(&vec![sym(x)]).cloned().unwrap_or_default();
        let got = decider.decide(sem, kind, &sets);
        ensure(got == want, || format!("{kind}-{sem} {q}({x}) gave {got}"))?;
    }
    let t = start.elapsed();
    ensure(t < RUNNING_EXAMPLE_BUDGET, || format!("took {t:?}"))?;
    Ok(format!("8 conflicts, 6 repairs, 3 Pareto, 2 completion, 4 verdicts in {t:?}"))
}

fn preference_induction() -> Outcome {
    let engine = Engine::new(running("ex.prefs"));
    let pairs: Vec<_> = engine.pairs().iter().map(|(p, _)| p).collect();
    let got = ids(engine.kb(), &pairs);
    let want = owned(&[("2", "1"), ("2", "3"), ("1", "3"), ("6", "7")]);
    ensure(got == want, || format!("got {got:?}"))?;
    Ok(format!("{} statements", got.len()))
}

fn cycle_resolution() -> Outcome {
    let cases = [
        ("ru-g-1", vec![("1", "2"), ("2", "3")], vec![("1", "2"), ("2", "3"), ("1", "3")]),
        ("ru-g-2", vec![("1", "2"), ("3", "4"), ("3", "2")], vec![("1", "2"), ("3", "4")]),
    ];
    for (name, ru, g) in cases {
        let engine = Engine::new(cycle_fixture(name));
        let got_ru = ids(engine.kb(), engine.priority(Strategy::RefinedUp).pairs());
        let got_g = ids(engine.kb(), engine.priority(Strategy::Grounded).pairs());
        ensure(got_ru == owned(&ru), || format!("{name}: ru gave {got_ru:?}"))?;
        ensure(got_g == owned(&g), || format!("{name}: g gave {got_g:?}"))?;
    }
    Ok("both fixtures exact".into())
}

fn strategy_properties() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce55);
    let subset = |a: &[(u32, u32)], b: &[(u32, u32)]| a.iter().all(|e| b.contains(e));
    for round in 0..STRATEGY_GRAPHS {
        let g = common::random::graph(&mut rng, 10, 25, 4);
        let (u, d, ru, gr) = (resolve_up(&g), resolve_down(&g), resolve_refined_up(&g), resolve_grounded(&g));
        for (name, r) in [("u", &u), ("d", &d), ("ru", &ru), ("g", &gr)] {
            let sub = EdgeGraph::new(g.num_nodes(), r.iter().map(|&(a, b)| (a, b, 1)));
            ensure(simple_cycles(&sub).is_empty(), || format!("graph {round}: {name} cyclic"))?;
        }
        ensure(subset(&u, &d) && subset(&d, &gr) && subset(&d, &ru), || format!("graph {round}: inclusion"))?;
        let (poss, nondef, grd) = poss_nondef_grd(&g);
        ensure(u == poss && d == nondef && gr == grd, || format!("graph {round}: oracle mismatch"))?;
        ensure(d == down_removal_loop(&g), || format!("graph {round}: removal loop mismatch"))?;
    }
    let t = start.elapsed();
    ensure(t < STRATEGY_BUDGET, || format!("took {t:?}"))?;
    Ok(format!("{STRATEGY_GRAPHS} graphs, 0 violations, {t:?}"))
}

fn semantics_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e3a);
    let mut checks = 0usize;
    for round in 0..SEMANTICS_KBS {
        let inst = common::random::instance(&mut rng, 12, 3, 3);
        let caps = Caps { pairs: ORACLE_PAIR_CAP, ..Caps::default() };
        let oracle = Oracle::new(inst.num_facts, &inst.conflicts, caps).map_err(|e| e.to_string())?;
        let decider = Decider::new(&inst.conflicts, &inst.priority);
        let mut verdict = std::collections::HashMap::new();
        for kind in RepairKind::ALL {
            let reps = oracle.optimal_repairs(kind, &inst.priority).map_err(|e| e.to_string())?;
            for sem in Semantics::ALL {
                let got = decider.decide(sem, kind, &inst.causes);
                ensure(got == decide_naive(sem, &reps, &inst.causes), || format!("KB {round}: {kind}-{sem} disagrees"))?;
                verdict.insert((kind, sem), got);
                checks += 1;
            }
            let v = |s| verdict[&(kind, s)];
            ensure(!v(Semantics::IAR) || v(Semantics::AR), || format!("KB {round}: {kind} IAR without AR"))?;
            ensure(!v(Semantics::AR) || v(Semantics::Brave), || format!("KB {round}: {kind} AR without brave"))?;
        }
        let ar = |k| verdict[&(k, Semantics::AR)];
        ensure(!ar(RepairKind::S) || ar(RepairKind::P), || format!("KB {round}: S-AR without P-AR"))?;
        ensure(!ar(RepairKind::P) || ar(RepairKind::C), || format!("KB {round}: P-AR without C-AR"))?;
    }
    let t = start.elapsed();
    ensure(t < SEMANTICS_BUDGET, || format!("took {t:?}"))?;
    Ok(format!("{SEMANTICS_KBS} KBs, {checks} verdicts, 0 violations, {t:?}"))
}

fn empty_priority_collapse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e3a);
    let empty = Priority::empty();
    for round in 0..SEMANTICS_KBS {
        let inst = common::random::instance(&mut rng, 12, 3, 3);
        let caps = Caps { pairs: ORACLE_PAIR_CAP, ..Caps::default() };
        let oracle = Oracle::new(inst.num_facts, &inst.conflicts, caps).map_err(|e| e.to_string())?;
        let mut all = oracle.repairs();
        all.sort();
        for kind in [RepairKind::P, RepairKind::C] {
            let mut reps = oracle.optimal_repairs(kind, &empty).map_err(|e| e.to_string())?;
            reps.sort();
            ensure(reps == all, || format!("KB {round}: {kind}-repairs differ from repairs"))?;
        }
        let decider = Decider::new(&inst.conflicts, &empty);
        for sem in Semantics::ALL {
            let s = decider.decide(sem, RepairKind::S, &inst.causes);
            for kind in [RepairKind::P, RepairKind::C] {
                ensure(decider.decide(sem, kind, &inst.causes) == s, || format!("KB {round}: {kind}-{sem} differs from S"))?;
            }
        }
    }
    Ok(format!("{SEMANTICS_KBS} KBs, 0 violations"))
}

fn asp_goldens() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut files = vec![];
    for s in Strategy::ALL {
        files.push((format!("priority_{}.lp", s.code()), emit_priority(s).to_string()));
    }
    files.push(("minconf.lp".into(), emit_minconf().to_string()));
    files.push(("semantics_P_AR.lp".into(), emit_semantics(RepairKind::P, Semantics::AR)));
    for (name, text) in &files {
        let want = std::fs::read_to_string(dir.join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(&want == text, || format!("{name} differs"))?;
    }
    Ok(format!("{} files byte-equal", files.len()))
}

fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn performance_smoke() -> Outcome {
    let params = GenParams {
        facts: PERF_FACTS,
        conflict_rate: 0.2,
        max_conflict_arity: 2,
        levels: 3,
        pref_density: 0.5,
        seed: 8,
    };
    let fixture = generate(&params).map_err(|e| e.to_string())?;
    let kb = KnowledgeBase::parse(&Sources {
        dataset: &fixture.dataset,
        meta: &fixture.meta,
        constraints: &fixture.constraints,
        rules: &fixture.rules,
        ..Sources::default()
    })
    .map_err(|e| e.to_string())?;
    let start = Instant::now();
    let conf = conflicts(&kb.dataset, &kb.constraints);
    let pairs = evaluate_on_conflicts(&kb.rules, kb.view(), &conf);
    let down = resolve_down(&EdgeGraph::from_pairs(kb.dataset.len(), &pairs));
    let t = start.elapsed();
    let rss = peak_rss_kb();
    let memory = rss.map_or("peak memory unknown".to_string(), |kb| format!("peak RSS {} MiB", kb / 1024));
    let detail = format!(
        "{PERF_FACTS} facts, {} conflicts, {} statements, {} kept by d, {t:?}, {memory}",
        conf.len(),
        pairs.len(),
        down.len()
    );
    ensure(t < PERF_BUDGET && rss.map_or(true, |r| r < PERF_MEMORY_KB), || detail.clone())?;
    Ok(detail)
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, bool); 8] = [
        (1, "running example repairs and verdicts", running_example, true),
        (2, "preference induction", preference_induction, true),
        (3, "cycle resolution fixtures", cycle_resolution, true),
        (4, "strategy properties on random graphs", strategy_properties, true),
        (5, "decider against repair enumeration", semantics_oracle, true),
        (6, "empty-priority collapse", empty_priority_collapse, true),
        (7, "ASP golden files", asp_goldens, true),
        (8, "performance smoke (soft)", performance_smoke, false),
    ];
    let mut failed = 0;
    for (n, name, check, hard) in criteria {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {n} PASS {name}: {detail}"),
            Err(detail) if hard => {
                failed += 1;
                println!("criterion {n} FAIL {name}: {detail}");
            }
            Err(detail) => println!("criterion {n} SOFT-FAIL {name}: {detail}"),
        }
    }
    if failed > 0 {
        println!("{failed} hard criteria failed");
        std::process::exit(1);
    }
}
