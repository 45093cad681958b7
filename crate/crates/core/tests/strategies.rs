mod common;

use priorepair::oracle::{down_removal_loop, grounded_by_cycles, poss_nondef_grd, simple_cycles};
use priorepair::priority::{resolve_down, resolve_grounded, resolve_refined_up, resolve_up, EdgeGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn acyclic(n: usize, pairs: &[(u32, u32)]) -> bool {
    let g = EdgeGraph::new(n, pairs.iter().map(|&(a, b)| (a, b, 1)));
    simple_cycles(&g).is_empty()
}

fn subset(a: &[(u32, u32)], b: &[(u32, u32)]) -> bool {
    a.iter().all(|e| b.contains(e))
}

fn all_pairs(g: &EdgeGraph) -> Vec<(u32, u32)> {
    g.edges().iter().map(|e| (e.from, e.to)).collect()
}

#[test]
fn strategies_match_oracles_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for round in 0..1500 {
        let g = common::random::graph(&mut rng, 10, 25, 4);
        let n = g.num_nodes();
        let (u, d, ru, gr) = (resolve_up(&g), resolve_down(&g), resolve_refined_up(&g), resolve_grounded(&g));
        for (name, r) in [("u", &u), ("d", &d), ("ru", &ru), ("g", &gr)] {
            assert!(acyclic(n, r), "round {round}: {name} is cyclic");
            assert!(subset(r, &all_pairs(&g)), "round {round}: {name} adds edges");
        }
        assert!(subset(&u, &d) && subset(&d, &gr) && subset(&d, &ru), "round {round}: inclusions");
        let (poss, nondef, grd) = poss_nondef_grd(&g);
        assert_eq!(u, poss, "round {round}: up");
        assert_eq!(d, nondef, "round {round}: down");
        assert_eq!(gr, grd, "round {round}: grounded");
        assert_eq!(d, down_removal_loop(&g), "round {round}: removal loop");
        if g.levels().len() <= 1 {
            let on_no_cycle: Vec<(u32, u32)> = {
                let covered = simple_cycles(&g).iter().fold(0u64, |m, c| m | c);
                g.edges().iter().enumerate().filter(|(i, _)| covered >> i & 1 == 0).map(|(_, e)| (e.from, e.to)).collect()
            };
            assert_eq!(d, on_no_cycle);
            assert_eq!(ru, on_no_cycle);
            assert_eq!(gr, on_no_cycle);
        }
    }
}

#[test]
fn acyclic_input_is_kept_by_every_strategy() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = 0;
    while seen < 200 {
        let g = common::random::graph(&mut rng, 8, 10, 3);
        if !simple_cycles(&g).is_empty() {
            continue;
        }
        seen += 1;
        let all = all_pairs(&g);
        for r in [resolve_up(&g), resolve_down(&g), resolve_refined_up(&g), resolve_grounded(&g)] {
            assert_eq!(r, all);
        }
    }
}

#[test]
fn cycle_based_grounded_matches_fixpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for round in 0..1000 {
        let g = common::random::graph(&mut rng, 8, 16, 3);
        assert_eq!(grounded_by_cycles(&g, false), resolve_grounded(&g), "round {round}");
    }
}
