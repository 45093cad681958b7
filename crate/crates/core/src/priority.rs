//! Cycle resolution: from leveled preference edges to an acyclic priority
//! relation, with the strategies going up (u), going down (d), refined going
//! up (ru) and grounded (g).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::kb::FactIx;
use crate::preference::LeveledPairs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Up,
    Down,
    RefinedUp,
    Grounded,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Up, Strategy::Down, Strategy::RefinedUp, Strategy::Grounded];

    pub fn code(self) -> &'static str {
        match self {
            Strategy::Up => "u",
            Strategy::Down => "d",
            Strategy::RefinedUp => "ru",
            Strategy::Grounded => "g",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy, Error> {
        match s {
            "u" => Ok(Strategy::Up),
            "d" => Ok(Strategy::Down),
            "ru" => Ok(Strategy::RefinedUp),
            "g" => Ok(Strategy::Grounded),
            other => Err(Error::InvalidArgument(format!("unknown strategy `{other}` (expected u, d, ru or g)"))),
        }
    }
}

/// A leveled edge. `level` is the minimal inducing level; `levels` lists all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: u32,
    pub to: u32,
    pub level: u32,
    pub levels: Vec<u32>,
}

/// Directed graph of preference edges over nodes `0..num_nodes`.
#[derive(Clone, Debug, Default)]
pub struct EdgeGraph {
    num_nodes: usize,
    edges: Vec<Edge>,
    levels: Vec<u32>,
}

impl EdgeGraph {
    /// Builds the graph from `(from, to, level)` triples; repeated pairs
    /// collect their levels. Self-loops are ignored.
    pub fn new(num_nodes: usize, triples: impl IntoIterator<Item = (u32, u32, u32)>) -> EdgeGraph {
        let mut by_pair: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for (a, b, l) in triples {
            assert!((a as usize) < num_nodes && (b as usize) < num_nodes, "edge endpoint out of range");
            if a != b {
                by_pair.entry((a, b)).or_default().push(l);
            }
        }
        let mut edges: Vec<Edge> = by_pair
            .into_iter()
            .map(|((from, to), mut levels)| {
                levels.sort_unstable();
                levels.dedup();
                Edge { from, to, level: levels[0], levels }
            })
            .collect();
        edges.sort_by_key(|e| (e.from, e.to));
        let mut levels: Vec<u32> = edges.iter().flat_map(|e| e.levels.iter().copied()).collect();
        levels.sort_unstable();
        levels.dedup();
        EdgeGraph { num_nodes, edges, levels }
    }

    pub fn from_pairs(num_facts: usize, pairs: &LeveledPairs) -> EdgeGraph {
        EdgeGraph::new(
            num_facts,
            pairs.iter().flat_map(|((a, b), ls)| ls.iter().map(move |&l| (a.0, b.0, l))),
        )
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Edges sorted by `(from, to)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Distinct levels in increasing order.
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    fn pairs_of(&self, keep: impl Fn(usize) -> bool) -> Vec<(u32, u32)> {
        (0..self.edges.len()).filter(|&i| keep(i)).map(|i| (self.edges[i].from, self.edges[i].to)).collect()
    }
}

/// Strongly connected component label per node for the selected edges.
pub(crate) fn scc(num_nodes: usize, edges: &[(u32, u32)]) -> Vec<u32> {
    let mut start = vec![0usize; num_nodes + 1];
    for &(a, _) in edges {
        start[a as usize + 1] += 1;
    }
    for i in 0..num_nodes {
        start[i + 1] += start[i];
    }
    let mut adj = vec![0u32; edges.len()];
    let mut fill = start.clone();
    for &(a, b) in edges {
        adj[fill[a as usize]] = b;
        fill[a as usize] += 1;
    }
    // Iterative Tarjan.
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; num_nodes];
    let mut low = vec![0u32; num_nodes];
    let mut on_stack = vec![false; num_nodes];
    let mut comp = vec![UNSEEN; num_nodes];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut counter = 0u32;
    let mut ncomp = 0u32;
    for root in 0..num_nodes as u32 {
        if index[root as usize] != UNSEEN || start[root as usize] == start[root as usize + 1] {
            continue;
        }
        call.push((root, start[root as usize]));
        index[root as usize] = counter;
        low[root as usize] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            let vu = v as usize;
            if *next < start[vu + 1] {
                let w = adj[*next];
                *next += 1;
                let wu = w as usize;
                if index[wu] == UNSEEN {
                    index[wu] = counter;
                    low[wu] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[wu] = true;
                    call.push((w, start[wu]));
                } else if on_stack[wu] {
                    low[vu] = low[vu].min(index[wu]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p as usize] = low[p as usize].min(low[vu]);
                }
                if low[vu] == index[vu] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        comp[w as usize] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    for (i, c) in comp.iter_mut().enumerate() {
        if *c == UNSEEN {
            *c = ncomp + i as u32;
        }
    }
    comp
}

/// True if the selected edges contain a directed cycle.
pub(crate) fn has_cycle(num_nodes: usize, edges: &[(u32, u32)]) -> bool {
    let comp = scc(num_nodes, edges);
    edges.iter().any(|&(a, b)| comp[a as usize] == comp[b as usize])
}

/// Going up: the longest level prefix whose union is acyclic.
pub fn resolve_up(g: &EdgeGraph) -> Vec<(u32, u32)> {
    let mut limit = None;
    for &l in g.levels() {
        if has_cycle(g.num_nodes, &g.pairs_of(|i| g.edges[i].level <= l)) {
            break;
        }
        limit = Some(l);
    }
    match limit {
        Some(l) => g.pairs_of(|i| g.edges[i].level <= l),
        None => Vec::new(),
    }
}

/// Going down: an edge of level i is kept iff it lies on no cycle made of
/// edges of level at most i.
pub fn resolve_down(g: &EdgeGraph) -> Vec<(u32, u32)> {
    let mut keep = vec![false; g.edges.len()];
    for &l in g.levels() {
        let comp = scc(g.num_nodes, &g.pairs_of(|i| g.edges[i].level <= l));
        for (i, e) in g.edges.iter().enumerate() {
            if e.level == l {
                keep[i] = comp[e.from as usize] != comp[e.to as usize];
            }
        }
    }
    g.pairs_of(|i| keep[i])
}

/// Refined going up: at level i, add the edges of minimal level i that lie on
/// no cycle of the current result together with every pair induced at level i.
pub fn resolve_refined_up(g: &EdgeGraph) -> Vec<(u32, u32)> {
    let mut keep = vec![false; g.edges.len()];
    for &l in g.levels() {
        let comp = scc(g.num_nodes, &g.pairs_of(|i| keep[i] || g.edges[i].levels.contains(&l)));
        for (i, e) in g.edges.iter().enumerate() {
            if e.level == l && comp[e.from as usize] != comp[e.to as usize] {
                keep[i] = true;
            }
        }
    }
    g.pairs_of(|i| keep[i])
}

/// Reachability oracle over a fixed edge subset, caching searches per source.
struct Reach {
    adj: Vec<Vec<u32>>,
    cache: HashMap<u32, Vec<bool>>,
}

impl Reach {
    fn new(num_nodes: usize, edges: impl Iterator<Item = (u32, u32)>) -> Self {
        let mut adj = vec![Vec::new(); num_nodes];
        for (a, b) in edges {
            adj[a as usize].push(b);
        }
        Reach { adj, cache: HashMap::new() }
    }

    fn reaches(&mut self, from: u32, to: u32) -> bool {
        let adj = &self.adj;
        let seen = self.cache.entry(from).or_insert_with(|| {
            let mut seen = vec![false; adj.len()];
            let mut stack = vec![from];
            seen[from as usize] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        });
        seen[to as usize]
    }
}

/// Grounded: least fixpoint of the characteristic function Γ of the
/// set-based argumentation framework whose arguments are the edges.
///
/// An edge e is attacked by a set A when A holds a path from target(e) back to
/// source(e) using edges of level at most level(e); e is defended by A when no
/// such path exists through edges that A does not attack.
pub fn resolve_grounded(g: &EdgeGraph) -> Vec<(u32, u32)> {
    let m = g.edges.len();
    let mut current = vec![false; m];
    loop {
        let next = gamma(g, &current);
        if next == current {
            break;
        }
        current = next;
    }
    g.pairs_of(|i| current[i])
}

/// One application of Γ.
pub(crate) fn gamma(g: &EdgeGraph, a: &[bool]) -> Vec<bool> {
    let m = g.edges.len();
    let mut attacked = vec![false; m];
    for &l in g.levels() {
        let mut reach = Reach::new(
            g.num_nodes,
            (0..m).filter(|&i| a[i] && g.edges[i].level <= l).map(|i| (g.edges[i].from, g.edges[i].to)),
        );
        for (i, e) in g.edges.iter().enumerate() {
            if e.level == l {
                attacked[i] = reach.reaches(e.to, e.from);
            }
        }
    }
    let mut defended = vec![false; m];
    for &l in g.levels() {
        let live: Vec<(u32, u32)> = (0..m)
            .filter(|&i| !attacked[i] && g.edges[i].level <= l)
            .map(|i| (g.edges[i].from, g.edges[i].to))
            .collect();
        let comp = scc(g.num_nodes, &live);
        let mut reach: Option<Reach> = None;
        for (i, e) in g.edges.iter().enumerate() {
            if e.level != l {
                continue;
            }
            defended[i] = if !attacked[i] {
                // e itself is live, so a path back closes a cycle through it.
                comp[e.from as usize] != comp[e.to as usize]
            } else {
                let r = reach.get_or_insert_with(|| Reach::new(g.num_nodes, live.iter().copied()));
                !r.reaches(e.to, e.from)
            };
        }
    }
    defended
}

/// An acyclic priority relation over facts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Priority {
    pairs: Vec<(FactIx, FactIx)>,
    succ: HashMap<FactIx, Vec<FactIx>>,
}

impl Priority {
    pub fn new(pairs: impl IntoIterator<Item = (FactIx, FactIx)>) -> Priority {
        let mut pairs: Vec<(FactIx, FactIx)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut succ: HashMap<FactIx, Vec<FactIx>> = HashMap::new();
        for &(a, b) in &pairs {
            succ.entry(a).or_default().push(b);
        }
        Priority { pairs, succ }
    }

    pub fn empty() -> Priority {
        Priority::default()
    }

    /// Pairs sorted by `(from, to)`.
    pub fn pairs(&self) -> &[(FactIx, FactIx)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn prefers(&self, a: FactIx, b: FactIx) -> bool {
        self.succ.get(&a).is_some_and(|s| s.binary_search(&b).is_ok())
    }

    pub fn successors(&self, a: FactIx) -> &[FactIx] {
        self.succ.get(&a).map_or(&[], Vec::as_slice)
    }
}

/// Runs a strategy on conflict-restricted preference pairs.
pub fn resolve(strategy: Strategy, num_facts: usize, pairs: &LeveledPairs) -> Priority {
    let g = EdgeGraph::from_pairs(num_facts, pairs);
    let out = match strategy {
        Strategy::Up => resolve_up(&g),
        Strategy::Down => resolve_down(&g),
        Strategy::RefinedUp => resolve_refined_up(&g),
        Strategy::Grounded => resolve_grounded(&g),
    };
    Priority::new(out.into_iter().map(|(a, b)| (FactIx(a), FactIx(b))))
}
