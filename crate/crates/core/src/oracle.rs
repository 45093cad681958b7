//! Exhaustive reference implementations: repairs, optimal repairs, naive
//! entailment, and the level-based repairs of the preference-cycle KB.
//!
//! Everything here is exponential and guarded by size caps, overridable
//! through `PRIOREPAIR_ORACLE_CAP` (`N` for facts, or `N,M` for facts and
//! unordered conflicting pairs).

use std::collections::HashSet;

use crate::conflicts::{Conflicts, FactSet};
use crate::error::Error;
use crate::kb::FactIx;
use crate::priority::{EdgeGraph, Priority};
use crate::semantics::{RepairKind, Semantics};

pub const CAP_ENV: &str = "PRIOREPAIR_ORACLE_CAP";

/// Set of facts as a bitmask over fact indices.
pub type Mask = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub facts: usize,
    pub pairs: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps { facts: 20, pairs: 16 }
    }
}

impl Caps {
    /// Parses `N` or `N,M`. Fact caps above 63 are rejected.
    pub fn parse(text: &str) -> Result<Caps, Error> {
        let bad = || Error::InvalidArgument(format!("{CAP_ENV}: expected `N` or `N,M`, got `{text}`"));
        let mut parts = text.split(',').map(|p| p.trim().parse::<usize>().map_err(|_| bad()));
        let facts = parts.next().ok_or_else(bad)??;
        let pairs = match parts.next() {
            Some(p) => p?,
            None => Caps::default().pairs,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        if facts > 63 {
            return Err(Error::InvalidArgument(format!("{CAP_ENV}: fact cap {facts} is above 63")));
        }
        Ok(Caps { facts, pairs })
    }

    pub fn from_env() -> Result<Caps, Error> {
        match std::env::var(CAP_ENV) {
            Ok(v) => Caps::parse(&v),
            Err(_) => Ok(Caps::default()),
        }
    }
}

pub fn to_mask(set: &[FactIx]) -> Mask {
    set.iter().fold(0, |m, f| m | 1 << f.0)
}

pub fn to_set(mask: Mask) -> FactSet {
    (0..64).filter(|i| mask >> i & 1 == 1).map(FactIx).collect()
}

/// A desk-scale KB: its facts `0..n` and conflicts as masks.
#[derive(Clone, Debug)]
pub struct Oracle {
    n: usize,
    conflicts: Vec<Mask>,
    caps: Caps,
}

impl Oracle {
    pub fn new(num_facts: usize, conflicts: &Conflicts, caps: Caps) -> Result<Oracle, Error> {
        if num_facts > caps.facts {
            return Err(Error::CapExceeded { what: "dataset".into(), size: num_facts, cap: caps.facts });
        }
        Ok(Oracle { n: num_facts, conflicts: conflicts.sets().iter().map(|c| to_mask(c)).collect(), caps })
    }

    pub fn num_facts(&self) -> usize {
        self.n
    }

    pub fn is_consistent(&self, set: Mask) -> bool {
        self.conflicts.iter().all(|&c| c & set != c)
    }

    /// All inclusion-maximal consistent subsets, sorted.
    pub fn repairs(&self) -> Vec<Mask> {
        let mut out = Vec::new();
        self.extend(0, 0, &mut out);
        out.sort_unstable();
        out
    }

    fn extend(&self, i: usize, set: Mask, out: &mut Vec<Mask>) {
        if i == self.n {
            let maximal = (0..self.n).all(|f| set >> f & 1 == 1 || !self.is_consistent(set | 1 << f));
            if maximal {
                out.push(set);
            }
            return;
        }
        let with = set | 1 << i;
        if self.is_consistent(with) {
            self.extend(i + 1, with, out);
        }
        self.extend(i + 1, set, out);
    }

    /// Every consistent subset, by increasing size.
    pub fn consistent_subsets(&self) -> Vec<Mask> {
        let mut all: Vec<Mask> = (0..1u64 << self.n).filter(|&s| self.is_consistent(s)).collect();
        all.sort_by_key(|s| (s.count_ones(), *s));
        all
    }

    /// Pareto-optimal repairs: no consistent `B` contains some `β ∉ R` with
    /// `β ≻ α` for every `α ∈ R \ B`. Checked against every consistent subset.
    pub fn pareto_optimal(&self, repairs: &[Mask], priority: &Priority) -> Vec<Mask> {
        let subsets = self.consistent_subsets();
        let dominated = self.dominated(priority);
        repairs
            .iter()
            .copied()
            .filter(|&r| {
                !subsets.iter().any(|&b| {
                    let removed = r & !b;
                    let added = b & !r;
                    (0..self.n).any(|beta| added >> beta & 1 == 1 && removed & !dominated[beta] == 0)
                })
            })
            .collect()
    }

    /// The improvement test restricted to the canonical candidates
    /// `(R \ {α | β ≻ α}) ∪ {β}`.
    pub fn has_pareto_improvement(&self, repair: Mask, dominated: &[Mask]) -> bool {
        (0..self.n).any(|beta| repair >> beta & 1 == 0 && self.is_consistent((repair & !dominated[beta]) | 1 << beta))
    }

    /// For each fact, the facts it is preferred to.
    pub fn dominated(&self, priority: &Priority) -> Vec<Mask> {
        (0..self.n).map(|a| to_mask(priority.successors(FactIx(a as u32)))).collect()
    }

    /// Unordered pairs of facts sharing a conflict, sorted.
    pub fn conflicting_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = HashSet::new();
        for &c in &self.conflicts {
            let members: Vec<usize> = (0..self.n).filter(|i| c >> i & 1 == 1).collect();
            for (k, &a) in members.iter().enumerate() {
                for &b in &members[k + 1..] {
                    pairs.insert((a, b));
                }
            }
        }
        let mut v: Vec<(usize, usize)> = pairs.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Repairs that are Pareto-optimal for some acyclic completion of the
    /// priority over the conflicting pairs.
    pub fn completion_optimal(&self, repairs: &[Mask], priority: &Priority) -> Result<Vec<Mask>, Error> {
        let dominated = self.dominated(priority);
        let free: Vec<(usize, usize)> = self
            .conflicting_pairs()
            .into_iter()
            .filter(|&(a, b)| dominated[a] >> b & 1 == 0 && dominated[b] >> a & 1 == 0)
            .collect();
        if free.len() > self.caps.pairs {
            return Err(Error::CapExceeded {
                what: "unordered conflicting pairs".into(),
                size: free.len(),
                cap: self.caps.pairs,
            });
        }
        let mut succ = dominated;
        Ok(repairs.iter().copied().filter(|&r| self.orient(&free, 0, &mut succ, r)).collect())
    }

    /// Searches orientations of `free[i..]` under which `repair` has no
    /// improvement. Extra preferences only enlarge the candidate
    /// improvements, so a partial orientation that already admits one is
    /// abandoned. Orientations favouring the repair are tried first.
    fn orient(&self, free: &[(usize, usize)], i: usize, succ: &mut [Mask], repair: Mask) -> bool {
        if self.has_pareto_improvement(repair, succ) {
            return false;
        }
        if i == free.len() {
            return true;
        }
        let (a, b) = free[i];
        let order = if repair >> b & 1 == 1 && repair >> a & 1 == 0 { [(b, a), (a, b)] } else { [(a, b), (b, a)] };
        for (x, y) in order {
            if reaches(succ, y, x) {
                continue;
            }
            succ[x] |= 1 << y;
            let ok = self.orient(free, i + 1, succ, repair);
            succ[x] &= !(1 << y);
            if ok {
                return true;
            }
        }
        false
    }

    /// The repairs of a kind under a priority.
    pub fn optimal_repairs(&self, kind: RepairKind, priority: &Priority) -> Result<Vec<Mask>, Error> {
        let repairs = self.repairs();
        match kind {
            RepairKind::S => Ok(repairs),
            RepairKind::P => Ok(self.pareto_optimal(&repairs, priority)),
            RepairKind::C => self.completion_optimal(&repairs, priority),
        }
    }
}

fn reaches(succ: &[Mask], from: usize, to: usize) -> bool {
    let mut seen: Mask = 1 << from;
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        let mut next = succ[v] & !seen;
        seen |= next;
        while next != 0 {
            let w = next.trailing_zeros() as usize;
            next &= next - 1;
            stack.push(w);
        }
    }
    false
}

/// Entailment by quantifying over the given repairs: a repair entails the
/// answer iff it contains one of the causes.
pub fn decide_naive(semantics: Semantics, repairs: &[Mask], causes: &[FactSet]) -> bool {
    let causes: Vec<Mask> = causes.iter().map(|c| to_mask(c)).collect();
    let holds = |r: Mask| causes.iter().any(|&c| c & r == c);
    match semantics {
        Semantics::Brave => repairs.iter().any(|&r| holds(r)),
        Semantics::AR => !repairs.is_empty() && repairs.iter().all(|&r| holds(r)),
        Semantics::IAR => !repairs.is_empty() && holds(repairs.iter().fold(!0, |acc, &r| acc & r)),
    }
}

/// Inclusion-minimal subsets of `0..n` violating the given predicate of
/// consistency, found by enumeration.
pub fn minimal_inconsistent_subsets(n: usize, consistent: impl Fn(Mask) -> bool) -> Vec<FactSet> {
    let mut found: Vec<Mask> = Vec::new();
    let mut all: Vec<Mask> = (0..1u64 << n).collect();
    all.sort_by_key(|s| (s.count_ones(), *s));
    for s in all {
        if found.iter().any(|&f| f & s == f) {
            continue;
        }
        if !consistent(s) {
            found.push(s);
        }
    }
    let mut out: Vec<FactSet> = found.into_iter().map(to_set).collect();
    out.sort_unstable();
    out
}

/// Simple directed cycles of a graph as edge-index masks.
pub fn simple_cycles(g: &EdgeGraph) -> Vec<Mask> {
    assert!(g.edges().len() <= 64, "simple_cycles supports at most 64 edges");
    let n = g.num_nodes();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        out_edges[e.from as usize].push(i);
    }
    let mut cycles = Vec::new();
    for start in 0..n {
        let mut on_path = vec![false; n];
        on_path[start] = true;
        cycle_dfs(g, &out_edges, start, start, 0, &mut on_path, &mut cycles);
    }
    cycles
}

fn cycle_dfs(
    g: &EdgeGraph,
    out_edges: &[Vec<usize>],
    start: usize,
    v: usize,
    path: Mask,
    on_path: &mut [bool],
    cycles: &mut Vec<Mask>,
) {
    for &i in &out_edges[v] {
        let w = g.edges()[i].to as usize;
        if w == start {
            cycles.push(path | 1 << i);
        } else if w > start && !on_path[w] {
            on_path[w] = true;
            cycle_dfs(g, out_edges, start, w, path | 1 << i, on_path, cycles);
            on_path[w] = false;
        }
    }
}

fn pairs_of(g: &EdgeGraph, keep: impl Fn(usize) -> bool) -> Vec<(u32, u32)> {
    g.edges().iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, e)| (e.from, e.to)).collect()
}

fn levels_mask(g: &EdgeGraph, max_level: u32) -> Mask {
    g.edges().iter().enumerate().filter(|(_, e)| e.level <= max_level).fold(0, |m, (i, _)| m | 1 << i)
}

/// The possibilistic, non-defeated and grounded repairs of the KB whose
/// facts are the edges, whose conflicts are the simple cycles, and whose
/// levels are the edge levels.
pub fn poss_nondef_grd(g: &EdgeGraph) -> (Vec<(u32, u32)>, Vec<(u32, u32)>, Vec<(u32, u32)>) {
    let cycles = simple_cycles(g);
    let edges = g.edges();

    let mut poss = !0;
    for &l in g.levels() {
        let upto = levels_mask(g, l);
        if cycles.iter().any(|&c| c & upto == c) {
            let below = g.levels().iter().copied().filter(|&k| k < l).max();
            poss = below.map_or(0, |k| levels_mask(g, k));
            break;
        }
    }

    let mut nondef: Mask = 0;
    for &l in g.levels() {
        let upto = levels_mask(g, l);
        let inside: Vec<Mask> = cycles.iter().copied().filter(|&c| c & upto == c).collect();
        let covered = inside.iter().fold(0, |m, &c| m | c);
        nondef |= upto & !covered;
    }

    // Attacks (S, e): S ∪ {e} is a cycle and e has its maximal level.
    let mut attacks: Vec<Vec<Mask>> = vec![Vec::new(); edges.len()];
    for &c in &cycles {
        let max = (0..edges.len()).filter(|i| c >> i & 1 == 1).map(|i| edges[i].level).max().unwrap();
        for (i, e) in edges.iter().enumerate() {
            if c >> i & 1 == 1 && e.level == max {
                attacks[i].push(c & !(1 << i));
            }
        }
    }
    let attacked_by = |a: Mask, f: usize| attacks[f].iter().any(|&s| s & a == s);
    let mut grd: Mask = 0;
    loop {
        let next = (0..edges.len())
            .filter(|&e| attacks[e].iter().all(|&s| (0..edges.len()).any(|f| s >> f & 1 == 1 && attacked_by(grd, f))))
            .fold(0, |m, e| m | 1 << e);
        if next == grd {
            break;
        }
        grd = next;
    }

    (pairs_of(g, |i| poss >> i & 1 == 1), pairs_of(g, |i| nondef >> i & 1 == 1), pairs_of(g, |i| grd >> i & 1 == 1))
}

/// Going down as a literal loop: from the highest level downwards, remove
/// the edges of that level lying on a cycle of the current relation, while
/// the relation is cyclic.
pub fn down_removal_loop(g: &EdgeGraph) -> Vec<(u32, u32)> {
    let edges = g.edges();
    let mut current: Mask = (0..edges.len()).fold(0, |m, i| m | 1 << i);
    for &l in g.levels().iter().rev() {
        let cycles: Vec<Mask> = simple_cycles(g).into_iter().filter(|&c| c & current == c).collect();
        if cycles.is_empty() {
            break;
        }
        let on_cycle = cycles.iter().fold(0, |m, &c| m | c);
        for (i, e) in edges.iter().enumerate() {
            if e.level == l && on_cycle >> i & 1 == 1 {
                current &= !(1 << i);
            }
        }
    }
    pairs_of(g, |i| current >> i & 1 == 1)
}

/// The grounded strategy as an iteration over simple cycles: add every edge
/// `e` such that each cycle through `e` has an edge of higher level than `e`
/// or an edge closing a cycle with the edges added so far. With
/// `include_self`, `e` itself may serve as that closing edge.
pub fn grounded_by_cycles(g: &EdgeGraph, include_self: bool) -> Vec<(u32, u32)> {
    let edges = g.edges();
    let cycles = simple_cycles(g);
    let mut succ: Vec<Mask> = vec![0; g.num_nodes()];
    let mut current: Mask = 0;
    loop {
        let closes = |i: usize, succ: &[Mask]| reaches(succ, edges[i].to as usize, edges[i].from as usize);
        let mut added = Vec::new();
        for (i, e) in edges.iter().enumerate() {
            if current >> i & 1 == 1 {
                continue;
            }
            let ok = cycles.iter().filter(|&&c| c >> i & 1 == 1).all(|&c| {
                (0..edges.len()).any(|j| {
                    c >> j & 1 == 1 && (edges[j].level > e.level || ((include_self || j != i) && closes(j, &succ)))
                })
            });
            if ok {
                added.push(i);
            }
        }
        if added.is_empty() {
            break;
        }
        for i in added {
            current |= 1 << i;
            succ[edges[i].from as usize] |= 1 << edges[i].to;
        }
    }
    pairs_of(g, |i| current >> i & 1 == 1)
}
