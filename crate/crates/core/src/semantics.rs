//! Entailment under brave, AR and IAR semantics for subset, Pareto-optimal and
//! completion-optimal repairs, decided by search over a localized selection
//! problem.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::conflicts::{Conflicts, FactSet};
use crate::error::Error;
use crate::kb::FactIx;
use crate::priority::Priority;
use crate::solver::{Lit, Solver, Theory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepairKind {
    /// Subset repairs.
    S,
    /// Pareto-optimal repairs.
    P,
    /// Completion-optimal repairs.
    C,
}

impl RepairKind {
    pub const ALL: [RepairKind; 3] = [RepairKind::S, RepairKind::P, RepairKind::C];

    pub fn code(self) -> &'static str {
        match self {
            RepairKind::S => "S",
            RepairKind::P => "P",
            RepairKind::C => "C",
        }
    }
}

impl fmt::Display for RepairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for RepairKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<RepairKind, Error> {
        match s {
            "S" | "s" => Ok(RepairKind::S),
            "P" | "p" => Ok(RepairKind::P),
            "C" | "c" => Ok(RepairKind::C),
            other => Err(Error::InvalidArgument(format!("unknown repair kind `{other}` (expected S, P or C)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semantics {
    Brave,
    AR,
    IAR,
}

impl Semantics {
    pub const ALL: [Semantics; 3] = [Semantics::Brave, Semantics::AR, Semantics::IAR];

    pub fn code(self) -> &'static str {
        match self {
            Semantics::Brave => "brave",
            Semantics::AR => "AR",
            Semantics::IAR => "IAR",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Semantics, Error> {
        match s.to_ascii_lowercase().as_str() {
            "brave" => Ok(Semantics::Brave),
            "ar" => Ok(Semantics::AR),
            "iar" => Ok(Semantics::IAR),
            _ => Err(Error::InvalidArgument(format!("unknown semantics `{s}` (expected brave, AR or IAR)"))),
        }
    }
}

/// The attack relation: conflict `C` attacks `α ∈ C` unless `α ≻ β` for
/// some `β ∈ C`.
#[derive(Clone, Debug, Default)]
pub struct Attacks {
    attacked: Vec<Vec<FactIx>>,
    attackers: Vec<Vec<u32>>,
}

impl Attacks {
    /// Members attacked by conflict `c`.
    pub fn attacked(&self, c: usize) -> &[FactIx] {
        &self.attacked[c]
    }

    /// Conflicts attacking a fact.
    pub fn attackers(&self, f: FactIx) -> &[u32] {
        self.attackers.get(f.index()).map_or(&[], Vec::as_slice)
    }

    pub fn attacks(&self, c: usize, f: FactIx) -> bool {
        self.attacked[c].binary_search(&f).is_ok()
    }
}

pub fn attack_relation(conflicts: &Conflicts, priority: &Priority) -> Attacks {
    let num_facts = conflicts.sets().iter().flatten().map(|f| f.index() + 1).max().unwrap_or(0);
    let mut attackers = vec![Vec::new(); num_facts];
    let attacked = conflicts
        .sets()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let members: Vec<FactIx> =
                c.iter().copied().filter(|&a| !c.iter().any(|&b| priority.prefers(a, b))).collect();
            for f in &members {
                attackers[f.index()].push(i as u32);
            }
            members
        })
        .collect();
    Attacks { attacked, attackers }
}

/// Least set containing the cause facts and closed under: if `β` is
/// included and `X` attacks `β`, all members of `X` are included. Sorted.
pub fn localize<'a>(
    causes: impl IntoIterator<Item = &'a FactSet>,
    attacks: &Attacks,
    conflicts: &Conflicts,
) -> Vec<FactIx> {
    let mut seen: HashMap<FactIx, ()> = HashMap::new();
    let mut queue: VecDeque<FactIx> = VecDeque::new();
    for cause in causes {
        for &f in cause {
            if seen.insert(f, ()).is_none() {
                queue.push_back(f);
            }
        }
    }
    while let Some(f) = queue.pop_front() {
        for &x in attacks.attackers(f) {
            for &g in conflicts.get(x as usize) {
                if seen.insert(g, ()).is_none() {
                    queue.push_back(g);
                }
            }
        }
    }
    let mut out: Vec<FactIx> = seen.into_keys().collect();
    out.sort_unstable();
    out
}

/// Acyclicity of the priority extended with the orientations assigned so far.
struct Orientations<'a> {
    priority: &'a Priority,
    pairs: HashMap<u32, (FactIx, FactIx)>,
    extra: HashMap<FactIx, Vec<FactIx>>,
    stack: Vec<FactIx>,
    visited: HashMap<FactIx, ()>,
}

impl Orientations<'_> {
    fn reaches(&mut self, from: FactIx, to: FactIx) -> bool {
        self.stack.clear();
        self.visited.clear();
        self.stack.push(from);
        self.visited.insert(from, ());
        while let Some(v) = self.stack.pop() {
            if v == to {
                return true;
            }
            let extra = self.extra.get(&v).map_or(&[][..], Vec::as_slice);
            for &w in self.priority.successors(v).iter().chain(extra) {
                if self.visited.insert(w, ()).is_none() {
                    self.stack.push(w);
                }
            }
        }
        false
    }

    fn edge(&self, var: u32, value: bool) -> Option<(FactIx, FactIx)> {
        self.pairs.get(&var).map(|&(a, b)| if value { (a, b) } else { (b, a) })
    }
}

impl Theory for Orientations<'_> {
    fn assign(&mut self, var: u32, value: bool) -> bool {
        let Some((a, b)) = self.edge(var, value) else { return true };
        let cyclic = self.reaches(b, a);
        self.extra.entry(a).or_default().push(b);
        !cyclic
    }

    fn unassign(&mut self, var: u32, value: bool) {
        if let Some((a, _)) = self.edge(var, value) {
            self.extra.get_mut(&a).and_then(Vec::pop);
        }
    }
}

/// Selection problem over the facts reachable from some causes.
struct Problem<'a> {
    solver: Solver,
    selected: HashMap<FactIx, u32>,
    order: Vec<Lit>,
    orientations: Orientations<'a>,
    orient_vars: HashMap<(FactIx, FactIx), u32>,
}

impl<'a> Problem<'a> {
    fn selected(&self, f: FactIx) -> Lit {
        Lit::pos(self.selected[&f])
    }

    /// Literal stating `a ≻' b` in the completion.
    fn orient(&mut self, a: FactIx, b: FactIx) -> Lit {
        let key = (a.min(b), a.max(b));
        let var = match self.orient_vars.get(&key) {
            Some(&v) => v,
            None => {
                let v = self.solver.new_var();
                self.orient_vars.insert(key, v);
                self.orientations.pairs.insert(v, key);
                v
            }
        };
        Lit::new(var, a < b)
    }

    fn solve(&mut self) -> bool {
        let order = std::mem::take(&mut self.order);
        self.solver.solve(&order, &mut self.orientations).is_some()
    }
}

/// Decides entailment for one answer tuple at a time over shared conflicts
/// and priority.
pub struct Decider<'a> {
    conflicts: &'a Conflicts,
    priority: &'a Priority,
    empty: Priority,
    attacks: Attacks,
    subset_attacks: Attacks,
}

impl<'a> Decider<'a> {
    pub fn new(conflicts: &'a Conflicts, priority: &'a Priority) -> Decider<'a> {
        let empty = Priority::empty();
        let subset_attacks = attack_relation(conflicts, &empty);
        Decider { conflicts, priority, attacks: attack_relation(conflicts, priority), subset_attacks, empty }
    }

    /// The attack relation used for a repair kind (the empty priority for S).
    pub fn attacks(&self, kind: RepairKind) -> &Attacks {
        match kind {
            RepairKind::S => &self.subset_attacks,
            _ => &self.attacks,
        }
    }

    fn base(&self, kind: RepairKind, reach: &[FactIx]) -> Problem<'_> {
        let attacks = self.attacks(kind);
        let priority = if kind == RepairKind::S { &self.empty } else { self.priority };
        let mut facts = reach.to_vec();
        facts.sort_by(|a, b| self.conflicts.degree(*b).cmp(&self.conflicts.degree(*a)).then(a.cmp(b)));
        let mut p = Problem {
            solver: Solver::new(),
            selected: HashMap::new(),
            order: Vec::new(),
            orientations: Orientations {
                priority,
                pairs: HashMap::new(),
                extra: HashMap::new(),
                stack: Vec::new(),
                visited: HashMap::new(),
            },
            orient_vars: HashMap::new(),
        };
        for &f in &facts {
            let v = p.solver.new_var();
            p.selected.insert(f, v);
            p.order.push(Lit::pos(v));
        }
        let mut relevant: Vec<u32> = reach.iter().flat_map(|&f| self.conflicts.containing(f).iter().copied()).collect();
        relevant.sort_unstable();
        relevant.dedup();
        for &c in &relevant {
            let members = self.conflicts.get(c as usize);
            if members.iter().all(|f| p.selected.contains_key(f)) {
                p.solver.add_clause(members.iter().map(|&f| !p.selected(f)).collect());
            }
        }
        if kind == RepairKind::S {
            return p;
        }
        for &a in &facts {
            let mut clause = vec![p.selected(a)];
            for &x in attacks.attackers(a) {
                let y = Lit::pos(p.solver.new_var());
                clause.push(y);
                for &b in self.conflicts.get(x as usize) {
                    if b == a {
                        continue;
                    }
                    let sb = p.selected(b);
                    p.solver.add_clause(vec![!y, sb]);
                    if kind == RepairKind::C && !self.priority.prefers(b, a) {
                        let o = p.orient(b, a);
                        p.solver.add_clause(vec![!y, o]);
                    }
                }
            }
            p.solver.add_clause(clause);
        }
        p
    }

    /// Requires every given cause to lose one of its facts to a conflict
    /// whose other members are selected.
    fn contradict(&self, p: &mut Problem<'_>, kind: RepairKind, causes: &[FactSet]) {
        let attacks = self.attacks(kind);
        for cause in causes {
            let mut clause = Vec::new();
            for &a in cause {
                for &x in attacks.attackers(a) {
                    let z = Lit::pos(p.solver.new_var());
                    clause.push(z);
                    for &b in self.conflicts.get(x as usize) {
                        if b != a {
                            let sb = p.selected(b);
                            p.solver.add_clause(vec![!z, sb]);
                        }
                    }
                }
            }
            p.solver.add_clause(clause);
        }
    }

    /// Entailment of an answer with the given causes.
    pub fn decide(&self, semantics: Semantics, kind: RepairKind, causes: &[FactSet]) -> bool {
        if causes.is_empty() {
            return false;
        }
        let attacks = self.attacks(kind);
        match semantics {
            Semantics::Brave => {
                let reach = localize(causes, attacks, self.conflicts);
                let mut p = self.base(kind, &reach);
                let mut some = Vec::new();
                for cause in causes {
                    let w = p.solver.new_var();
                    some.push(Lit::pos(w));
                    for &f in cause {
                        let sf = p.selected(f);
                        p.solver.add_clause(vec![Lit::neg(w), sf]);
                    }
                }
                let mut order = some.clone();
                order.append(&mut p.order);
                p.order = order;
                p.solver.add_clause(some);
                p.solve()
            }
            Semantics::AR => {
                let reach = localize(causes, attacks, self.conflicts);
                let mut p = self.base(kind, &reach);
                self.contradict(&mut p, kind, causes);
                !p.solve()
            }
            Semantics::IAR => causes.iter().any(|cause| {
                let one = std::slice::from_ref(cause);
                let reach = localize(one, attacks, self.conflicts);
                let mut p = self.base(kind, &reach);
                self.contradict(&mut p, kind, one);
                !p.solve()
            }),
        }
    }
}
