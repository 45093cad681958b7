//! Complete backtracking search over boolean variables with unit propagation
//! (two watched literals) and a pluggable theory check.

/// A literal: variable index and polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(var: u32) -> Lit {
        Lit(var << 1)
    }

    pub fn neg(var: u32) -> Lit {
        Lit((var << 1) | 1)
    }

    pub fn new(var: u32, value: bool) -> Lit {
        if value {
            Lit::pos(var)
        } else {
            Lit::neg(var)
        }
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    /// The value this literal gives its variable when true.
    pub fn polarity(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        self.negate()
    }
}

/// Side constraints checked on every assignment.
pub trait Theory {
    /// Records an assignment; returns false if it violates the theory.
    /// Every recorded assignment is later undone with `unassign`, in reverse order.
    fn assign(&mut self, var: u32, value: bool) -> bool;
    fn unassign(&mut self, var: u32, value: bool);
}

/// The theory with no constraints.
pub struct NoTheory;

impl Theory for NoTheory {
    fn assign(&mut self, _: u32, _: bool) -> bool {
        true
    }

    fn unassign(&mut self, _: u32, _: bool) {}
}

#[derive(Clone, Debug, Default)]
pub struct Solver {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
    units: Vec<Lit>,
    trivially_unsat: bool,
}

const UNASSIGNED: i8 = -1;

struct Level {
    trail_pos: usize,
    decision: Lit,
    flipped: bool,
}

struct Search<'s, T: Theory + ?Sized> {
    clauses: &'s mut [Vec<Lit>],
    watches: Vec<Vec<usize>>,
    values: Vec<i8>,
    trail: Vec<Lit>,
    qhead: usize,
    theory: &'s mut T,
}

impl<T: Theory + ?Sized> Search<'_, T> {
    fn value(&self, l: Lit) -> i8 {
        let v = self.values[l.var() as usize];
        if v == UNASSIGNED {
            UNASSIGNED
        } else {
            (v == 1) as i8 ^ (!l.polarity()) as i8
        }
    }

    /// Assigns a literal; false on theory conflict.
    fn enqueue(&mut self, l: Lit) -> bool {
        self.values[l.var() as usize] = l.polarity() as i8;
        self.trail.push(l);
        self.theory.assign(l.var(), l.polarity())
    }

    fn undo_to(&mut self, pos: usize) {
        while self.trail.len() > pos {
            let l = self.trail.pop().unwrap();
            self.values[l.var() as usize] = UNASSIGNED;
            self.theory.unassign(l.var(), l.polarity());
        }
        self.qhead = self.qhead.min(pos);
    }

    /// Unit propagation; false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let l = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = l.negate();
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut ok = true;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = {
                    let v = self.values[first.var() as usize];
                    if v == UNASSIGNED {
                        UNASSIGNED
                    } else {
                        (v == 1) as i8 ^ (!first.polarity()) as i8
                    }
                };
                if first_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let c = clause[k];
                    let v = self.values[c.var() as usize];
                    let cv = if v == UNASSIGNED { UNASSIGNED } else { (v == 1) as i8 ^ (!c.polarity()) as i8 };
                    if cv != 0 {
                        clause.swap(1, k);
                        self.watches[clause[1].code()].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    ws.swap_remove(i);
                    continue;
                }
                i += 1;
                if first_val == 0 {
                    ok = false;
                    break;
                }
                if !self.enqueue(first) {
                    ok = false;
                    break;
                }
            }
            let existing = std::mem::take(&mut self.watches[false_lit.code()]);
            ws.extend(existing);
            self.watches[false_lit.code()] = ws;
            if !ok {
                return false;
            }
        }
        true
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver::default()
    }

    pub fn new_var(&mut self) -> u32 {
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Adds a disjunction. Duplicate literals are merged and tautologies dropped.
    pub fn add_clause(&mut self, mut lits: Vec<Lit>) {
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        match lits.len() {
            0 => self.trivially_unsat = true,
            1 => self.units.push(lits[0]),
            _ => self.clauses.push(lits),
        }
    }

    /// Searches for a model. Decisions follow `order` (each literal is tried
    /// first as given); variables missing from `order` are decided afterwards,
    /// positively first.
    pub fn solve<T: Theory + ?Sized>(&mut self, order: &[Lit], theory: &mut T) -> Option<Vec<bool>> {
        if self.trivially_unsat {
            return None;
        }
        let n = self.num_vars as usize;
        let mut watches = vec![Vec::new(); 2 * n];
        for (ci, c) in self.clauses.iter().enumerate() {
            watches[c[0].code()].push(ci);
            watches[c[1].code()].push(ci);
        }
        let mut seen = vec![false; n];
        let mut decisions: Vec<Lit> = Vec::with_capacity(n);
        for &l in order {
            if !seen[l.var() as usize] {
                seen[l.var() as usize] = true;
                decisions.push(l);
            }
        }
        for v in 0..n as u32 {
            if !seen[v as usize] {
                decisions.push(Lit::pos(v));
            }
        }
        let mut s = Search {
            clauses: &mut self.clauses,
            watches,
            values: vec![UNASSIGNED; n],
            trail: Vec::new(),
            qhead: 0,
            theory,
        };
        let mut ok = true;
        for &u in &self.units {
            match s.value(u) {
                1 => {}
                0 => {
                    ok = false;
                    break;
                }
                _ => {
                    if !s.enqueue(u) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if !ok || !s.propagate() {
            s.undo_to(0);
            return None;
        }
        let mut levels: Vec<Level> = Vec::new();
        let mut cursor = 0usize;
        loop {
            while cursor < decisions.len() && s.values[decisions[cursor].var() as usize] != UNASSIGNED {
                cursor += 1;
            }
            if cursor == decisions.len() {
                let model = s.values.iter().map(|&v| v == 1).collect();
                s.undo_to(0);
                return Some(model);
            }
            let d = decisions[cursor];
            levels.push(Level { trail_pos: s.trail.len(), decision: d, flipped: false });
            let mut consistent = s.enqueue(d) && s.propagate();
            while !consistent {
                let Some(level) = levels.pop() else {
                    s.undo_to(0);
                    return None;
                };
                s.undo_to(level.trail_pos);
                cursor = 0;
                if level.flipped {
                    continue;
                }
                let flip = level.decision.negate();
                levels.push(Level { trail_pos: level.trail_pos, decision: flip, flipped: true });
                consistent = s.enqueue(flip) && s.propagate();
            }
        }
    }
}
