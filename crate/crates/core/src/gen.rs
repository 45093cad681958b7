//! Seeded synthetic knowledge bases.
//!
//! Conflict facts are grouped under a shared key. A group of `g` facts on
//! predicate `Cj` yields every `j`-subset of the group as a conflict, so the
//! conflicts of one group overlap when `g > j`. Level `i` prefers facts with a
//! larger `Ri` score; a fact gets a score at each level with probability
//! `pref_density`.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub facts: usize,
    pub conflict_rate: f64,
    pub max_conflict_arity: usize,
    pub levels: u32,
    pub pref_density: f64,
    pub seed: u64,
}

/// Source texts of a generated knowledge base.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Fixture {
    pub dataset: String,
    pub meta: String,
    pub constraints: String,
    pub queries: String,
    pub rules: String,
}

impl Fixture {
    /// File names and contents, in a fixed order.
    pub fn files(&self) -> [(&'static str, &str); 5] {
        [
            ("gen.dkb", &self.dataset),
            ("gen.meta", &self.meta),
            ("gen.dc", &self.constraints),
            ("gen.ucq", &self.queries),
            ("gen.prefs", &self.rules),
        ]
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl GenParams {
    pub fn validate(&self) -> Result<(), Error> {
        if self.facts == 0 {
            return Err(invalid("the number of facts must be positive"));
        }
        if !(0.0..=1.0).contains(&self.conflict_rate) {
            return Err(invalid("the conflict rate must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.pref_density) {
            return Err(invalid("the preference density must lie in [0, 1]"));
        }
        if self.levels == 0 {
            return Err(invalid("at least one level is needed"));
        }
        let in_conflict = self.conflicting_facts();
        if in_conflict > 0 && self.max_conflict_arity < 2 {
            return Err(invalid("conflicts need a maximal arity of at least 2"));
        }
        if in_conflict == 1 {
            return Err(invalid("a conflict rate selecting a single fact cannot be realized"));
        }
        Ok(())
    }

    fn conflicting_facts(&self) -> usize {
        (self.conflict_rate * self.facts as f64).round() as usize
    }
}

struct Entry {
    pred: String,
    key: String,
    value: String,
}

/// Generates a knowledge base; equal parameters give identical text.
pub fn generate(params: &GenParams) -> Result<Fixture, Error> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let k = params.max_conflict_arity;
    let mut entries: Vec<Entry> = Vec::with_capacity(params.facts);
    let mut arities_used = vec![false; k + 1];

    let mut remaining = params.conflicting_facts();
    let mut group = 0usize;
    while remaining >= 2 {
        let j = rng.gen_range(2..=k.min(remaining));
        let mut g = rng.gen_range(j..=(j + 2).min(remaining));
        if remaining - g == 1 {
            g = if g < remaining { g + 1 } else { g - 1 };
            if g < j {
                break;
            }
        }
        arities_used[j] = true;
        for v in 0..g {
            entries.push(Entry { pred: format!("C{j}"), key: format!("g{group}"), value: format!("v{v}") });
        }
        remaining -= g;
        group += 1;
    }
    let free = params.facts - entries.len();
    for i in 0..free {
        entries.push(Entry { pred: "F".into(), key: format!("k{i}"), value: format!("v{}", rng.gen_range(0..8)) });
    }
    entries.shuffle(&mut rng);

    let mut out = Fixture::default();
    let _ = writeln!(
        out.dataset,
        "# generated: facts={} conflict_rate={} max_conflict_arity={} levels={} pref_density={} seed={}",
        params.facts, params.conflict_rate, params.max_conflict_arity, params.levels, params.pref_density, params.seed
    );
    for (i, e) in entries.iter().enumerate() {
        let _ = writeln!(out.dataset, "{} | {}({}, {})", i + 1, e.pred, e.key, e.value);
    }
    let score_range = (params.facts as i64).max(10);
    for level in 1..=params.levels {
        for (i, e) in entries.iter().enumerate() {
            if e.pred != "F" && rng.gen_bool(params.pref_density) {
                let _ = writeln!(out.meta, "R{level}(#{}, {})", i + 1, rng.gen_range(0..score_range));
            }
        }
    }
    for (j, used) in arities_used.iter().enumerate() {
        if !used {
            continue;
        }
        let atoms: Vec<String> = (1..=j).map(|i| format!("C{j}(x, y{i})")).collect();
        let mut neq = Vec::new();
        for a in 1..=j {
            for b in a + 1..=j {
                neq.push(format!("y{a} != y{b}"));
            }
        }
        let _ = writeln!(out.constraints, "{}, {} -> bot", atoms.join(", "), neq.join(", "));
        let _ = writeln!(out.queries, "key(x) <- C{j}(x, y)");
    }
    let _ = writeln!(out.queries, "key(x) <- F(x, y)");
    let _ = writeln!(out.queries, "val(x, y) <- F(x, y)");
    for (j, used) in arities_used.iter().enumerate() {
        if *used {
            let _ = writeln!(out.queries, "val(x, y) <- C{j}(x, y)");
        }
    }
    for level in 1..=params.levels {
        if level > 1 {
            out.rules.push('\n');
        }
        let _ = writeln!(out.rules, "[level {level}]");
        let _ = writeln!(out.rules, "pref(x1, x2) <- R{level}(x1, s1), R{level}(x2, s2), s2 < s1");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(facts: usize, r: f64, k: usize) -> GenParams {
        GenParams { facts, conflict_rate: r, max_conflict_arity: k, levels: 2, pref_density: 0.5, seed: 3 }
    }

    #[test]
    fn same_seed_same_text() {
        let p = params(200, 0.3, 3);
        assert_eq!(generate(&p).unwrap(), generate(&p).unwrap());
        assert_ne!(generate(&p).unwrap(), generate(&GenParams { seed: 4, ..p }).unwrap());
    }

    #[test]
    fn infeasible_parameters_are_rejected() {
        assert!(generate(&params(0, 0.3, 2)).is_err());
        assert!(generate(&params(10, 1.5, 2)).is_err());
        assert!(generate(&params(10, 0.5, 1)).is_err());
        assert!(generate(&params(10, 0.1, 2)).is_err());
        assert!(generate(&GenParams { levels: 0, ..params(10, 0.5, 2) }).is_err());
        assert!(generate(&params(10, 0.0, 1)).is_ok());
    }
}
