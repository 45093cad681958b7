//! Serializers producing text that the parsers read back to equal values.

use std::collections::BTreeMap;
use std::fmt::{self, Write};

use super::syntax::{Atom, DenialConstraint, Literal, PredTerm, PreferenceRule, QueryRewriting, Term};
use super::{Constant, Dataset, MetaArg, MetaDatabase, Taxonomy};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Anon => f.write_str("_"),
            Term::Const(Constant::Int(i)) => write!(f, "{i}"),
            Term::Const(Constant::Sym(s)) => write!(f, "\"{s}\""),
        }
    }
}

impl fmt::Display for PredTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredTerm::Name(n) => f.write_str(n),
            PredTerm::Var(v) => write!(f, "%{v}"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Atom { atom, negated: false } => write!(f, "{atom}"),
            Literal::Atom { atom, negated: true } => write!(f, "not {atom}"),
            Literal::Sub(a, b) => write!(f, "sub({a},{b})"),
            Literal::Cmp(a, op, b) => write!(f, "{a} {} {b}", op.symbol()),
            Literal::IdBind { var, atom } => write!(f, "{var} = id[{atom}]"),
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for DenialConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> bot", join(&self.body))
    }
}

impl fmt::Display for PreferenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pref({},{}) <- {}", self.head.0, self.head.1, join(&self.body))
    }
}

pub fn write_dataset(d: &Dataset) -> String {
    let mut out = String::new();
    for (_, id, fact) in d.iter() {
        let _ = writeln!(out, "{id} | {fact}");
    }
    out
}

pub fn write_meta(m: &MetaDatabase, d: &Dataset) -> String {
    let mut out = String::new();
    for fact in m.facts() {
        let args: Vec<String> = fact
            .args
            .iter()
            .map(|a| match a {
                MetaArg::Const(c) => c.to_string(),
                MetaArg::Id(ix) => format!("#{}", d.id(*ix)),
            })
            .collect();
        let _ = writeln!(out, "{}({})", fact.predicate, args.join(", "));
    }
    out
}

pub fn write_constraints(cs: &[DenialConstraint]) -> String {
    cs.iter().map(|c| format!("{c}\n")).collect()
}

pub fn write_queries(qs: &[QueryRewriting]) -> String {
    let mut out = String::new();
    for q in qs {
        let head: Vec<&str> = q.answer.iter().map(|v| &**v).collect();
        for body in &q.bodies {
            let _ = writeln!(out, "{}({}) <- {}", q.name, head.join(","), join(body));
        }
    }
    out
}

pub fn write_rules(rules: &[PreferenceRule]) -> String {
    let mut by_level: BTreeMap<u32, Vec<&PreferenceRule>> = BTreeMap::new();
    for r in rules {
        by_level.entry(r.level).or_default().push(r);
    }
    let mut out = String::new();
    for (level, rs) in by_level {
        let _ = writeln!(out, "[level {level}]");
        for r in rs {
            let _ = writeln!(out, "{r}");
        }
    }
    out
}

pub fn write_taxonomy(t: &Taxonomy) -> String {
    t.pairs().map(|(a, b)| format!("{a} < {b}\n")).collect()
}
