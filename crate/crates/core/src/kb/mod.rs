//! Knowledge-base domain model: datasets with fact identifiers, meta-databases,
//! taxonomies, denial constraints, query rewritings and preference rules.
//!
//! Every artifact here is immutable once built and can be shared freely
//! between threads.

mod display;
mod parse;
mod syntax;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

pub use display::{write_constraints, write_dataset, write_meta, write_queries, write_rules, write_taxonomy};
pub use parse::{parse_constraints, parse_dataset, parse_meta, parse_queries, parse_rules, parse_taxonomy};
pub use syntax::{
    Atom, CmpOp, DenialConstraint, Literal, PredTerm, PreferenceRule, QueryRewriting, Term, Var,
};

use crate::error::{Error, ParseError};

/// Interned-by-`Arc` name of a predicate.
pub type Name = Arc<str>;

/// A data constant, classified once at construction.
///
/// Ordering is total: integers compare numerically, symbols by code point,
/// and every integer sorts before every symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Int(i64),
    Sym(Arc<str>),
}

impl Constant {
    /// Classifies a lexeme: optional sign followed by digits is an integer.
    /// Returns `None` for an integer lexeme that does not fit in 64 bits.
    pub fn classify(lexeme: &str) -> Option<Constant> {
        if is_integer_lexeme(lexeme) {
            lexeme.parse::<i64>().ok().map(Constant::Int)
        } else {
            Some(Constant::Sym(Arc::from(lexeme)))
        }
    }

    pub fn sym(s: &str) -> Constant {
        Constant::Sym(Arc::from(s))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Constant::Int(i) => Some(*i),
            Constant::Sym(_) => None,
        }
    }
}

pub(crate) fn is_integer_lexeme(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

impl Ord for Constant {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Constant::Int(a), Constant::Int(b)) => a.cmp(b),
            (Constant::Int(_), Constant::Sym(_)) => Ordering::Less,
            (Constant::Sym(_), Constant::Int(_)) => Ordering::Greater,
            (Constant::Sym(a), Constant::Sym(b)) => a.as_bytes().cmp(b.as_bytes()),
        }
    }
}

impl PartialOrd for Constant {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Int(i) => write!(f, "{i}"),
            Constant::Sym(s) => f.write_str(s),
        }
    }
}

/// User-facing identifier of a dataset fact.
///
/// Identifiers order like constants (numeric identifiers numerically, before
/// any non-numeric one), which keeps `10` after `9` in every sorted output.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactId(Arc<str>);

impl FactId {
    pub fn new(token: &str) -> FactId {
        FactId(Arc::from(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn sort_key(&self) -> Option<i64> {
        if is_integer_lexeme(&self.0) {
            self.0.parse().ok()
        } else {
            None
        }
    }
}

impl Ord for FactId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.sort_key(), other.sort_key()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.as_bytes().cmp(other.0.as_bytes()),
        }
    }
}

impl PartialOrd for FactId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Dense position of a fact inside its [`Dataset`].
///
/// Facts are stored sorted by [`FactId`], so comparing two `FactIx` of the
/// same dataset agrees with comparing their identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactIx(pub u32);

impl FactIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A ground fact `P(c1, ..., cn)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub predicate: Name,
    pub args: Vec<Constant>,
}

impl Fact {
    pub fn new(predicate: &str, args: Vec<Constant>) -> Fact {
        Fact { predicate: Arc::from(predicate), args }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Value a variable can be bound to during matching.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Const(Constant),
    Fact(FactIx),
    Pred(Name),
}

impl Value {
    fn kind_rank(&self) -> u8 {
        match self {
            Value::Const(Constant::Int(_)) => 0,
            Value::Const(Constant::Sym(_)) => 1,
            Value::Fact(_) => 2,
            Value::Pred(_) => 3,
        }
    }

    /// Total order used by comparison atoms. Values of different kinds never
    /// raise an error: integers < symbols < fact ids < predicate names.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Const(a), Value::Const(b)) => a.cmp(b),
            (Value::Fact(a), Value::Fact(b)) => a.cmp(b),
            (Value::Pred(a), Value::Pred(b)) => a.as_bytes().cmp(b.as_bytes()),
            _ => self.kind_rank().cmp(&other.kind_rank()),
        }
    }
}

/// Hash index over one predicate's tuples, by argument position.
#[derive(Clone, Debug, Default)]
pub(crate) struct Relation {
    pub arity: usize,
    pub rows: Vec<u32>,
    pub columns: Vec<HashMap<Value, Vec<u32>>>,
}

impl Relation {
    fn new(arity: usize) -> Relation {
        Relation { arity, rows: Vec::new(), columns: vec![HashMap::new(); arity] }
    }

    fn insert(&mut self, row: u32, args: impl Iterator<Item = Value>) {
        self.rows.push(row);
        for (pos, v) in args.enumerate() {
            self.columns[pos].entry(v).or_default().push(row);
        }
    }

    /// Smallest candidate row list given some bound positions.
    pub fn lookup(&self, bound: &[(usize, Value)]) -> &[u32] {
        let mut best: &[u32] = &self.rows;
        for (pos, v) in bound {
            match self.columns[*pos].get(v) {
                Some(rows) if rows.len() < best.len() => best = rows,
                Some(_) => {}
                None => return &[],
            }
        }
        best
    }
}

/// The data side of a knowledge base: an injective map from identifiers to facts.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    ids: Vec<FactId>,
    facts: Vec<Fact>,
    by_id: HashMap<FactId, FactIx>,
    by_fact: HashMap<Fact, FactIx>,
    relations: HashMap<Name, Relation>,
}

impl Dataset {
    /// Builds a dataset, rejecting duplicate ids, duplicate facts and arity clashes.
    pub fn from_facts(entries: impl IntoIterator<Item = (FactId, Fact)>) -> Result<Dataset, Error> {
        let mut entries: Vec<(FactId, Fact)> = entries.into_iter().collect();
        let mut seen_ids = HashSet::new();
        let mut seen_facts = HashSet::new();
        let mut arities: HashMap<Name, usize> = HashMap::new();
        for (id, fact) in &entries {
            if !seen_ids.insert(id.clone()) {
                return Err(Error::Validation(format!("duplicate fact id `{id}`")));
            }
            if !seen_facts.insert(fact.clone()) {
                return Err(Error::Validation(format!("fact {fact} has two ids")));
            }
            if let Some(prev) = arities.insert(fact.predicate.clone(), fact.args.len()) {
                if prev != fact.args.len() {
                    return Err(Error::Validation(format!(
                        "predicate {} used with arities {prev} and {}",
                        fact.predicate,
                        fact.args.len()
                    )));
                }
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut ds = Dataset::default();
        for (i, (id, fact)) in entries.into_iter().enumerate() {
            let ix = FactIx(i as u32);
            ds.by_id.insert(id.clone(), ix);
            ds.by_fact.insert(fact.clone(), ix);
            ds.relations
                .entry(fact.predicate.clone())
                .or_insert_with(|| Relation::new(fact.args.len()))
                .insert(ix.0, fact.args.iter().cloned().map(Value::Const));
            ds.ids.push(id);
            ds.facts.push(fact);
        }
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn fact(&self, ix: FactIx) -> &Fact {
        &self.facts[ix.index()]
    }

    pub fn id(&self, ix: FactIx) -> &FactId {
        &self.ids[ix.index()]
    }

    pub fn lookup_id(&self, id: &FactId) -> Option<FactIx> {
        self.by_id.get(id).copied()
    }

    pub fn lookup_fact(&self, fact: &Fact) -> Option<FactIx> {
        self.by_fact.get(fact).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FactIx, &FactId, &Fact)> {
        self.ids
            .iter()
            .zip(&self.facts)
            .enumerate()
            .map(|(i, (id, f))| (FactIx(i as u32), id, f))
    }

    pub fn indices(&self) -> impl Iterator<Item = FactIx> {
        (0..self.facts.len() as u32).map(FactIx)
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Name> {
        self.relations.keys()
    }

    pub fn arity(&self, predicate: &str) -> Option<usize> {
        self.relations.get(predicate).map(|r| r.arity)
    }

    pub(crate) fn relation(&self, predicate: &str) -> Option<&Relation> {
        self.relations.get(predicate)
    }

    /// Identifiers of a set of facts, sorted.
    pub fn ids_of(&self, facts: &[FactIx]) -> Vec<FactId> {
        let mut v: Vec<FactIx> = facts.to_vec();
        v.sort();
        v.into_iter().map(|f| self.id(f).clone()).collect()
    }
}

/// An argument of a meta-fact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MetaArg {
    Const(Constant),
    Id(FactIx),
}

impl MetaArg {
    fn value(&self) -> Value {
        match self {
            MetaArg::Const(c) => Value::Const(c.clone()),
            MetaArg::Id(f) => Value::Fact(*f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MetaFact {
    pub predicate: Name,
    pub args: Vec<MetaArg>,
}

/// Side facts about dataset facts, referring to them by identifier.
///
/// For each predicate the set of identifier positions is fixed by its first
/// occurrence and enforced for every later fact.
#[derive(Clone, Debug, Default)]
pub struct MetaDatabase {
    facts: Vec<MetaFact>,
    id_positions: HashMap<Name, Vec<bool>>,
    relations: HashMap<Name, Relation>,
}

impl MetaDatabase {
    pub fn from_facts(facts: impl IntoIterator<Item = MetaFact>) -> Result<MetaDatabase, Error> {
        let mut meta = MetaDatabase::default();
        let mut seen = HashSet::new();
        for fact in facts {
            let pattern: Vec<bool> = fact.args.iter().map(|a| matches!(a, MetaArg::Id(_))).collect();
            match meta.id_positions.get(&fact.predicate) {
                Some(p) if *p != pattern => {
                    return Err(Error::Validation(format!(
                        "meta predicate {} used with inconsistent identifier positions",
                        fact.predicate
                    )))
                }
                Some(_) => {}
                None => {
                    meta.id_positions.insert(fact.predicate.clone(), pattern);
                }
            }
            if !seen.insert(fact.clone()) {
                continue;
            }
            let row = meta.facts.len() as u32;
            meta.relations
                .entry(fact.predicate.clone())
                .or_insert_with(|| Relation::new(fact.args.len()))
                .insert(row, fact.args.iter().map(MetaArg::value));
            meta.facts.push(fact);
        }
        Ok(meta)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn facts(&self) -> &[MetaFact] {
        &self.facts
    }

    pub fn contains_predicate(&self, predicate: &str) -> bool {
        self.relations.contains_key(predicate)
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Name> {
        self.relations.keys()
    }

    /// Identifier positions of a predicate, if it occurs.
    pub fn id_positions(&self, predicate: &str) -> Option<&[bool]> {
        self.id_positions.get(predicate).map(|v| v.as_slice())
    }

    pub(crate) fn relation(&self, predicate: &str) -> Option<&Relation> {
        self.relations.get(predicate)
    }

    pub(crate) fn arg_value(&self, row: u32, pos: usize) -> Value {
        self.facts[row as usize].args[pos].value()
    }
}

/// User-supplied subsumptions between predicate names.
///
/// Rules see the reflexive-transitive closure of the stored pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Taxonomy {
    pairs: BTreeSet<(Name, Name)>,
    supers: HashMap<Name, BTreeSet<Name>>,
}

impl Taxonomy {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Name)>) -> Taxonomy {
        let pairs: BTreeSet<(Name, Name)> = pairs.into_iter().collect();
        let mut direct: HashMap<Name, Vec<Name>> = HashMap::new();
        for (a, b) in &pairs {
            direct.entry(a.clone()).or_default().push(b.clone());
        }
        let mut supers = HashMap::new();
        for start in direct.keys() {
            let mut seen: BTreeSet<Name> = BTreeSet::new();
            let mut stack = vec![start.clone()];
            while let Some(p) = stack.pop() {
                for q in direct.get(&p).into_iter().flatten() {
                    if seen.insert(q.clone()) {
                        stack.push(q.clone());
                    }
                }
            }
            supers.insert(start.clone(), seen);
        }
        Taxonomy { pairs, supers }
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Name, Name)> {
        self.pairs.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Closure test, reflexive on every name.
    pub fn subsumed(&self, sub: &str, sup: &str) -> bool {
        sub == sup || self.supers.get(sub).is_some_and(|s| s.contains(sup))
    }

    /// Names mentioned by some stored pair.
    pub fn names(&self) -> BTreeSet<Name> {
        self.pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect()
    }
}

/// Dataset, meta-database and taxonomy bundled for rule and query evaluation.
#[derive(Clone, Copy, Debug)]
pub struct KbView<'a> {
    pub dataset: &'a Dataset,
    pub meta: &'a MetaDatabase,
    pub taxonomy: &'a Taxonomy,
}

impl<'a> KbView<'a> {
    pub fn new(dataset: &'a Dataset, meta: &'a MetaDatabase, taxonomy: &'a Taxonomy) -> Self {
        KbView { dataset, meta, taxonomy }
    }

    /// Predicate names a predicate variable may range over.
    pub fn predicate_domain(&self) -> BTreeSet<Name> {
        let mut names = self.taxonomy.names();
        names.extend(self.dataset.predicates().cloned());
        names
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Error {
        Error::Parse(e)
    }
}
