use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Constant, Name};
use crate::error::Error;

/// Variable name. Term variables and predicate variables live in separate
/// namespaces; the latter are written with a `%` prefix.
pub type Var = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Const(Constant),
    /// `_`: a fresh variable at each occurrence.
    Anon,
}

impl Term {
    pub fn var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
}

/// Predicate position of an atom or `sub` literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PredTerm {
    Name(Name),
    Var(Var),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: PredTerm,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn named(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: PredTerm::Name(Arc::from(pred)), args }
    }

    pub fn name(&self) -> Option<&Name> {
        match &self.pred {
            PredTerm::Name(n) => Some(n),
            PredTerm::Var(_) => None,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.args.iter().filter_map(Term::var)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    /// A dataset or meta atom, possibly under negation as failure.
    Atom { atom: Atom, negated: bool },
    /// `sub(p, q)`: `p` is subsumed by `q` in the taxonomy closure.
    Sub(PredTerm, PredTerm),
    Cmp(Term, CmpOp, Term),
    /// `x = id[P(t...)]`.
    IdBind { var: Var, atom: Atom },
}

impl Literal {
    pub fn positive(atom: Atom) -> Literal {
        Literal::Atom { atom, negated: false }
    }

    pub fn negative(atom: Atom) -> Literal {
        Literal::Atom { atom, negated: true }
    }
}

/// `body -> bot`: the facts matching the body cannot hold together.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DenialConstraint {
    pub body: Vec<Literal>,
}

impl DenialConstraint {
    pub fn new(body: Vec<Literal>) -> Result<DenialConstraint, Error> {
        let dc = DenialConstraint { body };
        dc.validate()?;
        Ok(dc)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(|l| match l {
            Literal::Atom { atom, .. } => Some(atom),
            _ => None,
        })
    }

    pub fn validate(&self) -> Result<(), Error> {
        let mut bound = BTreeSet::new();
        let mut atoms = 0;
        for lit in &self.body {
            match lit {
                Literal::Atom { atom, negated: false } if atom.name().is_some() => {
                    atoms += 1;
                    bound.extend(atom.vars().cloned());
                }
                Literal::Cmp(..) => {}
                _ => {
                    return Err(Error::Validation(
                        "denial constraints allow only relational atoms and comparisons".into(),
                    ))
                }
            }
        }
        if atoms == 0 {
            return Err(Error::Validation("denial constraint without relational atom".into()));
        }
        check_comparisons(&self.body, &bound)
    }
}

fn check_comparisons(body: &[Literal], bound: &BTreeSet<Var>) -> Result<(), Error> {
    for lit in body {
        if let Literal::Cmp(a, _, b) = lit {
            for t in [a, b] {
                match t {
                    Term::Var(v) if !bound.contains(v) => {
                        return Err(Error::Validation(format!(
                            "unsafe variable `{v}`: it occurs in no positive atom"
                        )))
                    }
                    Term::Anon => {
                        return Err(Error::Validation("`_` cannot appear in a comparison".into()))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(())
}

/// A UCQ `name(x...) <- body1 | body2 | ...` standing for the rewriting of a query.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QueryRewriting {
    pub name: Name,
    pub answer: Vec<Var>,
    pub bodies: Vec<Vec<Atom>>,
}

impl QueryRewriting {
    pub fn validate(&self) -> Result<(), Error> {
        if self.bodies.is_empty() {
            return Err(Error::Validation(format!("query {} has no body", self.name)));
        }
        for body in &self.bodies {
            if body.is_empty() {
                return Err(Error::Validation(format!("query {} has an empty body", self.name)));
            }
            if let Some(a) = body.iter().find(|a| a.name().is_none()) {
                return Err(Error::Validation(format!(
                    "query {} uses a predicate variable in {a:?}",
                    self.name
                )));
            }
            for v in &self.answer {
                if !body.iter().any(|a| a.vars().any(|w| w == v)) {
                    return Err(Error::Validation(format!(
                        "answer variable `{v}` of query {} is missing from a body",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// The body as literals, for the matcher.
    pub fn body_literals(&self, i: usize) -> Vec<Literal> {
        self.bodies[i].iter().cloned().map(Literal::positive).collect()
    }
}

/// `pref(x1, x2) <- body`, assigned to a priority level (1 is most important).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreferenceRule {
    pub level: u32,
    pub head: (Var, Var),
    pub body: Vec<Literal>,
}

impl PreferenceRule {
    /// Checks head binding and comparison safety. Whether a head variable sits
    /// at an identifier position of a meta atom is checked once the
    /// meta-database is known.
    pub fn validate(&self) -> Result<(), Error> {
        if self.level == 0 {
            return Err(Error::Validation("rule levels start at 1".into()));
        }
        let mut bound: BTreeSet<Var> = BTreeSet::new();
        let mut id_bound: BTreeSet<Var> = BTreeSet::new();
        for lit in &self.body {
            match lit {
                Literal::Atom { atom, negated: false } => {
                    bound.extend(atom.vars().cloned());
                    id_bound.extend(atom.vars().cloned());
                }
                Literal::IdBind { var, atom } => {
                    bound.insert(var.clone());
                    bound.extend(atom.vars().cloned());
                    id_bound.insert(var.clone());
                }
                _ => {}
            }
        }
        for h in [&self.head.0, &self.head.1] {
            if !id_bound.contains(h) {
                return Err(Error::Validation(format!(
                    "head variable `{h}` is not bound by an id binding or a meta atom"
                )));
            }
        }
        check_comparisons(&self.body, &bound)
    }
}
