//! Logic-program text for external ASP solvers: the input encoding of a
//! knowledge base, the priority programs for each strategy, conflict
//! minimization and the semantics building blocks.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::engine::KnowledgeBase;
use crate::error::Error;
use crate::kb::{Atom, CmpOp, Constant, Dataset, Literal, MetaArg, Name, PredTerm, PreferenceRule, Term, Var};
use crate::priority::Strategy;
use crate::semantics::{RepairKind, Semantics};

/// Predicates used by the generated programs; dataset and meta predicates
/// never map onto these.
const RESERVED: &[&str] = &[
    "data", "conf_init", "inconf_init", "conf", "inconf", "cause", "incause", "pref_init", "pref", "level", "not",
    "trans_cl", "blocked", "cycle", "rel", "succ", "trans_cl_bis", "gamma", "gamma_plus", "unstopped", "included",
    "minimal", "att", "cause_fact", "reachable", "conf_rel", "rem", "in", "sat", "invalid_conf", "neg", "valid",
    "invalid_att", "pref_comp", "trans_cl_comp",
];

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z')) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Solver-safe names for predicates and constants.
#[derive(Clone, Debug, Default)]
pub struct NameMap {
    preds: BTreeMap<Name, String>,
    consts: BTreeMap<Constant, String>,
}

impl NameMap {
    fn build(kb: &KnowledgeBase) -> Result<NameMap, Error> {
        let mut preds: BTreeSet<Name> = kb.dataset.predicates().cloned().collect();
        preds.extend(kb.meta.predicates().cloned());
        preds.extend(kb.taxonomy.names());
        let mut consts: BTreeSet<Constant> = BTreeSet::new();
        for (_, id, fact) in kb.dataset.iter() {
            consts.insert(id_constant(id.as_str()));
            consts.extend(fact.args.iter().cloned());
        }
        for m in kb.meta.facts() {
            for a in &m.args {
                if let MetaArg::Const(c) = a {
                    consts.insert(c.clone());
                }
            }
        }
        let bodies = kb
            .constraints
            .iter()
            .map(|c| &c.body)
            .chain(kb.rules.iter().map(|r| &r.body))
            .flatten()
            .cloned()
            .chain(kb.queries.iter().flat_map(|q| q.bodies.iter().flatten().cloned().map(Literal::positive)));
        for lit in bodies {
            let (atoms, terms): (Vec<&Atom>, Vec<&Term>) = match &lit {
                Literal::Atom { atom, .. } | Literal::IdBind { atom, .. } => (vec![atom], vec![]),
                Literal::Cmp(a, _, b) => (vec![], vec![a, b]),
                Literal::Sub(..) => (vec![], vec![]),
            };
            for a in atoms {
                if let Some(n) = a.name() {
                    preds.insert(n.clone());
                }
                consts.extend(a.args.iter().filter_map(|t| match t {
                    Term::Const(c) => Some(c.clone()),
                    _ => None,
                }));
            }
            consts.extend(terms.into_iter().filter_map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                _ => None,
            }));
            if let Literal::Sub(a, b) = &lit {
                for p in [a, b] {
                    if let PredTerm::Name(n) = p {
                        preds.insert(n.clone());
                    }
                }
            }
        }

        let mut map = NameMap::default();
        let mut taken: HashSet<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        for p in &preds {
            let base: String =
                p.to_lowercase().chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
            let mut name = base.clone();
            while !is_ident(&name) || taken.contains(&name) {
                name = format!("p_{name}");
            }
            taken.insert(name.to_lowercase());
            map.preds.insert(p.clone(), name);
        }

        let mut taken: HashSet<String> = HashSet::from(["not".to_string()]);
        for c in &consts {
            if let Constant::Sym(s) = c {
                if is_ident(s) && &**s != "not" {
                    taken.insert(s.to_string());
                    map.consts.insert(c.clone(), s.to_string());
                }
            }
        }
        for c in &consts {
            if map.consts.contains_key(c) {
                continue;
            }
            let text = match c {
                Constant::Int(i) => i.to_string(),
                Constant::Sym(s) => {
                    let lower = s.to_lowercase();
                    if is_ident(&lower) {
                        let mut name = lower;
                        while taken.contains(&name) {
                            name = format!("c_{name}");
                        }
                        taken.insert(name.clone());
                        name
                    } else if s.chars().any(char::is_control) {
                        return Err(Error::Validation(format!("constant `{s}` cannot be written as a solver term")));
                    } else {
                        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
                    }
                }
            };
            map.consts.insert(c.clone(), text);
        }
        Ok(map)
    }

    pub fn predicate(&self, p: &str) -> &str {
        self.preds.get(p).map(String::as_str).expect("predicate collected")
    }

    pub fn constant(&self, c: &Constant) -> &str {
        self.consts.get(c).map(String::as_str).expect("constant collected")
    }

    fn id(&self, id: &str) -> &str {
        self.constant(&id_constant(id))
    }

    /// `%`-comment lines mapping solver names back to the originals: every
    /// predicate and each renamed constant.
    pub fn comments(&self) -> String {
        let mut out = String::new();
        for (orig, name) in &self.preds {
            let _ = writeln!(out, "% predicate {name} = {orig}");
        }
        for (orig, name) in &self.consts {
            let plain = match orig {
                Constant::Int(i) => i.to_string(),
                Constant::Sym(s) => s.to_string(),
            };
            if *name != plain {
                let _ = writeln!(out, "% constant {name} = {plain}");
            }
        }
        out
    }
}

/// Identifiers in canonical integer form become integers, others symbols.
fn id_constant(id: &str) -> Constant {
    match Constant::classify(id) {
        Some(Constant::Int(i)) if i.to_string() == id => Constant::Int(i),
        _ => Constant::sym(id),
    }
}

/// The input encoding of a knowledge base.
#[derive(Clone, Debug, Default)]
pub struct InputPrograms {
    pub mapping: String,
    pub data: String,
    pub meta: String,
    pub constraints: String,
    /// One program per query, keyed by query name.
    pub queries: Vec<(String, String)>,
    pub rules: String,
    /// Rules a strict solver would reject as unsafe.
    pub warnings: Vec<String>,
}

fn tuple(items: &[String]) -> String {
    match items.len() {
        1 => format!("({},)", items[0]),
        _ => format!("({})", items.join(", ")),
    }
}

fn capitalize(v: &str) -> String {
    let mut c = v.chars();
    c.next().map(|f| f.to_ascii_uppercase().to_string() + c.as_str()).unwrap_or_default()
}

/// Per-rule variable naming: user variables are capitalized, helper
/// variables are fresh.
struct Vars {
    used: HashSet<String>,
}

impl Vars {
    fn new<'a>(vars: impl IntoIterator<Item = &'a Var>) -> Vars {
        Vars { used: vars.into_iter().map(|v| capitalize(v)).collect() }
    }

    fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        while self.used.contains(&name) {
            name = format!("{name}_");
        }
        self.used.insert(name.clone());
        name
    }
}

fn term(names: &NameMap, t: &Term) -> String {
    match t {
        Term::Var(v) => capitalize(v),
        Term::Const(c) => names.constant(c).to_string(),
        Term::Anon => "_".to_string(),
    }
}

fn atom_text(names: &NameMap, pred: &str, first: Option<&str>, args: &[Term]) -> String {
    let mut parts: Vec<String> = first.map(str::to_string).into_iter().collect();
    parts.extend(args.iter().map(|t| term(names, t)));
    format!("{}({})", names.predicate(pred), parts.join(", "))
}

fn cmp_text(names: &NameMap, a: &Term, op: CmpOp, b: &Term) -> String {
    format!("{} {} {}", term(names, a), op.symbol(), term(names, b))
}

fn literal_vars(lits: &[Literal]) -> Vec<&Var> {
    let mut out = Vec::new();
    for l in lits {
        match l {
            Literal::Atom { atom, .. } => out.extend(atom.vars()),
            Literal::IdBind { var, atom } => {
                out.push(var);
                out.extend(atom.vars());
            }
            Literal::Cmp(a, _, b) => out.extend(a.var().into_iter().chain(b.var())),
            Literal::Sub(..) => {}
        }
    }
    out
}

/// Body of a constraint or query: data atoms with one identifier variable
/// each, then comparisons. Returns the identifier variables and the body.
fn id_body(names: &NameMap, lits: &[Literal], vars: &mut Vars) -> (Vec<String>, String) {
    let mut ids = Vec::new();
    let mut parts = Vec::new();
    for l in lits {
        if let Literal::Atom { atom, .. } = l {
            let id = vars.fresh(&format!("Id{}", ids.len()));
            parts.push(atom_text(names, atom.name().expect("named atom"), Some(&id), &atom.args));
            ids.push(id);
        }
    }
    for l in lits {
        if let Literal::Cmp(a, op, b) = l {
            parts.push(cmp_text(names, a, *op, b));
        }
    }
    (ids, parts.join(", "))
}

/// Substitutes predicate variables by names from the predicate domain,
/// evaluating `sub` literals against the taxonomy.
fn instantiate(rule: &PreferenceRule, kb: &KnowledgeBase) -> Vec<Vec<Literal>> {
    let mut pvars: Vec<Var> = Vec::new();
    let note = |p: &PredTerm, pvars: &mut Vec<Var>| {
        if let PredTerm::Var(v) = p {
            if !pvars.contains(v) {
                pvars.push(v.clone());
            }
        }
    };
    for l in &rule.body {
        match l {
            Literal::Atom { atom, .. } | Literal::IdBind { atom, .. } => note(&atom.pred, &mut pvars),
            Literal::Sub(a, b) => {
                note(a, &mut pvars);
                note(b, &mut pvars);
            }
            Literal::Cmp(..) => {}
        }
    }
    let domain: Vec<Name> = kb.view().predicate_domain().into_iter().collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; pvars.len()];
    if !pvars.is_empty() && domain.is_empty() {
        return out;
    }
    loop {
        let env: HashMap<&Var, &Name> = pvars.iter().zip(&choice).map(|(v, &i)| (v, &domain[i])).collect();
        let resolve = |p: &PredTerm| -> Name {
            match p {
                PredTerm::Name(n) => n.clone(),
                PredTerm::Var(v) => env[v].clone(),
            }
        };
        let mut body = Vec::new();
        let mut ok = true;
        for l in &rule.body {
            match l {
                Literal::Sub(a, b) => ok &= kb.taxonomy.subsumed(&resolve(a), &resolve(b)),
                Literal::Atom { atom, negated } => {
                    let name = resolve(&atom.pred);
                    if matches!(atom.pred, PredTerm::Var(_)) && !negated && kb.dataset.arity(&name).is_none() {
                        ok = false;
                    }
                    body.push(Literal::Atom { atom: Atom { pred: PredTerm::Name(name), args: atom.args.clone() }, negated: *negated });
                }
                Literal::IdBind { var, atom } => {
                    let name = resolve(&atom.pred);
                    if matches!(atom.pred, PredTerm::Var(_)) && kb.dataset.arity(&name).is_none() {
                        ok = false;
                    }
                    body.push(Literal::IdBind { var: var.clone(), atom: Atom { pred: PredTerm::Name(name), args: atom.args.clone() } });
                }
                Literal::Cmp(..) => body.push(l.clone()),
            }
        }
        if ok {
            out.push(body);
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < domain.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn rule_text(names: &NameMap, kb: &KnowledgeBase, rule: &PreferenceRule, body: &[Literal], warnings: &mut Vec<String>) -> String {
    let mut vars = Vars::new(literal_vars(body).into_iter().chain([&rule.head.0, &rule.head.1]));
    let conflict = vars.fresh("C");
    let (x1, x2) = (capitalize(&rule.head.0), capitalize(&rule.head.1));
    let mut parts = vec![format!("inConf({conflict}, {x1})"), format!("inConf({conflict}, {x2})")];
    let is_meta = |a: &Atom| a.name().is_some_and(|n| kb.meta.contains_predicate(n));
    let mut positive_vars: HashSet<String> = HashSet::from([conflict.clone(), x1.clone(), x2.clone()]);
    let mut neg_only: BTreeSet<String> = BTreeSet::new();
    let (mut xi, mut yi) = (0, 0);
    for meta in [false, true] {
        for negated in [false, true] {
            for l in body {
                let Literal::Atom { atom, negated: n } = l else { continue };
                if *n != negated || is_meta(atom) != meta {
                    continue;
                }
                let id = if meta {
                    None
                } else if negated {
                    yi += 1;
                    Some(vars.fresh(&format!("Y{}", yi - 1)))
                } else {
                    xi += 1;
                    Some(vars.fresh(&format!("X{}", xi - 1)))
                };
                let text = atom_text(names, atom.name().unwrap(), id.as_deref(), &atom.args);
                let mut local: Vec<String> = atom.vars().map(|v| capitalize(v)).collect();
                local.extend(id);
                if negated {
                    parts.push(format!("not {text}"));
                    neg_only.extend(local);
                } else {
                    parts.push(text);
                    positive_vars.extend(local);
                }
            }
        }
    }
    for l in body {
        if let Literal::Cmp(a, op, b) = l {
            parts.push(cmp_text(names, a, *op, b));
        }
    }
    for l in body {
        if let Literal::IdBind { var, atom } = l {
            let v = capitalize(var);
            parts.push(atom_text(names, atom.name().unwrap(), Some(&v), &atom.args));
            positive_vars.insert(v);
            positive_vars.extend(atom.vars().map(|v| capitalize(v)));
        }
    }
    let unsafe_vars: Vec<&String> = neg_only.iter().filter(|v| !positive_vars.contains(*v)).collect();
    let text = format!("pref_init({x1}, {x2}, {}) :- {}.", rule.level, parts.join(", "));
    if !unsafe_vars.is_empty() {
        let list: Vec<&str> = unsafe_vars.iter().map(|s| s.as_str()).collect();
        warnings.push(format!("`{text}`: variables {} occur only under negation", list.join(", ")));
    }
    text
}

fn data_program(names: &NameMap, dataset: &Dataset) -> String {
    let mut out = String::new();
    for (_, id, fact) in dataset.iter() {
        let id = names.id(id.as_str());
        let mut args = vec![id.to_string()];
        args.extend(fact.args.iter().map(|c| names.constant(c).to_string()));
        let _ = writeln!(out, "data({id}).");
        let _ = writeln!(out, "{}({}).", names.predicate(&fact.predicate), args.join(", "));
    }
    out
}

/// Encodes the dataset, meta-database, constraints, queries and rules.
pub fn emit_input(kb: &KnowledgeBase) -> Result<InputPrograms, Error> {
    let names = NameMap::build(kb)?;
    let mut out = InputPrograms { mapping: names.comments(), data: data_program(&names, &kb.dataset), ..Default::default() };

    for m in kb.meta.facts() {
        let args: Vec<String> = m
            .args
            .iter()
            .map(|a| match a {
                MetaArg::Const(c) => names.constant(c).to_string(),
                MetaArg::Id(f) => names.id(kb.dataset.id(*f).as_str()).to_string(),
            })
            .collect();
        let _ = writeln!(out.meta, "{}({}).", names.predicate(&m.predicate), args.join(", "));
    }

    for dc in &kb.constraints {
        let mut vars = Vars::new(literal_vars(&dc.body));
        let (ids, body) = id_body(&names, &dc.body, &mut vars);
        let t = tuple(&ids);
        let _ = writeln!(out.constraints, "conf_init({t}) :- {body}.");
        for id in &ids {
            let _ = writeln!(out.constraints, "inConf_init({t}, {id}) :- {body}.");
        }
    }

    for q in &kb.queries {
        let mut text = String::new();
        for i in 0..q.bodies.len() {
            let lits = q.body_literals(i);
            let mut vars = Vars::new(literal_vars(&lits));
            let (ids, body) = id_body(&names, &lits, &mut vars);
            let answer: Vec<String> = q.answer.iter().map(|v| capitalize(v)).collect();
            let t = tuple(&ids);
            let _ = writeln!(text, "cause({}, {t}) :- {body}.", tuple(&answer));
            for id in &ids {
                let _ = writeln!(text, "inCause({t}, {id}) :- {body}.");
            }
        }
        out.queries.push((q.name.to_string(), text));
    }

    let mut levels = BTreeSet::new();
    for rule in &kb.rules {
        levels.insert(rule.level);
        for body in instantiate(rule, kb) {
            let text = rule_text(&names, kb, rule, &body, &mut out.warnings);
            let _ = writeln!(out.rules, "{text}");
        }
    }
    for l in levels {
        let _ = writeln!(out.rules, "level({l}).");
    }
    Ok(out)
}

const PRIORITY_UP: &str = "\
trans_cl(X, Y, I) :- pref_init(X, Y, I), not blocked(I).
trans_cl(X, Y, I) :- level(I), trans_cl(X, Y, J), J<I, not blocked(I).
trans_cl(X, Y, I) :- pref_init(X, Z, J), trans_cl(Z, Y, I), J<=I, not blocked(I).
cycle(I) :- trans_cl(X, X, I).
blocked(I) :- level(I), cycle(J), J<I.
pref(X, Y) :- pref_init(X, Y, I), not cycle(I), not blocked(I).
";

const PRIORITY_DOWN: &str = "\
trans_cl(X, Y, I) :- pref_init(X, Y, I).
trans_cl(X, Y, I) :- pref_init(X, Z, I), trans_cl(Z, Y, J), J<=I.
trans_cl(X, Y, I) :- pref_init(X, Z, J), trans_cl(Z, Y, I), J<=I.
cycle(X, Y, I) :- pref_init(X, Y, I), trans_cl(Y, X, I).
pref(X, Y) :- pref_init(X, Y, I), not cycle(X, Y, I).
";

const PRIORITY_REFINED_UP: &str = "\
trans_cl(X, Y, I) :- pref_init(X, Y, I).
trans_cl(X, Y, I) :- level(I), rel(X, Y, J), J < I.
trans_cl(X, Y, I) :- pref_init(X, Z, I), trans_cl(Z, Y, I).
trans_cl(X, Y, I) :- trans_cl(X, Z, I), trans_cl(Z, Y, I).
cycle(X, Y, I) :- pref_init(X, Y, I), trans_cl(Y, X, I).
rel(X, Y, I) :- pref_init(X, Y, I), not cycle(X, Y, I).
rel(X, Y, I) :- rel(X, Z, J), rel(Z, Y, I), J<=I.
pref(X, Y) :- pref_init(X, Y, I), rel(X, Y, I).
";

const PRIORITY_GROUNDED: &str = "\
% successor relation on levels
-succ(I, J) :- level(I), level(J), level(Z), I < Z, Z < J.
succ(I, J) :- level(I), level(J), I < J, not -succ(I, J).
% edges on a cycle whose other edges are in gamma at step K with lower or equal level
trans_cl_bis(X, Y, I, K) :- level(K), pref_init(X, Y, I), gamma(X, Y, I, K).
trans_cl_bis(X, Y, I, K) :- level(I), level(K), trans_cl_bis(X, Y, J, K), J<=I.
trans_cl_bis(X, Y, I, K) :- level(K), pref_init(X, Z, J), trans_cl_bis(Z, Y, I, K), J<=I, gamma(X, Z, I, K).
gamma_plus(X, Y, K) :- level(I), level(K), pref_init(X, Y, I), trans_cl_bis(Y, X, J, K), J <= I.
% cycles with edges of level at most I avoiding the edges found above
trans_cl(X, Y, I, K) :- level(I), level(K), pref_init(X, Y, I), not gamma_plus(X, Y, K), K>1.
trans_cl(X, Y, I, K) :- level(I), level(J), level(K), trans_cl(X, Y, J, K), J<=I, not gamma_plus(X, Y, K), K>1.
trans_cl(X, Y, I, K) :- level(I), level(J), level(K), pref_init(X, Z, J), trans_cl(Z, Y, I, K), J<=I, not gamma_plus(X, Y, K), K>1.
cycle(X, Y, I, K) :- level(J), level(K), pref_init(X, Y, I), trans_cl(Y, X, J, K), J <= I.
% first step: edges whose every cycle has an edge of higher level
trans_cl(X, Y, I, 1) :- level(I), pref_init(X, Y, I).
trans_cl(X, Y, I, 1) :- level(I), level(J), trans_cl(X, Y, J, 1), J<=I.
trans_cl(X, Y, I, 1) :- level(I), level(J), pref_init(X, Z, J), trans_cl(Z, Y, I, 1), J<=I.
gamma(X, Y, I, 1) :- pref_init(X, Y, I), not cycle(X, Y, I, 1).
% next step: edges whose every cycle has an edge of higher level or an attacked edge
gamma(X, Y, I, L) :- level(K), pref_init(X, Y, I), not cycle(X, Y, I, K), succ(K, L).
% continue while the last step added edges
unstopped(K) :- level(I), level(L), gamma(X, Y, I, L), not gamma(X, Y, I, K), succ(K, L).
% output the last step
pref(X, Y) :- level(K), gamma(X, Y, I, K), not unstopped(K).
";

const MINCONF: &str = "\
-included(X, Y) :- conf_init(X), conf_init(Y), inConf_init(X, A), not inConf_init(Y, A).
minimal(Y) :- conf_init(X), conf_init(Y), not -included(X, Y), -included(Y, X).
conf(X) :- conf_init(X), not minimal(X).
inConf(X, Y) :- inConf_init(X, Y), conf(X).
";

/// Program computing `pref` from `pref_init`, `level`, `conf` and `inConf`.
pub fn emit_priority(strategy: Strategy) -> &'static str {
    match strategy {
        Strategy::Up => PRIORITY_UP,
        Strategy::Down => PRIORITY_DOWN,
        Strategy::RefinedUp => PRIORITY_REFINED_UP,
        Strategy::Grounded => PRIORITY_GROUNDED,
    }
}

/// Program keeping the inclusion-minimal candidate conflicts.
pub fn emit_minconf() -> &'static str {
    MINCONF
}

const ATT: &str = "\
-att(X, A) :- inConf(X, A), inConf(X, B), not A = B, pref(A, B).
att(X, A) :- inConf(X, A), not -att(X, A).
";

const LOC: &str = "\
cause_fact(A) :- inCause(C, A), cause(C).
reachable(A) :- cause_fact(A).
reachable(A) :- reachable(B), att(X, B), inConf(X, A).
";

const CONS: &str = "\
conf_rel(X) :- inConf(X, A), reachable(A).
1 {rem(A):inConf(X, A)} :- conf_rel(X).
in(A) :- reachable(A), not rem(A).
";

const BRAVE: &str = "\
-sat(C) :- inCause(C, A), not in(A).
sat :- cause(C), not -sat(C).
:- not sat.
";

const AR: &str = "\
invalid_conf(X, A) :- reachable(A), att(X, A), inConf(X, B), not in(B), not A = B.
neg(C) :- cause(C), inCause(C, A), att(X, A), not invalid_conf(X, A).
:- cause(C), not neg(C).
";

const PARETO: &str = "\
valid(A) :- reachable(A), in(A).
invalid_att(X, A) :- reachable(A), att(X, A), inConf(X, B), not in(B), not A = B.
valid(A) :- reachable(A), conf(X), not in(A), att(X, A), not invalid_att(X, A).
:- reachable(A), not valid(A).
";

const COMPLETION: &str = "\
valid(A) :- reachable(A), in(A).
invalid_att(X, A) :- reachable(A), not in(A), inConf(X, A), not A = B, inConf(X, B), not in(B).
invalid_att(X, A) :- reachable(A), not in(A), inConf(X, A), inConf(X, B), not A = B, pref_comp(A, B).
valid(A) :- reachable(A), not in(A), inConf(X, A), not invalid_att(X, A).
:- reachable(A), not valid(A).
pref_comp(A, B) :- reachable(A), reachable(B), pref(A, B).
1 {pref_comp(A, B); pref_comp(B, A)} 1 :- reachable(A), reachable(B), inConf(X, A), inConf(X, B), not pref(A, B), not pref(B, A), not A = B.
trans_cl_comp(A, B) :- pref_comp(A, B).
trans_cl_comp(A, B) :- trans_cl_comp(A, Y), pref_comp(Y, B).
:- trans_cl_comp(A, A).
";

const LOC_IAR: &str = "\
cause_fact(C, A) :- inCause(C, A), cause(C).
reachable(C, A) :- cause_fact(C, A).
reachable(C, A) :- reachable(C, B), att(X, B), inConf(X, A).
";

const CONS_IAR: &str = "\
conf_rel(C, X) :- inConf(X, A), reachable(C, A).
1 {rem(C, A):inConf(X, A)} :- conf_rel(C, X).
in(C, A) :- reachable(C, A), not rem(C, A).
";

const AR_IAR: &str = "\
invalid_conf(C, X, A) :- reachable(C, A), att(X, A), inConf(X, B), not in(C, B), not A = B.
neg(C) :- cause(C), inCause(C, A), att(X, A), not invalid_conf(C, X, A).
:- cause(C), not neg(C).
";

const PARETO_IAR: &str = "\
valid(C, A) :- reachable(C, A), in(C, A).
invalid_att(C, X, A) :- reachable(C, A), att(X, A), inConf(X, B), not in(C, B), not A = B.
valid(C, A) :- reachable(C, A), conf(X), not in(C, A), att(X, A), not invalid_att(C, X, A).
:- reachable(C, A), not valid(C, A).
";

const COMPLETION_IAR: &str = "\
valid(C, A) :- reachable(C, A), in(C, A).
invalid_att(C, X, A) :- reachable(C, A), not in(C, A), inConf(X, A), not A = B, inConf(X, B), not in(C, B).
invalid_att(C, X, A) :- reachable(C, A), not in(C, A), inConf(X, A), inConf(X, B), not A = B, pref_comp(C, A, B).
valid(C, A) :- reachable(C, A), not in(C, A), inConf(X, A), not invalid_att(C, X, A).
:- reachable(C, A), not valid(C, A).
pref_comp(C, A, B) :- reachable(C, A), reachable(C, B), pref(A, B).
1 {pref_comp(C, A, B); pref_comp(C, B, A)} 1 :- reachable(C, A), reachable(C, B), inConf(X, A), inConf(X, B), not pref(A, B), not pref(B, A), not A = B.
trans_cl_comp(C, A, B) :- pref_comp(C, A, B).
trans_cl_comp(C, A, B) :- trans_cl_comp(C, A, Y), pref_comp(C, Y, B).
:- trans_cl_comp(C, A, A).
";

/// Attack relation, localization, consistent selection and the blocks for
/// a semantics and repair kind. For brave the program has a stable model
/// iff the answer is entailed; for AR and IAR iff it is not.
pub fn emit_semantics(kind: RepairKind, semantics: Semantics) -> String {
    let iar = semantics == Semantics::IAR;
    let mut blocks: Vec<(&str, &str)> = vec![
        ("att", ATT),
        ("loc", if iar { LOC_IAR } else { LOC }),
        ("cons", if iar { CONS_IAR } else { CONS }),
    ];
    blocks.push(match semantics {
        Semantics::Brave => ("brave", BRAVE),
        Semantics::AR => ("AR", AR),
        Semantics::IAR => ("AR, per cause", AR_IAR),
    });
    match kind {
        RepairKind::S => {}
        RepairKind::P => blocks.push(("Pareto", if iar { PARETO_IAR } else { PARETO })),
        RepairKind::C => blocks.push(("Completion", if iar { COMPLETION_IAR } else { COMPLETION })),
    }
    let mut out = String::new();
    for (name, text) in blocks {
        let _ = writeln!(out, "% {name}");
        out.push_str(text);
    }
    out
}
