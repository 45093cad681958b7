//! Parsers for the six text formats.
//!
//! `.dkb` and `.meta` are line oriented with bare constant tokens. The rule
//! formats (`.dc`, `.ucq`, `.prefs`, `.tax`) share one tokenizer in which
//! newlines are ordinary whitespace.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::syntax::{Atom, CmpOp, DenialConstraint, Literal, PredTerm, PreferenceRule, QueryRewriting, Term, Var};
use super::{Constant, Dataset, Fact, FactId, MetaArg, MetaDatabase, MetaFact, Name, Taxonomy};
use crate::error::{Error, ParseError};

fn is_reserved(c: char) -> bool {
    c.is_whitespace() || "(),|#%[]=!<>\"".contains(c)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Character cursor over one line of a line-oriented file.
struct LineCursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    text: &'a str,
}

impl<'a> LineCursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        LineCursor { chars: text.char_indices().collect(), pos: 0, line, text }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column(), message)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).map(|&(_, c)| c)
    }

    /// True once only whitespace or a comment remains.
    fn at_end(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), None | Some('#'))
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => Err(self.err(format!("expected `{c}`, found `{d}`"))),
            None => Err(self.err(format!("expected `{c}`, found end of line"))),
        }
    }

    fn slice(&self, start: usize) -> &'a str {
        let from = self.chars.get(start).map_or(self.text.len(), |&(b, _)| b);
        let to = self.chars.get(self.pos).map_or(self.text.len(), |&(b, _)| b);
        &self.text[from..to]
    }

    fn bare_token(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| !is_reserved(c)) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected {what}")));
        }
        Ok(self.slice(start))
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(is_ident_start) {
            return Err(self.err(format!("expected {what}")));
        }
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        Ok(self.slice(start))
    }

    fn constant(&mut self) -> Result<Constant, ParseError> {
        self.skip_ws();
        let col = self.column();
        let tok = self.bare_token("a constant")?;
        Constant::classify(tok)
            .ok_or_else(|| ParseError::new(self.line, col, format!("integer `{tok}` out of range")))
    }
}

/// Parses a `.dkb` file: one `<id> | <Pred>(<c>, ...)` per line.
pub fn parse_dataset(text: &str) -> Result<Dataset, Error> {
    let mut entries: Vec<(FactId, Fact)> = Vec::new();
    let mut ids: HashMap<FactId, usize> = HashMap::new();
    let mut facts: HashMap<Fact, usize> = HashMap::new();
    let mut arity: HashMap<Name, (usize, usize)> = HashMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let mut cur = LineCursor::new(line, line_no);
        if cur.at_end() {
            continue;
        }
        let id = FactId::new(cur.bare_token("a fact id")?);
        cur.expect('|')?;
        let pred_col = {
            cur.skip_ws();
            cur.column()
        };
        let pred = cur.ident("a predicate name")?;
        cur.expect('(')?;
        let mut args = Vec::new();
        loop {
            args.push(cur.constant()?);
            cur.skip_ws();
            match cur.peek() {
                Some(',') => cur.pos += 1,
                Some(')') => {
                    cur.pos += 1;
                    break;
                }
                _ => return Err(cur.err("expected `,` or `)`").into()),
            }
        }
        if !cur.at_end() {
            return Err(cur.err("unexpected text after fact").into());
        }
        if let Some(prev) = ids.insert(id.clone(), line_no) {
            return Err(ParseError::new(line_no, 1, format!("duplicate fact id `{id}` (first on line {prev})")).into());
        }
        let fact = Fact::new(pred, args);
        match arity.get(&fact.predicate) {
            Some(&(n, first)) if n != fact.args.len() => {
                return Err(ParseError::new(
                    line_no,
                    pred_col,
                    format!("predicate {pred} has arity {n} on line {first} but {} here", fact.args.len()),
                )
                .into())
            }
            Some(_) => {}
            None => {
                arity.insert(fact.predicate.clone(), (fact.args.len(), line_no));
            }
        }
        if let Some(prev) = facts.insert(fact.clone(), line_no) {
            return Err(ParseError::new(line_no, pred_col, format!("fact {fact} already has an id on line {prev}")).into());
        }
        entries.push((id, fact));
    }
    Dataset::from_facts(entries)
}

/// Parses a `.meta` file: one `<Pred>(<arg>, ...)` per line where each
/// argument is `#<id>` or a constant.
pub fn parse_meta(text: &str, dataset: &Dataset) -> Result<MetaDatabase, Error> {
    let mut facts = Vec::new();
    let mut patterns: HashMap<Name, (Vec<bool>, usize)> = HashMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let mut cur = LineCursor::new(line, line_no);
        if cur.at_end() {
            continue;
        }
        let pred_col = {
            cur.skip_ws();
            cur.column()
        };
        let pred: Name = Arc::from(cur.ident("a meta predicate name")?);
        cur.expect('(')?;
        let mut args = Vec::new();
        loop {
            cur.skip_ws();
            if cur.peek() == Some('#') && cur.peek2().is_some_and(|c| !is_reserved(c)) {
                cur.pos += 1;
                let col = cur.column();
                let id = FactId::new(cur.bare_token("a fact id")?);
                let ix = dataset.lookup_id(&id).ok_or_else(|| {
                    ParseError::new(line_no, col, format!("`#{id}` refers to no dataset fact"))
                })?;
                args.push(MetaArg::Id(ix));
            } else {
                args.push(MetaArg::Const(cur.constant()?));
            }
            cur.skip_ws();
            match cur.peek() {
                Some(',') => cur.pos += 1,
                Some(')') => {
                    cur.pos += 1;
                    break;
                }
                _ => return Err(cur.err("expected `,` or `)`").into()),
            }
        }
        if !cur.at_end() {
            return Err(cur.err("unexpected text after meta fact").into());
        }
        let pattern: Vec<bool> = args.iter().map(|a| matches!(a, MetaArg::Id(_))).collect();
        match patterns.get(&pred) {
            Some((p, first)) if *p != pattern => {
                return Err(ParseError::new(
                    line_no,
                    pred_col,
                    format!("{pred} uses different identifier positions than on line {first}"),
                )
                .into())
            }
            Some(_) => {}
            None => {
                patterns.insert(pred.clone(), (pattern, line_no));
            }
        }
        facts.push(MetaFact { predicate: pred, args });
    }
    MetaDatabase::from_facts(facts)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Str(String),
    PredVar(String),
    Anon,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Pipe,
    Dot,
    Op(CmpOp),
    LArrow,
    RArrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::PredVar(s) => format!("`%{s}`"),
            Tok::Anon => "`_`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Op(op) => format!("`{}`", op.symbol()),
            Tok::LArrow => "`<-`".into(),
            Tok::RArrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let at = |k: usize| chars.get(k).copied();
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: ln + 1, column });
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            let start = i;
            match c {
                '(' => push(&mut out, Tok::LParen),
                ')' => push(&mut out, Tok::RParen),
                '[' => push(&mut out, Tok::LBrack),
                ']' => push(&mut out, Tok::RBrack),
                ',' => push(&mut out, Tok::Comma),
                '|' => push(&mut out, Tok::Pipe),
                '.' => push(&mut out, Tok::Dot),
                '=' => push(&mut out, Tok::Op(CmpOp::Eq)),
                '!' if at(i + 1) == Some('=') => {
                    push(&mut out, Tok::Op(CmpOp::Ne));
                    i += 1;
                }
                '<' if at(i + 1) == Some('-') => {
                    push(&mut out, Tok::LArrow);
                    i += 1;
                }
                '<' if at(i + 1) == Some('=') => {
                    push(&mut out, Tok::Op(CmpOp::Le));
                    i += 1;
                }
                '<' => push(&mut out, Tok::Op(CmpOp::Lt)),
                '>' if at(i + 1) == Some('=') => {
                    push(&mut out, Tok::Op(CmpOp::Ge));
                    i += 1;
                }
                '>' => push(&mut out, Tok::Op(CmpOp::Gt)),
                '-' if at(i + 1) == Some('>') => {
                    push(&mut out, Tok::RArrow);
                    i += 1;
                }
                '"' => {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j] != '"' {
                        j += 1;
                    }
                    if j == chars.len() {
                        return Err(ParseError::new(ln + 1, column, "unterminated string"));
                    }
                    push(&mut out, Tok::Str(chars[i + 1..j].iter().collect()));
                    i = j;
                }
                '%' => {
                    let mut j = i + 1;
                    if !at(j).is_some_and(is_ident_start) {
                        return Err(ParseError::new(ln + 1, column, "expected a predicate variable name after `%`"));
                    }
                    while at(j).is_some_and(is_ident_char) {
                        j += 1;
                    }
                    push(&mut out, Tok::PredVar(chars[i + 1..j].iter().collect()));
                    i = j - 1;
                }
                '_' if !at(i + 1).is_some_and(is_ident_char) => push(&mut out, Tok::Anon),
                c if c.is_ascii_digit() || ((c == '-' || c == '+') && at(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                    let mut j = i + 1;
                    while at(j).is_some_and(|d| d.is_ascii_digit()) {
                        j += 1;
                    }
                    if at(j).is_some_and(is_ident_char) {
                        return Err(ParseError::new(ln + 1, column, "malformed number"));
                    }
                    push(&mut out, Tok::Int(chars[i..j].iter().collect()));
                    i = j - 1;
                }
                c if is_ident_start(c) => {
                    let mut j = i + 1;
                    while at(j).is_some_and(is_ident_char) {
                        j += 1;
                    }
                    push(&mut out, Tok::Ident(chars[i..j].iter().collect()));
                    i = j - 1;
                }
                other => {
                    return Err(ParseError::new(ln + 1, column, format!("unexpected character `{other}`")));
                }
            }
            debug_assert!(i >= start);
            i += 1;
        }
    }
    let line = text.lines().count().max(1);
    let column = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    out.push(Spanned { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: tokenize(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.column)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (l, c) = self.here();
        ParseError::new(l, c, message)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.err(format!("expected {expected}, found {}", self.peek().describe()))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn variable(&mut self) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if is_variable_name(&s) => {
                self.bump();
                Ok(Arc::from(s))
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (line, column) = self.here();
        let lexeme = match self.peek().clone() {
            Tok::Anon => {
                self.bump();
                return Ok(Term::Anon);
            }
            Tok::Ident(s) if is_variable_name(&s) => {
                self.bump();
                return Ok(Term::Var(Arc::from(s)));
            }
            Tok::Ident(s) | Tok::Int(s) | Tok::Str(s) => s,
            _ => return Err(self.unexpected("a term")),
        };
        self.bump();
        Constant::classify(&lexeme)
            .map(Term::Const)
            .ok_or_else(|| ParseError::new(line, column, format!("integer `{lexeme}` out of range")))
    }

    fn pred_term(&mut self) -> Result<PredTerm, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(PredTerm::Name(Arc::from(s)))
            }
            Tok::PredVar(s) => {
                self.bump();
                Ok(PredTerm::Var(Arc::from(s)))
            }
            _ => Err(self.unexpected("a predicate")),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let pred = self.pred_term()?;
        if let PredTerm::Name(n) = &pred {
            if is_reserved_word(n) {
                return Err(self.err(format!("`{n}` cannot be used as a predicate name")));
            }
        }
        let args = self.args()?;
        Ok(Atom { pred, args })
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::PredVar(_)) && *self.peek_at(1) == Tok::LParen
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "not" => {
                self.bump();
                if !self.starts_atom() {
                    return Err(self.unexpected("an atom after `not`"));
                }
                return Ok(Literal::negative(self.atom()?));
            }
            Tok::Ident(s) if s == "sub" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.expect(Tok::LParen)?;
                let a = self.pred_term()?;
                self.expect(Tok::Comma)?;
                let b = self.pred_term()?;
                self.expect(Tok::RParen)?;
                return Ok(Literal::Sub(a, b));
            }
            _ => {}
        }
        if self.starts_atom() {
            return Ok(Literal::positive(self.atom()?));
        }
        let (line, column) = self.here();
        let left = self.term()?;
        let op = match self.bump() {
            Tok::Op(op) => op,
            other => {
                return Err(ParseError::new(line, column, format!("expected a literal, found {}", other.describe())))
            }
        };
        if op == CmpOp::Eq && matches!(self.peek(), Tok::Ident(s) if s == "id") && *self.peek_at(1) == Tok::LBrack {
            let var = match left {
                Term::Var(v) => v,
                _ => return Err(ParseError::new(line, column, "an id binding needs a variable on the left")),
            };
            self.bump();
            self.expect(Tok::LBrack)?;
            let atom = self.atom()?;
            self.expect(Tok::RBrack)?;
            return Ok(Literal::IdBind { var, atom });
        }
        let right = self.term()?;
        Ok(Literal::Cmp(left, op, right))
    }

    fn literals(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut body = vec![self.literal()?];
        while self.eat(&Tok::Comma) {
            body.push(self.literal()?);
        }
        Ok(body)
    }
}

fn is_variable_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase())
}

fn is_reserved_word(s: &str) -> bool {
    matches!(s, "not" | "sub" | "id" | "pref" | "bot")
}

fn at(pos: (usize, usize), e: Error) -> Error {
    match e {
        Error::Validation(m) => Error::Parse(ParseError::new(pos.0, pos.1, m)),
        other => other,
    }
}

/// Parses a `.dc` file of `<atoms and comparisons> -> bot` statements.
pub fn parse_constraints(text: &str) -> Result<Vec<DenialConstraint>, Error> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        let start = p.here();
        let body = p.literals()?;
        p.expect(Tok::RArrow)?;
        p.keyword("bot")?;
        p.eat(&Tok::Dot);
        out.push(DenialConstraint::new(body).map_err(|e| at(start, e))?);
    }
    Ok(out)
}

/// Parses a `.ucq` file. Lines sharing a query name are the members of one
/// union and must use the same answer variables.
pub fn parse_queries(text: &str) -> Result<Vec<QueryRewriting>, Error> {
    let mut p = Parser::new(text)?;
    let mut order: Vec<Name> = Vec::new();
    let mut by_name: HashMap<Name, (QueryRewriting, (usize, usize))> = HashMap::new();
    while !p.at_eof() {
        let start = p.here();
        let name: Name = Arc::from(p.name("a query name")?);
        p.expect(Tok::LParen)?;
        let mut answer = Vec::new();
        if !p.eat(&Tok::RParen) {
            loop {
                answer.push(p.variable()?);
                if p.eat(&Tok::RParen) {
                    break;
                }
                p.expect(Tok::Comma)?;
            }
        }
        p.expect(Tok::LArrow)?;
        let mut bodies = Vec::new();
        loop {
            let mut body = Vec::new();
            loop {
                if !p.starts_atom() {
                    return Err(p.unexpected("an atom").into());
                }
                body.push(p.atom()?);
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
            bodies.push(body);
            if !p.eat(&Tok::Pipe) {
                break;
            }
        }
        p.eat(&Tok::Dot);
        let q = QueryRewriting { name: name.clone(), answer, bodies };
        q.validate().map_err(|e| at(start, e))?;
        match by_name.get_mut(&name) {
            Some((existing, _)) => {
                if existing.answer != q.answer {
                    return Err(ParseError::new(
                        start.0,
                        start.1,
                        format!("members of query {name} must share the same answer variables"),
                    )
                    .into());
                }
                for b in q.bodies {
                    if !existing.bodies.contains(&b) {
                        existing.bodies.push(b);
                    }
                }
            }
            None => {
                order.push(name.clone());
                by_name.insert(name, (q, start));
            }
        }
    }
    Ok(order.into_iter().map(|n| by_name.remove(&n).unwrap().0).collect())
}

/// Parses a `.prefs` file. Rules before any `[level k]` header are at level 1.
pub fn parse_rules(text: &str) -> Result<Vec<PreferenceRule>, Error> {
    let mut p = Parser::new(text)?;
    let mut level = 1u32;
    let mut out = Vec::new();
    while !p.at_eof() {
        if p.eat(&Tok::LBrack) {
            p.keyword("level")?;
            let (line, column) = p.here();
            level = match p.bump() {
                Tok::Int(s) => s.parse::<u32>().ok().filter(|&k| k > 0).ok_or_else(|| {
                    ParseError::new(line, column, format!("level `{s}` is not a positive integer"))
                })?,
                other => {
                    return Err(ParseError::new(line, column, format!("expected a level, found {}", other.describe())).into())
                }
            };
            p.expect(Tok::RBrack)?;
            continue;
        }
        let start = p.here();
        p.keyword("pref")?;
        p.expect(Tok::LParen)?;
        let x1 = p.variable()?;
        p.expect(Tok::Comma)?;
        let x2 = p.variable()?;
        p.expect(Tok::RParen)?;
        p.expect(Tok::LArrow)?;
        let body = p.literals()?;
        p.eat(&Tok::Dot);
        let rule = PreferenceRule { level, head: (x1, x2), body };
        rule.validate().map_err(|e| at(start, e))?;
        out.push(rule);
    }
    Ok(out)
}

/// Parses a `.tax` file of `<Pred> < <Pred>` statements.
pub fn parse_taxonomy(text: &str) -> Result<Taxonomy, Error> {
    let mut p = Parser::new(text)?;
    let mut pairs: BTreeMap<(Name, Name), ()> = BTreeMap::new();
    while !p.at_eof() {
        let a: Name = Arc::from(p.name("a predicate name")?);
        p.expect(Tok::Op(CmpOp::Lt))?;
        let b: Name = Arc::from(p.name("a predicate name")?);
        p.eat(&Tok::Dot);
        pairs.insert((a, b), ());
    }
    Ok(Taxonomy::from_pairs(pairs.into_keys()))
}
