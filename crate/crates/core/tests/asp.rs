mod common;

use std::path::PathBuf;

use common::running;
use priorepair::asp::{emit_input, emit_minconf, emit_priority, emit_semantics};
use priorepair::engine::{KnowledgeBase, Sources};
use priorepair::priority::Strategy;
use priorepair::semantics::{RepairKind, Semantics};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a stored file; `BLESS=1` rewrites it.
fn check_golden(name: &str, text: &str) {
    let path = golden(name);
    if std::env::var_os("BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, want, "golden {name} differs");
}

/// Tokenizer and recursive-descent checker for the rule language the
/// emitter produces.
mod grammar {
    #[derive(Debug, PartialEq, Clone)]
    enum Tok {
        Ident(String),
        Var(String),
        Int,
        Str,
        Punct(&'static str),
    }

    fn lex(line: &str) -> Result<Vec<Tok>, String> {
        let cs: Vec<char> = line.chars().collect();
        let mut i = 0;
        let mut out = Vec::new();
        const PUNCT: [&str; 17] = [":-", "!=", "<=", ">=", "(", ")", ",", ".", "{", "}", ";", ":", "<", ">", "=", "-", "_"];
        while i < cs.len() {
            let c = cs[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_lowercase() {
                let s = i;
                while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(cs[s..i].iter().collect()));
            } else if c.is_ascii_uppercase() {
                let s = i;
                while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Var(cs[s..i].iter().collect()));
            } else if c.is_ascii_digit() {
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Int);
            } else if c == '"' {
                i += 1;
                while i < cs.len() && cs[i] != '"' {
                    if cs[i] == '\\' {
                        i += 1;
                    }
                    i += 1;
                }
                if i >= cs.len() {
                    return Err("unterminated string".into());
                }
                i += 1;
                out.push(Tok::Str);
            } else {
                let rest: String = cs[i..].iter().collect();
                let p = PUNCT.iter().find(|p| rest.starts_with(**p)).ok_or(format!("bad char {c:?}"))?;
                if *p == "-" && i + 1 < cs.len() && cs[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                    out.push(Tok::Int);
                    continue;
                }
                i += p.len();
                out.push(Tok::Punct(p));
            }
        }
        Ok(out)
    }

    struct P {
        t: Vec<Tok>,
        i: usize,
    }

    impl P {
        fn peek(&self) -> Option<&Tok> {
            self.t.get(self.i)
        }
        fn eat(&mut self, p: &'static str) -> bool {
            if self.peek() == Some(&Tok::Punct(p)) {
                self.i += 1;
                true
            } else {
                false
            }
        }
        fn expect(&mut self, p: &'static str) -> Result<(), String> {
            if self.eat(p) {
                Ok(())
            } else {
                Err(format!("expected {p} at token {} ({:?})", self.i, self.peek()))
            }
        }

        fn term(&mut self) -> Result<(), String> {
            match self.peek().cloned() {
                Some(Tok::Var(_)) | Some(Tok::Int) | Some(Tok::Str) | Some(Tok::Punct("_")) => {
                    self.i += 1;
                    Ok(())
                }
                Some(Tok::Ident(_)) => {
                    self.i += 1;
                    if self.eat("(") {
                        self.args()?;
                    }
                    Ok(())
                }
                Some(Tok::Punct("(")) => {
                    self.i += 1;
                    if self.eat(")") {
                        return Ok(());
                    }
                    self.term()?;
                    while self.eat(",") {
                        if self.eat(")") {
                            return Ok(());
                        }
                        self.term()?;
                    }
                    self.expect(")")
                }
                t => Err(format!("expected term, got {t:?}")),
            }
        }

        fn args(&mut self) -> Result<(), String> {
            self.term()?;
            while self.eat(",") {
                self.term()?;
            }
            self.expect(")")
        }

        fn atom(&mut self) -> Result<(), String> {
            self.eat("-");
            match self.peek().cloned() {
                Some(Tok::Ident(name)) if name != "not" => {
                    self.i += 1;
                    if self.eat("(") {
                        self.args()?;
                    }
                    Ok(())
                }
                t => Err(format!("expected atom, got {t:?}")),
            }
        }

        fn cmp_op(&mut self) -> bool {
            ["!=", "<=", ">=", "<", ">", "="].iter().any(|p| self.eat(p))
        }

        fn body_lit(&mut self) -> Result<(), String> {
            if self.peek() == Some(&Tok::Ident("not".into())) {
                self.i += 1;
            }
            let start = self.i;
            if self.atom().is_ok() && !matches!(self.peek(), Some(Tok::Punct("=" | "!=" | "<" | "<=" | ">" | ">="))) {
                return Ok(());
            }
            self.i = start;
            self.term()?;
            if !self.cmp_op() {
                return Err(format!("expected comparison at token {}", self.i));
            }
            self.term()
        }

        fn head(&mut self) -> Result<(), String> {
            if matches!(self.peek(), Some(Tok::Int)) || self.peek() == Some(&Tok::Punct("{")) {
                if matches!(self.peek(), Some(Tok::Int)) {
                    self.i += 1;
                }
                self.expect("{")?;
                loop {
                    self.atom()?;
                    if self.eat(":") {
                        self.atom()?;
                    }
                    if !self.eat(";") {
                        break;
                    }
                }
                self.expect("}")?;
                if matches!(self.peek(), Some(Tok::Int)) {
                    self.i += 1;
                }
                return Ok(());
            }
            self.atom()
        }

        fn statement(&mut self) -> Result<(), String> {
            if !self.eat(":-") {
                self.head()?;
                if self.eat(".") {
                    return Ok(());
                }
                self.expect(":-")?;
            }
            self.body_lit()?;
            while self.eat(",") {
                self.body_lit()?;
            }
            self.expect(".")
        }
    }

    /// Checks that every non-comment line is one well-formed statement.
    pub fn check(program: &str) -> Result<usize, String> {
        let mut n = 0;
        for (k, line) in program.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            let t = lex(line).map_err(|e| format!("line {}: {e}: {line}", k + 1))?;
            let mut p = P { t, i: 0 };
            p.statement().map_err(|e| format!("line {}: {e}: {line}", k + 1))?;
            if p.i != p.t.len() {
                return Err(format!("line {}: trailing tokens: {line}", k + 1));
            }
            n += 1;
        }
        Ok(n)
    }

    #[test]
    fn rejects_malformed_statements() {
        for bad in ["p(X) :- q(X)", "p(X :- q(X).", "P(x).", "p(X) :- not.", "p(X) :- X <.", "1 {p(X) :- q(X)."] {
            assert!(check(bad).is_err(), "{bad}");
        }
        assert_eq!(check("% c\n-p(X) :- q(X), not r(X, _), X != 3.\n1 {a(X); b(X)} 1 :- c(X).").unwrap(), 2);
    }
}

#[test]
fn fixed_programs_match_goldens() {
    for s in Strategy::ALL {
        let text = emit_priority(s);
        grammar::check(text).unwrap();
        check_golden(&format!("priority_{}.lp", s.code()), text);
    }
    grammar::check(emit_minconf()).unwrap();
    check_golden("minconf.lp", emit_minconf());
    check_golden("semantics_P_AR.lp", &emit_semantics(RepairKind::P, Semantics::AR));
    check_golden("semantics_C_IAR.lp", &emit_semantics(RepairKind::C, Semantics::IAR));
}

#[test]
fn priority_programs_have_the_expected_rule_counts() {
    let count = |s| grammar::check(emit_priority(s)).unwrap();
    assert_eq!(count(Strategy::Up), 6);
    assert_eq!(count(Strategy::Down), 5);
    assert_eq!(count(Strategy::RefinedUp), 8);
    assert!(count(Strategy::Grounded) > 8);
}

#[test]
fn every_semantics_program_is_well_formed() {
    for kind in RepairKind::ALL {
        for sem in [Semantics::Brave, Semantics::AR, Semantics::IAR] {
            let text = emit_semantics(kind, sem);
            grammar::check(&text).unwrap_or_else(|e| panic!("{kind:?} {sem:?}: {e}"));
            assert_eq!(text.contains("% Pareto"), kind == RepairKind::P);
            assert_eq!(text.contains("% Completion"), kind == RepairKind::C);
            assert_eq!(text.contains("rem(C, A)"), sem == Semantics::IAR);
        }
    }
}

#[test]
fn running_example_input_matches_goldens() {
    let kb = running("ex.prefs");
    let p = emit_input(&kb).unwrap();
    for (name, text) in [("mapping", &p.mapping), ("data", &p.data), ("meta", &p.meta), ("constraints", &p.constraints), ("rules", &p.rules)] {
        grammar::check(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        check_golden(&format!("running_{name}.lp"), text);
    }
    let queries: String = p.queries.iter().map(|(n, t)| format!("% query {n}\n{t}")).collect();
    grammar::check(&queries).unwrap();
    check_golden("running_queries.lp", &queries);
    // The identifier of `not Teach(y, _)` is bound nowhere else.
    assert_eq!(p.warnings.len(), 4, "{:?}", p.warnings);
    assert!(p.warnings.iter().all(|w| w.contains("Y0")));
}

#[test]
fn names_are_sanitized_and_kept_distinct() {
    let kb = KnowledgeBase::parse(&Sources {
        dataset: "f1 | Conf(A1, x/y, not)\nf2 | conf(a1, -3, b_)\n3 | Data(c_a1, A1)",
        constraints: "Conf(x, y, z), conf(x, y, w) -> bot",
        queries: "q(x) <- Conf(x, y, z)",
        ..Sources::default()
    })
    .unwrap();
    let p = emit_input(&kb).unwrap();
    let all = format!("{}{}{}{}", p.mapping, p.data, p.constraints, p.queries[0].1);
    grammar::check(&all).unwrap();
    assert!(p.mapping.contains("% predicate p_conf = Conf") || p.mapping.contains("% predicate p_conf = conf"), "{}", p.mapping);
    assert!(p.mapping.contains("% predicate p_data = Data"), "{}", p.mapping);
    assert!(p.data.contains("data(3)."), "{}", p.data);
    assert!(p.data.contains("\"x/y\""), "{}", p.data);
    assert!(!p.data.contains("(not") && !p.data.contains(" not"), "{}", p.data);
    let consts: Vec<&str> = p.mapping.lines().filter(|l| l.starts_with("% constant")).collect();
    let targets: std::collections::HashSet<&str> = consts.iter().map(|l| l.split(' ').nth(2).unwrap()).collect();
    assert_eq!(targets.len(), consts.len(), "{consts:?}");
}

#[test]
fn negation_only_variables_are_reported() {
    let kb = KnowledgeBase::parse(&Sources {
        dataset: "1 | A(a)\n2 | B(a)",
        constraints: "A(x), B(x) -> bot",
        rules: "pref(x1, x2) <- x1 = id[A(y)], x2 = id[B(y)], not A(z)",
        ..Sources::default()
    })
    .unwrap();
    let p = emit_input(&kb).unwrap();
    assert_eq!(p.warnings.len(), 1, "{:?}", p.warnings);
    assert!(p.warnings[0].contains("variables Y0, Z occur"), "{}", p.warnings[0]);
}

#[test]
fn predicate_variables_are_instantiated() {
    let kb = running("ex.prefs");
    let p = emit_input(&kb).unwrap();
    let sub_rule: Vec<&str> = p.rules.lines().filter(|l| l.contains("not teach")).collect();
    // %Y ranges over {Adm, Cleric} and %Z over {APr, FPr}.
    assert_eq!(sub_rule.len(), 4, "{}", p.rules);
    assert!(!p.rules.contains("sub("));
}

#[test]
fn empty_rules_give_an_empty_preference_program() {
    let kb = KnowledgeBase::parse(&Sources { dataset: "1 | A(a)", ..Sources::default() }).unwrap();
    let p = emit_input(&kb).unwrap();
    assert_eq!(p.rules, "");
    assert_eq!(p.data, "data(1).\na(1, a).\n");
}

#[test]
fn constraint_inequalities_are_kept() {
    let kb = KnowledgeBase::parse(&Sources {
        dataset: "1 | N(a)\n2 | N(b)",
        constraints: "N(x), N(y), x != y -> bot",
        ..Sources::default()
    })
    .unwrap();
    let p = emit_input(&kb).unwrap();
    assert_eq!(p.constraints.lines().next().unwrap(), "conf_init((Id0, Id1)) :- n(Id0, X), n(Id1, Y), X != Y.");
}
