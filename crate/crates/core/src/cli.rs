//! Command-line frontend. Machine output is JSON lines on stdout;
//! diagnostics go to stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::asp::{emit_input, emit_minconf, emit_priority, emit_semantics};
use crate::engine::{Engine, KnowledgeBase};
use crate::error::Error;
use crate::gen::{generate, GenParams};
use crate::kb::{parse_constraints, parse_dataset, parse_meta, parse_queries, parse_rules, parse_taxonomy, FactId, FactIx};
use crate::oracle::{to_set, Caps, Oracle};
use crate::preference::Acyclicity;
use crate::priority::{Priority, Strategy};
use crate::semantics::{RepairKind, Semantics};

#[derive(Debug, Parser)]
#[command(name = "priorepair", version, about = "Query answering over inconsistent knowledge bases with rule-derived priorities")]
pub struct Cli {
    /// Indent JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal conflicts as sorted id arrays.
    Conflicts(Input),
    /// The resolved priority relation.
    Priority {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "d")]
        strategy: Strategy,
        /// Also report the instance-level strong-acyclicity check.
        #[arg(long)]
        acyclicity: bool,
    },
    /// Verdicts for every candidate answer.
    Answer {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "d")]
        strategy: Strategy,
        /// Query names; all queries when absent.
        #[arg(long, value_delimiter = ',')]
        query: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "P")]
        repair: Vec<RepairKind>,
        #[arg(long, value_delimiter = ',', default_value = "AR")]
        sem: Vec<Semantics>,
        /// Worker threads for answer tuples.
        #[arg(long)]
        jobs: Option<usize>,
        /// Drop candidate causes that contain a conflict.
        #[arg(long)]
        exact_causes: bool,
    },
    /// Optimal repairs by exhaustive enumeration (small inputs only).
    Repairs {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "d")]
        strategy: Strategy,
        #[arg(long, default_value = "S")]
        repair: RepairKind,
        /// Fact cap, or `facts,pairs`; overrides the environment.
        #[arg(long)]
        cap: Option<String>,
    },
    /// Logic programs for an external ASP solver.
    EmitAsp {
        #[arg(value_enum)]
        program: Program,
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "d")]
        strategy: Strategy,
        #[arg(long, default_value = "P")]
        repair: RepairKind,
        #[arg(long, default_value = "AR")]
        sem: Semantics,
    },
    /// Writes a seeded synthetic knowledge base.
    Gen {
        #[arg(long)]
        facts: usize,
        #[arg(long)]
        conflict_rate: f64,
        #[arg(long, default_value_t = 2)]
        max_conflict_arity: usize,
        #[arg(long, default_value_t = 1)]
        levels: u32,
        #[arg(long, default_value_t = 0.5)]
        pref_density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Program {
    Input,
    Priority,
    Minconf,
    Semantics,
}

/// Input files; absent parts are empty.
#[derive(Clone, Debug, Default, Args)]
pub struct Input {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    #[arg(long)]
    pub queries: Option<PathBuf>,
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
}

fn read(path: &Option<PathBuf>) -> Result<String, Error> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|source| Error::Io { path: p.clone(), source }),
        None => Ok(String::new()),
    }
}

fn in_file<T>(r: Result<T, Error>, path: &Option<PathBuf>) -> Result<T, Error> {
    r.map_err(|e| match path {
        Some(p) => e.in_file(p),
        None => e,
    })
}

impl Input {
    pub fn load(&self) -> Result<KnowledgeBase, Error> {
        let dataset = in_file(parse_dataset(&read(&self.data)?), &self.data)?;
        let meta = in_file(parse_meta(&read(&self.meta)?, &dataset), &self.meta)?;
        let kb = KnowledgeBase {
            meta,
            taxonomy: in_file(parse_taxonomy(&read(&self.taxonomy)?), &self.taxonomy)?,
            constraints: in_file(parse_constraints(&read(&self.constraints)?), &self.constraints)?,
            queries: in_file(parse_queries(&read(&self.queries)?), &self.queries)?,
            rules: in_file(parse_rules(&read(&self.rules)?), &self.rules)?,
            dataset,
        };
        in_file(kb.validate(), &self.rules)?;
        Ok(kb)
    }
}

struct Out<'w> {
    w: &'w mut dyn Write,
    pretty: bool,
}

impl Out<'_> {
    fn json(&mut self, v: &Value) -> Result<(), Error> {
        let text = if self.pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) }
            .expect("values serialize");
        self.text(&format!("{text}\n"))
    }

    fn text(&mut self, s: &str) -> Result<(), Error> {
        self.w.write_all(s.as_bytes()).map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
    }
}

fn id(kb: &KnowledgeBase, f: FactIx) -> Value {
    Value::String(kb.dataset.id(f).to_string())
}

/// Fact sets as id arrays, each sorted, the list sorted.
fn id_sets(kb: &KnowledgeBase, sets: impl IntoIterator<Item = Vec<FactIx>>) -> Vec<Value> {
    let mut out: Vec<Vec<FactId>> = sets
        .into_iter()
        .map(|s| {
            let mut ids: Vec<FactId> = s.into_iter().map(|f| kb.dataset.id(f).clone()).collect();
            ids.sort();
            ids
        })
        .collect();
    out.sort();
    out.into_iter().map(|s| Value::Array(s.iter().map(|i| Value::String(i.to_string())).collect())).collect()
}

fn priority_lines(kb: &KnowledgeBase, p: &Priority) -> Vec<Value> {
    let mut pairs: Vec<_> = p.pairs().iter().map(|&(a, b)| (kb.dataset.id(a).clone(), kb.dataset.id(b).clone())).collect();
    pairs.sort();
    pairs.into_iter().map(|(a, b)| json!({"from": a.to_string(), "to": b.to_string()})).collect()
}

/// Runs one parsed command, writing results to `out` and warnings to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Error> {
    let mut out = Out { w: out, pretty: cli.pretty };
    match &cli.command {
        Command::Conflicts(input) => {
            let engine = Engine::new(input.load()?);
            let kb = engine.kb();
            out.json(&Value::Array(id_sets(kb, engine.conflicts().sets().iter().cloned())))
        }
        Command::Priority { input, strategy, acyclicity } => {
            let engine = Engine::new(input.load()?);
            let kb = engine.kb();
            if *acyclicity {
                let report = match engine.strong_acyclicity() {
                    Acyclicity::Acyclic => json!({"strongly_acyclic": true}),
                    Acyclicity::Cycle(c) => json!({
                        "strongly_acyclic": false,
                        "cycle": c.iter().map(|&(a, b)| json!({"from": id(kb, a), "to": id(kb, b)})).collect::<Vec<_>>(),
                    }),
                };
                out.json(&report)?;
            }
            for line in priority_lines(kb, &engine.priority(*strategy)) {
                out.json(&line)?;
            }
            Ok(())
        }
        Command::Answer { input, strategy, query, repair, sem, jobs, exact_causes } => {
            let engine = Engine::new(input.load()?);
            let kb = engine.kb();
            let queries = if query.is_empty() {
                kb.queries.iter().collect::<Vec<_>>()
            } else {
                query.iter().map(|q| kb.query(q)).collect::<Result<Vec<_>, _>>()?
            };
            let priority = engine.priority(*strategy);
            let requested: Vec<(Semantics, RepairKind)> =
                repair.iter().flat_map(|&k| sem.iter().map(move |&s| (s, k))).collect();
            let run = || {
                queries.iter().map(|q| (q, engine.verdicts(q, &priority, &requested, *exact_causes))).collect::<Vec<_>>()
            };
            let results = match jobs {
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(*j)
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("--jobs: {e}")))?
                    .install(run),
                None => run(),
            };
            for (q, verdicts) in results {
                for v in verdicts {
                    out.json(&json!({
                        "query": q.name.to_string(),
                        "tuple": v.tuple.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "repair": v.kind.code(),
                        "semantics": v.semantics.code(),
                        "entailed": v.entailed,
                    }))?;
                }
            }
            Ok(())
        }
        Command::Repairs { input, strategy, repair, cap } => {
            let caps = match cap {
                Some(c) => Caps::parse(c)?,
                None => Caps::from_env()?,
            };
            let engine = Engine::new(input.load()?);
            let kb = engine.kb();
            let oracle = Oracle::new(kb.dataset.len(), engine.conflicts(), caps)?;
            let priority = engine.priority(*strategy);
            let reps = oracle.optimal_repairs(*repair, &priority)?;
            for r in id_sets(kb, reps.into_iter().map(to_set)) {
                out.json(&r)?;
            }
            Ok(())
        }
        Command::EmitAsp { program, input, strategy, repair, sem } => match program {
            Program::Input => {
                let p = emit_input(&input.load()?)?;
                for w in &p.warnings {
                    let _ = writeln!(err, "warning: {w}");
                }
                let mut text = p.mapping.clone();
                for (name, body) in [("data", &p.data), ("meta", &p.meta), ("constraints", &p.constraints)] {
                    text.push_str(&format!("% {name}\n{body}"));
                }
                for (name, body) in &p.queries {
                    text.push_str(&format!("% query {name}\n{body}"));
                }
                text.push_str(&format!("% rules\n{}", p.rules));
                out.text(&text)
            }
            Program::Priority => out.text(emit_priority(*strategy)),
            Program::Minconf => out.text(emit_minconf()),
            Program::Semantics => out.text(&emit_semantics(*repair, *sem)),
        },
        Command::Gen { facts, conflict_rate, max_conflict_arity, levels, pref_density, seed, out: dir } => {
            let params = GenParams {
                facts: *facts,
                conflict_rate: *conflict_rate,
                max_conflict_arity: *max_conflict_arity,
                levels: *levels,
                pref_density: *pref_density,
                seed: *seed,
            };
            let fixture = generate(&params)?;
            std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
            let mut written = Vec::new();
            for (name, text) in fixture.files() {
                let path = dir.join(name);
                std::fs::write(&path, text).map_err(|source| Error::Io { path: path.clone(), source })?;
                written.push(path.display().to_string());
            }
            out.json(&json!({ "files": written }))
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code:
/// 0 on success, 1 on input errors, 2 on usage errors.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match run(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
