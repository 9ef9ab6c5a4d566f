use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use super::{serve, Api, Bounds};
use crate::corpus::{Corpus, EntryKind};
use crate::derivation::{replay, Resolver, Script, Session};
use crate::engine::{solve, SolveLimits};
use crate::kernel::{parse_program, parse_query, program_with_ids, term_to_string, PredKey, Program};
use crate::verify::{check_lemma, compare_extensions, step_profile, LemmaVerdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        CommandResult { exit_code: 0, stdout, diagnostics: Vec::new() }
    }

    fn fail(code: i32, stdout: String, msg: impl Into<String>) -> Self {
        CommandResult { exit_code: code, stdout, diagnostics: vec![msg.into()] }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Self::fail(2, String::new(), msg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "lpt", version, about = "Unfold/fold transformation of sorting programs")]
struct Cli {
    /// Integer domain for bounded enumeration.
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,1,2", allow_hyphen_values = true)]
    domain: Vec<i64>,
    #[arg(long, global = true, default_value_t = 3)]
    max_list_len: usize,
    /// Resolution step budget per query.
    #[arg(long, global = true, default_value_t = 5_000_000)]
    max_steps: u64,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a query against a corpus program or program file.
    Run {
        program: String,
        #[arg(short, long)]
        query: String,
        #[arg(long)]
        max_answers: Option<usize>,
    },
    /// Replay a derivation script (corpus name or JSON file).
    Replay {
        script: String,
        /// Audit every step on the bounded extension of the root predicate.
        #[arg(long)]
        verify: bool,
        /// Print the program after every step.
        #[arg(long)]
        trace: bool,
    },
    /// Check lemmas or compare two programs on bounded extensions.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Resolution steps on reversed inputs of increasing length.
    Bench {
        #[arg(required = true)]
        programs: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        sizes: Vec<usize>,
        /// Predicate to profile; defaults to the head of the first clause.
        #[arg(long)]
        predicate: Option<String>,
    },
    /// Ranked goal-introduction candidates after the first N script steps.
    Candidates {
        script: String,
        #[arg(long)]
        clause: String,
        #[arg(long)]
        after: Option<usize>,
    },
    /// Inspect or export the embedded corpus.
    Corpus {
        #[command(subcommand)]
        what: CorpusCommand,
    },
    /// Serve the session API on 127.0.0.1.
    Serve {
        #[arg(long, env = "LPT_PORT", default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Check lemmas (all corpus lemmas when none are named).
    Lemma {
        ids: Vec<String>,
        #[arg(long, default_value = "lemma_context")]
        context: String,
    },
    /// Compare the bounded extensions of a predicate in two programs.
    Compare { before: String, after: String, predicate: String },
}

#[derive(Debug, Subcommand)]
enum CorpusCommand {
    List {
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    Show {
        name: String,
    },
    Export {
        dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Program,
    Lemma,
    Script,
}

impl From<Kind> for EntryKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Program => EntryKind::Program,
            Kind::Lemma => EntryKind::Lemma,
            Kind::Script => EntryKind::Script,
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn dispatch(argv: &[String]) -> CommandResult {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return CommandResult { exit_code: code, stdout: e.to_string(), diagnostics: Vec::new() };
        }
    };
    let corpus = Corpus::builtin();
    let limits = SolveLimits { max_steps: cli.max_steps, ..SolveLimits::default() };
    let bounds = Bounds { domain: cli.domain.clone(), max_list_len: cli.max_list_len, limits };
    let json_out = cli.format == Format::Json;
    match cli.command {
        Command::Run { program, query, max_answers } => run(&corpus, &program, &query, max_answers, limits, json_out),
        Command::Replay { script, verify, trace } => replay_cmd(&corpus, &script, verify, trace, &bounds, json_out),
        Command::Verify { what } => verify_cmd(&corpus, what, &bounds, json_out),
        Command::Bench { programs, sizes, predicate } => bench(&corpus, &programs, &sizes, predicate, limits, json_out),
        Command::Candidates { script, clause, after } => candidates_cmd(&corpus, &script, &clause, after, limits, json_out),
        Command::Corpus { what } => corpus_cmd(&corpus, what),
        Command::Serve { port } => match serve(Api::new(corpus, bounds), port) {
            Ok(()) => CommandResult::ok(String::new()),
            Err(e) => CommandResult::fail(1, String::new(), e.to_string()),
        },
    }
}

/// A corpus name, a path to a program file, or program text.
fn load_program(corpus: &Corpus, arg: &str) -> Result<Program, String> {
    if let Some(p) = Resolver::program(corpus, arg) {
        return Ok(p);
    }
    let text = if Path::new(arg).is_file() { std::fs::read_to_string(arg).map_err(|e| e.to_string())? } else { arg.to_string() };
    parse_program(&text).map_err(|e| format!("{arg}: {e}"))
}

fn load_script(corpus: &Corpus, arg: &str) -> Result<Script, String> {
    if let Ok(s) = corpus.script(arg) {
        return Ok(s);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    Script::from_json(&text).map_err(|e| format!("{arg}: {e}"))
}

fn run(corpus: &Corpus, program: &str, query: &str, max_answers: Option<usize>, limits: SolveLimits, json_out: bool) -> CommandResult {
    let p = match load_program(corpus, program) {
        Ok(p) => p,
        Err(e) => return CommandResult::usage(e),
    };
    let q = match parse_query(query) {
        Ok(q) => q,
        Err(e) => return CommandResult::usage(format!("query: {e}")),
    };
    let limits = match max_answers {
        Some(n) => limits.with_max_answers(n),
        None => limits,
    };
    let r = match solve(&p, &q, limits) {
        Ok(r) => r,
        Err(e) => return CommandResult::fail(1, String::new(), e.to_string()),
    };
    let rows: Vec<Vec<(String, String)>> = r
        .answers
        .iter()
        .map(|a| a.iter().map(|(v, t)| (v.to_string(), term_to_string(t))).collect())
        .collect();
    let out = if json_out {
        let answers: Vec<serde_json::Map<String, serde_json::Value>> =
            rows.iter().map(|row| row.iter().map(|(v, t)| (v.clone(), json!(t))).collect()).collect();
        json!({ "answers": answers, "steps": r.steps, "exhausted": r.exhausted }).to_string() + "\n"
    } else if rows.is_empty() {
        "false\n".to_string()
    } else {
        rows.iter()
            .map(|row| if row.is_empty() { "true".into() } else { row.iter().map(|(v, t)| format!("{v} = {t}")).collect::<Vec<_>>().join(", ") })
            .map(|l| l + "\n")
            .collect()
    };
    CommandResult::ok(out)
}

fn replay_cmd(corpus: &Corpus, script: &str, verify: bool, trace: bool, b: &Bounds, json_out: bool) -> CommandResult {
    let s = match load_script(corpus, script) {
        Ok(s) => s,
        Err(e) => return CommandResult::usage(e),
    };
    let start = std::time::Instant::now();
    let (session, r) = match replay_with(&s, corpus, verify, b) {
        Ok(x) => x,
        Err(e) => return CommandResult::fail(1, String::new(), e.to_string()),
    };
    let elapsed = start.elapsed();
    let audit_failures = session.history()[1..].iter().filter(|x| x.diff.as_ref().is_some_and(|d| !d.is_equal()) || x.audit_error.is_some()).count();
    let mut out = String::new();
    if json_out {
        let steps: Vec<_> = session.history()[1..]
            .iter()
            .map(|x| json!({ "application": x.application, "diff": x.diff, "audit_error": x.audit_error }))
            .collect();
        out = json!({
            "script": s.name,
            "final": crate::kernel::program_to_string(&r.final_program),
            "matches_expected": r.matches_expected,
            "steps": steps,
            "elapsed_ms": elapsed.as_millis() as u64,
        })
        .to_string()
            + "\n";
    } else {
        for (i, snap) in session.history().iter().enumerate().skip(1) {
            let a = snap.application.as_ref().expect("applied step");
            let tag = match (&snap.diff, &snap.audit_error) {
                (Some(d), _) => format!("  [{:?}]", d.verdict),
                (None, Some(e)) => format!("  [audit failed: {e}]"),
                _ => String::new(),
            };
            out += &format!("{i:>3}. {:?} {} {:?}{tag}\n", a.rule, a.target_clause.as_deref().unwrap_or("-"), a.safety);
            if trace {
                out += &program_with_ids(&snap.program);
            }
        }
        out += "\nfinal program:\n";
        out += &program_with_ids(&r.final_program);
        if let Some(m) = r.matches_expected {
            out += &format!("matches expected: {m}\n");
        }
    }
    let failed = r.matches_expected == Some(false);
    let mut res = CommandResult::ok(out);
    if failed {
        res.exit_code = 1;
        res.diagnostics.push("final program does not match the expected program".into());
    }
    if verify && audit_failures > 0 {
        res.diagnostics.push(format!("{audit_failures} step(s) changed the root extension"));
    }
    res
}

fn replay_with(s: &Script, corpus: &Corpus, verify: bool, b: &Bounds) -> Result<(Session, crate::derivation::Replay), String> {
    if !verify {
        return replay(s, corpus, false).map_err(|e| e.to_string());
    }
    // Replay with the command-line audit bounds.
    let base = crate::derivation::resolve_program(corpus, &s.base).map_err(|e| e.to_string())?;
    let mut session = Session::new(s.name.clone(), base, Resolver::lemmas(corpus));
    session.audit.domain = b.domain.clone();
    session.audit.max_list_len = b.max_list_len;
    for (i, step) in s.steps.iter().enumerate() {
        session.apply(step, true).map_err(|e| format!("step {i}: {e}"))?;
    }
    let matches_expected = match &s.expected_final {
        Some(name) => Some(crate::derivation::matches(&session, &corpus.program(name).map_err(|e| e.to_string())?)),
        None => None,
    };
    let r = crate::derivation::Replay { final_program: session.program().clone(), log: session.applications(), matches_expected };
    Ok((session, r))
}

fn verify_cmd(corpus: &Corpus, what: VerifyCommand, b: &Bounds, json_out: bool) -> CommandResult {
    match what {
        VerifyCommand::Lemma { ids, context } => {
            let ctx = match load_program(corpus, &context) {
                Ok(p) => p,
                Err(e) => return CommandResult::usage(e),
            };
            let ids = if ids.is_empty() { corpus.list(Some(EntryKind::Lemma)) } else { ids };
            let mut out = String::new();
            let mut verdicts = serde_json::Map::new();
            let mut all_hold = true;
            for id in ids {
                let l = match corpus.lemma(&id) {
                    Ok(l) => l,
                    Err(e) => return CommandResult::usage(e.to_string()),
                };
                match check_lemma(&l, &ctx, &b.domain, b.max_list_len, b.limits) {
                    Ok(v) => {
                        all_hold &= v.holds();
                        out += &match &v {
                            LemmaVerdict::Holds { instances } => format!("{id}: holds ({instances} instances)\n"),
                            LemmaVerdict::Fails { total, counterexamples } => {
                                format!("{id}: FAILS ({total} counterexamples)\n{}", counterexamples.iter().map(|c| format!("  {c}\n")).collect::<String>())
                            }
                        };
                        verdicts.insert(id, serde_json::to_value(&v).expect("verdict serializes"));
                    }
                    Err(e) => return CommandResult::fail(1, out, format!("{id}: {e}")),
                }
            }
            let out = if json_out { serde_json::Value::Object(verdicts).to_string() + "\n" } else { out };
            if all_hold {
                CommandResult::ok(out)
            } else {
                CommandResult::fail(1, out, "some lemmas do not hold")
            }
        }
        VerifyCommand::Compare { before, after, predicate } => {
            let (p0, p1) = match (load_program(corpus, &before), load_program(corpus, &after)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return CommandResult::usage(e),
            };
            let Some(key) = PredKey::parse(&predicate) else {
                return CommandResult::usage(format!("expected name/arity, found `{predicate}`"));
            };
            match compare_extensions(&p0, &p1, &key, &b.domain, b.max_list_len, b.limits) {
                Ok(d) => {
                    let out = if json_out { serde_json::to_string(&d).expect("diff serializes") + "\n" } else { d.render() };
                    if d.is_equal() {
                        CommandResult::ok(out)
                    } else {
                        CommandResult::fail(1, out, "extensions differ")
                    }
                }
                Err(e) => CommandResult::fail(1, String::new(), e.to_string()),
            }
        }
    }
}

fn bench(corpus: &Corpus, programs: &[String], sizes: &[usize], predicate: Option<String>, limits: SolveLimits, json_out: bool) -> CommandResult {
    let mut out = String::new();
    let mut profiles = Vec::new();
    for name in programs {
        let p = match load_program(corpus, name) {
            Ok(p) => p,
            Err(e) => return CommandResult::usage(e),
        };
        let Some(pred) = predicate.clone().or_else(|| p.clauses().first().map(|c| c.head.pred.to_string())) else {
            return CommandResult::usage(format!("{name}: empty program"));
        };
        let mut prof = match step_profile(&p, &pred, sizes, limits) {
            Ok(x) => x,
            Err(e) => return CommandResult::fail(1, out, format!("{name}: {e}")),
        };
        prof.program = name.clone();
        out += &prof.to_table();
        out.push('\n');
        profiles.push(prof);
    }
    if json_out {
        out = serde_json::to_string(&profiles).expect("profiles serialize") + "\n";
    }
    CommandResult::ok(out)
}

fn candidates_cmd(corpus: &Corpus, script: &str, clause: &str, after: Option<usize>, limits: SolveLimits, json_out: bool) -> CommandResult {
    let mut s = match load_script(corpus, script) {
        Ok(s) => s,
        Err(e) => return CommandResult::usage(e),
    };
    if let Some(n) = after {
        s.steps.truncate(n);
    }
    s.expected_final = None;
    let (session, _) = match replay(&s, corpus, false) {
        Ok(x) => x,
        Err(e) => return CommandResult::fail(1, String::new(), e.to_string()),
    };
    let cs = match session.candidates(clause, None, limits) {
        Ok(c) => c,
        Err(e) => return CommandResult::fail(1, String::new(), e.to_string()),
    };
    let out = if json_out {
        serde_json::to_string(&cs).expect("candidates serialize") + "\n"
    } else {
        let mut out = format!("{}\n", crate::kernel::clause_to_string(session.program().clause(clause).expect("ranked clause exists")));
        for c in &cs {
            let sc = &c.scores;
            out += &format!(
                "{:>3}. {:<28} at {} via {} (well_founded={}, success={}, coordination={}, size={})\n",
                c.rank, c.fingerprint, c.insert_position, c.folder, sc.well_founded, sc.successful_path, sc.variable_coordination, sc.size_penalty
            );
        }
        out
    };
    CommandResult::ok(out)
}

fn corpus_cmd(corpus: &Corpus, what: CorpusCommand) -> CommandResult {
    match what {
        CorpusCommand::List { kind } => CommandResult::ok(corpus.list(kind.map(Into::into)).join("\n") + "\n"),
        CorpusCommand::Show { name } => {
            if let Ok(t) = corpus.program_text(&name) {
                return CommandResult::ok(t);
            }
            if let Some(t) = corpus.script_text(&name) {
                return CommandResult::ok(t.to_string());
            }
            match corpus.lemma(&name) {
                Ok(l) => CommandResult::ok(serde_json::to_string_pretty(&l.to_spec()).expect("lemma serializes") + "\n"),
                Err(e) => CommandResult::usage(e.to_string()),
            }
        }
        CorpusCommand::Export { dir } => match corpus.export(&dir) {
            Ok(()) => CommandResult::ok(format!("exported to {}\n", dir.display())),
            Err(e) => CommandResult::fail(1, String::new(), e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &[&str]) -> Vec<String> {
        std::iter::once("lpt").chain(s.iter().copied()).map(String::from).collect()
    }

    #[test]
    fn run_naive_sort() {
        let r = dispatch(&args(&["run", "naive_sort", "-q", "sort([2,1,0],X)"]));
        assert_eq!(r.exit_code, 0, "{:?}", r.diagnostics);
        assert_eq!(r.stdout, "X = [0, 1, 2]\n");
    }

    #[test]
    fn syntax_errors_are_usage_errors() {
        assert_eq!(dispatch(&args(&["run", "naive_sort", "-q", "sort(["])).exit_code, 2);
        assert_eq!(dispatch(&args(&["frobnicate"])).exit_code, 2);
        assert_eq!(dispatch(&args(&["replay", "nosuch"])).exit_code, 2);
    }

    #[test]
    fn replay_reports_match() {
        let r = dispatch(&args(&["replay", "tamaki_sato"]));
        assert_eq!(r.exit_code, 0, "{:?}", r.diagnostics);
        assert!(r.stdout.contains("matches expected: true"));
    }
}
