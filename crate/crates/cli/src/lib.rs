//! Command-line front end for `causex_core`, and the worked-example corpus.

use std::ffi::OsString;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use causex_core::dsl::query::{check_expectations, execute, Env, QueryError, Text};
use causex_core::dsl::{self, parse_query, Format, ParseError, Pos, Query, QueryKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

pub mod corpus;
pub mod grammar;
pub mod load;

use load::{Embedded, FileSystem, LoadError, Loader, Source};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "causex", version, about = "Actual causes and explanations in structural causal models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a model document for totality, acyclicity and name clashes.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Table)]
        format: FormatArg,
    },
    /// Compute the values of all variables in one context.
    Solve {
        file: PathBuf,
        model: String,
        /// e.g. "UL=0, UMD=0"
        context: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Table)]
        format: FormatArg,
    },
    /// Check AC1-AC3 for a candidate cause in one setting.
    CheckCause(QueryArgs),
    /// List all actual causes in one setting.
    FindCauses(QueryArgs),
    /// Check EX1-EX4 for a candidate explanation.
    CheckExplanation(QueryArgs),
    /// List all explanations relative to an epistemic state.
    FindExplanations(QueryArgs),
    /// Exact EX1(a), EX1(b) and prior scores of a candidate explanation.
    Score(QueryArgs),
    /// Compare two candidate explanations criterion by criterion.
    Compare(QueryArgs),
    /// Evaluate a query document and check its `expect` lines.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Table)]
        format: FormatArg,
    },
    /// The worked-example corpus.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusCmd {
    /// Replay every case; stop at the first mismatch.
    Run {
        /// Read the corpus from this directory instead of the built-in copy.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// List case ids with their provenance.
    List {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// Model document(s) to load. Without --models/--states the built-in corpus is used.
    #[arg(long)]
    models: Vec<PathBuf>,
    /// State document(s) to load; their `models` imports are followed.
    #[arg(long)]
    states: Vec<PathBuf>,
    /// Model id, for setting-level queries.
    #[arg(long)]
    model: Option<String>,
    /// Epistemic state name, for explanation queries.
    #[arg(long)]
    state: Option<String>,
    /// Context, e.g. "UL=1, UMD=1".
    #[arg(long)]
    context: Option<String>,
    /// The explanandum, e.g. "F=1".
    #[arg(long)]
    phi: String,
    /// Candidate conjunction, e.g. "L=1 & MD=1".
    #[arg(long)]
    x: Option<String>,
    /// Second candidate, for compare.
    #[arg(long)]
    y: Option<String>,
    /// Contrast values for the candidate cause, in conjunct order, e.g. "0, 0".
    #[arg(long)]
    contrast: Option<String>,
    #[arg(long = "max-size")]
    max_size: Option<std::num::NonZeroUsize>,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Condition the EX1(b) score on the explanandum.
    #[arg(long = "ex1b-conditional")]
    ex1b_conditional: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Table,
    Tree,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Tree => Format::Tree,
        }
    }
}

/// Flag inputs get distinct synthetic line numbers so that a diagnostic
/// can be traced back to the flag that caused it.
const FLAGS: [(&str, Option<&str>); 7] = [
    ("--phi", Some(grammar::FORMULA)),
    ("--x", Some(grammar::CONJUNCTION)),
    ("--y", Some(grammar::CONJUNCTION)),
    ("--context", Some(grammar::CONTEXT)),
    ("--contrast", Some(grammar::VALUES)),
    ("--model", None),
    ("--state", None),
];

fn flag_text(flag: &str, value: Option<String>) -> Option<Text> {
    let line = FLAGS.iter().position(|(f, _)| *f == flag).expect("known flag") + 1;
    value.map(|text| Text { text, pos: Pos { line, column: 1 } })
}

/// Loads the documents a query imports, relative to `query_path`.
pub fn load_env(q: &Query, query_path: &Path, source: &dyn Source) -> Result<Env, LoadError> {
    let mut loader = Loader::new(source);
    for m in &q.models {
        loader.load_models(&load::relative_to(query_path, &m.text))?;
    }
    for s in &q.states {
        loader.load_states(&load::relative_to(query_path, &s.text))?;
    }
    Ok(loader.finish())
}

/// Every model and state of the built-in corpus.
pub fn corpus_env() -> Env {
    let mut loader = Loader::new(&Embedded);
    for (name, _) in corpus::FILES {
        let path = Path::new(name);
        let r = if name.ends_with(".scm.txt") {
            loader.load_models(path)
        } else if name.ends_with(".state.txt") {
            loader.load_states(path)
        } else {
            Ok(())
        };
        r.expect("the embedded corpus is well formed");
    }
    loader.finish()
}

fn query_from_args(kind: QueryKind, a: QueryArgs) -> (Query, Format) {
    let mut q = Query::new(kind);
    let here = |p: PathBuf| Text::new(p.to_string_lossy().into_owned());
    q.models = a.models.into_iter().map(here).collect();
    q.states = a.states.into_iter().map(here).collect();
    q.phi = flag_text("--phi", Some(a.phi));
    q.x = flag_text("--x", a.x);
    q.y = flag_text("--y", a.y);
    q.context = flag_text("--context", a.context);
    q.contrast = flag_text("--contrast", a.contrast);
    q.model = flag_text("--model", a.model);
    q.state = flag_text("--state", a.state);
    q.max_size = a.max_size.map(|n| n.get());
    q.ex1b_conditional = a.ex1b_conditional;
    (q, a.format.into())
}

/// Prints a parse error from flag input with the matching grammar excerpt.
fn report_flag_error(e: &ParseError, err: &mut dyn Write) {
    match FLAGS.get(e.line.wrapping_sub(1)) {
        Some((flag, g)) => {
            let _ = writeln!(err, "error: {flag}: column {}: {} error: {}", e.column, e.kind, e.message);
            if let Some(g) = g {
                let _ = write!(err, "\n{g}");
            }
        }
        None => {
            let _ = writeln!(err, "error: {e}");
        }
    }
}

/// The grammar excerpt for whatever directive sits on `line` of a query document.
fn query_line_grammar(q: &Query, line: usize) -> &'static str {
    let on = |t: &Option<Text>| t.as_ref().is_some_and(|t| t.pos.line == line);
    if on(&q.phi) {
        grammar::FORMULA
    } else if on(&q.x) || on(&q.y) {
        grammar::CONJUNCTION
    } else if on(&q.context) {
        grammar::CONTEXT
    } else if on(&q.contrast) {
        grammar::VALUES
    } else {
        grammar::QUERY
    }
}

fn report_load_error(e: &LoadError, err: &mut dyn Write) {
    let _ = writeln!(err, "error: {e}");
    if let Some(g) = e.grammar {
        let _ = write!(err, "\n{g}");
    }
}

enum Outcome {
    Report(Json, Format),
    Exit(i32),
}

fn answer(q: &Query, env: &Env, format: Format, err: &mut dyn Write, doc: Option<&Path>) -> Outcome {
    match execute(q, env) {
        Ok(report) => Outcome::Report(report, format),
        Err(QueryError::Parse(e)) => {
            match doc {
                Some(path) => {
                    let _ = writeln!(err, "error: {}:{e}\n\n{}", path.display(), query_line_grammar(q, e.line));
                }
                None => report_flag_error(&e, err),
            }
            Outcome::Exit(EXIT_INPUT)
        }
        Err(QueryError::Engine(e)) => {
            let _ = writeln!(err, "error: {e}");
            Outcome::Exit(EXIT_INPUT)
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = match cli.cmd {
        Cmd::Validate { file, format } => {
            let mut loader = Loader::new(&FileSystem);
            if let Err(e) = loader.load_models(&file) {
                report_load_error(&e, err);
                return EXIT_INPUT;
            }
            let env = loader.finish();
            let models: Vec<Json> = env.models.iter().map(|m| dsl::report::validation(m)).collect();
            Outcome::Report(json!({ "query": "validate", "file": file.display().to_string(), "models": models }), format.into())
        }
        Cmd::Solve { file, model, context, format } => {
            let mut q = Query::new(QueryKind::Solve);
            q.model = flag_text("--model", Some(model));
            q.context = flag_text("--context", Some(context));
            let mut loader = Loader::new(&FileSystem);
            if let Err(e) = loader.load_models(&file) {
                report_load_error(&e, err);
                return EXIT_INPUT;
            }
            answer(&q, &loader.finish(), format.into(), err, None)
        }
        Cmd::CheckCause(a) => flags(QueryKind::CheckCause, a, err),
        Cmd::FindCauses(a) => flags(QueryKind::FindCauses, a, err),
        Cmd::CheckExplanation(a) => flags(QueryKind::CheckExplanation, a, err),
        Cmd::FindExplanations(a) => flags(QueryKind::FindExplanations, a, err),
        Cmd::Score(a) => flags(QueryKind::Score, a, err),
        Cmd::Compare(a) => flags(QueryKind::Compare, a, err),
        Cmd::Run { file, format } => return run_document(&file, format.into(), out, err),
        Cmd::Corpus { cmd } => return corpus_command(cmd, out, err),
    };
    match outcome {
        Outcome::Report(report, format) => {
            let _ = out.write_all(dsl::emit(&report, format).as_bytes());
            EXIT_OK
        }
        Outcome::Exit(code) => code,
    }
}

fn flags(kind: QueryKind, a: QueryArgs, err: &mut dyn Write) -> Outcome {
    let (q, format) = query_from_args(kind, a);
    let env = if q.models.is_empty() && q.states.is_empty() {
        corpus_env()
    } else {
        match load_env(&q, Path::new("./query"), &FileSystem) {
            Ok(env) => env,
            Err(e) => {
                report_load_error(&e, err);
                return Outcome::Exit(EXIT_INPUT);
            }
        }
    };
    answer(&q, &env, format, err, None)
}

fn run_document(file: &Path, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {}: cannot read: {e}", file.display());
            return EXIT_INPUT;
        }
    };
    let q = match parse_query(&text) {
        Ok(q) => q,
        Err(e) => {
            let _ = writeln!(err, "error: {}:{e}\n\n{}", file.display(), grammar::QUERY);
            return EXIT_INPUT;
        }
    };
    let env = match load_env(&q, file, &FileSystem) {
        Ok(env) => env,
        Err(e) => {
            report_load_error(&e, err);
            return EXIT_INPUT;
        }
    };
    match answer(&q, &env, format, err, Some(file)) {
        Outcome::Report(report, format) => {
            let _ = out.write_all(dsl::emit(&report, format).as_bytes());
            match check_expectations(&q, &report) {
                Ok(()) => EXIT_OK,
                Err(m) => {
                    let _ = writeln!(err, "{}:{m}", file.display());
                    EXIT_INPUT
                }
            }
        }
        Outcome::Exit(code) => code,
    }
}

/// Document source, corpus root, and the names of the files under it.
type CorpusSource = (Box<dyn Source>, PathBuf, Vec<String>);

fn corpus_source(dir: &Option<PathBuf>) -> Result<CorpusSource, String> {
    match dir {
        None => Ok((Box::new(Embedded), PathBuf::new(), corpus::FILES.iter().map(|(n, _)| n.to_string()).collect())),
        Some(dir) => {
            let cases = dir.join("cases");
            let mut names: Vec<String> = std::fs::read_dir(&cases)
                .map_err(|e| format!("{}: {e}", cases.display()))?
                .filter_map(|e| e.ok())
                .map(|e| format!("cases/{}", e.file_name().to_string_lossy()))
                .collect();
            names.sort();
            Ok((Box::new(Rooted(dir.clone())), PathBuf::new(), names))
        }
    }
}

/// A file-system source whose relative paths start at a corpus directory.
struct Rooted(PathBuf);

impl Source for Rooted {
    fn read(&self, path: &Path) -> Result<String, String> {
        std::fs::read_to_string(self.0.join(path)).map_err(|e| format!("{}: {e}", self.0.join(path).display()))
    }
}

fn corpus_command(cmd: CorpusCmd, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (CorpusCmd::Run { dir } | CorpusCmd::List { dir }) = &cmd;
    let (source, root, names) = match corpus_source(dir) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let cases = match corpus::load_cases(source.as_ref(), &names) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    match cmd {
        CorpusCmd::List { .. } => {
            let width = cases.iter().map(|c| c.id.len()).max().unwrap_or(0);
            for c in &cases {
                let _ = writeln!(out, "{:width$}  {}", c.id, c.provenance);
            }
            EXIT_OK
        }
        CorpusCmd::Run { .. } => {
            for c in &cases {
                match corpus::run_case(c, source.as_ref(), &root) {
                    Ok(_) => {
                        let _ = writeln!(out, "ok    {}", c.id);
                    }
                    Err(f) => {
                        let _ = writeln!(out, "FAIL  {}", c.id);
                        let _ = writeln!(err, "case `{}` ({}):\n{f}", c.id, c.path.display());
                        return EXIT_INPUT;
                    }
                }
            }
            let _ = writeln!(out, "{} cases passed", cases.len());
            EXIT_OK
        }
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code: 0 when the query was answered, 1 on input errors, 2 on
/// internal errors.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let result = panic::catch_unwind(AssertUnwindSafe(|| dispatch(cli, out, err)));
    panic::set_hook(hook);
    match result {
        Ok(code) => code,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_default();
            let _ = writeln!(err, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}
