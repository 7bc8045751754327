mod listing;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lr1gen::analysis::{analyze, state_report, AnalysisError, AnalyzeOptions, Machine};
use lr1gen::engine::{run, trace_line, BuiltinOracles, ParseOptions, ParseStatus};
use lr1gen::grammar::{load_grammar, GrammarModel};
use lr1gen::scanner::{derive_spec, tokenize};
use lr1gen::tables::{deserialize, inject, serialize, ParseTables};

#[derive(Parser)]
#[command(name = "lr1gen", version, about = "LR(1) parser generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build parse tables for a grammar.
    Analyze {
        grammar: PathBuf,
        /// Table file to write; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the state report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Build the canonical machine instead of the merged one.
        #[arg(long)]
        canonical: bool,
        /// Accept unresolved conflicts, using the default choice.
        #[arg(long)]
        force: bool,
    },
    /// Parse an input file with the built-in scanner and oracle handlers.
    Parse {
        tables: PathBuf,
        input: PathBuf,
        /// Print tokens and oracle decisions.
        #[arg(long)]
        trace_tokens: bool,
        /// Print the final tree.
        #[arg(long)]
        tree: bool,
        /// Abort once more than N errors have been seen.
        #[arg(long, value_name = "N")]
        max_errors: Option<usize>,
    },
    /// Fill the placeholders of a skeleton file from a table file.
    Inject { tables: PathBuf, skeleton: PathBuf, out: PathBuf },
    /// Print the state report for a grammar.
    Report {
        grammar: PathBuf,
        #[arg(long)]
        canonical: bool,
        #[arg(long)]
        force: bool,
    },
}

fn main() -> ExitCode {
    let code = match Cli::parse().command {
        Command::Analyze { grammar, out, report, canonical, force } => {
            cmd_analyze(&grammar, out.as_deref(), report.as_deref(), canonical, force)
        }
        Command::Parse { tables, input, trace_tokens, tree, max_errors } => {
            cmd_parse(&tables, &input, trace_tokens, tree, max_errors)
        }
        Command::Inject { tables, skeleton, out } => cmd_inject(&tables, &skeleton, &out),
        Command::Report { grammar, canonical, force } => cmd_report(&grammar, canonical, force),
    };
    ExitCode::from(code)
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {}", path.display(), e))
}

/// Loads and analyzes a grammar, printing diagnostics. Errs with the exit code.
fn build(path: &Path, canonical: bool, force: bool) -> Result<(GrammarModel, Machine), u8> {
    let text = read(path).map_err(|e| {
        eprintln!("error: {e}");
        2
    })?;
    let model = load_grammar(&text).map_err(|e| {
        for d in &e.diagnostics {
            eprintln!("{}: {}", path.display(), d);
        }
        1
    })?;
    let opts = AnalyzeOptions { canonical, force, ..AnalyzeOptions::default() };
    let machine = analyze(&model, &opts).map_err(|e| {
        match e {
            AnalysisError::Rejected(diags) => {
                for d in &diags {
                    eprintln!("{}: {}", path.display(), d);
                }
            }
            other => eprintln!("{}: error: {}", path.display(), other),
        }
        1
    })?;
    for w in &machine.warnings {
        eprintln!("{}: {}", path.display(), w);
    }
    Ok((model, machine))
}

fn cmd_analyze(grammar: &Path, out: Option<&Path>, report: Option<&Path>, canonical: bool, force: bool) -> u8 {
    let (model, machine) = match build(grammar, canonical, force) {
        Ok(built) => built,
        Err(code) => return code,
    };
    let text = serialize(&ParseTables::from_machine(&machine, &model));
    let written = match out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    let written = written.and_then(|()| match report {
        Some(p) => write(p, &state_report(&machine, &model)),
        None => Ok(()),
    });
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn cmd_report(grammar: &Path, canonical: bool, force: bool) -> u8 {
    match build(grammar, canonical, force) {
        Ok((model, machine)) => {
            print!("{}", state_report(&machine, &model));
            0
        }
        Err(code) => code,
    }
}

fn load_tables(path: &Path) -> Result<ParseTables, String> {
    let text = read(path)?;
    deserialize(&text).map_err(|e| format!("{}: {}", path.display(), e))
}

fn cmd_parse(tables: &Path, input: &Path, trace_tokens: bool, tree: bool, max_errors: Option<usize>) -> u8 {
    let (t, source) = match load_tables(tables).and_then(|t| read(input).map(|s| (t, s))) {
        Ok(loaded) => loaded,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    let (spec, warnings) = derive_spec(&t);
    for w in &warnings {
        eprintln!("{}: {}", tables.display(), w);
    }
    let scan = tokenize(&source, &spec);
    let path = input.display().to_string();
    for d in &scan.diagnostics {
        let pos = d.pos.unwrap_or_default();
        eprintln!("#E \"{}\", line {}: {}", path, pos, d.message);
    }
    let opts = ParseOptions { build_tree: tree, record_events: true, max_errors };
    let outcome = run(&t, scan.tokens, &mut BuiltinOracles::new(), opts);
    if trace_tokens {
        for ev in &outcome.events {
            if let Some(line) = trace_line(&t, ev) {
                println!("{line}");
            }
        }
    }
    eprint!("{}", listing::render(&t, &source, &path, &outcome.events));
    for d in &outcome.diagnostics {
        eprintln!("{}: {}", path, d);
    }
    if let Some(tr) = outcome.tree.as_ref().filter(|_| tree) {
        println!("{tr}");
    }
    match outcome.status {
        ParseStatus::Accepted if scan.diagnostics.is_empty() => 0,
        ParseStatus::Accepted | ParseStatus::AcceptedWithRecoveries(_) => 1,
        ParseStatus::Aborted(_) => 2,
    }
}

fn cmd_inject(tables: &Path, skeleton: &Path, out: &Path) -> u8 {
    let (t, skel) = match load_tables(tables).and_then(|t| read(skeleton).map(|s| (t, s))) {
        Ok(loaded) => loaded,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match inject(&skel, &t) {
        Ok(text) => match write(out, &text) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Err(e) => {
            eprintln!("{}: {}", skeleton.display(), e);
            1
        }
    }
}
