//! Helpers shared by the integration and acceptance tests: the grammar
//! suite, input generation, normalized parse results and brute-force
//! oracles for machine properties.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use lr1gen::analysis::{analyze, ActionEntry, AnalyzeOptions, Item, ItemContext, Machine, Resolution, SymbolSet};
use lr1gen::engine::{run, trace_line, BuiltinOracles, ParseEvent, ParseOptions, ParseOutcome, ParseStatus};
use lr1gen::grammar::{load_grammar, GrammarModel, SymbolId, SymbolKind};
use lr1gen::scanner::{derive_spec, tokenize, ScannerSpec};
use lr1gen::tables::ParseTables;

pub fn grammar_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../grammars")
}

pub fn input_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../inputs")
}

/// Suite grammar names, sorted.
pub fn suite() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(grammar_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "lr").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

pub fn source(name: &str) -> String {
    std::fs::read_to_string(grammar_dir().join(format!("{name}.lr"))).unwrap()
}

pub fn model(name: &str) -> GrammarModel {
    load_grammar(&source(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn machine(model: &GrammarModel, canonical: bool) -> Machine {
    let opts = AnalyzeOptions { canonical, ..AnalyzeOptions::default() };
    analyze(model, &opts).unwrap_or_else(|e| panic!("{e:?}"))
}

/// A suite grammar with both machines and their tables.
pub struct Built {
    pub name: String,
    pub model: GrammarModel,
    pub canonical: Machine,
    pub pager: Machine,
    pub canonical_tables: ParseTables,
    pub pager_tables: ParseTables,
    pub spec: ScannerSpec,
}

pub fn built(name: &str) -> Built {
    let model = model(name);
    let canonical = machine(&model, true);
    let pager = machine(&model, false);
    let canonical_tables = ParseTables::from_machine(&canonical, &model);
    let pager_tables = ParseTables::from_machine(&pager, &model);
    let (spec, _) = derive_spec(&pager_tables);
    Built { name: name.to_string(), model, canonical, pager, canonical_tables, pager_tables, spec }
}

/// One lexeme per scannable token: every literal plus a sample for each
/// bound class.
pub fn alphabet(spec: &ScannerSpec) -> Vec<String> {
    let mut out: Vec<String> = spec.literals.keys().cloned().collect();
    if spec.id.is_some() {
        out.push("a".to_string());
    }
    if spec.constant.is_some() {
        out.push("7".to_string());
    }
    if spec.string_literal.is_some() {
        out.push("\"s\"".to_string());
    }
    out
}

pub fn string_count(alphabet: usize, max_len: usize) -> usize {
    (0..=max_len).map(|k| alphabet.saturating_pow(k as u32)).fold(0usize, |a, b| a.saturating_add(b))
}

/// Calls `f` on every sequence of at most `max_len` lexemes.
pub fn for_each_string(alphabet: &[String], max_len: usize, mut f: impl FnMut(&str)) {
    let mut idx: Vec<usize> = Vec::new();
    loop {
        let text: Vec<&str> = idx.iter().map(|&i| alphabet[i].as_str()).collect();
        f(&text.join(" "));
        // odometer increment, growing the length when it wraps
        let mut k = idx.len();
        loop {
            if k == 0 {
                if idx.len() == max_len {
                    return;
                }
                idx = vec![0; idx.len() + 1];
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < alphabet.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

pub fn random_string(alphabet: &[String], max_len: usize, rng: &mut StdRng) -> String {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| alphabet.choose(rng).unwrap().as_str()).collect::<Vec<_>>().join(" ")
}

/// Lexemes of a random derivation of the user goal, or `None` when the
/// derivation uses a token the scanner cannot produce.
pub fn random_sentence(model: &GrammarModel, spec: &ScannerSpec, max_depth: usize, rng: &mut StdRng) -> Option<String> {
    let min = min_lengths(model);
    let goal = model.productions[0].rhs[1].symbol;
    let mut out = Vec::new();
    derive(model, spec, &min, goal, max_depth, rng, &mut out)?;
    Some(out.join(" "))
}

fn min_lengths(model: &GrammarModel) -> Vec<usize> {
    let mut min = vec![usize::MAX; model.symbols.len()];
    for (i, s) in model.symbols.iter().enumerate() {
        if s.is_terminal() {
            min[i] = 1;
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for p in &model.productions {
            let len = p.rhs.iter().map(|e| min[e.symbol.index()]).fold(0usize, |a, b| a.saturating_add(b));
            if len < min[p.lhs.index()] {
                min[p.lhs.index()] = len;
                changed = true;
            }
        }
    }
    min
}

fn derive(
    model: &GrammarModel,
    spec: &ScannerSpec,
    min: &[usize],
    sym: SymbolId,
    depth: usize,
    rng: &mut StdRng,
    out: &mut Vec<String>,
) -> Option<()> {
    let s = model.symbol(sym);
    if s.is_terminal() {
        out.push(lexeme(model, spec, sym, rng)?);
        return Some(());
    }
    let prods: Vec<_> = model.productions.iter().filter(|p| p.lhs == sym).collect();
    let cost = |p: &&lr1gen::grammar::Production| p.rhs.iter().map(|e| min[e.symbol.index()]).fold(0usize, |a, b| a.saturating_add(b));
    let p = if depth == 0 {
        *prods.iter().min_by_key(|p| cost(p)).unwrap()
    } else {
        *prods.choose(rng).unwrap()
    };
    for e in &p.rhs {
        derive(model, spec, min, e.symbol, depth.saturating_sub(1), rng, out)?;
    }
    Some(())
}

fn lexeme(model: &GrammarModel, spec: &ScannerSpec, sym: SymbolId, rng: &mut StdRng) -> Option<String> {
    let s = model.symbol(sym);
    match s.kind {
        SymbolKind::Reserved => Some(s.name.clone()),
        SymbolKind::Generic => s.subtokens.choose(rng).cloned(),
        SymbolKind::Plain => match s.name.as_str() {
            "id" => Some(["a", "b", "c"].choose(rng).unwrap().to_string()),
            "constant" => Some("7".to_string()),
            "string_literal" => Some("\"s\"".to_string()),
            // oracle targets come back from an id
            _ if spec.id.is_some() => Some("a".to_string()),
            _ => None,
        },
        _ => None,
    }
}

/// Replaces, inserts or deletes a few lexemes.
pub fn mutate(text: &str, alphabet: &[String], rng: &mut StdRng) -> String {
    let mut toks: Vec<String> = text.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect();
    for _ in 0..rng.gen_range(1..=3) {
        let at = rng.gen_range(0..=toks.len());
        match rng.gen_range(0..3) {
            0 if at < toks.len() => toks[at] = alphabet.choose(rng).unwrap().clone(),
            1 if at < toks.len() => {
                toks.remove(at);
            }
            _ => toks.insert(at, alphabet.choose(rng).unwrap().clone()),
        }
    }
    toks.join(" ")
}

pub fn parse(tables: &ParseTables, spec: &ScannerSpec, text: &str) -> ParseOutcome {
    run(tables, tokenize(text, spec).tokens, &mut BuiltinOracles::new(), ParseOptions::default())
}

/// Everything observable about a parse except state numbers and the
/// reductions undone on error.
pub fn normalized(tables: &ParseTables, out: &ParseOutcome) -> String {
    let mut s = format!("{:?}\n", out.status);
    if let Some(t) = &out.tree {
        s.push_str(&format!("{t}\n"));
    }
    for d in &out.diagnostics {
        s.push_str(&format!("{d}\n"));
    }
    for ev in &out.events {
        let line = match ev {
            ParseEvent::Shift { symbol, .. } => Some(format!("shift {symbol}")),
            ParseEvent::OracleAsked { x, rule, .. } => Some(format!("asked {x} {rule}")),
            ParseEvent::ErrorDetected { token, expected, .. } => Some(format!("error {token:?} {expected:?}")),
            ParseEvent::Discard(t) => Some(format!("discard {t:?}")),
            ParseEvent::Recover { token, .. } => Some(format!("recover {token:?}")),
            ParseEvent::OracleConsulted { token, .. } => Some(format!("consulted {token}")),
            ParseEvent::Reduce { .. } | ParseEvent::DynResolved { .. } => None,
            other => trace_line(tables, other).or_else(|| Some(format!("{other:?}"))),
        };
        if let Some(line) = line {
            s.push_str(&line);
            s.push('\n');
        }
    }
    s
}

/// Checks the recovery guarantees on one parse: the resume token never
/// errors before it is shifted, errors move strictly forward, and a parse
/// with errors either recovers or aborts by discarding EOF.
pub fn recovery_violations(out: &ParseOutcome) -> Vec<String> {
    let mut bad = Vec::new();
    let mut resuming = false;
    let mut last_error = None;
    let mut errors = 0;
    for ev in &out.events {
        match ev {
            ParseEvent::Recover { .. } => resuming = true,
            ParseEvent::Shift { .. } | ParseEvent::TokenRead(_) => resuming = false,
            ParseEvent::ErrorDetected { token, .. } => {
                errors += 1;
                if resuming {
                    bad.push(format!("resume token {token:?} errored"));
                }
                if last_error.is_some_and(|p| p >= token.pos) {
                    bad.push(format!("error position did not advance at {:?}", token.pos));
                }
                last_error = Some(token.pos);
            }
            _ => {}
        }
    }
    if errors > 0 {
        match &out.status {
            ParseStatus::AcceptedWithRecoveries(_) => {}
            ParseStatus::Aborted(lr1gen::engine::AbortReason::DiscardEof) => {}
            other => bad.push(format!("errors ended with {other:?}")),
        }
    }
    bad
}

/// A shortest symbol path from the start state to each state.
pub fn access_paths(m: &Machine) -> Vec<Vec<usize>> {
    let mut paths: Vec<Option<Vec<usize>>> = vec![None; m.states.len()];
    paths[0] = Some(vec![0]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        for &next in m.states[s].transitions.values() {
            if paths[next].is_none() {
                let mut p = paths[s].clone().unwrap();
                p.push(next);
                paths[next] = Some(p);
                queue.push_back(next);
            }
        }
    }
    paths.into_iter().map(Option::unwrap).collect()
}

/// Whether `t` is eventually shifted or accepted from the given stack of
/// states. Dynamic entries and entries removed by a nonassociative level
/// count as acceptance since either way `t` belongs to the state's
/// right context. `None` when forced tables make the reductions climb
/// forever.
pub fn simulate_one(model: &GrammarModel, m: &Machine, stack: &[usize], t: SymbolId) -> Option<bool> {
    let removed: BTreeSet<(usize, SymbolId)> = m
        .conflicts
        .iter()
        .filter(|c| c.resolution == Resolution::Static(ActionEntry::Error))
        .map(|c| (c.state, c.terminal))
        .collect();
    let limit = stack.len() + m.states.len();
    let mut stack = stack.to_vec();
    loop {
        if stack.len() > limit {
            return None;
        }
        let top = *stack.last().unwrap();
        match m.action(top, t) {
            ActionEntry::Shift(_) | ActionEntry::Accept | ActionEntry::Dynamic { .. } => return Some(true),
            ActionEntry::Error => return Some(removed.contains(&(top, t))),
            ActionEntry::Reduce(p) => {
                let prod = &model.productions[p as usize];
                stack.truncate(stack.len() - prod.rhs.len());
                match m.goto(*stack.last().unwrap(), prod.lhs) {
                    Some(g) => stack.push(g),
                    None => return Some(false),
                }
            }
        }
    }
}

pub fn terminals(model: &GrammarModel) -> Vec<SymbolId> {
    (0..model.symbols.len() as u32).map(SymbolId).filter(|&s| model.symbol(s).is_terminal()).collect()
}

/// FIRST(1) of every canonical state by single-token simulation. `None`
/// when some simulation does not terminate.
pub fn simulated_first1(model: &GrammarModel, m: &Machine) -> Option<Vec<BTreeSet<SymbolId>>> {
    let terms = terminals(model);
    let mut out = Vec::new();
    for path in access_paths(m) {
        let mut set = BTreeSet::new();
        for &t in &terms {
            if simulate_one(model, m, &path, t)? {
                set.insert(t);
            }
        }
        out.push(set);
    }
    Some(out)
}

/// For each canonical state, the merged state reached by the same path.
pub fn merge_map(canonical: &Machine, merged: &Machine) -> Vec<usize> {
    let mut map = vec![usize::MAX; canonical.states.len()];
    map[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for (sym, &next) in &canonical.states[c].transitions {
            if map[next] == usize::MAX {
                map[next] = merged.states[map[c]].transitions[sym];
                queue.push_back(next);
            }
        }
    }
    map
}

/// Kernel cores of a machine's states, deduplicated.
pub fn distinct_cores(m: &Machine) -> usize {
    m.states
        .iter()
        .map(|s| s.kernel.iter().map(Item::core).collect::<Vec<_>>())
        .collect::<BTreeSet<_>>()
        .len()
}

/// Reduce-reduce conflicts created by merging all same-core canonical
/// states, as in LALR(1).
pub fn lalr_reduce_conflicts(model: &GrammarModel, canonical: &Machine) -> usize {
    let ctx = ItemContext::new(model);
    let mut merged: BTreeMap<Vec<(u32, u32)>, Vec<SymbolSet>> = BTreeMap::new();
    for s in &canonical.states {
        let core: Vec<_> = s.kernel.iter().map(Item::core).collect();
        let entry = merged.entry(core).or_insert_with(|| vec![SymbolSet::new(model.symbols.len()); s.kernel.len()]);
        for (acc, it) in entry.iter_mut().zip(&s.kernel) {
            acc.union_with(&it.lookahead);
        }
    }
    let mut count = 0;
    for (core, las) in &merged {
        let kernel: Vec<Item> = core
            .iter()
            .zip(las)
            .map(|(&(production, dot), la)| Item { production, dot, lookahead: la.clone() })
            .collect();
        let mut by_term: BTreeMap<SymbolId, BTreeSet<u32>> = BTreeMap::new();
        for it in ctx.closure(&kernel) {
            if it.dot == ctx.rhs_len(it.production) && it.production != 0 {
                for t in it.lookahead.iter() {
                    by_term.entry(t).or_default().insert(it.production);
                }
            }
        }
        count += by_term.values().filter(|ps| ps.len() > 1).count();
    }
    count
}
