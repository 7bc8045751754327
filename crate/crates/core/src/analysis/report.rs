use std::fmt::Write;

use super::{ActionEntry, Conflict, Item, Machine, MachineKind, PrecSource, Resolution, SymbolSet};
use crate::grammar::{symbol_source, GrammarModel, Selector, SymbolId, TokRef};

fn sym(model: &GrammarModel, s: SymbolId) -> String {
    symbol_source(model.symbol(s))
}

fn set_source(model: &GrammarModel, set: &SymbolSet) -> String {
    set.iter().map(|s| sym(model, s)).collect::<Vec<_>>().join(" ")
}

/// `lhs : a . b` with selectors kept.
pub(crate) fn item_source(model: &GrammarModel, production: u32, dot: u32) -> String {
    let p = &model.productions[production as usize];
    let mut out = format!("{} :", model.name(p.lhs));
    for (i, e) in p.rhs.iter().enumerate() {
        if i == dot as usize {
            out.push_str(" .");
        }
        out.push(' ');
        match e.selector {
            Selector::Use => out.push_str("%use "),
            Selector::Ref => out.push_str("%ref "),
            Selector::None => {}
        }
        out.push_str(&model.tokref_source(TokRef { symbol: e.symbol, subtoken: e.subtoken }));
    }
    if dot as usize == p.rhs.len() {
        out.push_str(" .");
    }
    out
}

fn item_line(model: &GrammarModel, it: &Item) -> String {
    format!("{}    [{}]", item_source(model, it.production, it.dot), set_source(model, &it.lookahead))
}

fn prec_source(p: PrecSource) -> String {
    match p {
        PrecSource::StaticLevel(l, a) => format!("level {l} {}", a.as_str()),
        PrecSource::StackOffset(k) => format!("stack offset {k}"),
        PrecSource::LookaheadSubtoken => "lookahead subtoken".to_string(),
    }
}

pub(crate) fn action_source(a: ActionEntry) -> String {
    match a {
        ActionEntry::Shift(s) => format!("shift {s}"),
        ActionEntry::Reduce(p) => format!("reduce {p}"),
        ActionEntry::Accept => "accept".to_string(),
        ActionEntry::Dynamic { shift, reduce, rule_prec, lookahead_prec } => format!(
            "shift {shift} or reduce {reduce} by {} against {}",
            prec_source(rule_prec),
            prec_source(lookahead_prec)
        ),
        ActionEntry::Error => "error".to_string(),
    }
}

/// One-line description of a conflict, naming the state, the terminal and
/// the competing items.
pub(crate) fn describe_conflict(machine: &Machine, model: &GrammarModel, c: &Conflict) -> String {
    let state = &machine.states[c.state];
    let mut parts = Vec::new();
    if c.shift.is_some() {
        for it in &state.kernel {
            let rhs = &model.productions[it.production as usize].rhs;
            if rhs.get(it.dot as usize).map(|e| e.symbol) == Some(c.terminal) {
                parts.push(item_source(model, it.production, it.dot));
            }
        }
        if parts.is_empty() {
            parts.push(format!("shift {}", sym(model, c.terminal)));
        }
    }
    for &p in &c.reduces {
        let len = model.productions[p as usize].rhs.len() as u32;
        parts.push(item_source(model, p, len));
    }
    format!("state {} on {}: {}", c.state, sym(model, c.terminal), parts.join(" | "))
}

fn resolution_source(r: &Resolution) -> String {
    match r {
        Resolution::Static(a) => format!("resolved to {}", action_source(*a)),
        Resolution::Dynamic => "resolved at parse time".to_string(),
        Resolution::Unresolved { chosen } => format!("unresolved, forced to {}", action_source(*chosen)),
    }
}

/// Human readable listing of every state of a resolved machine.
pub fn state_report(machine: &Machine, model: &GrammarModel) -> String {
    let mut out = String::new();
    let kind = match machine.kind {
        MachineKind::Canonical => "canonical",
        MachineKind::Pager => "pager",
    };
    let _ = writeln!(out, "{kind} machine, {} states", machine.states.len());
    for (i, p) in model.productions.iter().enumerate() {
        let _ = writeln!(out, "  {i:>4}  {}", model.production_source(p));
    }
    for s in &machine.states {
        let _ = writeln!(out);
        let _ = writeln!(out, "state {}", s.id);
        for it in &s.kernel {
            let _ = writeln!(out, "    {}", item_line(model, it));
        }
        for (&t, &target) in &s.transitions {
            let _ = writeln!(out, "  on {} goto {}", sym(model, t), target);
        }
        if s.accepts {
            let _ = writeln!(out, "  on EOF accept");
        }
        for (&p, la) in &s.reductions {
            let _ = writeln!(out, "  reduce {} on [{}]", p, set_source(model, la));
        }
        let first1: Vec<String> = machine.first1.get(s.id).into_iter().flatten().map(|&t| sym(model, t)).collect();
        let _ = writeln!(out, "  first1 [{}]", first1.join(" "));
        for c in machine.conflicts.iter().filter(|c| c.state == s.id) {
            let _ = writeln!(out, "  conflict on {}: {}", sym(model, c.terminal), resolution_source(&c.resolution));
        }
    }
    out
}
