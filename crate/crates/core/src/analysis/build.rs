//! Characteristic machine construction: canonical LR(1) and Pager merging.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::items::{Item, ItemContext};
use super::{AnalysisError, Machine, MachineKind, State, SymbolSet};
use crate::grammar::{GrammarModel, SymbolId};

type Core = Vec<(u32, u32)>;

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Construction fails once this many states exist.
    pub state_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { state_cap: 200_000 }
    }
}

#[derive(Clone, Debug)]
struct RawState {
    core: Core,
    la: Vec<SymbolSet>,
    transitions: BTreeMap<SymbolId, usize>,
}

impl RawState {
    fn kernel(&self) -> Vec<Item> {
        self.core
            .iter()
            .zip(&self.la)
            .map(|(&(production, dot), la)| Item { production, dot, lookahead: la.clone() })
            .collect()
    }
}

enum Mode<'a> {
    Canonical,
    Pager { strict: &'a HashSet<Core> },
}

/// Full canonical LR(1) machine: states are identified by core and lookaheads.
pub fn build_canonical(model: &GrammarModel, opts: &BuildOptions) -> Result<Machine, AnalysisError> {
    let ctx = ItemContext::new(model);
    let raw = construct(&ctx, Mode::Canonical, opts)?;
    Ok(finish(&ctx, raw, MachineKind::Canonical))
}

/// LR(1) machine with same-core states merged when weakly compatible.
///
/// After construction, lookaheads are recomputed as the least fixpoint over
/// the final transition graph. Each state is then checked against every
/// incoming contribution: every conflicting terminal must carry the same
/// action set. A state that
/// fails the check has its core marked as unmergeable and the machine is
/// regenerated.
pub fn build_pager(model: &GrammarModel, opts: &BuildOptions) -> Result<Machine, AnalysisError> {
    let ctx = ItemContext::new(model);
    let mut strict: HashSet<Core> = HashSet::new();
    loop {
        let mut raw = construct(&ctx, Mode::Pager { strict: &strict }, opts)?;
        recompute_lookaheads(&ctx, &mut raw);
        let bad = unsafe_merges(&ctx, &raw);
        if bad.is_empty() {
            return Ok(finish(&ctx, raw, MachineKind::Pager));
        }
        let before = strict.len();
        strict.extend(bad);
        if strict.len() == before {
            // the offending merge happened upstream; fall back to exact states everywhere
            let all: Vec<Core> = raw.iter().map(|s| s.core.clone()).collect();
            strict.extend(all);
            let raw = construct(&ctx, Mode::Pager { strict: &strict }, opts)?;
            return Ok(finish(&ctx, raw, MachineKind::Pager));
        }
    }
}

fn start_state(ctx: &ItemContext) -> RawState {
    let mut la = SymbolSet::new(ctx.symbol_count());
    la.insert(SymbolId::EOF);
    RawState { core: vec![(0, 0)], la: vec![la], transitions: BTreeMap::new() }
}

/// Successor kernels of a state, grouped by transition symbol in id order.
/// The final EOF of production 0 is an accept, not a transition.
fn successors(ctx: &ItemContext, kernel: &[Item]) -> BTreeMap<SymbolId, Vec<Item>> {
    let mut groups: BTreeMap<SymbolId, Vec<Item>> = BTreeMap::new();
    for it in ctx.closure(kernel) {
        if it.production == 0 && it.dot == 2 {
            continue;
        }
        if let Some(sym) = ctx.next_symbol(it.production, it.dot) {
            groups.entry(sym).or_default().push(Item {
                production: it.production,
                dot: it.dot + 1,
                lookahead: it.lookahead,
            });
        }
    }
    for items in groups.values_mut() {
        items.sort_by_key(Item::core);
    }
    groups
}

fn construct(ctx: &ItemContext, mode: Mode, opts: &BuildOptions) -> Result<Vec<RawState>, AnalysisError> {
    let mut states = vec![start_state(ctx)];
    let mut by_core: HashMap<Core, Vec<usize>> = HashMap::new();
    let mut exact: HashMap<(Core, Vec<SymbolSet>), usize> = HashMap::new();
    by_core.entry(states[0].core.clone()).or_default().push(0);
    exact.insert((states[0].core.clone(), states[0].la.clone()), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut queued = vec![true];

    while let Some(s) = queue.pop_front() {
        queued[s] = false;
        let kernel = states[s].kernel();
        for (sym, items) in successors(ctx, &kernel) {
            let core: Core = items.iter().map(Item::core).collect();
            let la: Vec<SymbolSet> = items.into_iter().map(|it| it.lookahead).collect();
            let target = match &mode {
                Mode::Canonical => exact.get(&(core.clone(), la.clone())).copied(),
                Mode::Pager { strict } => {
                    let strict = strict.contains(&core);
                    let previous = states[s].transitions.get(&sym).copied();
                    let candidates = by_core.get(&core).map(Vec::as_slice).unwrap_or(&[]);
                    let order = previous
                        .filter(|p| states[*p].core == core)
                        .into_iter()
                        .chain(candidates.iter().copied().filter(|c| Some(*c) != previous));
                    let mut found = None;
                    for t in order {
                        if strict {
                            if states[t].la == la {
                                found = Some(t);
                                break;
                            }
                        } else if compatible(&states[t].la, &la) {
                            let mut grew = false;
                            for (a, b) in states[t].la.iter_mut().zip(&la) {
                                grew |= a.union_with(b);
                            }
                            if grew && !queued[t] {
                                queued[t] = true;
                                queue.push_back(t);
                            }
                            found = Some(t);
                            break;
                        }
                    }
                    found
                }
            };
            let target = match target {
                Some(t) => t,
                None => {
                    if states.len() >= opts.state_cap {
                        return Err(AnalysisError::StateCap(opts.state_cap));
                    }
                    let t = states.len();
                    by_core.entry(core.clone()).or_default().push(t);
                    if let Mode::Canonical = mode {
                        exact.insert((core.clone(), la.clone()), t);
                    }
                    states.push(RawState { core, la, transitions: BTreeMap::new() });
                    queued.push(true);
                    queue.push_back(t);
                    t
                }
            };
            states[s].transitions.insert(sym, target);
        }
    }
    Ok(renumber(states))
}

/// Pager's weak compatibility.
pub(crate) fn compatible(u: &[SymbolSet], v: &[SymbolSet]) -> bool {
    let n = u.len();
    for i in 0..n {
        for j in i + 1..n {
            let cross = u[i].intersects(&v[j]) || u[j].intersects(&v[i]);
            if cross && !u[i].intersects(&u[j]) && !v[i].intersects(&v[j]) {
                return false;
            }
        }
    }
    true
}

/// Keeps states reachable from state 0, numbered breadth-first with
/// transitions taken in symbol-id order.
fn renumber(states: Vec<RawState>) -> Vec<RawState> {
    let mut new_id = vec![usize::MAX; states.len()];
    let mut order = vec![0usize];
    new_id[0] = 0;
    let mut i = 0;
    while i < order.len() {
        for &t in states[order[i]].transitions.values() {
            if new_id[t] == usize::MAX {
                new_id[t] = order.len();
                order.push(t);
            }
        }
        i += 1;
    }
    let mut slots: Vec<Option<RawState>> = states.into_iter().map(Some).collect();
    order
        .iter()
        .map(|&old| {
            let mut s = slots[old].take().unwrap();
            for t in s.transitions.values_mut() {
                *t = new_id[*t];
            }
            s
        })
        .collect()
}

/// Replaces every lookahead with the least fixpoint implied by the final graph.
fn recompute_lookaheads(ctx: &ItemContext, states: &mut [RawState]) {
    let n = ctx.symbol_count();
    for (i, s) in states.iter_mut().enumerate() {
        for la in s.la.iter_mut() {
            *la = SymbolSet::new(n);
        }
        if i == 0 {
            s.la[0].insert(SymbolId::EOF);
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..states.len() {
            let kernel = states[s].kernel();
            for (sym, items) in successors(ctx, &kernel) {
                let t = states[s].transitions[&sym];
                for it in items {
                    let pos = states[t].core.binary_search(&it.core()).expect("core mismatch");
                    changed |= states[t].la[pos].union_with(&it.lookahead);
                }
            }
        }
    }
}

/// Terminal → set of raw actions (`None` = shift/accept, `Some(p)` = reduce p).
fn raw_actions(ctx: &ItemContext, kernel: &[Item]) -> BTreeMap<SymbolId, BTreeSet<Option<u32>>> {
    let mut out: BTreeMap<SymbolId, BTreeSet<Option<u32>>> = BTreeMap::new();
    for it in ctx.closure(kernel) {
        match ctx.next_symbol(it.production, it.dot) {
            Some(sym) if ctx.model.symbol(sym).is_terminal() => {
                out.entry(sym).or_default().insert(None);
            }
            Some(_) => {}
            None => {
                for t in it.lookahead.iter() {
                    out.entry(t).or_default().insert(Some(it.production));
                }
            }
        }
    }
    out
}

fn unsafe_merges(ctx: &ItemContext, states: &[RawState]) -> HashSet<Core> {
    let mut bad = HashSet::new();
    let own: Vec<BTreeMap<SymbolId, BTreeSet<Option<u32>>>> =
        states.iter().map(|s| raw_actions(ctx, &s.kernel())).collect();
    for s in states {
        for (sym, items) in successors(ctx, &s.kernel()) {
            let t = s.transitions[&sym];
            let target = &states[t];
            if bad.contains(&target.core) {
                continue;
            }
            let mut ok = true;
            if own[t].values().any(|a| a.len() > 1) {
                let contributed = raw_actions(ctx, &items);
                for (term, acts) in &own[t] {
                    if acts.len() > 1 && contributed.get(term) != Some(acts) {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                bad.insert(target.core.clone());
            }
        }
    }
    bad
}

fn finish(ctx: &ItemContext, raw: Vec<RawState>, kind: MachineKind) -> Machine {
    let states = raw
        .into_iter()
        .enumerate()
        .map(|(id, r)| {
            let kernel = r.kernel();
            let mut reductions: BTreeMap<u32, SymbolSet> = BTreeMap::new();
            for it in ctx.closure(&kernel) {
                if it.dot == ctx.rhs_len(it.production) && it.production != 0 {
                    reductions.entry(it.production).or_insert_with(|| SymbolSet::new(ctx.symbol_count())).union_with(&it.lookahead);
                }
            }
            let accepts = kernel.iter().any(|it| it.production == 0 && it.dot == 2);
            State { id, kernel, transitions: r.transitions, reductions, accepts }
        })
        .collect();
    Machine::unresolved(kind, states)
}
