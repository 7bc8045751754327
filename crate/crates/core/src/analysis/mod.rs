//! LR(1) characteristic machine construction and conflict resolution.

mod build;
mod check;
mod first;
mod items;
mod report;
mod resolve;

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;

pub use build::{build_canonical, build_pager, BuildOptions};
pub use check::{check_cycles, check_error_ambiguity, check_error_reduction_loops};
pub use first::{first_sets, FirstSets};
pub use items::{Item, ItemContext};
pub use report::state_report;
pub use resolve::{resolve_conflicts, rule_precedence};

use crate::diagnostic::{DiagCode, Diagnostic};
use crate::grammar::{Assoc, GrammarModel, SymbolId};

/// A set of symbols, stored as a bit set over symbol ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolSet(FixedBitSet);

impl SymbolSet {
    pub fn new(symbol_count: usize) -> Self {
        SymbolSet(FixedBitSet::with_capacity(symbol_count))
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, s: SymbolId) {
        self.0.insert(s.index());
    }

    pub fn remove(&mut self, s: SymbolId) {
        self.0.set(s.index(), false);
    }

    pub fn contains(&self, s: SymbolId) -> bool {
        self.0.contains(s.index())
    }

    /// Adds all of `other`; returns whether anything was added.
    pub fn union_with(&mut self, other: &SymbolSet) -> bool {
        if other.0.is_subset(&self.0) {
            return false;
        }
        self.0.union_with(&other.0);
        true
    }

    pub fn intersects(&self, other: &SymbolSet) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &SymbolSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn iter(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.0.ones().map(|i| SymbolId(i as u32))
    }
}

impl fmt::Debug for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|s| s.0)).finish()
    }
}

/// Where a precedence level comes from when resolving a shift-reduce conflict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrecSource {
    StaticLevel(u32, Assoc),
    /// Read the subtoken stored this many entries below the stack top.
    StackOffset(u32),
    /// Read the lookahead token's subtoken.
    LookaheadSubtoken,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionEntry {
    Shift(u32),
    Reduce(u32),
    Accept,
    /// Shift-reduce decision deferred to parse time.
    Dynamic { shift: u32, reduce: u32, rule_prec: PrecSource, lookahead_prec: PrecSource },
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MachineKind {
    Canonical,
    Pager,
}

/// One state of the characteristic machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub id: usize,
    pub kernel: Vec<Item>,
    pub transitions: BTreeMap<SymbolId, usize>,
    /// Completed productions and their right context sets.
    pub reductions: BTreeMap<u32, SymbolSet>,
    /// The state holds `<GOAL> : EOF <user goal> . EOF`.
    pub accepts: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    /// Settled at build time.
    Static(ActionEntry),
    Dynamic,
    /// No precedence applies; `chosen` is the fallback used under `--force`.
    Unresolved { chosen: ActionEntry },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub state: usize,
    pub terminal: SymbolId,
    pub shift: Option<ActionEntry>,
    pub reduces: Vec<u32>,
    pub resolution: Resolution,
}

impl Conflict {
    pub fn is_residual(&self) -> bool {
        matches!(self.resolution, Resolution::Unresolved { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    pub kind: MachineKind,
    pub states: Vec<State>,
    /// Per-state action rows; empty until `resolve_conflicts` runs.
    pub actions: Vec<BTreeMap<SymbolId, ActionEntry>>,
    pub first1: Vec<Vec<SymbolId>>,
    pub conflicts: Vec<Conflict>,
    pub warnings: Vec<Diagnostic>,
}

impl Machine {
    pub(crate) fn unresolved(kind: MachineKind, states: Vec<State>) -> Self {
        Machine { kind, states, actions: Vec::new(), first1: Vec::new(), conflicts: Vec::new(), warnings: Vec::new() }
    }

    pub fn is_resolved(&self) -> bool {
        self.actions.len() == self.states.len()
    }

    pub fn action(&self, state: usize, terminal: SymbolId) -> ActionEntry {
        self.actions[state].get(&terminal).copied().unwrap_or(ActionEntry::Error)
    }

    pub fn goto(&self, state: usize, nonterminal: SymbolId) -> Option<usize> {
        self.states[state].transitions.get(&nonterminal).copied()
    }

    pub fn residual_conflicts(&self) -> impl Iterator<Item = &Conflict> {
        self.conflicts.iter().filter(|c| c.is_residual())
    }
}

/// FIRST(1) of a state: the terminals of its read transitions together with
/// the right context sets of its reductions. The accept item counts as a
/// read of EOF.
pub fn state_first1(machine: &Machine, model: &GrammarModel, state: usize) -> Vec<SymbolId> {
    let s = &machine.states[state];
    let mut set = SymbolSet::new(model.symbols.len());
    for &sym in s.transitions.keys() {
        if model.symbol(sym).is_terminal() {
            set.insert(sym);
        }
    }
    for la in s.reductions.values() {
        set.union_with(la);
    }
    if s.accepts {
        set.insert(SymbolId::EOF);
    }
    set.iter().collect()
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum AnalysisError {
    #[error("state cap of {0} exceeded")]
    StateCap(usize),
    #[error("{} diagnostic(s) reject the grammar", .0.len())]
    Rejected(Vec<Diagnostic>),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AnalyzeOptions {
    pub canonical: bool,
    /// Accept residual conflicts, taking the fallback action for each.
    pub force: bool,
    pub build: BuildOptions,
}

/// Builds and resolves the machine for an augmented, validated model and
/// runs the grammar acceptance checks.
///
/// Returns the machine with its warnings, or every rejecting diagnostic.
pub fn analyze(model: &GrammarModel, opts: &AnalyzeOptions) -> Result<Machine, AnalysisError> {
    let machine = if opts.canonical {
        build_canonical(model, &opts.build)?
    } else {
        build_pager(model, &opts.build)?
    };
    let machine = resolve_conflicts(machine, model);
    let mut errors = check_error_ambiguity(&machine, model);
    if !opts.force {
        for c in machine.residual_conflicts().filter(|c| c.terminal != SymbolId::ERROR) {
            errors.push(Diagnostic::error(DiagCode::Conflict, None, report::describe_conflict(&machine, model, c)));
        }
    }
    errors.extend(check_error_reduction_loops(&machine, model));
    errors.extend(check_cycles(model));
    if errors.is_empty() {
        Ok(machine)
    } else {
        Err(AnalysisError::Rejected(errors))
    }
}
