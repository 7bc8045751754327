//! Self-contained parse tables: everything the engine needs at run time,
//! with a stable text encoding and skeleton injection.

mod format;
mod inject;

use serde::{Deserialize, Serialize};

pub use format::{deserialize, serialize, TableError};
pub use inject::{inject, InjectError, PLACEHOLDERS};

use crate::analysis::{ActionEntry, Machine};
use crate::grammar::{Assoc, GrammarModel, Selector, SymbolKind, TreeAction};

pub const FORMAT_VERSION: u32 = 1;

/// `(symbol, subtoken)`; the subtoken is absent for whole tokens.
pub type TokenCode = (u32, Option<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// EOF and ERROR.
    Builtin,
    Nonterminal,
    Plain,
    Reserved,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolEntry {
    pub name: String,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subtokens: Vec<String>,
}

impl SymbolEntry {
    pub fn is_terminal(&self) -> bool {
        self.kind != Kind::Nonterminal
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeActionEntry {
    Node(String),
    Map(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorKind {
    Use,
    Ref,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectorEntry {
    pub kind: SelectorKind,
    /// 1-based position in the right-hand side.
    pub position: u32,
    /// Entries below the stack top at reduction time.
    pub offset: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionEntry {
    pub lhs: u32,
    pub rhs: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<TreeActionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selector: Option<SelectorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<TokenCode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleEntry {
    pub rule: u32,
    pub x: TokenCode,
    pub y: TokenCode,
    pub body: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapTable {
    pub name: String,
    /// `(generic symbol, subtoken, node)`.
    pub entries: Vec<(u32, u32, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecEntry {
    pub assoc: Assoc,
    pub members: Vec<TokenCode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseTables {
    pub version: u32,
    pub symbols: Vec<SymbolEntry>,
    pub productions: Vec<ProductionEntry>,
    /// Per state, `(terminal, action)` sorted by terminal. Missing means error.
    pub actions: Vec<Vec<(u32, ActionEntry)>>,
    /// Per state, `(nonterminal, state)` sorted by nonterminal.
    pub gotos: Vec<Vec<(u32, u32)>>,
    pub first1: Vec<Vec<u32>>,
    pub oracles: Vec<OracleEntry>,
    pub maps: Vec<MapTable>,
    pub precedence: Vec<PrecEntry>,
    pub start_state: u32,
}

impl ParseTables {
    /// Flattens a resolved machine and its grammar.
    pub fn from_machine(machine: &Machine, model: &GrammarModel) -> Self {
        assert!(machine.is_resolved(), "tables need a resolved machine");
        let symbols = model
            .symbols
            .iter()
            .map(|s| SymbolEntry {
                name: s.name.clone(),
                kind: match s.kind {
                    SymbolKind::Eof | SymbolKind::Error => Kind::Builtin,
                    SymbolKind::Nonterminal => Kind::Nonterminal,
                    SymbolKind::Plain => Kind::Plain,
                    SymbolKind::Reserved => Kind::Reserved,
                    SymbolKind::Generic => Kind::Generic,
                },
                subtokens: s.subtokens.clone(),
            })
            .collect();
        let productions = model
            .productions
            .iter()
            .map(|p| ProductionEntry {
                lhs: p.lhs.0,
                rhs: p.rhs.iter().map(|e| e.symbol.0).collect(),
                action: p.tree_action.as_ref().map(|a| match a {
                    TreeAction::Node(n) => TreeActionEntry::Node(n.clone()),
                    TreeAction::Map(m) => TreeActionEntry::Map(m.clone()),
                }),
                selector: p.selector().map(|(pos, sel)| SelectorEntry {
                    kind: if sel == Selector::Use { SelectorKind::Use } else { SelectorKind::Ref },
                    position: pos as u32,
                    offset: (p.rhs.len() - pos) as u32,
                }),
                prec: p.prec_override.map(|r| (r.symbol.0, r.subtoken)),
            })
            .collect();
        let actions = machine.actions.iter().map(|row| row.iter().map(|(t, a)| (t.0, *a)).collect()).collect();
        let gotos = machine
            .states
            .iter()
            .map(|s| {
                s.transitions
                    .iter()
                    .filter(|(sym, _)| !model.symbol(**sym).is_terminal())
                    .map(|(sym, t)| (sym.0, *t as u32))
                    .collect()
            })
            .collect();
        let first1 = machine.first1.iter().map(|f| f.iter().map(|t| t.0).collect()).collect();
        let oracles = model
            .oracles
            .iter()
            .map(|o| OracleEntry {
                rule: o.index as u32,
                x: (o.x.symbol.0, o.x.subtoken),
                y: (o.y.symbol.0, o.y.subtoken),
                body: o.body.clone(),
            })
            .collect();
        let maps = model
            .maps
            .iter()
            .map(|m| MapTable {
                name: m.name.clone(),
                entries: m
                    .entries
                    .iter()
                    .filter_map(|e| e.subtoken.subtoken.map(|n| (e.subtoken.symbol.0, n, e.node.clone())))
                    .collect(),
            })
            .collect();
        let precedence = model
            .precedence
            .iter()
            .map(|l| PrecEntry { assoc: l.assoc, members: l.members.iter().map(|r| (r.symbol.0, r.subtoken)).collect() })
            .collect();
        ParseTables {
            version: FORMAT_VERSION,
            symbols,
            productions,
            actions,
            gotos,
            first1,
            oracles,
            maps,
            precedence,
            start_state: 0,
        }
    }

    pub fn state_count(&self) -> usize {
        self.actions.len()
    }

    pub fn action(&self, state: u32, terminal: u32) -> ActionEntry {
        let row = &self.actions[state as usize];
        match row.binary_search_by_key(&terminal, |(t, _)| *t) {
            Ok(i) => row[i].1,
            Err(_) => ActionEntry::Error,
        }
    }

    pub fn goto(&self, state: u32, nonterminal: u32) -> Option<u32> {
        let row = &self.gotos[state as usize];
        row.binary_search_by_key(&nonterminal, |(n, _)| *n).ok().map(|i| row[i].1)
    }

    pub fn first1_contains(&self, state: u32, terminal: u32) -> bool {
        self.first1[state as usize].binary_search(&terminal).is_ok()
    }

    pub fn symbol(&self, id: u32) -> &SymbolEntry {
        &self.symbols[id as usize]
    }

    /// Level (1-based) and associativity; a subtoken falls back to a level
    /// declared for its whole generic token.
    pub fn precedence_of(&self, code: TokenCode) -> Option<(u32, Assoc)> {
        let find = |c: TokenCode| {
            self.precedence
                .iter()
                .enumerate()
                .find(|(_, l)| l.members.contains(&c))
                .map(|(i, l)| (i as u32 + 1, l.assoc))
        };
        find(code).or_else(|| code.1.and_then(|_| find((code.0, None))))
    }

    pub fn map_node(&self, map: &str, symbol: u32, subtoken: u32) -> Option<&str> {
        self.maps
            .iter()
            .find(|m| m.name == map)?
            .entries
            .iter()
            .find(|(s, n, _)| *s == symbol && *n == subtoken)
            .map(|(_, _, node)| node.as_str())
    }

    /// Source spelling of a symbol: reserved terminals quoted.
    pub fn symbol_source(&self, id: u32) -> String {
        let s = self.symbol(id);
        if s.kind == Kind::Reserved {
            crate::grammar::quote_literal(&s.name)
        } else {
            s.name.clone()
        }
    }

    pub fn find_terminal(&self, name: &str) -> Option<u32> {
        self.symbols
            .iter()
            .position(|s| s.is_terminal() && s.kind != Kind::Reserved && s.name == name)
            .map(|i| i as u32)
    }

    pub fn find_reserved(&self, literal: &str) -> Option<u32> {
        self.symbols.iter().position(|s| s.kind == Kind::Reserved && s.name == literal).map(|i| i as u32)
    }

    pub fn find_nonterminal(&self, name: &str) -> Option<u32> {
        self.symbols.iter().position(|s| s.kind == Kind::Nonterminal && s.name == name).map(|i| i as u32)
    }
}
