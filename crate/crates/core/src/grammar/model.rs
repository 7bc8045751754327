use std::fmt;

use crate::diagnostic::Pos;

/// Dense symbol identifier. `EOF` and `ERROR` are always 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub const EOF: SymbolId = SymbolId(0);
    pub const ERROR: SymbolId = SymbolId(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Nonterminal,
    /// A bare-identifier terminal such as `id`.
    Plain,
    /// A quoted literal terminal such as `'typedef'`.
    Reserved,
    /// A plain terminal that stands for a set of subtokens.
    Generic,
    Error,
    Eof,
}

impl SymbolKind {
    pub fn is_terminal(self) -> bool {
        !matches!(self, SymbolKind::Nonterminal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub id: SymbolId,
    /// Nonterminals keep their angle brackets; reserved terminals are stored
    /// without quotes.
    pub name: String,
    pub kind: SymbolKind,
    /// Subtoken literals, indexed by subtoken number. Generic terminals only.
    pub subtokens: Vec<String>,
    /// Literal list from an explicit `%generic` declaration. A declared
    /// generic is closed: subtokens outside this list are diagnosed.
    pub generic_decl: Option<Vec<String>>,
}

impl Symbol {
    pub fn is_terminal(&self) -> bool {
        self.kind.is_terminal()
    }

    pub fn subtoken_number(&self, literal: &str) -> Option<u32> {
        self.subtokens.iter().position(|s| s == literal).map(|n| n as u32)
    }
}

/// A reference to a terminal, or to one subtoken of a generic terminal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokRef {
    pub symbol: SymbolId,
    pub subtoken: Option<u32>,
}

impl TokRef {
    pub fn token(symbol: SymbolId) -> Self {
        TokRef { symbol, subtoken: None }
    }

    pub fn subtoken(symbol: SymbolId, number: u32) -> Self {
        TokRef { symbol, subtoken: Some(number) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selector {
    None,
    /// `%use`: tree building and dynamic precedence.
    Use,
    /// `%ref`: tree building only.
    Ref,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhsElement {
    pub symbol: SymbolId,
    pub selector: Selector,
    /// Set only when the source wrote a subtoken directly in a production,
    /// which `validate` rejects.
    pub subtoken: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TreeAction {
    Node(String),
    Map(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub index: usize,
    pub lhs: SymbolId,
    pub rhs: Vec<RhsElement>,
    pub prec_override: Option<TokRef>,
    pub tree_action: Option<TreeAction>,
    pub pos: Pos,
}

impl Production {
    /// 1-based position and selector of the first `%use`/`%ref` element.
    pub fn selector(&self) -> Option<(usize, Selector)> {
        self.rhs
            .iter()
            .enumerate()
            .find(|(_, e)| e.selector != Selector::None)
            .map(|(i, e)| (i + 1, e.selector))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRule {
    pub index: usize,
    pub x: TokRef,
    pub y: TokRef,
    pub body: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapEntry {
    pub subtoken: TokRef,
    pub node: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapRule {
    pub name: String,
    pub entries: Vec<MapEntry>,
    pub pos: Pos,
}

impl MapRule {
    pub fn lookup(&self, symbol: SymbolId, subtoken: u32) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.subtoken == TokRef::subtoken(symbol, subtoken))
            .map(|e| e.node.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assoc {
    Left,
    Right,
    Nonassoc,
}

impl Assoc {
    pub fn as_str(self) -> &'static str {
        match self {
            Assoc::Left => "left",
            Assoc::Right => "right",
            Assoc::Nonassoc => "nonassoc",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecLevel {
    pub assoc: Assoc,
    pub members: Vec<TokRef>,
    pub pos: Pos,
}

/// The analyzed form of a grammar file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarModel {
    pub symbols: Vec<Symbol>,
    pub productions: Vec<Production>,
    pub oracles: Vec<OracleRule>,
    pub maps: Vec<MapRule>,
    /// Later levels bind tighter. Level numbers are 1-based indexes into this list.
    pub precedence: Vec<PrecLevel>,
    /// `<GOAL>` once `augment` has run.
    pub goal: Option<SymbolId>,
}

pub const GOAL_NAME: &str = "<GOAL>";

impl GrammarModel {
    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn is_augmented(&self) -> bool {
        self.goal.is_some()
    }

    /// Productions written by the user, excluding the built-in goal production.
    pub fn user_productions(&self) -> &[Production] {
        if self.is_augmented() {
            &self.productions[1..]
        } else {
            &self.productions
        }
    }

    pub fn find_symbol(&self, name: &str, kind: SymbolKind) -> Option<SymbolId> {
        self.symbols
            .iter()
            .find(|s| s.name == name && namespace(s.kind) == namespace(kind))
            .map(|s| s.id)
    }

    pub fn terminals(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(|s| s.is_terminal())
    }

    pub fn map(&self, name: &str) -> Option<&MapRule> {
        self.maps.iter().find(|m| m.name == name)
    }

    /// Precedence level (1-based) and associativity of a token or subtoken.
    /// A subtoken falls back to a level declared for its whole generic token.
    pub fn precedence_of(&self, r: TokRef) -> Option<(u32, Assoc)> {
        let find = |r: TokRef| {
            self.precedence
                .iter()
                .enumerate()
                .find(|(_, l)| l.members.contains(&r))
                .map(|(i, l)| (i as u32 + 1, l.assoc))
        };
        find(r).or_else(|| r.subtoken.and_then(|_| find(TokRef::token(r.symbol))))
    }

    /// How a token reference is written in grammar source.
    pub fn tokref_source(&self, r: TokRef) -> String {
        let sym = self.symbol(r.symbol);
        match r.subtoken {
            Some(n) => format!("{}.{}", sym.name, quote_literal(&sym.subtokens[n as usize])),
            None => symbol_source(sym),
        }
    }

    /// The concrete input spelling a token reference stands for: a quoted
    /// literal for reserved terminals and subtokens, the name otherwise.
    pub fn spelling(&self, r: TokRef) -> String {
        let sym = self.symbol(r.symbol);
        match (r.subtoken, sym.kind) {
            (Some(n), _) => quote_literal(&sym.subtokens[n as usize]),
            (None, SymbolKind::Reserved) => quote_literal(&sym.name),
            (None, _) => sym.name.clone(),
        }
    }

    pub fn production_source(&self, p: &Production) -> String {
        let mut out = format!("{} :", self.name(p.lhs));
        for e in &p.rhs {
            out.push(' ');
            match e.selector {
                Selector::Use => out.push_str("%use "),
                Selector::Ref => out.push_str("%ref "),
                Selector::None => {}
            }
            out.push_str(&self.tokref_source(TokRef { symbol: e.symbol, subtoken: e.subtoken }));
        }
        out
    }
}

fn namespace(kind: SymbolKind) -> u8 {
    match kind {
        SymbolKind::Nonterminal => 0,
        SymbolKind::Reserved => 1,
        _ => 2,
    }
}

pub(crate) fn same_namespace(a: SymbolKind, b: SymbolKind) -> bool {
    namespace(a) == namespace(b)
}

pub fn symbol_source(sym: &Symbol) -> String {
    match sym.kind {
        SymbolKind::Reserved => quote_literal(&sym.name),
        _ => sym.name.clone(),
    }
}

pub fn quote_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

impl fmt::Display for TreeAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeAction::Node(n) => write!(f, "{}", n),
            TreeAction::Map(m) => write!(f, "%map {}", m),
        }
    }
}
