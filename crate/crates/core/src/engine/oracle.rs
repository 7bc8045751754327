use std::collections::{HashMap, HashSet};

use super::Token;
use crate::tables::{Kind, OracleEntry, ParseTables};

/// Host side of oracle rules.
pub trait Oracles {
    /// Verdict for a rule whose gate fired: `Some(true)` replaces X by Y.
    /// `None` means no callback is bound to the rule, which aborts the parse.
    fn verdict(&mut self, rule: &OracleEntry, token: &Token) -> Option<bool>;

    /// Called after each terminal shift, so handlers can track context.
    fn observe_shift(&mut self, _tables: &ParseTables, _token: &Token) {}
}

/// Binds nothing; every rule with a body aborts.
pub struct NoOracles;

impl Oracles for NoOracles {
    fn verdict(&mut self, _rule: &OracleEntry, _token: &Token) -> Option<bool> {
        None
    }
}

type Callback = Box<dyn FnMut(&Token) -> bool>;

/// Callbacks keyed by oracle rule index.
#[derive(Default)]
pub struct OracleRegistry {
    callbacks: HashMap<u32, Callback>,
}

impl OracleRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, rule: u32, f: impl FnMut(&Token) -> bool + 'static) {
        self.callbacks.insert(rule, Box::new(f));
    }
}

impl Oracles for OracleRegistry {
    fn verdict(&mut self, rule: &OracleEntry, token: &Token) -> Option<bool> {
        self.callbacks.get_mut(&rule.rule).map(|f| f(token))
    }
}

/// Handlers chosen by body text: `@always` answers TRUE, `@never` FALSE,
/// and `@typedef` answers whether the token text was declared by a
/// `typedef ... ;` seen earlier in the input.
#[derive(Default)]
pub struct BuiltinOracles {
    in_typedef: bool,
    typedefs: HashSet<String>,
}

impl BuiltinOracles {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn typedefs(&self) -> &HashSet<String> {
        &self.typedefs
    }
}

impl Oracles for BuiltinOracles {
    fn verdict(&mut self, rule: &OracleEntry, token: &Token) -> Option<bool> {
        match rule.body.trim() {
            "" | "@always" => Some(true),
            "@never" => Some(false),
            "@typedef" => Some(token.text.as_ref().is_some_and(|t| self.typedefs.contains(t))),
            _ => None,
        }
    }

    fn observe_shift(&mut self, tables: &ParseTables, token: &Token) {
        let sym = tables.symbol(token.symbol);
        match (sym.kind, sym.name.as_str()) {
            (Kind::Reserved, "typedef") => self.in_typedef = true,
            (Kind::Reserved, ";") => self.in_typedef = false,
            (Kind::Plain, "id") if self.in_typedef => {
                if let Some(t) = &token.text {
                    self.typedefs.insert(t.clone());
                }
            }
            _ => {}
        }
    }
}
