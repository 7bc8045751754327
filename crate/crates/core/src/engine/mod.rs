//! Table-driven LR(1) driver with oracles, grammar-specified error
//! recovery, dynamic precedence and tree building.

mod oracle;
mod trace;
mod tree;

use std::rc::Rc;

pub use oracle::{BuiltinOracles, NoOracles, OracleRegistry, Oracles};
pub use trace::{saw_token, token_line, trace_line, expected_listing};
pub use tree::{Leaf, ParseTree};

use crate::analysis::{ActionEntry, PrecSource};
use crate::diagnostic::{DiagCode, Diagnostic, Pos};
use crate::grammar::Assoc;
use crate::tables::{Kind, ParseTables, TokenCode, TreeActionEntry};

const EOF: u32 = 0;
const ERROR: u32 = 1;
/// Upper bound on ERROR-context reductions in one recovery.
const RECOVERY_REDUCTION_LIMIT: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub symbol: u32,
    pub text: Option<String>,
    /// Subtoken number; present exactly when the symbol is generic.
    pub subtoken: Option<u32>,
    pub pos: Pos,
}

impl Token {
    pub fn eof(pos: Pos) -> Self {
        Token { symbol: EOF, text: None, subtoken: None, pos }
    }

    pub fn code(&self) -> TokenCode {
        (self.symbol, self.subtoken)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Shift,
    Reduce,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbortReason {
    /// Recovery tried to discard EOF.
    DiscardEof,
    TooManyErrors(usize),
    /// An oracle rule with a body fired but no callback is bound to it.
    MissingCallback(u32),
    MissingMapEntry { map: String, symbol: u32, subtoken: u32 },
    RecoveryLoop,
    /// Reductions kept growing the stack without a shift. Only tables
    /// built with forced conflicts can do this.
    ReductionLoop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseEvent {
    TokenRead(Token),
    /// Oracles were consulted for the token: it matches some rule's X, or
    /// it is a plain or generic token and the grammar has oracle rules.
    OracleConsulted { state: u32, token: u32 },
    /// A rule's gate fired: the token matches X and Y can follow here.
    OracleAsked { state: u32, x: u32, rule: u32 },
    OracleChanged { from: u32, to: u32 },
    OracleUnchanged { symbol: u32 },
    Shift { state: u32, symbol: u32 },
    Reduce { production: u32, state: u32 },
    DynResolved { state: u32, decision: Decision },
    ErrorDetected { state: u32, token: Token, expected: Vec<u32> },
    Discard(Token),
    Recover { state: u32, token: Token },
    Accept,
    Abort(AbortReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseStatus {
    Accepted,
    AcceptedWithRecoveries(usize),
    Aborted(AbortReason),
}

#[derive(Clone, Debug)]
pub struct ParseOutcome {
    pub status: ParseStatus,
    pub tree: Option<ParseTree>,
    pub diagnostics: Vec<Diagnostic>,
    /// Empty unless events were requested.
    pub events: Vec<ParseEvent>,
}

impl ParseOutcome {
    pub fn accepted(&self) -> bool {
        !matches!(self.status, ParseStatus::Aborted(_))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    pub build_tree: bool,
    pub record_events: bool,
    /// Abort on the error after this many.
    pub max_errors: Option<usize>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { build_tree: true, record_events: true, max_errors: None }
    }
}

#[derive(Clone, Debug)]
struct Entry {
    state: u32,
    tree: Option<Rc<ParseTree>>,
    /// Set for entries pushed by a terminal shift.
    tok: Option<TokenCode>,
}

/// A stack view used for lookahead trials: a prefix of the real stack with
/// simulated states on top.
#[derive(Clone)]
struct VStack {
    base_len: usize,
    extra: Vec<u32>,
}

/// Settles a dynamic entry from the level of the rule's subtoken (or its
/// static level) against the lookahead's. `Err` carries a token that has
/// no precedence level.
fn resolve_dynamic(
    tables: &ParseTables,
    rule_prec: PrecSource,
    lookahead_prec: PrecSource,
    stack_token: impl Fn(u32) -> Option<TokenCode>,
    lookahead: TokenCode,
) -> Result<Decision, TokenCode> {
    let level = |p: PrecSource| -> Result<(u32, Assoc), TokenCode> {
        match p {
            PrecSource::StaticLevel(l, a) => Ok((l, a)),
            PrecSource::StackOffset(k) => {
                let code = stack_token(k).unwrap_or((ERROR, None));
                tables.precedence_of(code).ok_or(code)
            }
            PrecSource::LookaheadSubtoken => tables.precedence_of(lookahead).ok_or(lookahead),
        }
    };
    let (rl, _) = level(rule_prec)?;
    let (ll, assoc) = level(lookahead_prec)?;
    Ok(match rl.cmp(&ll) {
        std::cmp::Ordering::Greater => Decision::Reduce,
        std::cmp::Ordering::Less => Decision::Shift,
        std::cmp::Ordering::Equal => match assoc {
            Assoc::Left => Decision::Reduce,
            Assoc::Right => Decision::Shift,
            Assoc::Nonassoc => Decision::Error,
        },
    })
}

struct Engine<'a> {
    tables: &'a ParseTables,
    oracles: &'a mut dyn Oracles,
    opts: ParseOptions,
    source: Box<dyn Iterator<Item = Token> + 'a>,
    last_pos: Pos,
    stack: Vec<Entry>,
    /// Entries popped by each reduction since the last shift.
    undo: Vec<Vec<Entry>>,
    /// Stack height when the undo log was last cleared.
    base: usize,
    events: Vec<ParseEvent>,
    diagnostics: Vec<Diagnostic>,
    errors: usize,
    recoveries: usize,
}

/// Parses a token stream. Tokens must end with EOF and never contain
/// ERROR; a missing final EOF is supplied.
pub fn run<'a>(
    tables: &'a ParseTables,
    tokens: impl IntoIterator<Item = Token> + 'a,
    oracles: &'a mut dyn Oracles,
    opts: ParseOptions,
) -> ParseOutcome {
    let mut e = Engine {
        tables,
        oracles,
        opts,
        source: Box::new(tokens.into_iter()),
        last_pos: Pos::new(1, 1),
        stack: Vec::new(),
        undo: Vec::new(),
        base: 0,
        events: Vec::new(),
        diagnostics: Vec::new(),
        errors: 0,
        recoveries: 0,
    };
    let status = match e.drive() {
        Ok(()) if e.recoveries == 0 => ParseStatus::Accepted,
        Ok(()) => ParseStatus::AcceptedWithRecoveries(e.recoveries),
        Err(reason) => {
            e.emit(ParseEvent::Abort(reason.clone()));
            ParseStatus::Aborted(reason)
        }
    };
    let tree = match status {
        ParseStatus::Aborted(_) => None,
        _ => e.stack.last().and_then(|top| top.tree.clone()).map(|t| Rc::unwrap_or_clone(t)),
    };
    ParseOutcome { status, tree, diagnostics: e.diagnostics, events: e.events }
}

impl Engine<'_> {
    fn emit(&mut self, ev: ParseEvent) {
        if self.opts.record_events {
            self.events.push(ev);
        }
    }

    fn top(&self) -> u32 {
        self.stack.last().expect("stack never empties").state
    }

    fn fetch(&mut self) -> Token {
        let tok = self.source.next().unwrap_or_else(|| Token::eof(self.last_pos));
        self.last_pos = tok.pos;
        self.emit(ParseEvent::TokenRead(tok.clone()));
        tok
    }

    fn drive(&mut self) -> Result<(), AbortReason> {
        let start = self.tables.start_state;
        self.stack.push(Entry { state: start, tree: None, tok: None });
        // production 0 starts with EOF; scanners never send it first
        match self.tables.action(start, EOF) {
            ActionEntry::Shift(s) => self.stack.push(Entry { state: s, tree: None, tok: Some((EOF, None)) }),
            other => unreachable!("start state must shift EOF, found {other:?}"),
        }
        self.base = self.stack.len();
        let mut scanned = self.fetch();
        let mut current = self.ask_oracle(&scanned, &VStack { base_len: self.stack.len(), extra: vec![] }, true)?;
        loop {
            let top = self.top();
            let action = match self.tables.action(top, current.symbol) {
                ActionEntry::Dynamic { shift, reduce, rule_prec, lookahead_prec } => {
                    let decision = self.dynamic(top, rule_prec, lookahead_prec, &current);
                    match decision {
                        Decision::Shift => ActionEntry::Shift(shift),
                        Decision::Reduce => ActionEntry::Reduce(reduce),
                        Decision::Error => ActionEntry::Error,
                    }
                }
                a => a,
            };
            match action {
                ActionEntry::Shift(s) => {
                    let tree = self.leaf_for(&current);
                    self.stack.push(Entry { state: s, tree, tok: Some(current.code()) });
                    self.oracles.observe_shift(self.tables, &current);
                    self.emit(ParseEvent::Shift { state: s, symbol: current.symbol });
                    self.undo.clear();
                    self.base = self.stack.len();
                    scanned = self.fetch();
                    current = self.ask_oracle(&scanned, &VStack { base_len: self.stack.len(), extra: vec![] }, true)?;
                }
                ActionEntry::Reduce(p) => self.reduce(p, true)?,
                ActionEntry::Accept => {
                    self.emit(ParseEvent::Accept);
                    return Ok(());
                }
                ActionEntry::Error | ActionEntry::Dynamic { .. } => {
                    self.undo_reductions();
                    self.errors += 1;
                    let state = self.top();
                    let expected = self.expected(state);
                    self.emit(ParseEvent::ErrorDetected { state, token: current.clone(), expected });
                    if self.opts.max_errors.is_some_and(|m| self.errors > m) {
                        return Err(AbortReason::TooManyErrors(self.errors - 1));
                    }
                    (scanned, current) = self.recover(scanned)?;
                    self.recoveries += 1;
                }
            }
        }
    }

    fn leaf_for(&self, tok: &Token) -> Option<Rc<ParseTree>> {
        if !self.opts.build_tree {
            return None;
        }
        let sym = self.tables.symbol(tok.symbol);
        match (&sym.kind, &tok.text) {
            (Kind::Plain, Some(text)) => Some(Rc::new(ParseTree::leaf(&sym.name, text, tok.pos))),
            _ => None,
        }
    }

    fn dynamic(&mut self, state: u32, rule_prec: PrecSource, lookahead_prec: PrecSource, la: &Token) -> Decision {
        let stack = &self.stack;
        let read = |k: u32| stack.get(stack.len().checked_sub(1 + k as usize)?).and_then(|e| e.tok);
        let decision = match resolve_dynamic(self.tables, rule_prec, lookahead_prec, read, la.code()) {
            Ok(d) => d,
            Err(code) => {
                let what = trace::code_source(self.tables, code);
                self.diagnostics.push(Diagnostic::error(
                    DiagCode::UncoveredSubtoken,
                    Some(la.pos),
                    format!("{what} has no precedence level"),
                ));
                Decision::Error
            }
        };
        self.emit(ParseEvent::DynResolved { state, decision });
        decision
    }

    fn reduce(&mut self, p: u32, log: bool) -> Result<(), AbortReason> {
        let prod = &self.tables.productions[p as usize];
        let at = self.stack.len() - prod.rhs.len();
        let popped = self.stack.split_off(at);
        let tree = if self.opts.build_tree { self.build_node(p, &popped)? } else { None };
        let goto = self.tables.goto(self.top(), prod.lhs).expect("validated tables have every goto");
        self.stack.push(Entry { state: goto, tree, tok: None });
        // a run of reductions that climbs more than one entry per state
        // above its starting height repeats itself forever
        if self.stack.len() > self.base + self.tables.actions.len() {
            return Err(AbortReason::ReductionLoop);
        }
        if log {
            self.undo.push(popped);
        }
        self.emit(ParseEvent::Reduce { production: p, state: goto });
        Ok(())
    }

    fn undo_reductions(&mut self) {
        while let Some(popped) = self.undo.pop() {
            self.stack.pop();
            self.stack.extend(popped);
        }
    }

    fn build_node(&self, p: u32, popped: &[Entry]) -> Result<Option<Rc<ParseTree>>, AbortReason> {
        let prod = &self.tables.productions[p as usize];
        let children: Vec<Rc<ParseTree>> = popped.iter().filter_map(|e| e.tree.clone()).collect();
        let tree = match &prod.action {
            Some(TreeActionEntry::Node(n)) => Rc::new(ParseTree::node(n, children)),
            Some(TreeActionEntry::Map(m)) => {
                let sel = prod.selector.expect("validated tables pair maps with selectors");
                let (symbol, sub) = popped[sel.position as usize - 1].tok.expect("selected element is a terminal");
                let subtoken = sub.unwrap_or(u32::MAX);
                let node = self.tables.map_node(m, symbol, subtoken).ok_or_else(|| AbortReason::MissingMapEntry {
                    map: m.clone(),
                    symbol,
                    subtoken,
                })?;
                Rc::new(ParseTree::node(node, children))
            }
            None if children.len() == 1 => children.into_iter().next().unwrap(),
            None => Rc::new(ParseTree::node("", children)),
        };
        Ok(Some(tree))
    }

    fn vtop(&self, vs: &VStack) -> u32 {
        vs.extra.last().copied().unwrap_or_else(|| self.stack[vs.base_len - 1].state)
    }

    /// Simulates the parser on `vs` with lookahead `tok` until it shifts,
    /// accepts or detects an error.
    fn trial(&self, vs: &VStack, tok: &Token) -> bool {
        let mut vs = vs.clone();
        for _ in 0..RECOVERY_REDUCTION_LIMIT {
            let top = self.vtop(&vs);
            let p = match self.tables.action(top, tok.symbol) {
                ActionEntry::Shift(_) | ActionEntry::Accept => return true,
                ActionEntry::Error => return false,
                ActionEntry::Reduce(p) => p,
                ActionEntry::Dynamic { reduce, rule_prec, lookahead_prec, .. } => {
                    let read = |k: u32| {
                        let k = k as usize;
                        if k < vs.extra.len() {
                            None
                        } else {
                            self.stack[vs.base_len - 1 - (k - vs.extra.len())].tok
                        }
                    };
                    match resolve_dynamic(self.tables, rule_prec, lookahead_prec, read, tok.code()) {
                        Ok(Decision::Shift) => return true,
                        Ok(Decision::Reduce) => reduce,
                        _ => return false,
                    }
                }
            };
            let prod = &self.tables.productions[p as usize];
            let mut n = prod.rhs.len();
            let from_extra = n.min(vs.extra.len());
            vs.extra.truncate(vs.extra.len() - from_extra);
            n -= from_extra;
            vs.base_len -= n;
            match self.tables.goto(self.vtop(&vs), prod.lhs) {
                Some(g) => vs.extra.push(g),
                None => return false,
            }
        }
        false
    }

    /// Terminals that can follow in the current configuration, in symbol
    /// order, without ERROR.
    fn expected(&self, state: u32) -> Vec<u32> {
        let vs = VStack { base_len: self.stack.len(), extra: vec![] };
        let pos = self.last_pos;
        self.tables.first1[state as usize]
            .iter()
            .copied()
            .filter(|&t| t != ERROR)
            .filter(|&t| {
                let sym = self.tables.symbol(t);
                if sym.kind == Kind::Generic {
                    (0..sym.subtokens.len() as u32).any(|n| {
                        self.trial(&vs, &Token { symbol: t, text: None, subtoken: Some(n), pos })
                    })
                } else {
                    self.trial(&vs, &Token { symbol: t, text: None, subtoken: None, pos })
                }
            })
            .collect()
    }

    /// The token `tok` becomes when rule output `y` replaces it.
    fn convert(&self, tok: &Token, y: TokenCode) -> Option<Token> {
        let ysym = self.tables.symbol(y.0);
        let subtoken = if ysym.kind == Kind::Generic {
            let literal = tok.text.as_deref()?;
            Some(y.1.or_else(|| ysym.subtokens.iter().position(|s| s == literal).map(|n| n as u32))?)
        } else {
            None
        };
        Some(Token { symbol: y.0, text: tok.text.clone(), subtoken, pos: tok.pos })
    }

    /// Applies the first oracle rule whose gate fires for `tok` on top of `vs`.
    fn ask_oracle(&mut self, tok: &Token, vs: &VStack, emit: bool) -> Result<Token, AbortReason> {
        let tables = self.tables;
        let matches = |x: TokenCode| x.0 == tok.symbol && (x.1.is_none() || x.1 == tok.subtoken);
        let plain = matches!(tables.symbol(tok.symbol).kind, Kind::Plain | Kind::Generic);
        let any_rule = tables.oracles.iter().any(|o| matches(o.x));
        if !any_rule && !(plain && !tables.oracles.is_empty()) {
            return Ok(tok.clone());
        }
        let state = self.vtop(vs);
        if emit {
            self.emit(ParseEvent::OracleConsulted { state, token: tok.symbol });
        }
        for rule in tables.oracles.iter().filter(|o| matches(o.x)) {
            if !tables.first1_contains(state, rule.y.0) {
                continue;
            }
            let Some(changed) = self.convert(tok, rule.y) else { continue };
            if !self.trial(vs, &changed) {
                continue;
            }
            if emit {
                self.emit(ParseEvent::OracleAsked { state, x: tok.symbol, rule: rule.rule });
            }
            let verdict = if rule.body.trim().is_empty() {
                true
            } else {
                self.oracles.verdict(rule, tok).ok_or(AbortReason::MissingCallback(rule.rule))?
            };
            if emit {
                self.emit(if verdict {
                    ParseEvent::OracleChanged { from: tok.symbol, to: changed.symbol }
                } else {
                    ParseEvent::OracleUnchanged { symbol: tok.symbol }
                });
            }
            return Ok(if verdict { changed } else { tok.clone() });
        }
        if emit {
            self.emit(ParseEvent::OracleUnchanged { symbol: tok.symbol });
        }
        Ok(tok.clone())
    }

    /// Grammar-specified recovery. Returns the resume token as scanned and
    /// as seen by the parser after oracles.
    fn recover(&mut self, mut scanned: Token) -> Result<(Token, Token), AbortReason> {
        let mut steps = 0;
        // A merged state can reduce on ERROR where no ERROR can follow; the
        // trial keeps only reductions that a canonical machine would make.
        let error = Token { symbol: ERROR, text: None, subtoken: None, pos: scanned.pos };
        while let ActionEntry::Reduce(p) = self.tables.action(self.top(), ERROR) {
            if !self.trial(&VStack { base_len: self.stack.len(), extra: vec![] }, &error) {
                break;
            }
            steps += 1;
            if steps > RECOVERY_REDUCTION_LIMIT {
                return Err(AbortReason::RecoveryLoop);
            }
            self.reduce(p, false)?;
        }
        loop {
            for i in (0..self.stack.len()).rev() {
                let ActionEntry::Shift(succ) = self.tables.action(self.stack[i].state, ERROR) else { continue };
                let vs = VStack { base_len: i + 1, extra: vec![succ] };
                let tok = self.ask_oracle(&scanned, &vs, false)?;
                if !self.tables.first1_contains(succ, tok.symbol) || !self.trial(&vs, &tok) {
                    continue;
                }
                self.stack.truncate(i + 1);
                self.stack.push(Entry { state: succ, tree: None, tok: None });
                self.undo.clear();
                self.base = self.stack.len();
                self.emit(ParseEvent::Recover { state: succ, token: scanned.clone() });
                let current = self.ask_oracle(&scanned, &VStack { base_len: self.stack.len(), extra: vec![] }, true)?;
                return Ok((scanned, current));
            }
            if scanned.symbol == EOF {
                return Err(AbortReason::DiscardEof);
            }
            self.emit(ParseEvent::Discard(scanned));
            scanned = self.fetch();
        }
    }
}
