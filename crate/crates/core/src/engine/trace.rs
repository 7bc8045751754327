//! Text forms of tokens and events used by traces and error listings.

use super::{ParseEvent, Token};
use crate::grammar::quote_literal;
use crate::tables::{Kind, ParseTables, TokenCode};

/// `Token: id = 'foo' [3:4]`, `Token: dualop Subtoken: * [3:9]`.
pub fn token_line(tables: &ParseTables, tok: &Token) -> String {
    let sym = tables.symbol(tok.symbol);
    let mut out = format!("Token: {}", sym.name);
    match (sym.kind, &tok.text, tok.subtoken) {
        (Kind::Generic, _, Some(n)) => {
            out.push_str(" Subtoken: ");
            out.push_str(&sym.subtokens[n as usize]);
        }
        (Kind::Plain, Some(text), _) => {
            out.push_str(&format!(" = '{text}'"));
        }
        _ => {}
    }
    out.push_str(&format!(" [{}:{}]", tok.pos.line, tok.pos.column));
    out
}

/// Trace line for token and oracle events; other events print nothing.
pub fn trace_line(tables: &ParseTables, ev: &ParseEvent) -> Option<String> {
    let name = |id: u32| tables.symbol(id).name.clone();
    match ev {
        ParseEvent::TokenRead(tok) => Some(token_line(tables, tok)),
        ParseEvent::OracleConsulted { state, token } => {
            Some(format!("In ask_oracle with state {state} and token {}", name(*token)))
        }
        ParseEvent::OracleChanged { from, to } => Some(format!("Token: {} changed to Token: {}", name(*from), name(*to))),
        ParseEvent::OracleUnchanged { symbol } => Some(format!("{} not changed", name(*symbol))),
        _ => None,
    }
}

/// The `Saw token` form: `id='f'` for plain tokens with text, the literal
/// for reserved and generic tokens, the name otherwise.
pub fn saw_token(tables: &ParseTables, tok: &Token) -> String {
    let sym = tables.symbol(tok.symbol);
    match (sym.kind, &tok.text, tok.subtoken) {
        (Kind::Plain, Some(text), _) => format!("{}='{}'", sym.name, text),
        (Kind::Generic, _, Some(n)) => sym.subtokens[n as usize].clone(),
        _ => sym.name.clone(),
    }
}

/// Space separated expected tokens with generic tokens expanded to their
/// subtoken literals.
pub fn expected_listing(tables: &ParseTables, expected: &[u32]) -> String {
    let mut parts = Vec::new();
    for &t in expected {
        let sym = tables.symbol(t);
        if sym.kind == Kind::Generic {
            parts.extend(sym.subtokens.iter().cloned());
        } else {
            parts.push(sym.name.clone());
        }
    }
    parts.join(" ")
}

/// `dualop.'&'` style reference to a token or subtoken.
pub(crate) fn code_source(tables: &ParseTables, code: TokenCode) -> String {
    let sym = tables.symbol(code.0);
    match code.1 {
        Some(n) => format!("{}.{}", sym.name, quote_literal(&sym.subtokens[n as usize])),
        None => tables.symbol_source(code.0),
    }
}
