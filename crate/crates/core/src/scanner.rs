//! Demonstration scanner derived from a grammar's terminals.
//!
//! Literals come from reserved terminals and subtokens. The plain terminals
//! `id`, `constant` and `string_literal` are bound to identifier, integer
//! and double-quoted string classes. Anything else needs an external
//! token source.

use std::collections::BTreeMap;

use crate::diagnostic::{DiagCode, Diagnostic, Pos};
use crate::engine::Token;
use crate::tables::{Kind, ParseTables, TokenCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Identifier,
    Integer,
    Str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScannerSpec {
    /// Literal text to token; generic subtokens override reserved terminals.
    pub literals: BTreeMap<String, TokenCode>,
    pub id: Option<u32>,
    pub constant: Option<u32>,
    pub string_literal: Option<u32>,
}

/// Builds the scanner for a set of tables, with a warning for each plain
/// terminal it cannot produce. Oracle targets are exempt since oracles,
/// not the scanner, produce them.
pub fn derive_spec(tables: &ParseTables) -> (ScannerSpec, Vec<Diagnostic>) {
    let mut literals = BTreeMap::new();
    let mut warnings = Vec::new();
    for (id, s) in tables.symbols.iter().enumerate() {
        if s.kind == Kind::Reserved {
            literals.entry(s.name.clone()).or_insert((id as u32, None));
        }
    }
    for (id, s) in tables.symbols.iter().enumerate() {
        if s.kind == Kind::Generic {
            for (n, lit) in s.subtokens.iter().enumerate() {
                literals.insert(lit.clone(), (id as u32, Some(n as u32)));
            }
        }
    }
    let class = |name: &str| tables.find_terminal(name).filter(|&t| tables.symbol(t).kind == Kind::Plain);
    let spec = ScannerSpec { literals, id: class("id"), constant: class("constant"), string_literal: class("string_literal") };
    for (id, s) in tables.symbols.iter().enumerate() {
        let id = id as u32;
        let known = ["id", "constant", "string_literal"].contains(&s.name.as_str());
        let oracle_target = tables.oracles.iter().any(|o| o.y.0 == id);
        if s.kind == Kind::Plain && !known && !oracle_target {
            warnings.push(Diagnostic::warning(
                DiagCode::ExternalScanner,
                None,
                format!("terminal {} needs an external scanner", s.name),
            ));
        }
    }
    (spec, warnings)
}

#[derive(Clone, Debug)]
pub struct Scan {
    /// Ends with EOF.
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<Diagnostic>,
}

fn class_len(chars: &[char], i: usize, class: Class) -> usize {
    let c = chars[i];
    match class {
        Class::Identifier if c.is_ascii_alphabetic() || c == '_' => {
            chars[i..].iter().take_while(|c| c.is_ascii_alphanumeric() || **c == '_').count()
        }
        Class::Integer if c.is_ascii_digit() => chars[i..].iter().take_while(|c| c.is_ascii_digit()).count(),
        Class::Str if c == '"' => {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                j += if chars[j] == '\\' && j + 1 < chars.len() { 2 } else { 1 };
            }
            if j < chars.len() && chars[j] == '"' {
                j + 1 - i
            } else {
                0
            }
        }
        _ => 0,
    }
}

/// Length of a comment starting at `i`, if any. An unterminated block
/// comment runs to the end of input.
fn comment_len(chars: &[char], i: usize) -> usize {
    match (chars.get(i), chars.get(i + 1)) {
        (Some('/'), Some('/')) => chars[i..].iter().take_while(|c| **c != '\n').count(),
        (Some('/'), Some('*')) => {
            let mut j = i + 2;
            while j < chars.len() && !(chars[j] == '*' && chars.get(j + 1) == Some(&'/')) {
                j += 1;
            }
            (j + 2).min(chars.len()) - i
        }
        _ => 0,
    }
}

/// Splits `text` into tokens by longest match. A literal wins a tie with a
/// class, so reserved words beat identifiers of the same length.
pub fn tokenize(text: &str, spec: &ScannerSpec) -> Scan {
    let chars: Vec<char> = text.chars().collect();
    let mut lits: Vec<(Vec<char>, TokenCode)> = spec.literals.iter().map(|(l, c)| (l.chars().collect(), *c)).collect();
    lits.sort_by(|a, b| b.0.len().cmp(&a.0.len()));
    let classes: Vec<(Class, u32)> = [
        (Class::Identifier, spec.id),
        (Class::Integer, spec.constant),
        (Class::Str, spec.string_literal),
    ]
    .into_iter()
    .filter_map(|(c, s)| s.map(|s| (c, s)))
    .collect();

    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let advance = |from: usize, to: usize, line: &mut u32, col: &mut u32| {
        for c in &chars[from..to] {
            if *c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        }
    };
    while i < chars.len() {
        if chars[i].is_whitespace() {
            advance(i, i + 1, &mut line, &mut col);
            i += 1;
            continue;
        }
        let skip = comment_len(&chars, i);
        if skip > 0 {
            advance(i, i + skip, &mut line, &mut col);
            i += skip;
            continue;
        }
        let lit = lits.iter().find(|(l, _)| chars[i..].starts_with(l)).map(|(l, c)| (l.len(), *c));
        let class = classes
            .iter()
            .map(|&(c, s)| (class_len(&chars, i, c), s))
            .filter(|(n, _)| *n > 0)
            .max_by_key(|(n, _)| *n);
        let (len, code) = match (lit, class) {
            (Some((ln, code)), Some((cn, _))) if ln >= cn => (ln, code),
            (_, Some((cn, s))) => (cn, (s, None)),
            (Some((ln, code)), None) => (ln, code),
            (None, None) => {
                diagnostics.push(Diagnostic::error(
                    DiagCode::Lexical,
                    Some(Pos::new(line, col)),
                    format!("unrecognized character {:?}", chars[i]),
                ));
                advance(i, i + 1, &mut line, &mut col);
                i += 1;
                continue;
            }
        };
        let lexeme: String = chars[i..i + len].iter().collect();
        tokens.push(Token { symbol: code.0, text: Some(lexeme), subtoken: code.1, pos: Pos::new(line, col) });
        advance(i, i + len, &mut line, &mut col);
        i += len;
    }
    tokens.push(Token::eof(Pos::new(line, col)));
    Scan { tokens, diagnostics }
}
