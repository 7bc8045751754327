//! Placeholder substitution into skeleton parser sources.

use super::{serialize, Kind, ParseTables, FORMAT_VERSION};

pub const PLACEHOLDERS: [&str; 4] = ["@TABLES@", "@TOKEN_DEFS@", "@ORACLE_BODIES@", "@VERSION@"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InjectError {
    #[error("unknown placeholder {0}")]
    Unknown(String),
    #[error("placeholder {0} appears more than once")]
    Repeated(String),
}

/// Finds the next `@NAME@` marker (upper case letters and underscores).
fn next_marker(text: &str, from: usize) -> Option<(usize, usize)> {
    let bytes = text.as_bytes();
    let mut i = from;
    while let Some(off) = text[i..].find('@') {
        let start = i + off;
        let mut j = start + 1;
        while j < bytes.len() && (bytes[j].is_ascii_uppercase() || bytes[j] == b'_') {
            j += 1;
        }
        if j > start + 1 && j < bytes.len() && bytes[j] == b'@' {
            return Some((start, j + 1));
        }
        i = start + 1;
    }
    None
}

fn token_defs(t: &ParseTables) -> String {
    let mut out = String::new();
    for (id, s) in t.symbols.iter().enumerate() {
        if s.kind != Kind::Nonterminal {
            out.push_str(&format!("{} = {}\n", t.symbol_source(id as u32), id));
        }
    }
    out
}

fn oracle_bodies(t: &ParseTables) -> String {
    let mut out = String::new();
    for o in &t.oracles {
        out.push_str(&format!("/* oracle {} begin */\n{}\n/* oracle {} end */\n", o.rule, o.body, o.rule));
    }
    out
}

/// Substitutes every placeholder in `skeleton`; all other text is copied
/// unchanged. Placeholders may be absent but not repeated or unknown.
pub fn inject(skeleton: &str, tables: &ParseTables) -> Result<String, InjectError> {
    let mut out = String::with_capacity(skeleton.len());
    let mut seen: Vec<&str> = Vec::new();
    let mut at = 0;
    while let Some((start, end)) = next_marker(skeleton, at) {
        let name = &skeleton[start..end];
        out.push_str(&skeleton[at..start]);
        if seen.contains(&name) {
            return Err(InjectError::Repeated(name.to_string()));
        }
        let text = match name {
            "@TABLES@" => serde_json::to_string(&serialize(tables)).expect("strings serialize"),
            "@TOKEN_DEFS@" => token_defs(tables),
            "@ORACLE_BODIES@" => oracle_bodies(tables),
            "@VERSION@" => FORMAT_VERSION.to_string(),
            _ => return Err(InjectError::Unknown(name.to_string())),
        };
        seen.push(name);
        out.push_str(&text);
        at = end;
    }
    out.push_str(&skeleton[at..]);
    Ok(out)
}
