//! Table file encoding: one JSON object, each top-level array written one
//! element per line so that diffs stay readable.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use super::{Kind, ParseTables, TreeActionEntry, FORMAT_VERSION};
use crate::analysis::{ActionEntry, PrecSource};
use crate::grammar::Assoc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("malformed table file: {0}")]
    Syntax(String),
    #[error("version: unsupported table format version {0}")]
    Version(u64),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> TableError {
    TableError::Field { field: field.into(), message: message.into() }
}

const KEYS: [&str; 10] =
    ["version", "symbols", "productions", "actions", "gotos", "first1", "oracles", "maps", "precedence", "start_state"];

fn prec_to_value(p: PrecSource) -> Value {
    match p {
        PrecSource::StaticLevel(l, a) => json!(["lvl", l, a.as_str()]),
        PrecSource::StackOffset(k) => json!(["off", k]),
        PrecSource::LookaheadSubtoken => json!(["la"]),
    }
}

fn action_to_value(a: ActionEntry) -> Value {
    match a {
        ActionEntry::Shift(s) => json!(["s", s]),
        ActionEntry::Reduce(p) => json!(["r", p]),
        ActionEntry::Accept => json!(["acc"]),
        ActionEntry::Dynamic { shift, reduce, rule_prec, lookahead_prec } => {
            json!(["dyn", shift, reduce, prec_to_value(rule_prec), prec_to_value(lookahead_prec)])
        }
        ActionEntry::Error => json!(["err"]),
    }
}

fn as_u32(v: &Value) -> Result<u32, String> {
    v.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| format!("expected an unsigned integer, found {v}"))
}

fn tagged(v: &Value) -> Result<(&str, &[Value]), String> {
    let arr = v.as_array().ok_or_else(|| format!("expected an array, found {v}"))?;
    let tag = arr.first().and_then(Value::as_str).ok_or_else(|| format!("missing tag in {v}"))?;
    Ok((tag, &arr[1..]))
}

fn prec_from_value(v: &Value) -> Result<PrecSource, String> {
    match tagged(v)? {
        ("lvl", [l, a]) => {
            let assoc: Assoc = serde_json::from_value(a.clone()).map_err(|e| e.to_string())?;
            Ok(PrecSource::StaticLevel(as_u32(l)?, assoc))
        }
        ("off", [k]) => Ok(PrecSource::StackOffset(as_u32(k)?)),
        ("la", []) => Ok(PrecSource::LookaheadSubtoken),
        _ => Err(format!("unknown precedence source {v}")),
    }
}

fn action_from_value(v: &Value) -> Result<ActionEntry, String> {
    match tagged(v)? {
        ("s", [s]) => Ok(ActionEntry::Shift(as_u32(s)?)),
        ("r", [p]) => Ok(ActionEntry::Reduce(as_u32(p)?)),
        ("acc", []) => Ok(ActionEntry::Accept),
        ("dyn", [s, p, r, l]) => Ok(ActionEntry::Dynamic {
            shift: as_u32(s)?,
            reduce: as_u32(p)?,
            rule_prec: prec_from_value(r)?,
            lookahead_prec: prec_from_value(l)?,
        }),
        _ => Err(format!("unknown action {v}")),
    }
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("table values always serialize")
}

fn write_array(out: &mut String, key: &str, items: Vec<String>) {
    out.push_str(&format!("\"{key}\": ["));
    if items.is_empty() {
        out.push(']');
        return;
    }
    out.push('\n');
    out.push_str(&items.join(",\n"));
    out.push_str("\n]");
}

/// Canonical text encoding; equal tables give equal bytes.
pub fn serialize(t: &ParseTables) -> String {
    let mut out = String::from("{\n");
    out.push_str(&format!("\"version\": {},\n", t.version));
    write_array(&mut out, "symbols", t.symbols.iter().map(compact).collect());
    out.push_str(",\n");
    write_array(&mut out, "productions", t.productions.iter().map(compact).collect());
    out.push_str(",\n");
    let actions = t
        .actions
        .iter()
        .map(|row| compact(&row.iter().map(|(term, a)| json!([term, action_to_value(*a)])).collect::<Vec<_>>()))
        .collect();
    write_array(&mut out, "actions", actions);
    out.push_str(",\n");
    write_array(&mut out, "gotos", t.gotos.iter().map(compact).collect());
    out.push_str(",\n");
    write_array(&mut out, "first1", t.first1.iter().map(compact).collect());
    out.push_str(",\n");
    write_array(&mut out, "oracles", t.oracles.iter().map(compact).collect());
    out.push_str(",\n");
    write_array(&mut out, "maps", t.maps.iter().map(compact).collect());
    out.push_str(",\n");
    write_array(&mut out, "precedence", t.precedence.iter().map(compact).collect());
    out.push_str(",\n");
    out.push_str(&format!("\"start_state\": {}\n}}\n", t.start_state));
    out
}

fn typed<T: DeserializeOwned>(obj: &serde_json::Map<String, Value>, key: &str) -> Result<T, TableError> {
    let v = obj.get(key).ok_or_else(|| field_err(key, "missing"))?;
    serde_json::from_value(v.clone()).map_err(|e| field_err(key, e.to_string()))
}

/// Parses a table file and revalidates every cross reference.
pub fn deserialize(text: &str) -> Result<ParseTables, TableError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| TableError::Syntax(e.to_string()))?;
    let obj = doc.as_object().ok_or_else(|| TableError::Syntax("top level is not an object".into()))?;
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(field_err(k.clone(), "unknown field"));
    }
    let version = obj.get("version").and_then(Value::as_u64).ok_or_else(|| field_err("version", "missing"))?;
    if version != FORMAT_VERSION as u64 {
        return Err(TableError::Version(version));
    }
    let raw_actions = obj.get("actions").and_then(Value::as_array).ok_or_else(|| field_err("actions", "missing"))?;
    let mut actions = Vec::with_capacity(raw_actions.len());
    for (s, row) in raw_actions.iter().enumerate() {
        let field = format!("actions[{s}]");
        let row = row.as_array().ok_or_else(|| field_err(&field, "expected an array"))?;
        let mut out = Vec::with_capacity(row.len());
        for entry in row {
            let pair = entry.as_array().filter(|p| p.len() == 2).ok_or_else(|| field_err(&field, "expected pairs"))?;
            let term = as_u32(&pair[0]).map_err(|m| field_err(&field, m))?;
            let action = action_from_value(&pair[1]).map_err(|m| field_err(&field, m))?;
            out.push((term, action));
        }
        actions.push(out);
    }
    let tables = ParseTables {
        version: version as u32,
        symbols: typed(obj, "symbols")?,
        productions: typed(obj, "productions")?,
        actions,
        gotos: typed(obj, "gotos")?,
        first1: typed(obj, "first1")?,
        oracles: typed(obj, "oracles")?,
        maps: typed(obj, "maps")?,
        precedence: typed(obj, "precedence")?,
        start_state: typed(obj, "start_state")?,
    };
    validate(&tables)?;
    Ok(tables)
}

fn validate(t: &ParseTables) -> Result<(), TableError> {
    let nsym = t.symbols.len() as u32;
    let nstate = t.actions.len() as u32;
    let nprod = t.productions.len() as u32;
    let is_kind = |id: u32, pred: &dyn Fn(Kind) -> bool| id < nsym && pred(t.symbols[id as usize].kind);
    let terminal = |id: u32| is_kind(id, &|k| k != Kind::Nonterminal);
    let nonterminal = |id: u32| is_kind(id, &|k| k == Kind::Nonterminal);
    let token = |(s, n): (u32, Option<u32>)| {
        terminal(s)
            && match n {
                None => true,
                Some(n) => t.symbols[s as usize].kind == Kind::Generic && (n as usize) < t.symbols[s as usize].subtokens.len(),
            }
    };

    if nsym < 2 || t.symbols[0].name != "EOF" || t.symbols[1].name != "ERROR" {
        return Err(field_err("symbols", "the first two symbols must be EOF and ERROR"));
    }
    for (i, s) in t.symbols.iter().enumerate() {
        if (i < 2) != (s.kind == Kind::Builtin) {
            return Err(field_err(format!("symbols[{i}].kind"), "only EOF and ERROR are builtin"));
        }
        if s.kind != Kind::Generic && !s.subtokens.is_empty() {
            return Err(field_err(format!("symbols[{i}].subtokens"), "only generic tokens have subtokens"));
        }
    }
    if nprod == 0 || t.productions[0].rhs.len() != 3 {
        return Err(field_err("productions[0]", "goal production must have three symbols"));
    }
    for (i, p) in t.productions.iter().enumerate() {
        if !nonterminal(p.lhs) {
            return Err(field_err(format!("productions[{i}].lhs"), format!("{} is not a nonterminal", p.lhs)));
        }
        if let Some(&bad) = p.rhs.iter().find(|&&s| s >= nsym) {
            return Err(field_err(format!("productions[{i}].rhs"), format!("unknown symbol {bad}")));
        }
        if let Some(sel) = p.selector {
            let len = p.rhs.len() as u32;
            if sel.position == 0 || sel.position > len || sel.offset != len - sel.position {
                return Err(field_err(format!("productions[{i}].selector"), "position and offset disagree with rhs length"));
            }
            let sym = p.rhs[sel.position as usize - 1];
            if t.symbols[sym as usize].kind != Kind::Generic {
                return Err(field_err(format!("productions[{i}].selector"), "selected element is not generic"));
            }
        }
        if let Some(TreeActionEntry::Map(m)) = &p.action {
            if p.selector.is_none() {
                return Err(field_err(format!("productions[{i}].action"), "map action without a selector"));
            }
            if !t.maps.iter().any(|x| &x.name == m) {
                return Err(field_err(format!("productions[{i}].action"), format!("unknown map {m}")));
            }
        }
        if let Some(r) = p.prec {
            if !token(r) {
                return Err(field_err(format!("productions[{i}].prec"), "not a token"));
            }
        }
    }
    if t.gotos.len() as u32 != nstate || t.first1.len() as u32 != nstate {
        return Err(field_err("gotos", "gotos, first1 and actions must have one row per state"));
    }
    let check_prec = |field: &str, p: PrecSource, reduce: u32| -> Result<(), TableError> {
        if let PrecSource::StackOffset(k) = p {
            let len = t.productions[reduce as usize].rhs.len() as u32;
            if k >= len {
                return Err(field_err(field, format!("stack offset {k} is not below rhs length {len}")));
            }
        }
        Ok(())
    };
    for (s, row) in t.actions.iter().enumerate() {
        let field = format!("actions[{s}]");
        if row.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(field_err(&field, "terminals must be strictly increasing"));
        }
        for &(term, a) in row {
            if !terminal(term) {
                return Err(field_err(&field, format!("{term} is not a terminal")));
            }
            match a {
                ActionEntry::Shift(st) if st >= nstate => {
                    return Err(field_err(&field, format!("shift to nonexistent state {st}")))
                }
                ActionEntry::Reduce(p) if p >= nprod || p == 0 => {
                    return Err(field_err(&field, format!("reduce by invalid production {p}")))
                }
                ActionEntry::Dynamic { shift, reduce, rule_prec, lookahead_prec } => {
                    if shift >= nstate || reduce >= nprod || reduce == 0 {
                        return Err(field_err(&field, "dynamic entry references a nonexistent state or production"));
                    }
                    check_prec(&field, rule_prec, reduce)?;
                    check_prec(&field, lookahead_prec, reduce)?;
                }
                ActionEntry::Error => return Err(field_err(&field, "error entries are implicit")),
                _ => {}
            }
        }
    }
    for (s, row) in t.gotos.iter().enumerate() {
        if row.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(field_err(format!("gotos[{s}]"), "nonterminals must be strictly increasing"));
        }
        if let Some(&(n, st)) = row.iter().find(|&&(n, st)| !nonterminal(n) || st >= nstate) {
            return Err(field_err(format!("gotos[{s}]"), format!("bad entry ({n}, {st})")));
        }
    }
    for (s, row) in t.first1.iter().enumerate() {
        if row.windows(2).any(|w| w[0] >= w[1]) || row.iter().any(|&x| !terminal(x)) {
            return Err(field_err(format!("first1[{s}]"), "must be increasing terminal ids"));
        }
    }
    for (i, o) in t.oracles.iter().enumerate() {
        if !token(o.x) || !token(o.y) {
            return Err(field_err(format!("oracles[{i}]"), "x and y must be tokens"));
        }
    }
    for (i, m) in t.maps.iter().enumerate() {
        if let Some(e) = m.entries.iter().find(|(s, n, _)| !token((*s, Some(*n)))) {
            return Err(field_err(format!("maps[{i}]"), format!("bad subtoken ({}, {})", e.0, e.1)));
        }
    }
    for (i, l) in t.precedence.iter().enumerate() {
        if l.members.iter().any(|&m| !token(m)) {
            return Err(field_err(format!("precedence[{i}]"), "members must be tokens"));
        }
    }
    if t.start_state >= nstate {
        return Err(field_err("start_state", format!("nonexistent state {}", t.start_state)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::tests::tables_for;

    const IDLIST: &str = "<idlist> : <idlist> ',' id | <idlist> ERROR id | id ;";

    #[test]
    fn round_trip_is_identity() {
        let t = tables_for(IDLIST);
        let text = serialize(&t);
        let back = deserialize(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(serialize(&back), text);
    }

    #[test]
    fn error_symbol_is_builtin_in_text() {
        let text = serialize(&tables_for(IDLIST));
        assert!(text.contains(r#"{"name":"ERROR","kind":"builtin"}"#));
    }

    #[test]
    fn truncated_file_fails() {
        let text = serialize(&tables_for(IDLIST));
        let cut = &text[..text.len() / 2];
        assert!(matches!(deserialize(cut), Err(TableError::Syntax(_))));
    }

    #[test]
    fn version_mismatch_fails() {
        let text = serialize(&tables_for(IDLIST)).replacen("\"version\": 1", "\"version\": 7", 1);
        assert_eq!(deserialize(&text), Err(TableError::Version(7)));
    }

    #[test]
    fn bad_stack_offset_names_field() {
        let g = "%generic dualop : '+' ; %left : dualop.'+' ; <e> : <e> %use dualop <e> | id ;";
        let text = serialize(&tables_for(g));
        assert!(text.contains("[\"off\",1]"));
        let broken = text.replace("[\"off\",1]", "[\"off\",3]");
        match deserialize(&broken) {
            Err(TableError::Field { field, message }) => {
                assert!(field.starts_with("actions["));
                assert!(message.contains("stack offset 3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shift_to_missing_state_fails() {
        let mut t = tables_for(IDLIST);
        t.actions[1][0].1 = ActionEntry::Shift(99);
        let err = deserialize(&serialize(&t)).unwrap_err();
        assert_eq!(err, field_err("actions[1]", "shift to nonexistent state 99"));
    }
}
