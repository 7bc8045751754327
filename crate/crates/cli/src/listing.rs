//! Error listings in the `###` layout.

use lr1gen::diagnostic::Pos;
use lr1gen::engine::{expected_listing, saw_token, AbortReason, ParseEvent, Token};
use lr1gen::tables::ParseTables;

/// Width of `### ` plus the line number field plus ` | `.
const GUTTER: usize = 13;

/// Source line with its number, then a caret under `pos`.
pub fn excerpt(source: &str, pos: Pos) -> String {
    let line = source.lines().nth(pos.line.saturating_sub(1) as usize).unwrap_or("");
    let pad = GUTTER - 3 + pos.column.max(1) as usize - 1;
    format!("### {:>6} | {}\n###{}^\n", pos.line, line, " ".repeat(pad))
}

/// Renders every error, recovery and abort in `events`.
pub fn render(tables: &ParseTables, source: &str, path: &str, events: &[ParseEvent]) -> String {
    let mut out = String::new();
    for ev in events {
        match ev {
            ParseEvent::ErrorDetected { token, expected, .. } => {
                out.push_str(&excerpt(source, token.pos));
                out.push_str(&format!("#E \"{}\", line {}: syntax error\n", path, token.pos));
                out.push_str(&format!("### Saw token: {}\n", saw_token(tables, token)));
                out.push_str(&format!("### expected: {}\n", expected_listing(tables, expected)));
                out.push_str("###\n");
            }
            ParseEvent::Recover { token, .. } => out.push_str(&resume(tables, source, token)),
            ParseEvent::Abort(reason) => out.push_str(&format!("### Parse aborted: {}\n", abort_message(tables, reason))),
            _ => {}
        }
    }
    out
}

pub fn abort_message(tables: &ParseTables, reason: &AbortReason) -> String {
    match reason {
        AbortReason::DiscardEof => "recovery would discard EOF".to_string(),
        AbortReason::TooManyErrors(n) => format!("more than {n} errors"),
        AbortReason::MissingCallback(rule) => format!("no handler for oracle rule {rule}"),
        AbortReason::MissingMapEntry { map, symbol, subtoken } => {
            let sym = tables.symbol(*symbol);
            format!("map {} has no entry for {}.'{}'", map, sym.name, sym.subtokens[*subtoken as usize])
        }
        AbortReason::RecoveryLoop => "error reductions did not terminate".to_string(),
        AbortReason::ReductionLoop => "reductions did not terminate".to_string(),
    }
}

fn resume(tables: &ParseTables, source: &str, token: &Token) -> String {
    format!("{}### Resuming parse with token: {}\n", excerpt(source, token.pos), saw_token(tables, token))
}
