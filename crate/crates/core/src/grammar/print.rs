use std::fmt::Write;

use super::model::*;

/// Renders a model back to grammar source. The built-in goal production is
/// omitted; re-parsing the output yields the same structure.
pub fn to_source(model: &GrammarModel) -> String {
    let mut out = String::new();
    for sym in model.symbols.iter().filter(|s| s.kind == SymbolKind::Generic) {
        let lits: Vec<String> = sym.subtokens.iter().map(|l| quote_literal(l)).collect();
        writeln!(out, "%generic {} : {} ;", sym.name, lits.join(" ")).unwrap();
    }
    for level in &model.precedence {
        let dir = match level.assoc {
            Assoc::Left => "%left",
            Assoc::Right => "%right",
            Assoc::Nonassoc => "%noassoc",
        };
        let members: Vec<String> = level.members.iter().map(|&r| model.tokref_source(r)).collect();
        writeln!(out, "{} : {} ;", dir, members.join(" ")).unwrap();
    }
    for map in &model.maps {
        let entries: Vec<String> = map
            .entries
            .iter()
            .map(|e| format!("{} => {}", model.tokref_source(e.subtoken), e.node))
            .collect();
        writeln!(out, "%map {} : {} ;", map.name, entries.join("\n    | ")).unwrap();
    }
    for o in &model.oracles {
        write!(out, "%oracle {} : {}", model.tokref_source(o.x), model.tokref_source(o.y)).unwrap();
        if !o.body.is_empty() {
            write!(out, " %{{{}%}}", o.body).unwrap();
        }
        out.push_str(" ;\n");
    }
    for p in model.user_productions() {
        out.push_str(&model.production_source(p));
        if let Some(r) = p.prec_override {
            write!(out, " %prec {}", model.tokref_source(r)).unwrap();
        }
        if let Some(a) = &p.tree_action {
            write!(out, " => {}", a).unwrap();
        }
        out.push_str(" ;\n");
    }
    out
}
