use std::collections::HashSet;

use super::model::*;
use crate::diagnostic::{DiagCode, Diagnostic};

/// Returns every rule violation in the model. An empty list means the model
/// can be analyzed.
pub fn validate(model: &GrammarModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let err = |code, pos, msg: String| Diagnostic::error(code, Some(pos), msg);

    if model.user_productions().is_empty() {
        out.push(Diagnostic::error(DiagCode::NoProductions, None, "grammar has no productions"));
    }

    for o in &model.oracles {
        if !spelling_compatible(model, o.x, o.y) {
            out.push(err(
                DiagCode::OracleSpelling,
                o.pos,
                format!("{} cannot be changed to {}", model.spelling(o.x), model.spelling(o.y)),
            ));
        }
        check_declared(model, o.x, o.pos, &mut out);
        check_declared(model, o.y, o.pos, &mut out);
    }

    let defined: HashSet<SymbolId> = model.productions.iter().map(|p| p.lhs).collect();
    for p in model.user_productions() {
        if model.symbol(p.lhs).kind != SymbolKind::Nonterminal {
            out.push(err(
                DiagCode::ErrorAsLhs,
                p.pos,
                format!("{} cannot be the left-hand side of a production", model.name(p.lhs)),
            ));
        }
        for e in &p.rhs {
            if e.subtoken.is_some() {
                out.push(err(
                    DiagCode::SubtokenInProduction,
                    p.pos,
                    format!(
                        "subtoken {} cannot appear in a production",
                        model.tokref_source(TokRef { symbol: e.symbol, subtoken: e.subtoken })
                    ),
                ));
            }
            if model.symbol(e.symbol).kind == SymbolKind::Nonterminal && !defined.contains(&e.symbol) {
                out.push(err(
                    DiagCode::UndefinedNonterminal,
                    p.pos,
                    format!("{} has no productions", model.name(e.symbol)),
                ));
            }
        }
        let selectors = p.rhs.iter().filter(|e| e.selector != Selector::None).count();
        if selectors > 1 {
            out.push(err(
                DiagCode::MultipleSelectors,
                p.pos,
                "at most one %use or %ref element is allowed per production".into(),
            ));
        }
        if let Some(r) = p.prec_override {
            check_declared(model, r, p.pos, &mut out);
            if model.precedence_of(r).is_none() {
                out.push(err(
                    DiagCode::PrecWithoutLevel,
                    p.pos,
                    format!("%prec {} has no precedence level", model.tokref_source(r)),
                ));
            }
        }
        if let Some(TreeAction::Map(name)) = &p.tree_action {
            match model.map(name) {
                None => out.push(err(DiagCode::UnknownMap, p.pos, format!("unknown map {}", name))),
                Some(map) => match p.selector() {
                    None => out.push(err(
                        DiagCode::MapWithoutSelector,
                        p.pos,
                        format!("%map {} needs a %use or %ref element in the production", name),
                    )),
                    Some((position, _)) => {
                        let generic = p.rhs[position - 1].symbol;
                        let sym = model.symbol(generic);
                        let missing: Vec<String> = (0..sym.subtokens.len() as u32)
                            .filter(|&n| map.lookup(generic, n).is_none())
                            .map(|n| model.tokref_source(TokRef::subtoken(generic, n)))
                            .collect();
                        if !missing.is_empty() {
                            out.push(err(
                                DiagCode::MapNotCovering,
                                p.pos,
                                format!("map {} has no entry for {}", name, missing.join(", ")),
                            ));
                        }
                    }
                },
            }
        }
    }

    for map in &model.maps {
        let mut seen = HashSet::new();
        for e in &map.entries {
            check_declared(model, e.subtoken, e.pos, &mut out);
            if !seen.insert(e.subtoken) {
                out.push(err(
                    DiagCode::DuplicateMapEntry,
                    e.pos,
                    format!("{} appears twice in map {}", model.tokref_source(e.subtoken), map.name),
                ));
            }
        }
    }

    let mut seen = HashSet::new();
    for level in &model.precedence {
        for &r in &level.members {
            check_declared(model, r, level.pos, &mut out);
            if !seen.insert(r) {
                out.push(err(
                    DiagCode::DuplicatePrecedence,
                    level.pos,
                    format!("{} has more than one precedence level", model.tokref_source(r)),
                ));
            }
        }
    }

    out
}

/// Whether input text scanned as `x` is also a legal spelling of `y`.
pub(crate) fn spelling_compatible(model: &GrammarModel, x: TokRef, y: TokRef) -> bool {
    let xs = model.symbol(x.symbol);
    let ys = model.symbol(y.symbol);
    match (x.subtoken, xs.kind) {
        (None, SymbolKind::Plain | SymbolKind::Generic) => {
            y.subtoken.is_none() && ys.kind == SymbolKind::Plain
        }
        (Some(n), _) => {
            y.subtoken.is_none()
                && ys.kind == SymbolKind::Reserved
                && ys.name == xs.subtokens[n as usize]
        }
        (None, SymbolKind::Reserved) => {
            ys.kind == SymbolKind::Generic
                && match y.subtoken {
                    None => ys.subtoken_number(&xs.name).is_some(),
                    Some(k) => ys.subtokens[k as usize] == xs.name,
                }
        }
        _ => false,
    }
}

fn check_declared(model: &GrammarModel, r: TokRef, pos: crate::diagnostic::Pos, out: &mut Vec<Diagnostic>) {
    let Some(n) = r.subtoken else { return };
    let sym = model.symbol(r.symbol);
    if let Some(decl) = &sym.generic_decl {
        let lit = &sym.subtokens[n as usize];
        if !decl.contains(lit) {
            out.push(Diagnostic::error(
                DiagCode::UndeclaredSubtoken,
                Some(pos),
                format!("{} is not a declared subtoken of {}", quote_literal(lit), sym.name),
            ));
        }
    }
}
