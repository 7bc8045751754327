//! Grammar input language: parsing, augmentation, validation and printing.

mod lexer;
mod model;
mod parser;
mod print;
mod validate;

pub use model::*;
pub use parser::parse_grammar;
pub use print::to_source;
pub use validate::validate;

use crate::diagnostic::{DiagCode, Diagnostic};

#[derive(Debug, Clone, thiserror::Error)]
#[error("{}", .diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct GrammarError {
    pub diagnostics: Vec<Diagnostic>,
}

/// Adds the built-in production `<GOAL> : EOF <user goal> EOF` as production 0,
/// where the user goal is the left-hand side of the first user production.
/// Augmenting an augmented model returns it unchanged.
pub fn augment(model: &GrammarModel) -> Result<GrammarModel, GrammarError> {
    if model.is_augmented() {
        return Ok(model.clone());
    }
    let Some(first) = model.productions.first() else {
        return Err(GrammarError {
            diagnostics: vec![Diagnostic::error(DiagCode::NoProductions, None, "grammar has no productions")],
        });
    };
    if let Some(s) = model.symbols.iter().find(|s| s.name == GOAL_NAME) {
        return Err(GrammarError {
            diagnostics: vec![Diagnostic::error(
                DiagCode::ReservedGoalName,
                None,
                format!("{} is reserved for the built-in goal production", s.name),
            )],
        });
    }
    let mut out = model.clone();
    let user_goal = first.lhs;
    let goal = SymbolId(out.symbols.len() as u32);
    out.symbols.push(Symbol {
        id: goal,
        name: GOAL_NAME.to_string(),
        kind: SymbolKind::Nonterminal,
        subtokens: Vec::new(),
        generic_decl: None,
    });
    let element = |symbol| RhsElement { symbol, selector: Selector::None, subtoken: None };
    out.productions.insert(
        0,
        Production {
            index: 0,
            lhs: goal,
            rhs: vec![element(SymbolId::EOF), element(user_goal), element(SymbolId::EOF)],
            prec_override: None,
            tree_action: None,
            pos: first.pos,
        },
    );
    for (i, p) in out.productions.iter_mut().enumerate() {
        p.index = i;
    }
    out.goal = Some(goal);
    Ok(out)
}

/// Parses, augments and validates grammar source in one step.
///
/// Returns the augmented model together with any warnings; validation
/// errors are returned as `Err`.
pub fn load_grammar(text: &str) -> Result<GrammarModel, GrammarError> {
    let parsed = parse_grammar(text)?;
    let augmented = augment(&parsed)?;
    let errors: Vec<Diagnostic> = validate(&augmented).into_iter().filter(|d| d.is_error()).collect();
    if errors.is_empty() {
        Ok(augmented)
    } else {
        Err(GrammarError { diagnostics: errors })
    }
}
