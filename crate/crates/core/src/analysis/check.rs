use super::first::first_sets;
use super::{report, Machine};
use crate::diagnostic::{DiagCode, Diagnostic};
use crate::grammar::{GrammarModel, SymbolId, SymbolKind};

/// Every state where ERROR takes part in a conflict that precedence left
/// unsettled. Recovery needs a single action on ERROR in each state.
pub fn check_error_ambiguity(machine: &Machine, model: &GrammarModel) -> Vec<Diagnostic> {
    machine
        .residual_conflicts()
        .filter(|c| c.terminal == SymbolId::ERROR)
        .map(|c| {
            Diagnostic::error(
                DiagCode::ErrorAmbiguity,
                None,
                format!("ambiguous on ERROR: {}", report::describe_conflict(machine, model, c)),
            )
        })
        .collect()
}

/// `unit[a][b]` holds when a =>+ b with everything beside b nullable, and
/// `via[a]` lists the productions of a that take such a step.
fn unit_derivations(model: &GrammarModel) -> (Vec<Vec<bool>>, Vec<Vec<usize>>) {
    let n = model.symbols.len();
    let first = first_sets(model);
    let mut unit = vec![vec![false; n]; n];
    let mut via: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in &model.productions {
        for (i, e) in p.rhs.iter().enumerate() {
            if model.symbol(e.symbol).kind != SymbolKind::Nonterminal {
                continue;
            }
            let rest_nullable = p.rhs.iter().enumerate().all(|(j, o)| j == i || first.nullable(o.symbol));
            if rest_nullable {
                unit[p.lhs.index()][e.symbol.index()] = true;
                via[p.lhs.index()].push(p.index);
            }
        }
    }
    // transitive closure; grammars are small enough for the cubic pass
    for k in 0..n {
        for i in 0..n {
            if unit[i][k] {
                for j in 0..n {
                    if unit[k][j] {
                        unit[i][j] = true;
                    }
                }
            }
        }
    }
    (unit, via)
}

/// Recovery first reduces while the action on ERROR is a reduction. That
/// only fails to terminate when a nonterminal derives itself, so each
/// production on such a cycle that can be reduced on ERROR is reported.
pub fn check_error_reduction_loops(machine: &Machine, model: &GrammarModel) -> Vec<Diagnostic> {
    let (unit, via) = unit_derivations(model);
    let mut out = Vec::new();
    for (a, prods) in via.iter().enumerate() {
        if !unit[a][a] {
            continue;
        }
        for &p in prods {
            let on_error = machine.states.iter().any(|s| {
                s.reductions.get(&(p as u32)).is_some_and(|la| la.contains(SymbolId::ERROR))
            });
            if on_error {
                let prod = &model.productions[p];
                out.push(Diagnostic::error(
                    DiagCode::ErrorLoop,
                    Some(prod.pos),
                    format!("recovery could reduce forever on ERROR through `{}`", model.production_source(prod)),
                ));
            }
        }
    }
    out
}

/// A nonterminal that derives itself makes the grammar infinitely
/// ambiguous, and forced tables for it can reduce forever on any token.
pub fn check_cycles(model: &GrammarModel) -> Vec<Diagnostic> {
    let (unit, _) = unit_derivations(model);
    (0..model.symbols.len())
        .filter(|&a| unit[a][a])
        .map(|a| {
            Diagnostic::error(
                DiagCode::Cyclic,
                None,
                format!("{} derives itself", crate::grammar::symbol_source(&model.symbols[a])),
            )
        })
        .collect()
}
