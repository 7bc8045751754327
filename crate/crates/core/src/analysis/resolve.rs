use std::collections::{BTreeMap, BTreeSet};

use super::{ActionEntry, Conflict, Machine, PrecSource, Resolution};
use crate::diagnostic::{DiagCode, Diagnostic};
use crate::grammar::{Assoc, GrammarModel, Selector, SymbolId, SymbolKind, TokRef};

/// Precedence of a production: an explicit `%prec`, else the `%use` element
/// read from the stack, else the rightmost terminal that has a level.
pub fn rule_precedence(model: &GrammarModel, production: usize) -> Option<PrecSource> {
    let p = &model.productions[production];
    if let Some(r) = p.prec_override {
        return model.precedence_of(r).map(|(l, a)| PrecSource::StaticLevel(l, a));
    }
    if let Some((pos, Selector::Use)) = p.selector() {
        return Some(PrecSource::StackOffset((p.rhs.len() - pos) as u32));
    }
    p.rhs
        .iter()
        .rev()
        .filter(|e| model.symbol(e.symbol).is_terminal())
        .find_map(|e| model.precedence_of(TokRef::token(e.symbol)))
        .map(|(l, a)| PrecSource::StaticLevel(l, a))
}

fn lookahead_precedence(model: &GrammarModel, t: SymbolId) -> Option<PrecSource> {
    if model.symbol(t).kind == SymbolKind::Generic {
        return Some(PrecSource::LookaheadSubtoken);
    }
    model.precedence_of(TokRef::token(t)).map(|(l, a)| PrecSource::StaticLevel(l, a))
}

fn static_decision(rule: (u32, Assoc), la: (u32, Assoc), shift: ActionEntry, reduce: ActionEntry) -> ActionEntry {
    use std::cmp::Ordering::*;
    match rule.0.cmp(&la.0) {
        Greater => reduce,
        Less => shift,
        Equal => match la.1 {
            Assoc::Left => reduce,
            Assoc::Right => shift,
            Assoc::Nonassoc => ActionEntry::Error,
        },
    }
}

/// Fills the action table, settling shift-reduce conflicts by precedence.
///
/// Conflicts that precedence cannot settle are recorded as residual, with
/// the action a forced build would take: the shift if there is one, else
/// the lowest-numbered reduction.
pub fn resolve_conflicts(mut machine: Machine, model: &GrammarModel) -> Machine {
    let mut actions = Vec::with_capacity(machine.states.len());
    let mut conflicts = Vec::new();
    let mut uncovered: BTreeSet<(SymbolId, u32)> = BTreeSet::new();

    for state in &machine.states {
        let mut candidates: BTreeMap<SymbolId, (Option<ActionEntry>, Vec<u32>)> = BTreeMap::new();
        for (&sym, &target) in &state.transitions {
            if model.symbol(sym).is_terminal() {
                candidates.entry(sym).or_default().0 = Some(ActionEntry::Shift(target as u32));
            }
        }
        if state.accepts {
            candidates.entry(SymbolId::EOF).or_default().0 = Some(ActionEntry::Accept);
        }
        for (&p, la) in &state.reductions {
            for t in la.iter() {
                candidates.entry(t).or_default().1.push(p);
            }
        }

        let mut row = BTreeMap::new();
        for (t, (shift, reduces)) in candidates {
            let entry = match (shift, reduces.as_slice()) {
                (Some(s), []) => s,
                (None, [p]) => ActionEntry::Reduce(*p),
                (Some(s @ ActionEntry::Shift(target)), [p]) => {
                    let reduce = ActionEntry::Reduce(*p);
                    let resolution = match (rule_precedence(model, *p as usize), lookahead_precedence(model, t)) {
                        (Some(PrecSource::StaticLevel(rl, ra)), Some(PrecSource::StaticLevel(ll, la))) => {
                            Resolution::Static(static_decision((rl, ra), (ll, la), s, reduce))
                        }
                        (Some(rule_prec), Some(lookahead_prec)) => {
                            note_uncovered(model, *p as usize, t, rule_prec, lookahead_prec, &mut uncovered);
                            Resolution::Dynamic
                        }
                        _ => Resolution::Unresolved { chosen: s },
                    };
                    let entry = match &resolution {
                        Resolution::Static(e) => *e,
                        Resolution::Dynamic => {
                            let rule_prec = rule_precedence(model, *p as usize).unwrap();
                            let lookahead_prec = lookahead_precedence(model, t).unwrap();
                            ActionEntry::Dynamic { shift: target, reduce: *p, rule_prec, lookahead_prec }
                        }
                        Resolution::Unresolved { chosen } => *chosen,
                    };
                    conflicts.push(Conflict { state: state.id, terminal: t, shift: Some(s), reduces, resolution });
                    entry
                }
                (shift, reduces) => {
                    let chosen = shift.unwrap_or(ActionEntry::Reduce(reduces[0]));
                    conflicts.push(Conflict {
                        state: state.id,
                        terminal: t,
                        shift,
                        reduces: reduces.to_vec(),
                        resolution: Resolution::Unresolved { chosen },
                    });
                    chosen
                }
            };
            if entry != ActionEntry::Error {
                row.insert(t, entry);
            }
        }
        actions.push(row);
    }

    machine.first1 = (0..machine.states.len()).map(|s| super::state_first1(&machine, model, s)).collect();
    machine.actions = actions;
    machine.conflicts = conflicts;
    machine.warnings = uncovered
        .into_iter()
        .map(|(sym, n)| {
            let r = TokRef::subtoken(sym, n);
            Diagnostic::warning(
                DiagCode::UncoveredSubtoken,
                None,
                format!("{} has no precedence level but may decide a dynamic conflict", model.tokref_source(r)),
            )
        })
        .collect();
    machine
}

/// Records subtokens that can reach a dynamic decision without a level.
fn note_uncovered(
    model: &GrammarModel,
    production: usize,
    lookahead: SymbolId,
    rule_prec: PrecSource,
    lookahead_prec: PrecSource,
    out: &mut BTreeSet<(SymbolId, u32)>,
) {
    let mut generics = Vec::new();
    if let PrecSource::StackOffset(k) = rule_prec {
        let rhs = &model.productions[production].rhs;
        generics.push(rhs[rhs.len() - 1 - k as usize].symbol);
    }
    if lookahead_prec == PrecSource::LookaheadSubtoken {
        generics.push(lookahead);
    }
    for g in generics {
        for n in 0..model.symbol(g).subtokens.len() as u32 {
            if model.precedence_of(TokRef::subtoken(g, n)).is_none() {
                out.insert((g, n));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{build_canonical, build_pager, BuildOptions};
    use crate::grammar::load_grammar;

    const DUALOP: &str = "%generic dualop : '+' '*' ;
        %left : dualop.'+' ;
        %left : dualop.'*' ;
        <sexp> : <sexp> %use dualop <sexp> | id ;";

    #[test]
    fn use_element_gives_dynamic_entry() {
        let m = load_grammar(DUALOP).unwrap();
        let machine = resolve_conflicts(build_pager(&m, &BuildOptions::default()).unwrap(), &m);
        let dualop = m.find_symbol("dualop", SymbolKind::Plain).unwrap();
        let dynamic: Vec<_> = machine
            .actions
            .iter()
            .flat_map(|row| row.values())
            .filter(|e| matches!(e, ActionEntry::Dynamic { .. }))
            .collect();
        assert_eq!(dynamic.len(), 1);
        match dynamic[0] {
            ActionEntry::Dynamic { rule_prec, lookahead_prec, .. } => {
                assert_eq!(*rule_prec, PrecSource::StackOffset(1));
                assert_eq!(*lookahead_prec, PrecSource::LookaheadSubtoken);
            }
            _ => unreachable!(),
        }
        assert!(machine.conflicts.iter().all(|c| c.terminal == dualop && c.resolution == Resolution::Dynamic));
        assert!(machine.warnings.is_empty());
    }

    #[test]
    fn uncovered_subtoken_warns() {
        let g = "%generic dualop : '+' '*' '&' ;
            %left : dualop.'+' ;
            <sexp> : <sexp> %use dualop <sexp> | id ;";
        let m = load_grammar(g).unwrap();
        let machine = resolve_conflicts(build_pager(&m, &BuildOptions::default()).unwrap(), &m);
        let texts: Vec<_> = machine.warnings.iter().map(|w| w.message.clone()).collect();
        assert_eq!(texts.len(), 2);
        assert!(texts[0].starts_with("dualop.'*'"));
        assert!(texts[1].starts_with("dualop.'&'"));
    }

    #[test]
    fn prec_override_is_static() {
        let g = "%generic dualop : '-' ; %generic unop : '~' ;
            %left : dualop.'-' ;
            %right : unop.'~' ;
            %map prefix : dualop.'-' => neg ;
            <e> : <e> '-' <e> | %ref dualop <e> %prec unop.'~' => %map prefix | id ;";
        let m = load_grammar(g).unwrap();
        let p = m.productions.iter().position(|p| p.prec_override.is_some()).unwrap();
        assert_eq!(rule_precedence(&m, p), Some(PrecSource::StaticLevel(2, Assoc::Right)));
    }

    #[test]
    fn left_assoc_reduces() {
        let m = load_grammar("%left : '+' ; <e> : <e> '+' <e> | id ;").unwrap();
        let machine = resolve_conflicts(build_canonical(&m, &BuildOptions::default()).unwrap(), &m);
        assert_eq!(machine.conflicts.len(), 1);
        let c = &machine.conflicts[0];
        assert_eq!(c.resolution, Resolution::Static(ActionEntry::Reduce(c.reduces[0])));
        assert_eq!(machine.residual_conflicts().count(), 0);
    }

    #[test]
    fn nonassoc_removes_entry() {
        let m = load_grammar("%nonassoc : '<' ; <e> : <e> '<' <e> | id ;").unwrap();
        let machine = resolve_conflicts(build_canonical(&m, &BuildOptions::default()).unwrap(), &m);
        let lt = m.find_symbol("<", SymbolKind::Reserved).unwrap();
        let c = &machine.conflicts[0];
        assert_eq!(c.resolution, Resolution::Static(ActionEntry::Error));
        assert_eq!(machine.action(c.state, lt), ActionEntry::Error);
    }

    #[test]
    fn reduce_reduce_stays_residual() {
        let m = load_grammar("%left : x ; <s> : <a> | <b> ; <a> : x ; <b> : x ;").unwrap();
        let machine = resolve_conflicts(build_canonical(&m, &BuildOptions::default()).unwrap(), &m);
        let residual: Vec<_> = machine.residual_conflicts().collect();
        assert_eq!(residual.len(), 1);
        let low = residual[0].reduces[0];
        assert_eq!(residual[0].resolution, Resolution::Unresolved { chosen: ActionEntry::Reduce(low) });
    }
}
