use super::SymbolSet;
use crate::grammar::{GrammarModel, RhsElement, SymbolId};

/// FIRST sets and nullability for every symbol of a grammar.
#[derive(Clone, Debug)]
pub struct FirstSets {
    first: Vec<SymbolSet>,
    nullable: Vec<bool>,
}

impl FirstSets {
    pub fn first(&self, sym: SymbolId) -> &SymbolSet {
        &self.first[sym.index()]
    }

    pub fn nullable(&self, sym: SymbolId) -> bool {
        self.nullable[sym.index()]
    }

    /// FIRST of `seq` followed by `then`.
    pub fn first_of_seq(&self, seq: &[RhsElement], then: &SymbolSet) -> SymbolSet {
        let mut out = SymbolSet::new(then.capacity());
        for e in seq {
            out.union_with(&self.first[e.symbol.index()]);
            if !self.nullable[e.symbol.index()] {
                return out;
            }
        }
        out.union_with(then);
        out
    }

    pub fn seq_nullable(&self, seq: &[RhsElement]) -> bool {
        seq.iter().all(|e| self.nullable[e.symbol.index()])
    }
}

/// Classical FIRST/nullable fixpoint.
pub fn first_sets(model: &GrammarModel) -> FirstSets {
    let n = model.symbols.len();
    let mut first = vec![SymbolSet::new(n); n];
    let mut nullable = vec![false; n];
    for s in model.terminals() {
        first[s.id.index()].insert(s.id);
    }
    let mut changed = true;
    while changed {
        changed = false;
        for p in &model.productions {
            let lhs = p.lhs.index();
            let mut all_nullable = true;
            for e in &p.rhs {
                let rhs = e.symbol.index();
                if rhs != lhs {
                    let (a, b) = if lhs < rhs {
                        let (x, y) = first.split_at_mut(rhs);
                        (&mut x[lhs], &y[0])
                    } else {
                        let (x, y) = first.split_at_mut(lhs);
                        (&mut y[0], &x[rhs])
                    };
                    changed |= a.union_with(b);
                }
                if !nullable[rhs] {
                    all_nullable = false;
                    break;
                }
            }
            if all_nullable && !nullable[lhs] {
                nullable[lhs] = true;
                changed = true;
            }
        }
    }
    FirstSets { first, nullable }
}
