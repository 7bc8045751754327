use std::collections::HashMap;

use super::first::FirstSets;
use super::SymbolSet;
use crate::grammar::{GrammarModel, SymbolId, SymbolKind};

/// An LR(1) item: a production with a dot position and its right context set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Item {
    pub production: u32,
    pub dot: u32,
    pub lookahead: SymbolSet,
}

impl Item {
    pub fn core(&self) -> (u32, u32) {
        (self.production, self.dot)
    }
}

/// Grammar tables shared by closure and goto.
pub struct ItemContext<'m> {
    pub model: &'m GrammarModel,
    pub first: FirstSets,
    by_lhs: Vec<Vec<u32>>,
}

impl<'m> ItemContext<'m> {
    pub fn new(model: &'m GrammarModel) -> Self {
        let mut by_lhs = vec![Vec::new(); model.symbols.len()];
        for p in &model.productions {
            by_lhs[p.lhs.index()].push(p.index as u32);
        }
        ItemContext { model, first: super::first::first_sets(model), by_lhs }
    }

    pub fn symbol_count(&self) -> usize {
        self.model.symbols.len()
    }

    pub fn rhs_len(&self, production: u32) -> u32 {
        self.model.productions[production as usize].rhs.len() as u32
    }

    /// Symbol after the dot, if any.
    pub fn next_symbol(&self, production: u32, dot: u32) -> Option<SymbolId> {
        self.model.productions[production as usize].rhs.get(dot as usize).map(|e| e.symbol)
    }

    /// Canonical LR(1) closure. Kernel items come first, in their given order,
    /// followed by added items in discovery order.
    pub fn closure(&self, kernel: &[Item]) -> Vec<Item> {
        let mut items: Vec<Item> = kernel.to_vec();
        let mut index: HashMap<(u32, u32), usize> =
            items.iter().enumerate().map(|(i, it)| (it.core(), i)).collect();
        let mut work: Vec<usize> = (0..items.len()).collect();
        while let Some(i) = work.pop() {
            let (prod, dot) = items[i].core();
            let p = &self.model.productions[prod as usize];
            let Some(next) = p.rhs.get(dot as usize) else { continue };
            if self.model.symbol(next.symbol).kind != SymbolKind::Nonterminal {
                continue;
            }
            let la = self.first.first_of_seq(&p.rhs[dot as usize + 1..], &items[i].lookahead);
            for &q in &self.by_lhs[next.symbol.index()] {
                match index.get(&(q, 0)) {
                    Some(&j) => {
                        if items[j].lookahead.union_with(&la) {
                            work.push(j);
                        }
                    }
                    None => {
                        index.insert((q, 0), items.len());
                        work.push(items.len());
                        items.push(Item { production: q, dot: 0, lookahead: la.clone() });
                    }
                }
            }
        }
        items
    }

    /// Kernel reached from `items` over `symbol`, sorted by core. Lookaheads
    /// are carried unchanged. Empty when no item has the dot before `symbol`.
    pub fn goto_step(&self, items: &[Item], symbol: SymbolId) -> Vec<Item> {
        let mut out: Vec<Item> = items
            .iter()
            .filter(|it| self.next_symbol(it.production, it.dot) == Some(symbol))
            .map(|it| Item { production: it.production, dot: it.dot + 1, lookahead: it.lookahead.clone() })
            .collect();
        out.sort_by_key(Item::core);
        out
    }
}
