use super::lexer::{tokenize, Tok};
use super::model::*;
use super::GrammarError;
use crate::diagnostic::{DiagCode, Diagnostic, Pos};

/// Parses grammar source into an unaugmented model.
///
/// Every `|` alternative becomes its own production. Subtoken numbers are
/// assigned per generic token in order of first appearance in the file.
pub fn parse_grammar(text: &str) -> Result<GrammarModel, GrammarError> {
    let toks = tokenize(text).map_err(|d| GrammarError { diagnostics: vec![d] })?;
    let mut p = Parser { toks, at: 0, b: Builder::new(), errors: Vec::new() };
    p.file();
    let selector_uses = std::mem::take(&mut p.b.selector_uses);
    for (sym, pos) in selector_uses {
        if p.b.model.symbol(sym).kind != SymbolKind::Generic {
            p.errors.push(Diagnostic::error(
                DiagCode::SelectorOnNonGeneric,
                Some(pos),
                format!("%use/%ref must precede a generic token, found {}", p.b.model.name(sym)),
            ));
        }
    }
    if p.errors.is_empty() {
        Ok(p.b.model)
    } else {
        Err(GrammarError { diagnostics: p.errors })
    }
}

struct Builder {
    model: GrammarModel,
    selector_uses: Vec<(SymbolId, Pos)>,
}

impl Builder {
    fn new() -> Self {
        let mut model = GrammarModel::default();
        for (name, kind) in [("EOF", SymbolKind::Eof), ("ERROR", SymbolKind::Error)] {
            let id = SymbolId(model.symbols.len() as u32);
            model.symbols.push(Symbol {
                id,
                name: name.to_string(),
                kind,
                subtokens: Vec::new(),
                generic_decl: None,
            });
        }
        Builder { model, selector_uses: Vec::new() }
    }

    fn intern(&mut self, name: &str, kind: SymbolKind) -> SymbolId {
        if let Some(id) = self
            .model
            .symbols
            .iter()
            .find(|s| s.name == name && same_namespace(s.kind, kind))
            .map(|s| s.id)
        {
            return id;
        }
        let id = SymbolId(self.model.symbols.len() as u32);
        self.model.symbols.push(Symbol {
            id,
            name: name.to_string(),
            kind,
            subtokens: Vec::new(),
            generic_decl: None,
        });
        id
    }

    fn plain(&mut self, name: &str) -> SymbolId {
        match name {
            "EOF" => SymbolId::EOF,
            "ERROR" => SymbolId::ERROR,
            _ => self.intern(name, SymbolKind::Plain),
        }
    }

    fn subtoken(&mut self, sym: SymbolId, literal: &str, pos: Pos) -> Result<u32, Diagnostic> {
        let s = &mut self.model.symbols[sym.index()];
        match s.kind {
            SymbolKind::Plain => s.kind = SymbolKind::Generic,
            SymbolKind::Generic => {}
            _ => {
                return Err(Diagnostic::error(
                    DiagCode::Syntax,
                    Some(pos),
                    format!("{} cannot have subtokens", s.name),
                ))
            }
        }
        Ok(match s.subtoken_number(literal) {
            Some(n) => n,
            None => {
                s.subtokens.push(literal.to_string());
                (s.subtokens.len() - 1) as u32
            }
        })
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    b: Builder,
    errors: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        Err(Diagnostic::error(
            DiagCode::Syntax,
            Some(self.pos()),
            format!("expected {}, found {}", what, self.peek().describe()),
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    fn literal(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Literal(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("a quoted literal"),
        }
    }

    fn file(&mut self) {
        while *self.peek() != Tok::End {
            if let Err(d) = self.rule() {
                self.errors.push(d);
                // resynchronize after the next ';'
                while !matches!(self.peek(), Tok::Semi | Tok::End) {
                    self.bump();
                }
                if *self.peek() == Tok::Semi {
                    self.bump();
                }
            }
        }
    }

    fn rule(&mut self) -> PResult<()> {
        match self.peek().clone() {
            Tok::Nonterm(name) => {
                let pos = self.pos();
                self.bump();
                let lhs = self.b.intern(&name, SymbolKind::Nonterminal);
                self.production(lhs, pos)
            }
            Tok::Ident(name) if name == "ERROR" && *self.peek2() == Tok::Colon => {
                // kept so that validate can report it
                let pos = self.pos();
                self.bump();
                self.production(SymbolId::ERROR, pos)
            }
            Tok::Directive(d) => match d.as_str() {
                "oracle" => self.oracle(),
                "map" => self.map(),
                "left" => self.prec(Assoc::Left),
                "right" => self.prec(Assoc::Right),
                "noassoc" | "nonassoc" => self.prec(Assoc::Nonassoc),
                "generic" => self.generic(),
                other => Err(Diagnostic::error(
                    DiagCode::Syntax,
                    Some(self.pos()),
                    format!("unknown directive %{}", other),
                )),
            },
            _ => self.unexpected("a rule"),
        }
    }

    fn production(&mut self, lhs: SymbolId, pos: Pos) -> PResult<()> {
        self.expect(Tok::Colon)?;
        let mut alt_pos = pos;
        loop {
            let mut prod = self.alternative(lhs, alt_pos)?;
            prod.index = self.b.model.productions.len();
            self.b.model.productions.push(prod);
            match self.peek() {
                Tok::Bar => {
                    self.bump();
                    alt_pos = self.pos();
                }
                Tok::Semi => {
                    self.bump();
                    return Ok(());
                }
                _ => return self.unexpected("'|' or ';'"),
            }
        }
    }

    fn alternative(&mut self, lhs: SymbolId, pos: Pos) -> PResult<Production> {
        let mut rhs = Vec::new();
        loop {
            let epos = self.pos();
            match self.peek().clone() {
                Tok::Nonterm(n) => {
                    self.bump();
                    let symbol = self.b.intern(&n, SymbolKind::Nonterminal);
                    rhs.push(RhsElement { symbol, selector: Selector::None, subtoken: None });
                }
                Tok::Literal(l) => {
                    self.bump();
                    let symbol = self.b.intern(&l, SymbolKind::Reserved);
                    rhs.push(RhsElement { symbol, selector: Selector::None, subtoken: None });
                }
                Tok::Ident(name) => {
                    self.bump();
                    let symbol = self.b.plain(&name);
                    let mut subtoken = None;
                    if *self.peek() == Tok::Dot {
                        self.bump();
                        let lit = self.literal()?;
                        subtoken = Some(self.b.subtoken(symbol, &lit, epos)?);
                    }
                    rhs.push(RhsElement { symbol, selector: Selector::None, subtoken });
                }
                Tok::Directive(d) if d == "use" || d == "ref" => {
                    self.bump();
                    let name = self.ident("a generic token after %use/%ref")?;
                    let symbol = self.b.plain(&name);
                    self.b.selector_uses.push((symbol, epos));
                    let selector = if d == "use" { Selector::Use } else { Selector::Ref };
                    rhs.push(RhsElement { symbol, selector, subtoken: None });
                }
                _ => break,
            }
        }
        let mut prec_override = None;
        if matches!(self.peek(), Tok::Directive(d) if d == "prec") {
            self.bump();
            prec_override = Some(self.tokref()?);
        }
        let mut tree_action = None;
        if *self.peek() == Tok::Arrow {
            self.bump();
            tree_action = Some(match self.peek().clone() {
                Tok::Ident(n) => {
                    self.bump();
                    TreeAction::Node(n)
                }
                Tok::Directive(d) if d == "map" => {
                    self.bump();
                    TreeAction::Map(self.ident("a map name")?)
                }
                _ => return self.unexpected("a node name or %map"),
            });
        }
        Ok(Production { index: 0, lhs, rhs, prec_override, tree_action, pos })
    }

    fn tokref(&mut self) -> PResult<TokRef> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Literal(l) => {
                self.bump();
                Ok(TokRef::token(self.b.intern(&l, SymbolKind::Reserved)))
            }
            Tok::Ident(name) => {
                self.bump();
                let sym = self.b.plain(&name);
                if *self.peek() == Tok::Dot {
                    self.bump();
                    let lit = self.literal()?;
                    let n = self.b.subtoken(sym, &lit, pos)?;
                    Ok(TokRef::subtoken(sym, n))
                } else {
                    Ok(TokRef::token(sym))
                }
            }
            _ => self.unexpected("a token or subtoken"),
        }
    }

    fn oracle(&mut self) -> PResult<()> {
        let pos = self.pos();
        self.bump();
        let x = self.tokref()?;
        self.expect(Tok::Colon)?;
        let y = self.tokref()?;
        let mut body = String::new();
        if let Tok::Opaque(b) = self.peek().clone() {
            self.bump();
            body = b;
        }
        self.expect(Tok::Semi)?;
        let index = self.b.model.oracles.len();
        self.b.model.oracles.push(OracleRule { index, x, y, body, pos });
        Ok(())
    }

    fn map(&mut self) -> PResult<()> {
        let pos = self.pos();
        self.bump();
        let name = self.ident("a map name")?;
        if self.b.model.map(&name).is_some() {
            return Err(Diagnostic::error(
                DiagCode::DuplicateMap,
                Some(pos),
                format!("duplicate map name {}", name),
            ));
        }
        self.expect(Tok::Colon)?;
        let mut entries = Vec::new();
        loop {
            let epos = self.pos();
            let generic = self.ident("a generic token")?;
            let sym = self.b.plain(&generic);
            self.expect(Tok::Dot)?;
            let lit = self.literal()?;
            let n = self.b.subtoken(sym, &lit, epos)?;
            self.expect(Tok::Arrow)?;
            let node = self.ident("a node name")?;
            entries.push(MapEntry { subtoken: TokRef::subtoken(sym, n), node, pos: epos });
            match self.peek() {
                Tok::Bar => {
                    self.bump();
                }
                Tok::Semi => {
                    self.bump();
                    break;
                }
                _ => return self.unexpected("'|' or ';'"),
            }
        }
        self.b.model.maps.push(MapRule { name, entries, pos });
        Ok(())
    }

    fn prec(&mut self, assoc: Assoc) -> PResult<()> {
        let pos = self.pos();
        self.bump();
        self.expect(Tok::Colon)?;
        let mut members = vec![self.tokref()?];
        while *self.peek() != Tok::Semi {
            members.push(self.tokref()?);
        }
        self.bump();
        self.b.model.precedence.push(PrecLevel { assoc, members, pos });
        Ok(())
    }

    fn generic(&mut self) -> PResult<()> {
        let pos = self.pos();
        self.bump();
        let name = self.ident("a generic token name")?;
        let sym = self.b.plain(&name);
        self.expect(Tok::Colon)?;
        let mut lits = vec![self.literal()?];
        while *self.peek() != Tok::Semi {
            lits.push(self.literal()?);
        }
        self.bump();
        for l in &lits {
            self.b.subtoken(sym, l, pos)?;
        }
        let decl = self.b.model.symbols[sym.index()].generic_decl.get_or_insert_with(Vec::new);
        for l in lits {
            if !decl.contains(&l) {
                decl.push(l);
            }
        }
        Ok(())
    }
}
