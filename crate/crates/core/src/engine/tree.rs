use std::fmt;
use std::rc::Rc;

use crate::diagnostic::Pos;

/// Payload of a leaf built from a plain terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub text: String,
    pub pos: Pos,
}

/// A parse tree node. Children are shared so that the engine can undo
/// reductions without copying subtrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseTree {
    /// Node name; empty for the unnamed sequence node.
    pub node: String,
    pub children: Vec<Rc<ParseTree>>,
    pub leaf: Option<Leaf>,
}

impl ParseTree {
    pub fn leaf(node: &str, text: &str, pos: Pos) -> Self {
        ParseTree { node: node.to_string(), children: Vec::new(), leaf: Some(Leaf { text: text.to_string(), pos }) }
    }

    pub fn node(node: &str, children: Vec<Rc<ParseTree>>) -> Self {
        ParseTree { node: node.to_string(), children, leaf: None }
    }

    /// Structural shape without leaf positions, for comparisons across
    /// grammars that lex the same text.
    pub fn shape(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut out, false);
        out
    }

    fn write_sexpr(&self, out: &mut String, quote: bool) {
        if let Some(l) = &self.leaf {
            if quote {
                out.push('\'');
                out.push_str(&l.text);
                out.push('\'');
            } else {
                out.push_str(&l.text);
            }
            return;
        }
        out.push('(');
        out.push_str(if self.node.is_empty() { "_" } else { &self.node });
        for c in &self.children {
            out.push(' ');
            c.write_sexpr(out, quote);
        }
        out.push(')');
    }
}

/// Nested s-expression: `(node child ...)` with leaves as `'text'` and
/// the unnamed sequence node written `_`.
impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write_sexpr(&mut out, true);
        f.write_str(&out)
    }
}
