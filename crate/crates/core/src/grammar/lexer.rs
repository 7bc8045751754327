//! Tokenizer for grammar source files.

use crate::diagnostic::{DiagCode, Diagnostic, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Nonterm(String),
    Literal(String),
    Ident(String),
    /// `%word`, stored without the percent sign.
    Directive(String),
    /// Verbatim text between `%{` and `%}`.
    Opaque(String),
    Colon,
    Bar,
    Semi,
    Dot,
    Arrow,
    End,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Nonterm(n) => n.clone(),
            Tok::Literal(l) => format!("'{}'", l),
            Tok::Ident(i) => i.clone(),
            Tok::Directive(d) => format!("%{}", d),
            Tok::Opaque(_) => "%{ ... %}".to_string(),
            Tok::Colon => "':'".to_string(),
            Tok::Bar => "'|'".to_string(),
            Tok::Semi => "';'".to_string(),
            Tok::Dot => "'.'".to_string(),
            Tok::Arrow => "'=>'".to_string(),
            Tok::End => "end of file".to_string(),
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut cur = Cursor { i: 0, line: 1, col: 1 };

    while cur.i < chars.len() {
        let i = cur.i;
        let c = chars[i];
        let pos = Pos::new(cur.line, cur.col);
        if c.is_whitespace() {
            cur.advance(&chars, i + 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            let mut j = i;
            while j < chars.len() && chars[j] != '\n' {
                j += 1;
            }
            cur.advance(&chars, j);
            continue;
        }
        let err = |msg: String| Diagnostic::error(DiagCode::Syntax, Some(pos), msg);
        match c {
            '<' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '>' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '>' {
                    return Err(err("unterminated nonterminal name".into()));
                }
                let name: String = chars[i..=j].iter().collect();
                if name.len() <= 2 {
                    return Err(err("empty nonterminal name".into()));
                }
                out.push((Tok::Nonterm(name), pos));
                cur.advance(&chars, j + 1);
            }
            '\'' => {
                let mut j = i + 1;
                let mut lit = String::new();
                loop {
                    match chars.get(j) {
                        None | Some('\n') => return Err(err("unterminated literal".into())),
                        Some('\\') if matches!(chars.get(j + 1), Some('\'') | Some('\\')) => {
                            lit.push(chars[j + 1]);
                            j += 2;
                        }
                        Some('\'') => break,
                        Some(&ch) => {
                            lit.push(ch);
                            j += 1;
                        }
                    }
                }
                if lit.is_empty() {
                    return Err(err("empty literal".into()));
                }
                out.push((Tok::Literal(lit), pos));
                cur.advance(&chars, j + 1);
            }
            '%' => {
                if chars.get(i + 1) == Some(&'{') {
                    let start = i + 2;
                    let mut j = start;
                    while j + 1 < chars.len() && !(chars[j] == '%' && chars[j + 1] == '}') {
                        j += 1;
                    }
                    if j + 1 >= chars.len() {
                        return Err(err("unterminated %{ block".into()));
                    }
                    let body: String = chars[start..j].iter().collect();
                    out.push((Tok::Opaque(body), pos));
                    cur.advance(&chars, j + 2);
                } else {
                    let mut j = i + 1;
                    while j < chars.len() && is_ident_char(chars[j]) {
                        j += 1;
                    }
                    if j == i + 1 {
                        return Err(err("expected directive name after '%'".into()));
                    }
                    let word: String = chars[i + 1..j].iter().collect();
                    out.push((Tok::Directive(word), pos));
                    cur.advance(&chars, j);
                }
            }
            ':' => {
                out.push((Tok::Colon, pos));
                cur.advance(&chars, i + 1);
            }
            '|' => {
                out.push((Tok::Bar, pos));
                cur.advance(&chars, i + 1);
            }
            ';' => {
                out.push((Tok::Semi, pos));
                cur.advance(&chars, i + 1);
            }
            '.' => {
                out.push((Tok::Dot, pos));
                cur.advance(&chars, i + 1);
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, pos));
                cur.advance(&chars, i + 2);
            }
            c if is_ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                out.push((Tok::Ident(chars[i..j].iter().collect()), pos));
                cur.advance(&chars, j);
            }
            other => return Err(err(format!("unexpected character '{}'", other))),
        }
    }
    out.push((Tok::End, Pos::new(cur.line, cur.col)));
    Ok(out)
}

struct Cursor {
    i: usize,
    line: u32,
    col: u32,
}

impl Cursor {
    /// Moves to `j`, keeping line and column in step.
    fn advance(&mut self, chars: &[char], j: usize) {
        while self.i < j {
            if chars[self.i] == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
            self.i += 1;
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}
