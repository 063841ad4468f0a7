//! A small s-expression reader with source positions, shared by the rule
//! DSL and the derivation file format.
//!
//! Grammar: lists in parentheses, bare symbols, double-quoted strings,
//! `;` comments to end of line. UTF-8 throughout.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    /// Bare symbol token, e.g. `and`, `+`, `_ANY`, `:label`, `1`.
    Symbol(String, Pos),
    /// Double-quoted string literal.
    Str(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    pub fn pos(&self) -> Pos {
        match self {
            Sexpr::Symbol(_, p) | Sexpr::Str(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexpr::Symbol(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Sexpr::Str(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) => Some(items),
            _ => None,
        }
    }

    /// For lists whose head is a symbol: the head and the remaining items.
    pub fn as_form(&self) -> Option<(&str, &[Sexpr])> {
        let items = self.as_list()?;
        let head = items.first()?.as_symbol()?;
        Some((head, &items[1..]))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct SexprError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SexprError {
    pub fn at(pos: Pos, message: impl Into<String>) -> SexprError {
        SexprError {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Reader<'a> {
        Reader {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexpr>, SexprError> {
        self.skip_trivia();
        let pos = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexpr::List(items, pos)));
                        }
                        Some(_) => match self.read()? {
                            Some(item) => items.push(item),
                            None => {
                                return Err(SexprError::at(pos, "unclosed parenthesis"));
                            }
                        },
                        None => return Err(SexprError::at(pos, "unclosed parenthesis")),
                    }
                }
            }
            ')' => Err(SexprError::at(pos, "unexpected `)`")),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => return Ok(Some(Sexpr::Str(s, pos))),
                        Some('\\') => match self.bump() {
                            Some(e) => s.push(e),
                            None => return Err(SexprError::at(pos, "unterminated string")),
                        },
                        Some(c) => s.push(c),
                        None => return Err(SexprError::at(pos, "unterminated string")),
                    }
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Some(Sexpr::Symbol(s, pos)))
            }
        }
    }
}

/// Read every top-level s-expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexpr>, SexprError> {
    let mut reader = Reader::new(text);
    let mut out = Vec::new();
    while let Some(e) = reader.read()? {
        out.push(e);
    }
    Ok(out)
}
