//! Minimal S-expression reader with line/column tracking.
//!
//! `\r` is plain whitespace, so CRLF and LF files read identically.

use std::fmt;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug)]
pub enum SExp {
    Atom(String, Pos),
    List(Vec<SExp>, Pos),
}

impl SExp {
    pub fn pos(&self) -> Pos {
        match self {
            SExp::Atom(_, p) | SExp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExp::Atom(a, _) => Some(a),
            SExp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExp]> {
        match self {
            SExp::List(items, _) => Some(items),
            SExp::Atom(..) => None,
        }
    }

    /// The head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExp::Atom(a, _) => f.write_str(a),
            SExp::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadError {
    pub pos: Pos,
    pub message: String,
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Reader<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else if c != '\r' {
            self.pos.col += 1;
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

    fn err(&self, pos: Pos, message: impl Into<String>) -> ReadError {
        ReadError {
            pos,
            message: message.into(),
        }
    }

    fn read(&mut self) -> Result<Option<SExp>, ReadError> {
        self.skip_trivia();
        let start = self.pos;
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
                        None => return Err(self.err(start, "unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(SExp::List(items, start)));
                        }
                        Some(_) => {
                            let item = self.read()?.expect("non-empty input");
                            items.push(item);
                        }
                    }
                }
            }
            ')' => Err(self.err(start, "unexpected `)`")),
            '|' => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(start, "unterminated quoted symbol")),
                        Some('|') => break,
                        Some(c) => text.push(c),
                    }
                }
                Ok(Some(SExp::Atom(text, start)))
            }
            '"' => {
                self.bump();
                let mut text = String::from("\"");
                loop {
                    match self.bump() {
                        None => return Err(self.err(start, "unterminated string literal")),
                        Some('"') => {
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                text.push_str("\"\"");
                            } else {
                                break;
                            }
                        }
                        Some(c) => text.push(c),
                    }
                }
                text.push('"');
                Ok(Some(SExp::Atom(text, start)))
            }
            _ => {
                let mut text = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';' | '|' | '"') {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(Some(SExp::Atom(text, start)))
            }
        }
    }
}

/// Reads every top-level S-expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<SExp>, ReadError> {
    let mut reader = Reader {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let mut out = Vec::new();
    while let Some(sexp) = reader.read()? {
        out.push(sexp);
    }
    Ok(out)
}
