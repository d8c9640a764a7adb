//! Shared tokenizer for word and ring-element literals.

use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Int(BigInt),
    Ident(String),
    Caret,
    Star,
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: usize,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '^' => Tok::Caret,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push(Token {
                    tok: Tok::Int(digits.parse().expect("ascii digits")),
                    pos,
                });
                continue;
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i].1) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().map(|&(_, c)| c).collect()),
                    pos,
                });
                continue;
            }
            other => return Err(Error::syntax(pos, format!("unexpected character `{other}`"))),
        };
        out.push(Token { tok, pos });
        i += 1;
    }
    Ok(out)
}

/// Cursor over a token stream; `end` is the byte length of the source, used
/// for end-of-input error positions.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    idx: usize,
    end: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self> {
        Ok(Cursor {
            toks: tokenize(text)?,
            idx: 0,
            end: text.len(),
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|t| &t.tok)
    }

    pub fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |t| t.pos)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|t| t.tok.clone());
        self.idx += 1;
        t
    }

    pub fn at_end(&self) -> bool {
        self.idx >= self.toks.len()
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    /// `^ [+|-] INT`, if present.
    pub fn exponent(&mut self) -> Result<Option<BigInt>> {
        if !self.eat(&Tok::Caret) {
            return Ok(None);
        }
        let negative = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let pos = self.pos();
        match self.next() {
            Some(Tok::Int(n)) => Ok(Some(if negative { -n } else { n })),
            _ => Err(Error::syntax(pos, "expected integer exponent")),
        }
    }
}
