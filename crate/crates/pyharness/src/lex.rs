//! A deliberately small Python tokenizer: enough to tell operators inside
//! code from the same characters inside strings and comments, and to find
//! logical lines. No grammar, no indentation tokens.

use serde::Serialize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TokenKind {
    Name,
    Number,
    Str,
    Op,
    Comment,
    /// End of a logical line (not emitted inside brackets).
    Newline,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line and 0-based byte column of the first character.
    pub line: u32,
    pub col: u32,
    /// Byte range in the source.
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

/// Operators, longest first so that maximal munch falls out of a linear scan.
const OPS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "...", "!=", "==", "<=", ">=", "->", ":=", "**", "//", "<<", ">>",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "+", "-", "*", "/", "%", "@", "&", "|",
    "^", "~", "<", ">", "(", ")", "[", "]", "{", "}", ",", ":", ";", ".", "=",
];

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
    line: u32,
    line_start: usize,
    depth: u32,
    /// A code token was seen since the last `Newline`.
    pending: bool,
    out: Vec<Token>,
}

impl Lexer<'_> {
    fn bytes(&self) -> &[u8] {
        self.src.as_bytes()
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.bytes().get(self.pos + off).copied()
    }

    fn err(&self, message: impl Into<String>) -> LexError {
        LexError {
            line: self.line,
            col: (self.pos - self.line_start) as u32,
            message: message.into(),
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: u32, col: u32) {
        self.pending |= kind != TokenKind::Comment;
        self.out.push(Token {
            kind,
            text: self.src[start..self.pos].to_string(),
            line,
            col,
            start,
            end: self.pos,
        });
    }

    fn newline(&mut self) {
        self.pos += 1;
        self.line += 1;
        self.line_start = self.pos;
    }

    fn string(&mut self, quote_at: usize) -> Result<(), LexError> {
        let q = self.bytes()[quote_at];
        let triple = self.bytes().get(quote_at..quote_at + 3) == Some(&[q, q, q][..]);
        self.pos = quote_at + if triple { 3 } else { 1 };
        loop {
            let Some(c) = self.peek(0) else {
                return Err(self.err("unterminated string literal"));
            };
            match c {
                b'\\' => {
                    self.pos += 1;
                    if self.peek(0) == Some(b'\n') {
                        self.newline();
                    } else if self.peek(0).is_some() {
                        self.pos += 1;
                    }
                }
                b'\n' if !triple => return Err(self.err("unterminated string literal")),
                b'\n' => self.newline(),
                _ if c == q => {
                    if !triple {
                        self.pos += 1;
                        return Ok(());
                    }
                    if self.peek(1) == Some(q) && self.peek(2) == Some(q) {
                        self.pos += 3;
                        return Ok(());
                    }
                    self.pos += 1;
                }
                _ => self.pos += 1,
            }
        }
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        while let Some(c) = self.peek(0) {
            let start = self.pos;
            let line = self.line;
            let col = (self.pos - self.line_start) as u32;
            match c {
                b'\n' => {
                    let logical = self.depth == 0 && self.pending;
                    self.newline();
                    if logical {
                        self.pending = false;
                        self.out.push(Token {
                            kind: TokenKind::Newline,
                            text: "\n".into(),
                            line,
                            col,
                            start,
                            end: start + 1,
                        });
                    }
                }
                b' ' | b'\t' | b'\r' | b'\x0c' => self.pos += 1,
                b'\\' if self.peek(1) == Some(b'\n') => {
                    self.pos += 1;
                    self.newline();
                }
                b'\\' if self.peek(1) == Some(b'\r') && self.peek(2) == Some(b'\n') => {
                    self.pos += 2;
                    self.newline();
                }
                b'#' => {
                    while self.peek(0).is_some_and(|c| c != b'\n') {
                        self.pos += 1;
                    }
                    self.push(TokenKind::Comment, start, line, col);
                }
                b'"' | b'\'' => {
                    self.string(start)?;
                    self.push(TokenKind::Str, start, line, col);
                }
                b'0'..=b'9' => {
                    self.number();
                    self.push(TokenKind::Number, start, line, col);
                }
                b'.' if self.peek(1).is_some_and(|d| d.is_ascii_digit()) => {
                    self.number();
                    self.push(TokenKind::Number, start, line, col);
                }
                _ if c == b'_' || c.is_ascii_alphabetic() || c >= 0x80 => {
                    while self
                        .peek(0)
                        .is_some_and(|c| c == b'_' || c.is_ascii_alphanumeric() || c >= 0x80)
                    {
                        self.pos += 1;
                    }
                    // String prefixes such as r, b, f, rb.
                    let word = &self.src[start..self.pos];
                    let is_prefix = word.len() <= 2 && word.chars().all(|c| "rRbBuUfF".contains(c));
                    if is_prefix && matches!(self.peek(0), Some(b'"' | b'\'')) {
                        self.string(self.pos)?;
                        self.push(TokenKind::Str, start, line, col);
                    } else {
                        self.push(TokenKind::Name, start, line, col);
                    }
                }
                _ => {
                    let rest = &self.src[self.pos..];
                    let Some(op) = OPS.iter().find(|op| rest.starts_with(**op)) else {
                        return Err(self.err(format!(
                            "unexpected character {:?}",
                            rest.chars().next().unwrap()
                        )));
                    };
                    self.pos += op.len();
                    match *op {
                        "(" | "[" | "{" => self.depth += 1,
                        ")" | "]" | "}" => {
                            if self.depth == 0 {
                                return Err(self.err(format!("unmatched '{op}'")));
                            }
                            self.depth -= 1;
                        }
                        _ => {}
                    }
                    self.push(TokenKind::Op, start, line, col);
                }
            }
        }
        if self.depth > 0 {
            return Err(self.err("unclosed bracket at end of input"));
        }
        if self.pending {
            let end = self.src.len();
            self.out.push(Token {
                kind: TokenKind::Newline,
                text: String::new(),
                line: self.line,
                col: (end - self.line_start) as u32,
                start: end,
                end,
            });
        }
        Ok(self.out)
    }

    fn number(&mut self) {
        while let Some(c) = self.peek(0) {
            let exp_sign = matches!(c, b'+' | b'-')
                && self.pos > 0
                && matches!(self.bytes()[self.pos - 1], b'e' | b'E')
                && !self.src[..self.pos].starts_with("0x");
            if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
    }
}

/// Tokenizes `src`. Every logical line ends with a `Newline` token; comments
/// are kept as tokens so callers can skip them explicitly.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    Lexer {
        src,
        pos: 0,
        line: 1,
        line_start: 0,
        depth: 0,
        pending: false,
        out: Vec::new(),
    }
    .run()
}

/// Code tokens of `tokens` grouped into logical lines, comments dropped.
pub fn logical_lines(tokens: &[Token]) -> Vec<Vec<&Token>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for t in tokens {
        match t.kind {
            TokenKind::Comment => {}
            TokenKind::Newline => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            _ => cur.push(t),
        }
    }
    out
}
