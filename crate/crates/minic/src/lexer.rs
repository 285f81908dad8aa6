use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Keyword(&'static str),
    /// Integer literal before sign handling; values up to `u32::MAX`.
    Int(u32),
    /// Character literal, already reduced to its byte value.
    Char(u8),
    Str(Vec<u8>),
    Punct(&'static str),
    /// A whole `#...` line.
    Preprocessor(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct LexError {
    pub span: SourceSpan,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "int", "char", "void", "const", "long", "short", "signed", "unsigned", "bool", "_Bool", "if",
    "else", "while", "for", "do", "break", "continue", "return", "struct", "union", "enum",
    "typedef", "goto", "switch", "case", "default", "sizeof", "static", "inline", "extern",
    "float", "double", "true", "false",
];

// Longest first so that greedy matching picks e.g. "<<=" over "<<".
const PUNCTS: &[&str] = &[
    "<<=", ">>=", "...", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
    "<=", ">=", "==", "!=", "&&", "||", "->", "+", "-", "*", "/", "%", "<", ">", "=", "!", "~",
    "&", "|", "^", "?", ":", ";", ",", ".", "(", ")", "[", "]", "{", "}",
];

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
    /// True while only whitespace has been seen on the current line.
    line_start: bool,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
            self.line_start = true;
        } else if b & 0xC0 != 0x80 {
            // Columns count characters, not UTF-8 continuation bytes.
            self.col += 1;
        }
        Some(b)
    }

    fn here(&self) -> SourceSpan {
        SourceSpan::new(self.line, self.col, self.pos, self.pos)
    }

    fn err(&self, start: SourceSpan, message: impl Into<String>) -> LexError {
        LexError {
            span: SourceSpan {
                end: self.pos.max(start.start + 1),
                ..start
            },
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match self.peek() {
                Some(b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c) => {
                    self.bump();
                }
                Some(b'/') if self.peek_at(1) == Some(b'/') => {
                    while !matches!(self.peek(), None | Some(b'\n')) {
                        self.bump();
                    }
                }
                Some(b'/') if self.peek_at(1) == Some(b'*') => {
                    let start = self.here();
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            None => return Err(self.err(start, "unterminated comment")),
                            Some(b'*') if self.peek_at(1) == Some(b'/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            _ => {
                                self.bump();
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn escape(&mut self, start: SourceSpan) -> Result<u8, LexError> {
        let b = self
            .bump()
            .ok_or_else(|| self.err(start, "unterminated literal"))?;
        Ok(match b {
            b'n' => b'\n',
            b't' => b'\t',
            b'r' => b'\r',
            b'a' => 7,
            b'b' => 8,
            b'f' => 12,
            b'v' => 11,
            b'\\' => b'\\',
            b'\'' => b'\'',
            b'"' => b'"',
            b'?' => b'?',
            b'x' => {
                let mut v: u32 = 0;
                let mut n = 0;
                while let Some(d) = self.peek().and_then(|c| (c as char).to_digit(16)) {
                    v = (v * 16 + d) & 0xFF;
                    self.bump();
                    n += 1;
                }
                if n == 0 {
                    return Err(self.err(start, "\\x escape without hex digits"));
                }
                v as u8
            }
            b'0'..=b'7' => {
                let mut v = (b - b'0') as u32;
                for _ in 0..2 {
                    match self.peek() {
                        Some(d @ b'0'..=b'7') => {
                            v = v * 8 + (d - b'0') as u32;
                            self.bump();
                        }
                        _ => break,
                    }
                }
                (v & 0xFF) as u8
            }
            b'\n' => return Err(self.err(start, "unterminated literal")),
            other => return Err(self.err(start, format!("unknown escape '\\{}'", other as char))),
        })
    }

    fn number(&mut self, start: SourceSpan) -> Result<TokenKind, LexError> {
        let begin = self.pos;
        let (radix, digits_from) =
            if self.peek() == Some(b'0') && matches!(self.peek_at(1), Some(b'x' | b'X')) {
                self.bump();
                self.bump();
                (16, self.pos)
            } else {
                (10, begin)
            };
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.bump();
        }
        let text = &self.src[digits_from..self.pos];
        let digits = text.trim_end_matches(['l', 'L']);
        if digits.contains(['u', 'U']) {
            return Err(self.err(start, "unsigned literals are outside the subset"));
        }
        let radix = if radix == 10 && digits.len() > 1 && digits.starts_with('0') {
            8
        } else {
            radix
        };
        u64::from_str_radix(digits, radix)
            .ok()
            .filter(|&v| v <= u32::MAX as u64)
            .map(|v| TokenKind::Int(v as u32))
            .ok_or_else(|| {
                self.err(
                    start,
                    format!(
                        "invalid or out-of-range integer literal '{}'",
                        &self.src[begin..self.pos]
                    ),
                )
            })
    }

    fn next_token(&mut self) -> Result<Option<Token>, LexError> {
        self.skip_trivia()?;
        let start = self.here();
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let at_line_start = self.line_start;
        self.line_start = false;
        let kind = match c {
            b'#' if at_line_start => {
                let begin = self.pos;
                loop {
                    match self.peek() {
                        None | Some(b'\n') => break,
                        Some(b'\\') if self.peek_at(1) == Some(b'\n') => {
                            self.bump();
                            self.bump();
                            self.line_start = false;
                        }
                        _ => {
                            self.bump();
                        }
                    }
                }
                TokenKind::Preprocessor(self.src[begin..self.pos].trim_end().to_string())
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let begin = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.bump();
                }
                let word = &self.src[begin..self.pos];
                match KEYWORDS.iter().find(|&&k| k == word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(word.to_string()),
                }
            }
            b'0'..=b'9' => self.number(start)?,
            b'\'' => {
                self.bump();
                let v = match self.bump() {
                    None | Some(b'\n') => {
                        return Err(self.err(start, "unterminated character literal"))
                    }
                    Some(b'\\') => self.escape(start)?,
                    Some(b'\'') => return Err(self.err(start, "empty character literal")),
                    Some(b) if b >= 0x80 => {
                        return Err(self.err(start, "non-ASCII character literal"))
                    }
                    Some(b) => b,
                };
                if self.bump() != Some(b'\'') {
                    return Err(self.err(start, "unterminated character literal"));
                }
                TokenKind::Char(v)
            }
            b'"' => {
                self.bump();
                let mut bytes = Vec::new();
                loop {
                    match self.bump() {
                        None | Some(b'\n') => {
                            return Err(self.err(start, "unterminated string literal"))
                        }
                        Some(b'"') => break,
                        Some(b'\\') => bytes.push(self.escape(start)?),
                        Some(b) => bytes.push(b),
                    }
                }
                TokenKind::Str(bytes)
            }
            _ => {
                let rest = &self.src[self.pos..];
                match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
                    Some(p) => {
                        for _ in 0..p.len() {
                            self.bump();
                        }
                        TokenKind::Punct(p)
                    }
                    None => {
                        let ch = rest.chars().next().unwrap_or('?');
                        for _ in 0..ch.len_utf8() {
                            self.bump();
                        }
                        return Err(self.err(start, format!("illegal character '{ch}'")));
                    }
                }
            }
        };
        Ok(Some(Token {
            kind,
            span: SourceSpan {
                end: self.pos,
                ..start
            },
        }))
    }
}

/// Splits MiniC source into tokens, dropping whitespace and comments.
pub fn tokenize_minic(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        line: 1,
        col: 1,
        line_start: true,
    };
    let mut out = Vec::new();
    while let Some(t) = lx.next_token()? {
        out.push(t);
    }
    Ok(out)
}
