use std::sync::Arc;

use crate::ast::*;
use crate::lexer::{tokenize_minic, LexError, Token, TokenKind};
use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{span}: {message}")]
    Syntax { span: SourceSpan, message: String },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Lex(e) => e.span,
            ParseError::Syntax { span, .. } => *span,
        }
    }

    pub fn message(&self) -> String {
        match self {
            ParseError::Lex(e) => e.message.clone(),
            ParseError::Syntax { message, .. } => message.clone(),
        }
    }
}

/// Names accepted for the nondeterministic-input intrinsic.
const NONDET_ALIASES: &[&str] = &["nondet_int", "__VERIFIER_nondet_int"];
const ASSUME_ALIASES: &[&str] = &["assume", "__CPROVER_assume", "__VERIFIER_assume"];
const ALLOCATORS: &[&str] = &["malloc", "calloc", "realloc", "free", "alloca"];

#[derive(Copy, Clone, PartialEq, Eq)]
enum Base {
    Int,
    Char,
    Void,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: SourceSpan,
}

type PResult<T> = Result<T, ParseError>;

fn describe(t: Option<&Token>) -> String {
    match t.map(|t| &t.kind) {
        None => "end of input".into(),
        Some(TokenKind::Ident(s)) => format!("identifier '{s}'"),
        Some(TokenKind::Keyword(k)) => format!("'{k}'"),
        Some(TokenKind::Int(v)) => format!("integer {v}"),
        Some(TokenKind::Char(_)) => "character literal".into(),
        Some(TokenKind::Str(_)) => "string literal".into(),
        Some(TokenKind::Punct(p)) => format!("'{p}'"),
        Some(TokenKind::Preprocessor(p)) => format!("'{p}'"),
    }
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_kind(&self, off: usize) -> Option<&TokenKind> {
        self.toks.get(self.pos + off).map(|t| &t.kind)
    }

    fn span_here(&self) -> SourceSpan {
        self.peek().map(|t| t.span).unwrap_or(self.eof)
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos - 1].span
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax {
            span: self.span_here(),
            message: message.into(),
        })
    }

    fn error_at<T>(&self, span: SourceSpan, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax {
            span,
            message: message.into(),
        })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek_kind(0), Some(TokenKind::Punct(q)) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek_kind(0), Some(TokenKind::Keyword(q)) if *q == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<SourceSpan> {
        if self.eat_punct(p) {
            Ok(self.prev_span())
        } else {
            self.error(format!("expected '{p}', found {}", describe(self.peek())))
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().cloned() {
            Some(Token {
                kind: TokenKind::Ident(s),
                span,
            }) => {
                self.pos += 1;
                Ok((s, span))
            }
            t => self.error(format!(
                "expected identifier, found {}",
                describe(t.as_ref())
            )),
        }
    }

    fn starts_type(&self) -> bool {
        matches!(
            self.peek_kind(0),
            Some(TokenKind::Keyword(
                "int"
                    | "char"
                    | "void"
                    | "const"
                    | "long"
                    | "short"
                    | "signed"
                    | "unsigned"
                    | "bool"
                    | "_Bool"
                    | "static"
                    | "inline"
                    | "extern"
                    | "float"
                    | "double"
                    | "struct"
                    | "union"
                    | "enum"
            ))
        )
    }

    /// Parses declaration specifiers and returns the base type.
    fn type_spec(&mut self) -> PResult<Base> {
        let start = self.span_here();
        let mut base = None;
        loop {
            let kw = match self.peek_kind(0) {
                Some(TokenKind::Keyword(k)) => *k,
                _ => break,
            };
            match kw {
                "const" | "static" | "inline" | "signed" => {}
                "int" | "long" | "short" | "bool" | "_Bool" => {
                    if base == Some(Base::Char) || base == Some(Base::Void) {
                        return self.error("conflicting type specifiers");
                    }
                    base = Some(Base::Int);
                }
                "char" => {
                    if base.is_some() {
                        return self.error("conflicting type specifiers");
                    }
                    base = Some(Base::Char);
                }
                "void" => {
                    if base.is_some() {
                        return self.error("conflicting type specifiers");
                    }
                    base = Some(Base::Void);
                }
                "unsigned" => return self.error("unsigned types are outside the subset"),
                "float" | "double" => {
                    return self.error("floating-point types are outside the subset")
                }
                "struct" | "union" | "enum" => {
                    return self.error(format!("'{kw}' types are outside the subset"))
                }
                "extern" => return self.error("extern declarations are outside the subset"),
                _ => break,
            }
            self.pos += 1;
        }
        match base {
            Some(b) => Ok(b),
            None => self.error_at(
                start,
                format!("expected type, found {}", describe(self.peek())),
            ),
        }
    }

    /// Pointer/array suffixes around a declarator name; returns the final type.
    fn declarator(
        &mut self,
        base: Base,
        allow_unsized_array: bool,
    ) -> PResult<(Type, String, SourceSpan)> {
        let mut stars = 0;
        while self.eat_punct("*") {
            stars += 1;
            self.eat_kw("const");
        }
        let (name, nspan) = self.expect_ident()?;
        let mut arrays = 0;
        while self.is_punct("[") {
            let sp = self.span_here();
            self.pos += 1;
            if !self.is_punct("]") || !allow_unsized_array {
                return self.error_at(
                    sp,
                    "arrays are outside the subset (only const char[] strings are supported)",
                );
            }
            self.pos += 1;
            arrays += 1;
        }
        let ty = match (base, stars + arrays) {
            (Base::Int, 0) => Type::Int,
            (Base::Char, 0) => Type::Int,
            (Base::Char, 1) => Type::Str,
            (Base::Void, 0) => Type::Void,
            _ => {
                return self.error_at(
                    nspan,
                    "pointers are outside the subset (only const char* strings are supported)",
                )
            }
        };
        Ok((ty, name, nspan))
    }

    fn program(&mut self, source: &str) -> PResult<MiniCProgram> {
        let mut functions = Vec::new();
        while self.peek().is_some() {
            let start = self.span_here();
            let base = self.type_spec()?;
            let (ret, name, nspan) = self.declarator(base, false)?;
            if !self.is_punct("(") {
                return self.error_at(nspan, "global variables are outside the subset");
            }
            if ret == Type::Str {
                return self.error_at(nspan, "functions must return int or void");
            }
            self.pos += 1;
            let params = self.params()?;
            if self.eat_punct(";") {
                // Prototype: the definition must follow elsewhere.
                continue;
            }
            let body = self.block()?;
            functions.push(FunctionDef {
                name,
                params,
                ret,
                span: start.to(body.span),
                body,
            });
        }
        Ok(MiniCProgram {
            functions,
            source: Arc::from(source),
        })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        let mut out = Vec::new();
        if self.eat_punct(")") {
            return Ok(out);
        }
        if self.is_kw("void") && matches!(self.peek_kind(1), Some(TokenKind::Punct(")"))) {
            self.pos += 2;
            return Ok(out);
        }
        loop {
            let base = self.type_spec()?;
            let (ty, name, span) = self.declarator(base, true)?;
            if ty == Type::Void {
                return self.error_at(span, "parameter of type void");
            }
            out.push(Param { name, ty, span });
            if self.eat_punct(")") {
                return Ok(out);
            }
            self.expect_punct(",")?;
        }
    }

    fn block(&mut self) -> PResult<Block> {
        let open = self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if self.peek().is_none() {
                return self.error("expected '}', found end of input");
            }
            stmts.extend(self.statement()?);
        }
        self.pos += 1;
        Ok(Block {
            stmts,
            span: open.to(self.prev_span()),
        })
    }

    /// Body of a control statement; a single statement becomes a block.
    fn body(&mut self) -> PResult<Block> {
        if self.is_punct("{") {
            return self.block();
        }
        let start = self.span_here();
        let stmts = self.statement()?;
        Ok(Block {
            stmts,
            span: start.to(self.prev_span()),
        })
    }

    fn stmt(kind: StmtKind, span: SourceSpan) -> Stmt {
        Stmt {
            kind,
            span,
            id: None,
        }
    }

    fn statement(&mut self) -> PResult<Vec<Stmt>> {
        let start = self.span_here();
        if self.is_punct("{") {
            let b = self.block()?;
            let span = b.span;
            return Ok(vec![Self::stmt(StmtKind::Block(b), span)]);
        }
        if self.eat_punct(";") {
            return Ok(Vec::new());
        }
        if self.starts_type() {
            let mut decls = self.declaration()?;
            let end = self.expect_punct(";")?;
            if let [d] = decls.as_mut_slice() {
                d.span = d.span.to(end);
            }
            return Ok(decls);
        }
        if let Some(TokenKind::Keyword(kw)) = self.peek_kind(0) {
            let kw = *kw;
            match kw {
                "if" => return self.if_statement().map(|s| vec![s]),
                "while" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let expr = self.expr()?;
                    let close = self.expect_punct(")")?;
                    let cond = Cond {
                        expr,
                        span: start.to(close),
                        id: None,
                    };
                    let body = self.body()?;
                    let span = start.to(self.prev_span());
                    return Ok(vec![Self::stmt(StmtKind::While { cond, body }, span)]);
                }
                "for" => return self.for_statement().map(|s| vec![s]),
                "break" | "continue" => {
                    self.pos += 1;
                    let end = self.expect_punct(";")?;
                    let kind = if kw == "break" {
                        StmtKind::Break
                    } else {
                        StmtKind::Continue
                    };
                    return Ok(vec![Self::stmt(kind, start.to(end))]);
                }
                "return" => {
                    self.pos += 1;
                    let value = if self.is_punct(";") {
                        None
                    } else {
                        Some(self.expr()?)
                    };
                    let end = self.expect_punct(";")?;
                    return Ok(vec![Self::stmt(StmtKind::Return(value), start.to(end))]);
                }
                "do" => return self.error("do-while loops are outside the subset"),
                "switch" | "case" | "default" => {
                    return self.error("switch statements are outside the subset")
                }
                "goto" => return self.error("goto is outside the subset"),
                "typedef" => return self.error("typedef is outside the subset"),
                _ => {}
            }
        }
        if let Some(TokenKind::Ident(name)) = self.peek_kind(0) {
            let name = name.clone();
            let is_assert = name == "assert";
            let is_assume = ASSUME_ALIASES.contains(&name.as_str());
            if (is_assert || is_assume) && matches!(self.peek_kind(1), Some(TokenKind::Punct("(")))
            {
                self.pos += 2;
                let e = self.expr()?;
                self.expect_punct(")")?;
                let end = self.expect_punct(";")?;
                let kind = if is_assert {
                    StmtKind::Assert(e)
                } else {
                    StmtKind::Assume(e)
                };
                return Ok(vec![Self::stmt(kind, start.to(end))]);
            }
        }
        let s = self.simple_statement()?;
        let end = self.expect_punct(";")?;
        Ok(vec![Stmt {
            span: s.span.to(end),
            ..s
        }])
    }

    /// Assignment, compound assignment, increment or expression statement,
    /// without the trailing semicolon.
    fn simple_statement(&mut self) -> PResult<Stmt> {
        let start = self.span_here();
        for op in ["++", "--"] {
            if self.is_punct(op) {
                self.pos += 1;
                let (target, _) = self.expect_ident()?;
                let kind = Self::increment(target, op, start);
                return Ok(Self::stmt(kind, start.to(self.prev_span())));
            }
        }
        if let (Some(TokenKind::Ident(name)), Some(TokenKind::Punct(p))) =
            (self.peek_kind(0), self.peek_kind(1))
        {
            let (name, p) = (name.clone(), *p);
            if p == "=" {
                self.pos += 2;
                let value = self.expr()?;
                return Ok(Self::stmt(
                    StmtKind::Assign {
                        target: name,
                        value,
                    },
                    start.to(self.prev_span()),
                ));
            }
            if let Some(op) = BinOp::from_compound(p) {
                self.pos += 2;
                let value = self.expr()?;
                return Ok(Self::stmt(
                    StmtKind::CompoundAssign {
                        target: name,
                        op,
                        value,
                    },
                    start.to(self.prev_span()),
                ));
            }
            if p == "++" || p == "--" {
                self.pos += 2;
                let kind = Self::increment(name, p, start);
                return Ok(Self::stmt(kind, start.to(self.prev_span())));
            }
        }
        let e = self.expr()?;
        if let Some(TokenKind::Punct(p)) = self.peek_kind(0) {
            if *p == "=" || BinOp::from_compound(p).is_some() || *p == "++" || *p == "--" {
                return self.error("assignment target must be a plain variable");
            }
        }
        let span = e.span;
        Ok(Self::stmt(StmtKind::Expr(e), span))
    }

    fn increment(target: String, op: &str, at: SourceSpan) -> StmtKind {
        StmtKind::CompoundAssign {
            target,
            op: if op == "++" { BinOp::Add } else { BinOp::Sub },
            value: Expr::new(ExprKind::Int(1), at),
        }
    }

    fn declaration(&mut self) -> PResult<Vec<Stmt>> {
        let start = self.span_here();
        let base = self.type_spec()?;
        let mut out = Vec::new();
        loop {
            let dstart = self.span_here();
            let (ty, name, nspan) = self.declarator(base, true)?;
            if ty == Type::Void {
                return self.error_at(nspan, "variable of type void");
            }
            let init = if self.eat_punct("=") {
                Some(self.expr()?)
            } else {
                None
            };
            // The first declarator's span includes the type specifiers.
            let from = if out.is_empty() { start } else { dstart };
            out.push(Self::stmt(
                StmtKind::Declare { ty, name, init },
                from.to(self.prev_span()),
            ));
            if !self.eat_punct(",") {
                return Ok(out);
            }
        }
    }

    fn if_statement(&mut self) -> PResult<Stmt> {
        let start = self.span_here();
        self.pos += 1;
        self.expect_punct("(")?;
        let expr = self.expr()?;
        let close = self.expect_punct(")")?;
        let cond = Cond {
            expr,
            span: start.to(close),
            id: None,
        };
        let then_branch = self.body()?;
        let else_branch = if self.eat_kw("else") {
            Some(self.body()?)
        } else {
            None
        };
        Ok(Self::stmt(
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            },
            start.to(self.prev_span()),
        ))
    }

    fn for_statement(&mut self) -> PResult<Stmt> {
        let start = self.span_here();
        self.pos += 1;
        self.expect_punct("(")?;
        let mut init = Vec::new();
        if self.starts_type() {
            init = self.declaration()?;
        } else if !self.is_punct(";") {
            loop {
                init.push(self.simple_statement()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(";")?;
        let cond = if self.is_punct(";") {
            None
        } else {
            let expr = self.expr()?;
            Some(Cond {
                span: expr.span,
                expr,
                id: None,
            })
        };
        self.expect_punct(";")?;
        let mut update = Vec::new();
        if !self.is_punct(")") {
            loop {
                update.push(self.simple_statement()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        for s in init.iter().chain(&update) {
            if !matches!(
                s.kind,
                StmtKind::Declare { .. }
                    | StmtKind::Assign { .. }
                    | StmtKind::CompoundAssign { .. }
                    | StmtKind::Expr(_)
            ) {
                return self.error_at(s.span, "unsupported statement in for header");
            }
        }
        let body = self.body()?;
        Ok(Self::stmt(
            StmtKind::For {
                init,
                cond,
                update,
                body,
            },
            start.to(self.prev_span()),
        ))
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let c = self.binary(0)?;
        if self.eat_punct("?") {
            let a = self.expr()?;
            self.expect_punct(":")?;
            let b = self.expr()?;
            let span = c.span.to(b.span);
            return Ok(Expr::new(
                ExprKind::Ternary(Box::new(c), Box::new(a), Box::new(b)),
                span,
            ));
        }
        Ok(c)
    }

    fn binop_at(&self, level: usize) -> Option<BinOp> {
        use BinOp::*;
        let Some(TokenKind::Punct(p)) = self.peek_kind(0) else {
            return None;
        };
        let table: &[(&str, BinOp)] = match level {
            0 => &[("||", Or)],
            1 => &[("&&", And)],
            2 => &[("|", BitOr)],
            3 => &[("^", BitXor)],
            4 => &[("&", BitAnd)],
            5 => &[("==", Eq), ("!=", Ne)],
            6 => &[("<", Lt), ("<=", Le), (">", Gt), (">=", Ge)],
            7 => &[("<<", Shl), (">>", Shr)],
            8 => &[("+", Add), ("-", Sub)],
            9 => &[("*", Mul), ("/", Div), ("%", Rem)],
            _ => &[],
        };
        table.iter().find(|(s, _)| s == p).map(|&(_, op)| op)
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        if level == 10 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binop_at(level) {
            self.pos += 1;
            let rhs = self.binary(level + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.span_here();
        let op = match self.peek_kind(0) {
            Some(TokenKind::Punct("-")) => Some(UnOp::Neg),
            Some(TokenKind::Punct("!")) => Some(UnOp::Not),
            Some(TokenKind::Punct("~")) => Some(UnOp::BitNot),
            Some(TokenKind::Punct("+")) => {
                self.pos += 1;
                return self.unary();
            }
            Some(TokenKind::Punct("&" | "*")) => {
                return self.error("pointer operations are outside the subset")
            }
            Some(TokenKind::Punct("++" | "--")) => {
                return self.error("increment inside an expression is outside the subset")
            }
            Some(TokenKind::Keyword("sizeof")) => {
                return self.error("sizeof is outside the subset")
            }
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let e = self.unary()?;
            let span = start.to(e.span);
            return Ok(Expr::new(ExprKind::Unary(op, Box::new(e)), span));
        }
        // Cast: '(' type ')'.
        if self.is_punct("(") && matches!(self.peek_kind(1), Some(TokenKind::Keyword(_))) {
            let is_type = matches!(
                self.peek_kind(1),
                Some(TokenKind::Keyword(
                    "int"
                        | "char"
                        | "void"
                        | "const"
                        | "long"
                        | "short"
                        | "signed"
                        | "unsigned"
                        | "bool"
                        | "_Bool"
                        | "float"
                        | "double"
                        | "struct"
                        | "union"
                        | "enum"
                ))
            );
            if is_type {
                self.pos += 1;
                let cast_start = self.span_here();
                let mut ok = true;
                while let Some(TokenKind::Keyword(k)) = self.peek_kind(0) {
                    if !matches!(*k, "int" | "long" | "signed" | "const") {
                        ok = false;
                    }
                    self.pos += 1;
                }
                if !ok || self.is_punct("*") {
                    return self
                        .error_at(cast_start, "casts other than to int are outside the subset");
                }
                self.expect_punct(")")?;
                return self.unary();
            }
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct("[") {
                let idx = self.expr()?;
                let end = self.expect_punct("]")?;
                let span = e.span.to(end);
                e = Expr::new(ExprKind::Index(Box::new(e), Box::new(idx)), span);
            } else if self.is_punct(".") || self.is_punct("->") {
                return self.error("member access is outside the subset");
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return self.error("expected expression, found end of input");
        };
        self.pos += 1;
        let span = tok.span;
        match tok.kind {
            TokenKind::Int(v) => Ok(Expr::new(ExprKind::Int(v as i32), span)),
            TokenKind::Char(c) => Ok(Expr::new(ExprKind::Int(c as i32), span)),
            TokenKind::Keyword("true") => Ok(Expr::new(ExprKind::Int(1), span)),
            TokenKind::Keyword("false") => Ok(Expr::new(ExprKind::Int(0), span)),
            TokenKind::Str(mut bytes) => {
                // Adjacent literals concatenate.
                while let Some(TokenKind::Str(more)) = self.peek_kind(0) {
                    bytes.extend_from_slice(more);
                    self.pos += 1;
                }
                Ok(Expr::new(
                    ExprKind::Str(Arc::from(bytes)),
                    span.to(self.prev_span()),
                ))
            }
            TokenKind::Ident(name) => {
                if self.eat_punct("(") {
                    if ALLOCATORS.contains(&name.as_str()) {
                        return self.error_at(span, "dynamic allocation is outside the subset");
                    }
                    let mut args = Vec::new();
                    if !self.eat_punct(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.eat_punct(")") {
                                break;
                            }
                            self.expect_punct(",")?;
                        }
                    }
                    let name = if NONDET_ALIASES.contains(&name.as_str()) {
                        "nondet_int".to_string()
                    } else {
                        name
                    };
                    Ok(Expr::new(
                        ExprKind::Call(name, args),
                        span.to(self.prev_span()),
                    ))
                } else {
                    Ok(Expr::new(ExprKind::Var(name), span))
                }
            }
            TokenKind::Punct("(") => {
                let e = self.expr()?;
                let end = self.expect_punct(")")?;
                Ok(Expr {
                    span: span.to(end),
                    ..e
                })
            }
            _ => {
                self.pos -= 1;
                self.error(format!(
                    "expected expression, found {}",
                    describe(self.peek())
                ))
            }
        }
    }
}

/// Parses a MiniC translation unit. `#include` and other directives are
/// skipped; macro definitions are rejected.
pub fn parse_minic(source: &str) -> Result<MiniCProgram, ParseError> {
    let mut toks = Vec::new();
    for t in tokenize_minic(source)? {
        if let TokenKind::Preprocessor(p) = &t.kind {
            let directive = p.trim_start_matches('#').trim_start();
            if directive.starts_with("define") || directive.starts_with("if") {
                return Err(ParseError::Syntax {
                    span: t.span,
                    message: "macros and conditional compilation are outside the subset".into(),
                });
            }
            continue;
        }
        toks.push(t);
    }
    let line = source.split('\n').count() as u32;
    let col = source
        .rsplit('\n')
        .next()
        .map(|l| l.chars().count() as u32 + 1)
        .unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        eof: SourceSpan::new(line, col, source.len(), source.len()),
    };
    p.program(source)
}

/// Parses a standalone expression (used by tests and tools).
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let toks = tokenize_minic(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        eof: SourceSpan::new(1, source.len() as u32 + 1, source.len(), source.len()),
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(e)
}
