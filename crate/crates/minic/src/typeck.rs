use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::ast::*;
use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("{span}: {message}")]
    TypeError { span: SourceSpan, message: String },
    #[error("{span}: undefined symbol '{name}'")]
    UndefinedSymbol { span: SourceSpan, name: String },
}

impl CheckError {
    pub fn span(&self) -> SourceSpan {
        match self {
            CheckError::TypeError { span, .. } | CheckError::UndefinedSymbol { span, .. } => *span,
        }
    }
}

/// Built-in functions callable without a definition.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Intrinsic {
    NondetInt,
    Abs,
    Min,
    Max,
    Printf,
}

impl Intrinsic {
    pub fn lookup(name: &str) -> Option<Intrinsic> {
        Some(match name {
            "nondet_int" => Intrinsic::NondetInt,
            "abs" => Intrinsic::Abs,
            "min" => Intrinsic::Min,
            "max" => Intrinsic::Max,
            "printf" => Intrinsic::Printf,
            _ => return None,
        })
    }
}

/// Names a program may not define itself.
const RESERVED: &[&str] = &[
    "assert",
    "assume",
    "nondet_int",
    "printf",
    "__CPROVER_assume",
    "__VERIFIER_assume",
];

/// What a call expression refers to after resolution.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Callee {
    User(usize),
    Intrinsic(Intrinsic),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementKind {
    Declare { has_init: bool },
    Assign,
    CompoundAssign,
    Return,
    Assert,
    Assume,
    Break,
    Continue,
    ExprStmt,
    IfCondition,
    WhileCondition,
    ForCondition,
}

impl StatementKind {
    pub fn is_condition(self) -> bool {
        matches!(
            self,
            StatementKind::IfCondition
                | StatementKind::WhileCondition
                | StatementKind::ForCondition
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatementInfo {
    pub id: StatementId,
    pub kind: StatementKind,
    pub span: SourceSpan,
    pub function: String,
    /// Source text of the statement on one line.
    pub text: String,
}

/// A program that passed type checking, with statement ids assigned.
#[derive(Clone, Debug)]
pub struct CheckedProgram {
    program: MiniCProgram,
    statements: Vec<StatementInfo>,
    fn_index: HashMap<String, usize>,
}

impl CheckedProgram {
    pub fn program(&self) -> &MiniCProgram {
        &self.program
    }

    pub fn source(&self) -> &str {
        &self.program.source
    }

    pub fn statements(&self) -> &[StatementInfo] {
        &self.statements
    }

    pub fn statement(&self, id: StatementId) -> Option<&StatementInfo> {
        self.statements.get(id.0 as usize)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.fn_index.get(name).map(|&i| &self.program.functions[i])
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.fn_index.get(name).copied()
    }

    pub fn main(&self) -> &FunctionDef {
        self.function("main").expect("checked programs have main")
    }

    /// Resolves a call by name: user definitions shadow intrinsics.
    pub fn resolve(&self, name: &str) -> Option<Callee> {
        match self.fn_index.get(name) {
            Some(&i) => Some(Callee::User(i)),
            None => Intrinsic::lookup(name).map(Callee::Intrinsic),
        }
    }
}

struct Checker<'a> {
    fn_sigs: HashMap<String, (Vec<Type>, Type)>,
    scopes: Vec<HashMap<String, Type>>,
    ret: Type,
    loop_depth: usize,
    function: String,
    source: &'a str,
    statements: Vec<StatementInfo>,
}

fn type_err<T>(span: SourceSpan, message: impl Into<String>) -> Result<T, CheckError> {
    Err(CheckError::TypeError {
        span,
        message: message.into(),
    })
}

impl Checker<'_> {
    fn lookup(&self, name: &str) -> Option<Type> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn declare(&mut self, name: &str, ty: Type, span: SourceSpan) -> Result<(), CheckError> {
        let scope = self.scopes.last_mut().expect("scope");
        if scope.insert(name.to_string(), ty).is_some() {
            return type_err(span, format!("redeclaration of '{name}'"));
        }
        Ok(())
    }

    fn next_id(&mut self, kind: StatementKind, span: SourceSpan) -> StatementId {
        let id = StatementId(self.statements.len() as u32);
        self.statements.push(StatementInfo {
            id,
            kind,
            span,
            function: self.function.clone(),
            text: span.snippet(self.source),
        });
        id
    }

    fn expect_int(&mut self, e: &Expr, what: &str) -> Result<(), CheckError> {
        match self.expr(e, false)? {
            Type::Int => Ok(()),
            t => type_err(e.span, format!("{what} must be int, found {t}")),
        }
    }

    fn expr(&mut self, e: &Expr, allow_void: bool) -> Result<Type, CheckError> {
        match &e.kind {
            ExprKind::Int(_) => Ok(Type::Int),
            ExprKind::Str(_) => Ok(Type::Str),
            ExprKind::Var(name) => self
                .lookup(name)
                .ok_or_else(|| CheckError::UndefinedSymbol {
                    span: e.span,
                    name: name.clone(),
                }),
            ExprKind::Index(base, idx) => {
                if self.expr(base, false)? != Type::Str {
                    return type_err(base.span, "only strings can be indexed");
                }
                self.expect_int(idx, "index")?;
                Ok(Type::Int)
            }
            ExprKind::Unary(_, a) => {
                self.expect_int(a, "operand")?;
                Ok(Type::Int)
            }
            ExprKind::Binary(_, a, b) => {
                self.expect_int(a, "operand")?;
                self.expect_int(b, "operand")?;
                Ok(Type::Int)
            }
            ExprKind::Ternary(c, a, b) => {
                self.expect_int(c, "condition")?;
                self.expect_int(a, "conditional branch")?;
                self.expect_int(b, "conditional branch")?;
                Ok(Type::Int)
            }
            ExprKind::Call(name, args) => {
                let ret = if let Some((params, ret)) = self.fn_sigs.get(name).cloned() {
                    if params.len() != args.len() {
                        return type_err(
                            e.span,
                            format!(
                                "'{name}' expects {} argument(s), got {}",
                                params.len(),
                                args.len()
                            ),
                        );
                    }
                    for (a, &pt) in args.iter().zip(&params) {
                        let at = self.expr(a, false)?;
                        if at != pt {
                            return type_err(
                                a.span,
                                format!("argument of type {at} where {pt} is expected"),
                            );
                        }
                    }
                    ret
                } else if let Some(intr) = Intrinsic::lookup(name) {
                    self.intrinsic(intr, name, args, e.span)?
                } else if name == "assert" || name == "assume" {
                    return type_err(e.span, format!("'{name}' is only allowed as a statement"));
                } else {
                    return Err(CheckError::UndefinedSymbol {
                        span: e.span,
                        name: name.clone(),
                    });
                };
                if ret == Type::Void && !allow_void {
                    return type_err(e.span, format!("void result of '{name}' used as a value"));
                }
                Ok(ret)
            }
        }
    }

    fn intrinsic(
        &mut self,
        intr: Intrinsic,
        name: &str,
        args: &[Expr],
        span: SourceSpan,
    ) -> Result<Type, CheckError> {
        let arity = match intr {
            Intrinsic::NondetInt => Some(0),
            Intrinsic::Abs => Some(1),
            Intrinsic::Min | Intrinsic::Max => Some(2),
            Intrinsic::Printf => None,
        };
        if let Some(n) = arity {
            if args.len() != n {
                return type_err(
                    span,
                    format!("'{name}' expects {n} argument(s), got {}", args.len()),
                );
            }
            for a in args {
                self.expect_int(a, "argument")?;
            }
        } else {
            match args.first() {
                Some(f) if self.expr(f, false)? == Type::Str => {}
                _ => return type_err(span, "printf needs a format string"),
            }
            for a in &args[1..] {
                self.expr(a, false)?;
            }
        }
        Ok(Type::Int)
    }

    fn block(&mut self, b: &mut Block) -> Result<(), CheckError> {
        self.scopes.push(HashMap::new());
        let r = b.stmts.iter_mut().try_for_each(|s| self.stmt(s));
        self.scopes.pop();
        r
    }

    fn cond(&mut self, c: &mut Cond, kind: StatementKind) -> Result<(), CheckError> {
        c.id = Some(self.next_id(kind, c.span));
        self.expect_int(&c.expr, "condition")
    }

    fn assign_target(&mut self, target: &str, span: SourceSpan) -> Result<(), CheckError> {
        match self.lookup(target) {
            None => Err(CheckError::UndefinedSymbol {
                span,
                name: target.to_string(),
            }),
            Some(Type::Str) => type_err(span, format!("string '{target}' is read-only")),
            Some(_) => Ok(()),
        }
    }

    fn stmt(&mut self, s: &mut Stmt) -> Result<(), CheckError> {
        let span = s.span;
        match &mut s.kind {
            StmtKind::Declare { ty, name, init } => {
                s.id = Some(self.next_id(
                    StatementKind::Declare {
                        has_init: init.is_some(),
                    },
                    span,
                ));
                match (&*ty, init.as_ref()) {
                    (Type::Str, None) => {
                        return type_err(span, format!("string '{name}' must be initialised"))
                    }
                    (_, Some(e)) => {
                        let t = self.expr(e, false)?;
                        if t != *ty {
                            return type_err(
                                e.span,
                                format!("cannot initialise {ty} '{name}' with {t}"),
                            );
                        }
                    }
                    _ => {}
                }
                let (ty, name) = (*ty, name.clone());
                self.declare(&name, ty, span)?;
            }
            StmtKind::Assign { target, value } => {
                s.id = Some(self.next_id(StatementKind::Assign, span));
                self.assign_target(target, span)?;
                self.expect_int(value, "assigned value")?;
            }
            StmtKind::CompoundAssign { target, value, .. } => {
                s.id = Some(self.next_id(StatementKind::CompoundAssign, span));
                self.assign_target(target, span)?;
                self.expect_int(value, "assigned value")?;
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.cond(cond, StatementKind::IfCondition)?;
                self.block(then_branch)?;
                if let Some(b) = else_branch {
                    self.block(b)?;
                }
            }
            StmtKind::While { cond, body } => {
                self.cond(cond, StatementKind::WhileCondition)?;
                self.loop_body(body)?;
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.scopes.push(HashMap::new());
                let r = (|| {
                    for st in init.iter_mut() {
                        self.stmt(st)?;
                    }
                    if let Some(c) = cond {
                        self.cond(c, StatementKind::ForCondition)?;
                    }
                    for st in update.iter_mut() {
                        self.stmt(st)?;
                    }
                    self.loop_body(body)
                })();
                self.scopes.pop();
                r?;
            }
            StmtKind::Break | StmtKind::Continue => {
                let kind = if matches!(s.kind, StmtKind::Break) {
                    StatementKind::Break
                } else {
                    StatementKind::Continue
                };
                s.id = Some(self.next_id(kind, span));
                if self.loop_depth == 0 {
                    return type_err(span, "break/continue outside a loop");
                }
            }
            StmtKind::Return(value) => {
                s.id = Some(self.next_id(StatementKind::Return, span));
                match (self.ret, value.as_ref()) {
                    (Type::Void, Some(e)) => {
                        return type_err(e.span, "void function returns a value")
                    }
                    (Type::Void, None) => {}
                    (_, None) => return type_err(span, "non-void function returns no value"),
                    (_, Some(e)) => self.expect_int(e, "return value")?,
                }
            }
            StmtKind::Expr(e) => {
                s.id = Some(self.next_id(StatementKind::ExprStmt, span));
                self.expr(e, true)?;
            }
            StmtKind::Assert(e) => {
                s.id = Some(self.next_id(StatementKind::Assert, span));
                self.expect_int(e, "assertion")?;
            }
            StmtKind::Assume(e) => {
                s.id = Some(self.next_id(StatementKind::Assume, span));
                self.expect_int(e, "assumption")?;
            }
            StmtKind::Block(b) => self.block(b)?,
        }
        Ok(())
    }

    fn loop_body(&mut self, body: &mut Block) -> Result<(), CheckError> {
        self.loop_depth += 1;
        let r = self.block(body);
        self.loop_depth -= 1;
        r
    }
}

fn is_const_true(c: Option<&Cond>) -> bool {
    match c {
        None => true,
        Some(c) => matches!(c.expr.kind, ExprKind::Int(v) if v != 0),
    }
}

/// True if some `break` in `b` exits the loop whose body is `b`.
fn breaks_out(b: &Block) -> bool {
    b.stmts.iter().any(|s| match &s.kind {
        StmtKind::Break => true,
        StmtKind::If {
            then_branch,
            else_branch,
            ..
        } => breaks_out(then_branch) || else_branch.as_ref().is_some_and(breaks_out),
        StmtKind::Block(inner) => breaks_out(inner),
        _ => false,
    })
}

fn block_returns(b: &Block) -> bool {
    b.stmts.iter().any(stmt_returns)
}

fn stmt_returns(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::Return(_) => true,
        StmtKind::Block(b) => block_returns(b),
        StmtKind::If {
            then_branch,
            else_branch: Some(e),
            ..
        } => block_returns(then_branch) && block_returns(e),
        StmtKind::While { cond, body } => is_const_true(Some(cond)) && !breaks_out(body),
        StmtKind::For { cond, body, .. } => is_const_true(cond.as_ref()) && !breaks_out(body),
        StmtKind::Assert(e) | StmtKind::Assume(e) => matches!(e.kind, ExprKind::Int(0)),
        _ => false,
    }
}

/// Checks scoping, types and call signatures, and numbers the statements.
pub fn typecheck(mut program: MiniCProgram) -> Result<CheckedProgram, CheckError> {
    let mut fn_sigs = HashMap::new();
    let mut fn_index = HashMap::new();
    for (i, f) in program.functions.iter().enumerate() {
        if RESERVED.contains(&f.name.as_str()) {
            return type_err(f.span, format!("'{}' is a reserved intrinsic", f.name));
        }
        if fn_sigs
            .insert(
                f.name.clone(),
                (f.params.iter().map(|p| p.ty).collect::<Vec<_>>(), f.ret),
            )
            .is_some()
        {
            return type_err(f.span, format!("function '{}' defined twice", f.name));
        }
        fn_index.insert(f.name.clone(), i);
        let mut seen = std::collections::HashSet::new();
        for p in &f.params {
            if !seen.insert(&p.name) {
                return type_err(p.span, format!("duplicate parameter '{}'", p.name));
            }
        }
    }
    match program.entry() {
        None => return type_err(SourceSpan::new(1, 1, 0, 0), "program has no main function"),
        Some(m) if !m.params.is_empty() => return type_err(m.span, "main must take no parameters"),
        Some(m) if m.ret != Type::Int => return type_err(m.span, "main must return int"),
        _ => {}
    }
    let source = program.source.clone();
    let mut ck = Checker {
        fn_sigs,
        scopes: Vec::new(),
        ret: Type::Int,
        loop_depth: 0,
        function: String::new(),
        source: &source,
        statements: Vec::new(),
    };
    for f in &mut program.functions {
        ck.ret = f.ret;
        ck.function = f.name.clone();
        ck.scopes
            .push(f.params.iter().map(|p| (p.name.clone(), p.ty)).collect());
        ck.block(&mut f.body)?;
        ck.scopes.pop();
        // main may fall off its end (implicit return 0, as in C99).
        if f.ret != Type::Void && f.name != "main" && !block_returns(&f.body) {
            return type_err(
                f.span,
                format!("'{}' may finish without returning a value", f.name),
            );
        }
    }
    let statements = ck.statements;
    Ok(CheckedProgram {
        program,
        statements,
        fn_index,
    })
}
