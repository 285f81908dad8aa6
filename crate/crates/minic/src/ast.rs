use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::span::SourceSpan;

/// Identifier of a localisable statement, unique within a checked program.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StatementId(pub u32);

impl std::fmt::Display for StatementId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Type {
    Int,
    /// Read-only string constant.
    Str,
    Void,
}

impl std::fmt::Display for Type {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Type::Int => "int",
            Type::Str => "const char*",
            Type::Void => "void",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
    BitNot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        use BinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Rem => "%",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
            And => "&&",
            Or => "||",
            BitAnd => "&",
            BitOr => "|",
            BitXor => "^",
            Shl => "<<",
            Shr => ">>",
        }
    }

    /// Operators allowed in `op=` statements.
    pub fn from_compound(sym: &str) -> Option<BinOp> {
        use BinOp::*;
        Some(match sym {
            "+=" => Add,
            "-=" => Sub,
            "*=" => Mul,
            "/=" => Div,
            "%=" => Rem,
            "&=" => BitAnd,
            "|=" => BitOr,
            "^=" => BitXor,
            "<<=" => Shl,
            ">>=" => Shr,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(i32),
    /// Bytes without the terminating zero.
    Str(Arc<[u8]>),
    Var(String),
    Index(Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ternary(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Expr { kind, span }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
    /// Assigned by the type checker to every simple statement.
    pub id: Option<StatementId>,
}

/// Condition of an `if`/`while`/`for`, localisable on its own.
#[derive(Clone, Debug, PartialEq)]
pub struct Cond {
    pub expr: Expr,
    /// Covers the `while (...)`/`if (...)` header, or the bare expression
    /// inside a `for` header.
    pub span: SourceSpan,
    pub id: Option<StatementId>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Declare {
        ty: Type,
        name: String,
        init: Option<Expr>,
    },
    Assign {
        target: String,
        value: Expr,
    },
    CompoundAssign {
        target: String,
        op: BinOp,
        value: Expr,
    },
    If {
        cond: Cond,
        then_branch: Block,
        else_branch: Option<Block>,
    },
    While {
        cond: Cond,
        body: Block,
    },
    For {
        init: Vec<Stmt>,
        cond: Option<Cond>,
        update: Vec<Stmt>,
        body: Block,
    },
    Break,
    Continue,
    Return(Option<Expr>),
    Expr(Expr),
    Assert(Expr),
    Assume(Expr),
    Block(Block),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Type,
    pub body: Block,
    pub span: SourceSpan,
}

/// A parsed MiniC translation unit.
#[derive(Clone, Debug, PartialEq)]
pub struct MiniCProgram {
    pub functions: Vec<FunctionDef>,
    /// Text the program was parsed from; empty for synthesised programs.
    pub source: Arc<str>,
}

impl MiniCProgram {
    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn entry(&self) -> Option<&FunctionDef> {
        self.function("main")
    }

    /// Copy with every span, statement id and the source text cleared, for
    /// structural comparison.
    pub fn erase_locations(&self) -> MiniCProgram {
        let mut p = self.clone();
        p.source = Arc::from("");
        for f in &mut p.functions {
            f.span = SourceSpan::default();
            for prm in &mut f.params {
                prm.span = SourceSpan::default();
            }
            erase_block(&mut f.body);
        }
        p
    }
}

fn erase_block(b: &mut Block) {
    b.span = SourceSpan::default();
    b.stmts.iter_mut().for_each(erase_stmt);
}

fn erase_cond(c: &mut Cond) {
    c.span = SourceSpan::default();
    c.id = None;
    erase_expr(&mut c.expr);
}

fn erase_stmt(s: &mut Stmt) {
    s.span = SourceSpan::default();
    s.id = None;
    match &mut s.kind {
        StmtKind::Declare { init, .. } => init.iter_mut().for_each(erase_expr),
        StmtKind::Assign { value, .. } | StmtKind::CompoundAssign { value, .. } => {
            erase_expr(value)
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            erase_cond(cond);
            erase_block(then_branch);
            else_branch.iter_mut().for_each(erase_block);
        }
        StmtKind::While { cond, body } => {
            erase_cond(cond);
            erase_block(body);
        }
        StmtKind::For {
            init,
            cond,
            update,
            body,
        } => {
            init.iter_mut().for_each(erase_stmt);
            cond.iter_mut().for_each(erase_cond);
            update.iter_mut().for_each(erase_stmt);
            erase_block(body);
        }
        StmtKind::Return(e) => e.iter_mut().for_each(erase_expr),
        StmtKind::Expr(e) | StmtKind::Assert(e) | StmtKind::Assume(e) => erase_expr(e),
        StmtKind::Block(b) => erase_block(b),
        StmtKind::Break | StmtKind::Continue => {}
    }
}

fn erase_expr(e: &mut Expr) {
    e.span = SourceSpan::default();
    match &mut e.kind {
        ExprKind::Int(_) | ExprKind::Str(_) | ExprKind::Var(_) => {}
        ExprKind::Index(a, b) | ExprKind::Binary(_, a, b) => {
            erase_expr(a);
            erase_expr(b);
        }
        ExprKind::Unary(_, a) => erase_expr(a),
        ExprKind::Ternary(a, b, c) => {
            erase_expr(a);
            erase_expr(b);
            erase_expr(c);
        }
        ExprKind::Call(_, args) => args.iter_mut().for_each(erase_expr),
    }
}
