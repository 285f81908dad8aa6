//! Loop unrolling and call inlining into a loop-free, call-free program.
//!
//! `break`, `continue` and `return` become assignments to 0/1 flag
//! variables; statements following a possible jump are wrapped in a
//! conditional on all enclosing flags being clear.

use std::collections::HashMap;
use std::sync::Arc;

use minic::semantics::{self, eval_binop, eval_unop};
use minic::{
    BinOp, Block, Callee, CheckedProgram, Cond, Expr, ExprKind, Intrinsic, SourceSpan, StatementId,
    Stmt, StmtKind, Type, UnOp,
};
use serde::{Deserialize, Serialize};

use crate::BmcError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    /// Function the variable belongs to, with an inlining instance number.
    pub function: String,
    pub instance: u32,
}

impl std::fmt::Display for VarInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.instance == 0 {
            write!(f, "{}::{}", self.function, self.name)
        } else {
            write!(f, "{}.{}::{}", self.function, self.instance, self.name)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum UExpr {
    Const(i32),
    Var(VarId),
    Unary(UnOp, Box<UExpr>),
    Binary(BinOp, Box<UExpr>, Box<UExpr>),
    Ite(Box<UExpr>, Box<UExpr>, Box<UExpr>),
    /// Byte of a string constant; index `len` reads the terminator.
    StrIndex(Arc<[u8]>, Box<UExpr>),
}

impl UExpr {
    pub fn bin(op: BinOp, a: UExpr, b: UExpr) -> UExpr {
        UExpr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn not(a: UExpr) -> UExpr {
        UExpr::Unary(UnOp::Not, Box::new(a))
    }

    fn and_opt(a: Option<UExpr>, b: UExpr) -> UExpr {
        match a {
            None => b,
            Some(a) => UExpr::bin(BinOp::And, a, b),
        }
    }

    fn implies(guard: &Option<UExpr>, c: UExpr) -> UExpr {
        match guard {
            None => c,
            Some(g) => UExpr::bin(BinOp::Or, UExpr::not(g.clone()), c),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Assertion,
    DivByZero,
    OutOfBounds,
    /// Loop ran more iterations than the unwind bound.
    Unwinding,
}

impl std::fmt::Display for CheckKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CheckKind::Assertion => "assertion",
            CheckKind::DivByZero => "division by zero",
            CheckKind::OutOfBounds => "string index out of bounds",
            CheckKind::Unwinding => "unwinding assertion",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum UStmt {
    Assign {
        var: VarId,
        value: UExpr,
        origin: Option<StatementId>,
    },
    /// `var` receives the next nondeterministic input.
    Input { var: VarId, index: u32 },
    If {
        cond: UExpr,
        origin: Option<StatementId>,
        then_branch: Vec<UStmt>,
        else_branch: Vec<UStmt>,
    },
    /// Proof obligation: `cond` must be non-zero when reached.
    Check {
        cond: UExpr,
        kind: CheckKind,
        span: SourceSpan,
        origin: Option<StatementId>,
    },
    Assume {
        cond: UExpr,
        span: SourceSpan,
        origin: Option<StatementId>,
    },
}

/// A loop-free, call-free rendition of `main`.
#[derive(Clone, Debug)]
pub struct UnrolledProgram {
    pub vars: Vec<VarInfo>,
    pub body: Vec<UStmt>,
    pub num_inputs: u32,
    pub unwind: u32,
    pub inline_depth: u32,
}

impl UnrolledProgram {
    pub fn var(&self, v: VarId) -> &VarInfo {
        &self.vars[v.0 as usize]
    }

    /// Every origin id mentioned anywhere in the program, in order.
    pub fn origins(&self) -> Vec<StatementId> {
        fn walk(ss: &[UStmt], out: &mut Vec<StatementId>) {
            for s in ss {
                match s {
                    UStmt::Assign { origin, .. }
                    | UStmt::Check { origin, .. }
                    | UStmt::Assume { origin, .. } => out.extend(*origin),
                    UStmt::If {
                        origin,
                        then_branch,
                        else_branch,
                        ..
                    } => {
                        out.extend(*origin);
                        walk(then_branch, out);
                        walk(else_branch, out);
                    }
                    UStmt::Input { .. } => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &mut out);
        out
    }

    /// Number of checks of the given kind.
    pub fn count_checks(&self, kind: CheckKind) -> usize {
        fn walk(ss: &[UStmt], kind: CheckKind) -> usize {
            ss.iter()
                .map(|s| match s {
                    UStmt::Check { kind: k, .. } => (*k == kind) as usize,
                    UStmt::If {
                        then_branch,
                        else_branch,
                        ..
                    } => walk(then_branch, kind) + walk(else_branch, kind),
                    _ => 0,
                })
                .sum()
        }
        walk(&self.body, kind)
    }
}

#[derive(Clone)]
enum Binding {
    Int(VarId),
    Str(Arc<[u8]>),
}

struct LoopCtx {
    brk: VarId,
    cont: Option<VarId>,
}

struct Frame {
    scopes: Vec<HashMap<String, Binding>>,
    ret_flag: VarId,
    ret_val: VarId,
    loops: Vec<LoopCtx>,
    function: String,
    instance: u32,
}

struct Unroller<'p> {
    prog: &'p CheckedProgram,
    k: u32,
    d: u32,
    vars: Vec<VarInfo>,
    frames: Vec<Frame>,
    num_inputs: u32,
    instances: HashMap<String, u32>,
}

/// True if executing `s` may set a flag visible at its own level: any
/// `return`, or `break`/`continue` not inside a nested loop.
fn may_jump(s: &Stmt) -> bool {
    fn block(b: &Block, in_loop: bool) -> bool {
        b.stmts.iter().any(|s| stmt(s, in_loop))
    }
    fn stmt(s: &Stmt, nested: bool) -> bool {
        match &s.kind {
            StmtKind::Return(_) => true,
            StmtKind::Break | StmtKind::Continue => !nested,
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                block(then_branch, nested) || else_branch.as_ref().is_some_and(|b| block(b, nested))
            }
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => block(body, true),
            StmtKind::Block(b) => block(b, nested),
            _ => false,
        }
    }
    stmt(s, false)
}

fn body_may_exit(b: &Block) -> bool {
    fn stmt(s: &Stmt, nested: bool) -> bool {
        match &s.kind {
            StmtKind::Return(_) => true,
            StmtKind::Break => !nested,
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.stmts.iter().any(|s| stmt(s, nested))
                    || else_branch
                        .as_ref()
                        .is_some_and(|b| b.stmts.iter().any(|s| stmt(s, nested)))
            }
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => {
                body.stmts.iter().any(|s| stmt(s, true))
            }
            StmtKind::Block(b) => b.stmts.iter().any(|s| stmt(s, nested)),
            _ => false,
        }
    }
    b.stmts.iter().any(|s| stmt(s, false))
}

impl<'p> Unroller<'p> {
    fn frame(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("frame")
    }

    fn fresh(&mut self, name: &str) -> VarId {
        let (function, instance) = match self.frames.last() {
            Some(f) => (f.function.clone(), f.instance),
            None => (String::new(), 0),
        };
        self.vars.push(VarInfo {
            name: name.to_string(),
            function,
            instance,
        });
        VarId(self.vars.len() as u32 - 1)
    }

    fn lookup(&self, name: &str) -> Binding {
        self.frames
            .last()
            .expect("frame")
            .scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name).cloned())
            .expect("typechecked name")
    }

    fn bind(&mut self, name: &str, b: Binding) {
        self.frame()
            .scopes
            .last_mut()
            .expect("scope")
            .insert(name.to_string(), b);
    }

    fn int_var(&self, name: &str) -> VarId {
        match self.lookup(name) {
            Binding::Int(v) => v,
            Binding::Str(_) => unreachable!("typechecked int variable"),
        }
    }

    fn str_value(&self, e: &Expr) -> Option<Arc<[u8]>> {
        match &e.kind {
            ExprKind::Str(s) => Some(s.clone()),
            ExprKind::Var(n) => match self.lookup(n) {
                Binding::Str(s) => Some(s),
                Binding::Int(_) => None,
            },
            _ => None,
        }
    }

    /// Negation of "some active flag is set", or None outside any frame.
    fn no_jump_guard(&self, include_cont: bool) -> UExpr {
        let f = self.frames.last().expect("frame");
        let mut flags = vec![f.ret_flag];
        if let Some(l) = f.loops.last() {
            flags.push(l.brk);
            if include_cont {
                flags.extend(l.cont);
            }
        }
        let any = flags
            .into_iter()
            .map(UExpr::Var)
            .reduce(|a, b| UExpr::bin(BinOp::Or, a, b))
            .expect("at least the return flag");
        UExpr::not(any)
    }

    fn expr(
        &mut self,
        e: &Expr,
        guard: &Option<UExpr>,
        pre: &mut Vec<UStmt>,
    ) -> Result<UExpr, BmcError> {
        Ok(match &e.kind {
            ExprKind::Int(v) => UExpr::Const(*v),
            ExprKind::Str(_) => unreachable!("string in int context"),
            ExprKind::Var(n) => UExpr::Var(self.int_var(n)),
            ExprKind::Index(base, idx) => {
                let bytes = self.str_value(base).expect("typechecked string base");
                let i = self.expr(idx, guard, pre)?;
                let in_range = UExpr::bin(
                    BinOp::And,
                    UExpr::bin(BinOp::Ge, i.clone(), UExpr::Const(0)),
                    UExpr::bin(BinOp::Le, i.clone(), UExpr::Const(bytes.len() as i32)),
                );
                pre.push(UStmt::Check {
                    cond: UExpr::implies(guard, in_range),
                    kind: CheckKind::OutOfBounds,
                    span: e.span,
                    origin: None,
                });
                UExpr::StrIndex(bytes, Box::new(i))
            }
            ExprKind::Unary(op, a) => UExpr::Unary(*op, Box::new(self.expr(a, guard, pre)?)),
            ExprKind::Binary(op @ (BinOp::And | BinOp::Or), a, b) => {
                let la = self.expr(a, guard, pre)?;
                let when = if *op == BinOp::And {
                    la.clone()
                } else {
                    UExpr::not(la.clone())
                };
                let g = Some(UExpr::and_opt(guard.clone(), when));
                let lb = self.expr(b, &g, pre)?;
                UExpr::bin(*op, la, lb)
            }
            ExprKind::Binary(op, a, b) => {
                let la = self.expr(a, guard, pre)?;
                let lb = self.expr(b, guard, pre)?;
                if matches!(op, BinOp::Div | BinOp::Rem) && !matches!(lb, UExpr::Const(v) if v != 0)
                {
                    pre.push(UStmt::Check {
                        cond: UExpr::implies(
                            guard,
                            UExpr::bin(BinOp::Ne, lb.clone(), UExpr::Const(0)),
                        ),
                        kind: CheckKind::DivByZero,
                        span: e.span,
                        origin: None,
                    });
                }
                UExpr::bin(*op, la, lb)
            }
            ExprKind::Ternary(c, a, b) => {
                let lc = self.expr(c, guard, pre)?;
                let ga = Some(UExpr::and_opt(guard.clone(), lc.clone()));
                let la = self.expr(a, &ga, pre)?;
                let gb = Some(UExpr::and_opt(guard.clone(), UExpr::not(lc.clone())));
                let lb = self.expr(b, &gb, pre)?;
                UExpr::Ite(Box::new(lc), Box::new(la), Box::new(lb))
            }
            ExprKind::Call(name, args) => {
                match self.prog.resolve(name).expect("typechecked call") {
                    Callee::Intrinsic(i) => self.intrinsic(i, args, guard, pre)?,
                    Callee::User(idx) => self.inline_call(idx, args, e.span, guard, pre)?,
                }
            }
        })
    }

    fn intrinsic(
        &mut self,
        i: Intrinsic,
        args: &[Expr],
        guard: &Option<UExpr>,
        pre: &mut Vec<UStmt>,
    ) -> Result<UExpr, BmcError> {
        Ok(match i {
            Intrinsic::NondetInt => {
                let v = self.fresh("nondet");
                let index = self.num_inputs;
                self.num_inputs += 1;
                pre.push(UStmt::Input { var: v, index });
                UExpr::Var(v)
            }
            Intrinsic::Abs => {
                let a = self.expr(&args[0], guard, pre)?;
                UExpr::Ite(
                    Box::new(UExpr::bin(BinOp::Lt, a.clone(), UExpr::Const(0))),
                    Box::new(UExpr::Unary(UnOp::Neg, Box::new(a.clone()))),
                    Box::new(a),
                )
            }
            Intrinsic::Min | Intrinsic::Max => {
                let a = self.expr(&args[0], guard, pre)?;
                let b = self.expr(&args[1], guard, pre)?;
                let op = if i == Intrinsic::Min {
                    BinOp::Le
                } else {
                    BinOp::Ge
                };
                UExpr::Ite(
                    Box::new(UExpr::bin(op, a.clone(), b.clone())),
                    Box::new(a),
                    Box::new(b),
                )
            }
            Intrinsic::Printf => {
                for a in args {
                    if self.str_value(a).is_none() {
                        self.expr(a, guard, pre)?;
                    }
                }
                UExpr::Const(0)
            }
        })
    }

    fn inline_call(
        &mut self,
        idx: usize,
        args: &[Expr],
        span: SourceSpan,
        guard: &Option<UExpr>,
        pre: &mut Vec<UStmt>,
    ) -> Result<UExpr, BmcError> {
        let f = &self.prog.program().functions[idx];
        if self.frames.len() > self.d as usize {
            return Err(BmcError::RecursionBound {
                function: f.name.clone(),
                span,
                depth: self.d,
            });
        }
        let mut bound = Vec::with_capacity(args.len());
        for (a, p) in args.iter().zip(&f.params) {
            bound.push(match p.ty {
                Type::Str => Err(self.str_value(a).expect("typechecked string argument")),
                _ => Ok(self.expr(a, guard, pre)?),
            });
        }
        let instance = {
            let c = self.instances.entry(f.name.clone()).or_insert(0);
            *c += 1;
            *c
        };
        self.frames.push(Frame {
            scopes: vec![HashMap::new()],
            ret_flag: VarId(0),
            ret_val: VarId(0),
            loops: Vec::new(),
            function: f.name.clone(),
            instance,
        });
        let mut body = Vec::new();
        for (p, b) in f.params.iter().zip(bound) {
            match b {
                Ok(value) => {
                    let v = self.fresh(&p.name);
                    body.push(UStmt::Assign {
                        var: v,
                        value,
                        origin: None,
                    });
                    self.bind(&p.name, Binding::Int(v));
                }
                Err(s) => self.bind(&p.name, Binding::Str(s)),
            }
        }
        let (rf, rv) = (self.fresh("return_flag"), self.fresh("return_value"));
        self.frame().ret_flag = rf;
        self.frame().ret_val = rv;
        body.push(UStmt::Assign {
            var: rf,
            value: UExpr::Const(0),
            origin: None,
        });
        body.push(UStmt::Assign {
            var: rv,
            value: UExpr::Const(0),
            origin: None,
        });
        let r = self.seq(&f.body.stmts);
        self.frames.pop();
        body.extend(r?);
        match guard {
            None => pre.extend(body),
            Some(g) => pre.push(UStmt::If {
                cond: g.clone(),
                origin: None,
                then_branch: body,
                else_branch: Vec::new(),
            }),
        }
        Ok(UExpr::Var(rv))
    }

    fn block(&mut self, b: &Block) -> Result<Vec<UStmt>, BmcError> {
        self.frame().scopes.push(HashMap::new());
        let r = self.seq(&b.stmts);
        self.frame().scopes.pop();
        r
    }

    fn seq(&mut self, stmts: &[Stmt]) -> Result<Vec<UStmt>, BmcError> {
        let mut out = Vec::new();
        for (i, s) in stmts.iter().enumerate() {
            self.stmt(s, &mut out)?;
            if may_jump(s) && i + 1 < stmts.len() {
                let rest = self.seq(&stmts[i + 1..])?;
                if !rest.is_empty() {
                    out.push(UStmt::If {
                        cond: self.no_jump_guard(true),
                        origin: None,
                        then_branch: rest,
                        else_branch: Vec::new(),
                    });
                }
                return Ok(out);
            }
        }
        Ok(out)
    }

    fn set_flag(var: VarId, out: &mut Vec<UStmt>) {
        out.push(UStmt::Assign {
            var,
            value: UExpr::Const(1),
            origin: None,
        });
    }

    fn stmt(&mut self, s: &Stmt, out: &mut Vec<UStmt>) -> Result<(), BmcError> {
        match &s.kind {
            StmtKind::Declare { ty, name, init } => {
                if *ty == Type::Str {
                    let v = self
                        .str_value(init.as_ref().expect("initialised string"))
                        .expect("string value");
                    self.bind(name, Binding::Str(v));
                    return Ok(());
                }
                let value = match init {
                    Some(e) => self.expr(e, &None, out)?,
                    None => UExpr::Const(0),
                };
                let v = self.fresh(name);
                out.push(UStmt::Assign {
                    var: v,
                    value,
                    origin: s.id,
                });
                self.bind(name, Binding::Int(v));
            }
            StmtKind::Assign { target, value } => {
                let value = self.expr(value, &None, out)?;
                let var = self.int_var(target);
                out.push(UStmt::Assign {
                    var,
                    value,
                    origin: s.id,
                });
            }
            StmtKind::CompoundAssign { target, op, value } => {
                let rhs = self.expr(value, &None, out)?;
                let var = self.int_var(target);
                if matches!(op, BinOp::Div | BinOp::Rem)
                    && !matches!(rhs, UExpr::Const(v) if v != 0)
                {
                    out.push(UStmt::Check {
                        cond: UExpr::bin(BinOp::Ne, rhs.clone(), UExpr::Const(0)),
                        kind: CheckKind::DivByZero,
                        span: s.span,
                        origin: None,
                    });
                }
                out.push(UStmt::Assign {
                    var,
                    value: UExpr::bin(*op, UExpr::Var(var), rhs),
                    origin: s.id,
                });
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let c = self.expr(&cond.expr, &None, out)?;
                let then_branch = self.block(then_branch)?;
                let else_branch = match else_branch {
                    Some(b) => self.block(b)?,
                    None => Vec::new(),
                };
                out.push(UStmt::If {
                    cond: c,
                    origin: cond.id,
                    then_branch,
                    else_branch,
                });
            }
            StmtKind::While { cond, body } => {
                self.lower_loop(Some(cond), &[], body, s.span, out)?
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.frame().scopes.push(HashMap::new());
                let r = (|| {
                    for st in init {
                        self.stmt(st, out)?;
                    }
                    self.lower_loop(cond.as_ref(), update, body, s.span, out)
                })();
                self.frame().scopes.pop();
                r?;
            }
            StmtKind::Break => {
                let brk = self.frame().loops.last().expect("loop").brk;
                Self::set_flag(brk, out);
            }
            StmtKind::Continue => {
                let cont = self
                    .frame()
                    .loops
                    .last()
                    .and_then(|l| l.cont)
                    .expect("loop iteration");
                Self::set_flag(cont, out);
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    let value = self.expr(e, &None, out)?;
                    let rv = self.frame().ret_val;
                    out.push(UStmt::Assign {
                        var: rv,
                        value,
                        origin: s.id,
                    });
                }
                let rf = self.frame().ret_flag;
                Self::set_flag(rf, out);
            }
            StmtKind::Expr(e) => {
                if self.str_value(e).is_none() {
                    self.expr(e, &None, out)?;
                }
            }
            StmtKind::Assert(e) => {
                let c = self.expr(e, &None, out)?;
                out.push(UStmt::Check {
                    cond: c,
                    kind: CheckKind::Assertion,
                    span: s.span,
                    origin: s.id,
                });
            }
            StmtKind::Assume(e) => {
                let c = self.expr(e, &None, out)?;
                out.push(UStmt::Assume {
                    cond: c,
                    span: s.span,
                    origin: s.id,
                });
            }
            StmtKind::Block(b) => out.extend(self.block(b)?),
        }
        Ok(())
    }

    fn lower_loop(
        &mut self,
        cond: Option<&Cond>,
        update: &[Stmt],
        body: &Block,
        span: SourceSpan,
        out: &mut Vec<UStmt>,
    ) -> Result<(), BmcError> {
        let brk = self.fresh("break_flag");
        out.push(UStmt::Assign {
            var: brk,
            value: UExpr::Const(0),
            origin: None,
        });
        self.frame().loops.push(LoopCtx { brk, cont: None });
        let r = self.iteration(0, cond, update, body, span);
        self.frame().loops.pop();
        out.extend(r?);
        Ok(())
    }

    fn iteration(
        &mut self,
        n: u32,
        cond: Option<&Cond>,
        update: &[Stmt],
        body: &Block,
        span: SourceSpan,
    ) -> Result<Vec<UStmt>, BmcError> {
        let mut out = Vec::new();
        let c = match cond {
            Some(c) => self.expr(&c.expr, &None, &mut out)?,
            None => UExpr::Const(1),
        };
        if n == self.k {
            out.push(UStmt::Check {
                cond: UExpr::not(c),
                kind: CheckKind::Unwinding,
                span,
                origin: None,
            });
            return Ok(out);
        }
        let mut then_branch = Vec::new();
        let cont = self.fresh("continue_flag");
        then_branch.push(UStmt::Assign {
            var: cont,
            value: UExpr::Const(0),
            origin: None,
        });
        self.frame().loops.last_mut().expect("loop").cont = Some(cont);
        then_branch.extend(self.block(body)?);
        self.frame().loops.last_mut().expect("loop").cont = None;
        let mut rest = Vec::new();
        for st in update {
            self.stmt(st, &mut rest)?;
        }
        rest.extend(self.iteration(n + 1, cond, update, body, span)?);
        if body_may_exit(body) {
            then_branch.push(UStmt::If {
                cond: self.no_jump_guard(false),
                origin: None,
                then_branch: rest,
                else_branch: Vec::new(),
            });
        } else {
            then_branch.extend(rest);
        }
        out.push(UStmt::If {
            cond: c,
            origin: cond.and_then(|c| c.id),
            then_branch,
            else_branch: Vec::new(),
        });
        Ok(out)
    }
}

/// Unrolls every loop `k` times and inlines calls up to depth `d`.
pub fn unroll(prog: &CheckedProgram, k: u32, d: u32) -> Result<UnrolledProgram, BmcError> {
    assert!(k >= 1 && d >= 1, "bounds must be positive");
    let mut u = Unroller {
        prog,
        k,
        d,
        vars: Vec::new(),
        frames: Vec::new(),
        num_inputs: 0,
        instances: HashMap::new(),
    };
    let main_idx = prog
        .function_index("main")
        .expect("checked programs have main");
    let mut body = Vec::new();
    // main is inlined like any call; it does not count towards the depth.
    u.inline_call(main_idx, &[], prog.main().span, &None, &mut body)?;
    Ok(UnrolledProgram {
        vars: u.vars,
        body,
        num_inputs: u.num_inputs,
        unwind: k,
        inline_depth: d,
    })
}

/// Result of running an unrolled program on concrete inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnrolledOutcome {
    Completed,
    CheckFailed {
        kind: CheckKind,
        span: SourceSpan,
    },
    AssumeFailed {
        span: SourceSpan,
    },
    /// More `nondet_int` reads than inputs supplied.
    InputsExhausted,
}

/// Concrete evaluation of an unrolled program, for cross-checking against
/// the interpreter.
pub fn evaluate(u: &UnrolledProgram, inputs: &[i32]) -> UnrolledOutcome {
    struct Ev<'a> {
        env: Vec<i32>,
        inputs: &'a [i32],
        used: usize,
    }
    fn ex(ev: &Ev, e: &UExpr) -> i32 {
        match e {
            UExpr::Const(v) => *v,
            UExpr::Var(v) => ev.env[v.0 as usize],
            UExpr::Unary(op, a) => eval_unop(*op, ex(ev, a)),
            // Division by zero is guarded by an earlier check.
            UExpr::Binary(op, a, b) => eval_binop(*op, ex(ev, a), ex(ev, b)).unwrap_or(0),
            UExpr::Ite(c, a, b) => {
                if ex(ev, c) != 0 {
                    ex(ev, a)
                } else {
                    ex(ev, b)
                }
            }
            UExpr::StrIndex(s, i) => semantics::string_byte(s, ex(ev, i)).unwrap_or(0),
        }
    }
    fn run(ev: &mut Ev, ss: &[UStmt]) -> Option<UnrolledOutcome> {
        for s in ss {
            match s {
                UStmt::Assign { var, value, .. } => ev.env[var.0 as usize] = ex(ev, value),
                UStmt::Input { var, .. } => {
                    let Some(&v) = ev.inputs.get(ev.used) else {
                        return Some(UnrolledOutcome::InputsExhausted);
                    };
                    ev.used += 1;
                    ev.env[var.0 as usize] = v;
                }
                UStmt::If {
                    cond,
                    then_branch,
                    else_branch,
                    ..
                } => {
                    let branch = if ex(ev, cond) != 0 {
                        then_branch
                    } else {
                        else_branch
                    };
                    if let Some(o) = run(ev, branch) {
                        return Some(o);
                    }
                }
                UStmt::Check {
                    cond, kind, span, ..
                } => {
                    if ex(ev, cond) == 0 {
                        return Some(UnrolledOutcome::CheckFailed {
                            kind: *kind,
                            span: *span,
                        });
                    }
                }
                UStmt::Assume { cond, span, .. } => {
                    if ex(ev, cond) == 0 {
                        return Some(UnrolledOutcome::AssumeFailed { span: *span });
                    }
                }
            }
        }
        None
    }
    let mut ev = Ev {
        env: vec![0; u.vars.len()],
        inputs,
        used: 0,
    };
    run(&mut ev, &u.body).unwrap_or(UnrolledOutcome::Completed)
}
