//! Guarded static single assignment form of an unrolled program.
//!
//! Every value is a 32-bit word. Path conditions and merge selectors are
//! ordinary definitions holding 0 or 1. Obligations carry the path condition
//! under which they are reached and a prefix condition stating that every
//! earlier assumption (including unwinding checks) held.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use minic::{BinOp, SourceSpan, StatementId, UnOp};
use serde::{Deserialize, Serialize};

use crate::unroll::{CheckKind, UExpr, UStmt, UnrolledProgram, VarId};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SsaVar(pub u32);

#[derive(Clone, Debug, PartialEq)]
pub enum SExpr {
    Const(i32),
    Var(SsaVar),
    Unary(UnOp, Box<SExpr>),
    Binary(BinOp, Box<SExpr>, Box<SExpr>),
    Ite(Box<SExpr>, Box<SExpr>, Box<SExpr>),
    StrIndex(Arc<[u8]>, Box<SExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SsaRhs {
    Expr(SExpr),
    /// The `index`-th nondeterministic input.
    Input(u32),
    /// `cond != 0 ? then : else`.
    Merge {
        cond: SsaVar,
        then: SsaVar,
        other: SsaVar,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsaDef {
    pub var: SsaVar,
    pub name: String,
    pub rhs: SsaRhs,
    /// Statement this definition implements, if any.
    pub origin: Option<StatementId>,
    /// Program variable this is a version of, if any.
    pub source: Option<VarId>,
    /// Path condition under which the definition executes.
    pub pc: SsaVar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObligationInfo {
    pub kind: CheckKind,
    pub span: SourceSpan,
    pub origin: Option<StatementId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsaObligation {
    pub info: ObligationInfo,
    pub pc: SsaVar,
    /// All earlier assumptions and unwinding checks held.
    pub prefix: SsaVar,
    pub cond: SsaVar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsaAssumption {
    pub span: SourceSpan,
    pub origin: Option<StatementId>,
    pub pc: SsaVar,
    pub cond: SsaVar,
    /// Comes from an unwinding check rather than a user `assume`.
    pub unwinding: bool,
}

#[derive(Clone, Debug)]
pub struct SsaProgram {
    pub defs: Vec<SsaDef>,
    pub obligations: Vec<SsaObligation>,
    pub assumptions: Vec<SsaAssumption>,
    /// Input definitions in program order.
    pub inputs: Vec<SsaVar>,
    /// Definition of the constant-true path condition.
    pub top: SsaVar,
}

impl SsaProgram {
    pub fn def(&self, v: SsaVar) -> &SsaDef {
        &self.defs[v.0 as usize]
    }
}

struct Builder {
    defs: Vec<SsaDef>,
    current: Vec<Option<SsaVar>>,
    versions: Vec<u32>,
    obligations: Vec<SsaObligation>,
    assumptions: Vec<SsaAssumption>,
    inputs: Vec<SsaVar>,
    prefix: SsaVar,
    temps: u32,
    names: Vec<String>,
    zero: SsaVar,
}

impl Builder {
    fn push(
        &mut self,
        name: String,
        rhs: SsaRhs,
        origin: Option<StatementId>,
        source: Option<VarId>,
        pc: SsaVar,
    ) -> SsaVar {
        let var = SsaVar(self.defs.len() as u32);
        self.defs.push(SsaDef {
            var,
            name,
            rhs,
            origin,
            source,
            pc,
        });
        var
    }

    fn temp(&mut self, prefix: &str, e: SExpr, origin: Option<StatementId>, pc: SsaVar) -> SsaVar {
        self.temps += 1;
        let name = format!("{prefix}#{}", self.temps);
        self.push(name, SsaRhs::Expr(e), origin, None, pc)
    }

    fn define(
        &mut self,
        var: VarId,
        rhs: SsaRhs,
        origin: Option<StatementId>,
        pc: SsaVar,
    ) -> SsaVar {
        let i = var.0 as usize;
        self.versions[i] += 1;
        let name = format!("{}#{}", self.names[i], self.versions[i]);
        let v = self.push(name, rhs, origin, Some(var), pc);
        self.current[i] = Some(v);
        v
    }

    fn expr(&self, e: &UExpr) -> SExpr {
        match e {
            UExpr::Const(v) => SExpr::Const(*v),
            // Reads before any write see 0, matching the interpreter.
            UExpr::Var(v) => match self.current[v.0 as usize] {
                Some(s) => SExpr::Var(s),
                None => SExpr::Const(0),
            },
            UExpr::Unary(op, a) => SExpr::Unary(*op, Box::new(self.expr(a))),
            UExpr::Binary(op, a, b) => {
                SExpr::Binary(*op, Box::new(self.expr(a)), Box::new(self.expr(b)))
            }
            UExpr::Ite(c, a, b) => SExpr::Ite(
                Box::new(self.expr(c)),
                Box::new(self.expr(a)),
                Box::new(self.expr(b)),
            ),
            UExpr::StrIndex(s, i) => SExpr::StrIndex(s.clone(), Box::new(self.expr(i))),
        }
    }

    fn truth(v: SsaVar) -> SExpr {
        SExpr::Binary(
            BinOp::Ne,
            Box::new(SExpr::Var(v)),
            Box::new(SExpr::Const(0)),
        )
    }

    fn stmts(&mut self, ss: &[UStmt], pc: SsaVar) {
        for s in ss {
            self.stmt(s, pc);
        }
    }

    fn stmt(&mut self, s: &UStmt, pc: SsaVar) {
        match s {
            UStmt::Assign { var, value, origin } => {
                let e = self.expr(value);
                self.define(*var, SsaRhs::Expr(e), *origin, pc);
            }
            UStmt::Input { var, index } => {
                let v = self.define(*var, SsaRhs::Input(*index), None, pc);
                self.inputs.push(v);
            }
            UStmt::If {
                cond,
                origin,
                then_branch,
                else_branch,
            } => {
                let ce = self.expr(cond);
                let c = self.temp("cond", ce, *origin, pc);
                let pc_then = self.temp(
                    "pc",
                    SExpr::Binary(
                        BinOp::And,
                        Box::new(SExpr::Var(pc)),
                        Box::new(Self::truth(c)),
                    ),
                    None,
                    pc,
                );
                let before = self.current.clone();
                self.stmts(then_branch, pc_then);
                let after_then = std::mem::replace(&mut self.current, before.clone());
                if !else_branch.is_empty() {
                    let pc_else = self.temp(
                        "pc",
                        SExpr::Binary(
                            BinOp::And,
                            Box::new(SExpr::Var(pc)),
                            Box::new(SExpr::Unary(UnOp::Not, Box::new(SExpr::Var(c)))),
                        ),
                        None,
                        pc,
                    );
                    self.stmts(else_branch, pc_else);
                }
                for i in 0..self.current.len() {
                    let (t, e) = (after_then[i], self.current[i]);
                    if t == e {
                        continue;
                    }
                    // A variable born inside one branch reads 0 on the other
                    // path, as it would before its first write.
                    let t = t.unwrap_or(self.zero);
                    let e = e.unwrap_or(self.zero);
                    self.define(
                        VarId(i as u32),
                        SsaRhs::Merge {
                            cond: c,
                            then: t,
                            other: e,
                        },
                        None,
                        pc,
                    );
                }
            }
            UStmt::Check {
                cond,
                kind,
                span,
                origin,
            } => {
                let ce = self.expr(cond);
                let c = self.temp("check", ce, None, pc);
                self.obligations.push(SsaObligation {
                    info: ObligationInfo {
                        kind: *kind,
                        span: *span,
                        origin: *origin,
                    },
                    pc,
                    prefix: self.prefix,
                    cond: c,
                });
                if *kind == CheckKind::Unwinding {
                    self.assume(c, *span, None, pc, true);
                }
            }
            UStmt::Assume { cond, span, origin } => {
                let ce = self.expr(cond);
                let c = self.temp("assume", ce, None, pc);
                self.assume(c, *span, *origin, pc, false);
            }
        }
    }

    fn assume(
        &mut self,
        c: SsaVar,
        span: SourceSpan,
        origin: Option<StatementId>,
        pc: SsaVar,
        unwinding: bool,
    ) {
        self.assumptions.push(SsaAssumption {
            span,
            origin,
            pc,
            cond: c,
            unwinding,
        });
        // prefix' = prefix && (!pc || c)
        let holds = SExpr::Binary(
            BinOp::Or,
            Box::new(SExpr::Unary(UnOp::Not, Box::new(SExpr::Var(pc)))),
            Box::new(SExpr::Var(c)),
        );
        let top = SsaVar(0);
        self.prefix = self.temp(
            "prefix",
            SExpr::Binary(
                BinOp::And,
                Box::new(SExpr::Var(self.prefix)),
                Box::new(holds),
            ),
            None,
            top,
        );
    }
}

/// Plain variable names where unambiguous, qualified ones otherwise.
fn base_names(u: &UnrolledProgram) -> Vec<String> {
    let mut plain: HashMap<&str, u32> = HashMap::new();
    for v in &u.vars {
        *plain.entry(v.name.as_str()).or_default() += 1;
    }
    let qualified: Vec<String> = u.vars.iter().map(|v| v.to_string()).collect();
    let mut qcount: HashMap<&str, u32> = HashMap::new();
    for q in &qualified {
        *qcount.entry(q.as_str()).or_default() += 1;
    }
    u.vars
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if plain[v.name.as_str()] == 1 {
                v.name.clone()
            } else if qcount[qualified[i].as_str()] == 1 {
                qualified[i].clone()
            } else {
                format!("{}.{i}", qualified[i])
            }
        })
        .collect()
}

/// Converts an unrolled program to guarded SSA form.
pub fn to_ssa(u: &UnrolledProgram) -> SsaProgram {
    let n = u.vars.len();
    let mut b = Builder {
        defs: Vec::new(),
        current: vec![None; n],
        versions: vec![0; n],
        obligations: Vec::new(),
        assumptions: Vec::new(),
        inputs: Vec::new(),
        prefix: SsaVar(0),
        temps: 0,
        names: base_names(u),
        zero: SsaVar(0),
    };
    let top = b.push(
        "true".into(),
        SsaRhs::Expr(SExpr::Const(1)),
        None,
        None,
        SsaVar(0),
    );
    b.prefix = top;
    b.zero = b.push(
        "zero".into(),
        SsaRhs::Expr(SExpr::Const(0)),
        None,
        None,
        top,
    );
    b.stmts(&u.body, top);
    SsaProgram {
        defs: b.defs,
        obligations: b.obligations,
        assumptions: b.assumptions,
        inputs: b.inputs,
        top,
    }
}

struct ShowExpr<'a>(&'a SExpr, &'a SsaProgram);

impl fmt::Display for ShowExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.1;
        match self.0 {
            SExpr::Const(v) => write!(f, "{v}"),
            SExpr::Var(v) => f.write_str(&p.def(*v).name),
            SExpr::Unary(op, a) => {
                let s = match op {
                    UnOp::Neg => "-",
                    UnOp::Not => "!",
                    UnOp::BitNot => "~",
                };
                write!(f, "{s}{}", ShowExpr(a, p))
            }
            SExpr::Binary(op, a, b) => {
                let wrap = |e: &SExpr| !matches!(e, SExpr::Const(_) | SExpr::Var(_));
                let show = |e: &SExpr, f: &mut fmt::Formatter<'_>| {
                    if wrap(e) {
                        write!(f, "({})", ShowExpr(e, p))
                    } else {
                        write!(f, "{}", ShowExpr(e, p))
                    }
                };
                show(a, f)?;
                write!(f, " {} ", op.symbol())?;
                show(b, f)
            }
            SExpr::Ite(c, a, b) => write!(
                f,
                "({} ? {} : {})",
                ShowExpr(c, p),
                ShowExpr(a, p),
                ShowExpr(b, p)
            ),
            SExpr::StrIndex(s, i) => {
                write!(f, "{:?}[{}]", String::from_utf8_lossy(s), ShowExpr(i, p))
            }
        }
    }
}

impl fmt::Display for SsaProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.defs[2..] {
            write!(f, "{} = ", d.name)?;
            match &d.rhs {
                SsaRhs::Expr(e) => write!(f, "{}", ShowExpr(e, self))?,
                SsaRhs::Input(i) => write!(f, "input[{i}]")?,
                SsaRhs::Merge { cond, then, other } => write!(
                    f,
                    "merge({}, {}, {})",
                    self.def(*cond).name,
                    self.def(*then).name,
                    self.def(*other).name
                )?,
            }
            if d.pc != self.top {
                write!(f, "  [if {}]", self.def(d.pc).name)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Map from program variable to the versions defined for it, in order.
pub fn version_chains(s: &SsaProgram) -> HashMap<VarId, Vec<SsaVar>> {
    let mut m: HashMap<VarId, Vec<SsaVar>> = HashMap::new();
    for d in &s.defs {
        if let Some(v) = d.source {
            m.entry(v).or_default().push(d.var);
        }
    }
    m
}
