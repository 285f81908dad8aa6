use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::ast::*;
use crate::semantics::{self, eval_binop, eval_unop, ArithError};
use crate::span::SourceSpan;
use crate::typeck::{Callee, CheckedProgram, Intrinsic};

/// Maximum nesting of user function calls before the run is aborted.
pub const MAX_CALL_DEPTH: usize = 256;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    pub step_limit: u64,
    pub timeout: Duration,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            step_limit: 10_000_000,
            timeout: Duration::from_secs(5),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i32),
    Str(Arc<[u8]>),
    Void,
}

impl Value {
    pub fn as_int(&self) -> Option<i32> {
        match self {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuntimeErrorKind {
    DivByZero,
    OutOfBounds,
    StepLimit,
    Timeout,
    StackOverflow,
}

impl std::fmt::Display for RuntimeErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RuntimeErrorKind::DivByZero => "division by zero",
            RuntimeErrorKind::OutOfBounds => "string index out of bounds",
            RuntimeErrorKind::StepLimit => "step limit exceeded",
            RuntimeErrorKind::Timeout => "wall-clock timeout",
            RuntimeErrorKind::StackOverflow => "call depth limit exceeded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Completed {
        exit: i32,
    },
    AssertionViolated {
        span: SourceSpan,
    },
    AssumeViolated {
        span: SourceSpan,
    },
    RuntimeError {
        kind: RuntimeErrorKind,
        span: SourceSpan,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionOutcome {
    pub status: Status,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("{0}: nondet_int is not available in concrete interpretation")]
    NondetForbidden(SourceSpan),
    #[error("{0}: ran out of supplied nondeterministic inputs")]
    InputsExhausted(SourceSpan),
    #[error("no function named '{0}'")]
    UnknownFunction(String),
    #[error("bad arguments for '{0}'")]
    BadArguments(String),
    #[error("execution stopped: {0:?}")]
    Halted(Status),
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Value),
}

enum Stop {
    Halt(Status),
    Fatal(InterpError),
}

type Exec<T> = Result<T, Stop>;

struct Machine<'p, 'i> {
    prog: &'p CheckedProgram,
    limits: Limits,
    started: Instant,
    steps: u64,
    depth: usize,
    inputs: Option<&'i [i32]>,
    next_input: usize,
    vars: Vec<(&'p str, Value)>,
}

impl<'p> Machine<'p, '_> {
    fn tick(&mut self, span: SourceSpan) -> Exec<()> {
        if self.steps >= self.limits.step_limit {
            return Err(Stop::Halt(Status::RuntimeError {
                kind: RuntimeErrorKind::StepLimit,
                span,
            }));
        }
        self.steps += 1;
        if self.steps % 4096 == 0 && self.started.elapsed() > self.limits.timeout {
            return Err(Stop::Halt(Status::RuntimeError {
                kind: RuntimeErrorKind::Timeout,
                span,
            }));
        }
        Ok(())
    }

    fn runtime(kind: RuntimeErrorKind, span: SourceSpan) -> Stop {
        Stop::Halt(Status::RuntimeError { kind, span })
    }

    fn lookup(&self, name: &str) -> &Value {
        &self
            .vars
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .expect("typechecked variable")
            .1
    }

    fn store(&mut self, name: &str, v: i32) {
        let slot = self
            .vars
            .iter_mut()
            .rev()
            .find(|(n, _)| *n == name)
            .expect("typechecked variable");
        slot.1 = Value::Int(v);
    }

    fn int(&mut self, e: &'p Expr) -> Exec<i32> {
        match self.eval(e)? {
            Value::Int(v) => Ok(v),
            _ => unreachable!("typechecked int expression"),
        }
    }

    fn eval(&mut self, e: &'p Expr) -> Exec<Value> {
        Ok(match &e.kind {
            ExprKind::Int(v) => Value::Int(*v),
            ExprKind::Str(s) => Value::Str(s.clone()),
            ExprKind::Var(n) => self.lookup(n).clone(),
            ExprKind::Index(base, idx) => {
                let Value::Str(s) = self.eval(base)? else {
                    unreachable!("typechecked string")
                };
                let i = self.int(idx)?;
                Value::Int(
                    semantics::string_byte(&s, i)
                        .ok_or_else(|| Self::runtime(RuntimeErrorKind::OutOfBounds, e.span))?,
                )
            }
            ExprKind::Unary(op, a) => Value::Int(eval_unop(*op, self.int(a)?)),
            ExprKind::Binary(BinOp::And, a, b) => {
                Value::Int((self.int(a)? != 0 && self.int(b)? != 0) as i32)
            }
            ExprKind::Binary(BinOp::Or, a, b) => {
                Value::Int((self.int(a)? != 0 || self.int(b)? != 0) as i32)
            }
            ExprKind::Binary(op, a, b) => {
                let x = self.int(a)?;
                let y = self.int(b)?;
                Value::Int(eval_binop(*op, x, y).map_err(|ArithError::DivByZero| {
                    Self::runtime(RuntimeErrorKind::DivByZero, e.span)
                })?)
            }
            ExprKind::Ternary(c, a, b) => {
                if self.int(c)? != 0 {
                    self.eval(a)?
                } else {
                    self.eval(b)?
                }
            }
            ExprKind::Call(name, args) => {
                let callee = self.prog.resolve(name).expect("typechecked call");
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a)?);
                }
                self.call(callee, vals, e.span)?
            }
        })
    }

    fn call(&mut self, callee: Callee, args: Vec<Value>, span: SourceSpan) -> Exec<Value> {
        let f = match callee {
            Callee::Intrinsic(i) => return self.intrinsic(i, &args, span),
            Callee::User(i) => &self.prog.program().functions[i],
        };
        self.tick(span)?;
        if self.depth >= MAX_CALL_DEPTH {
            return Err(Self::runtime(RuntimeErrorKind::StackOverflow, span));
        }
        self.depth += 1;
        let saved = std::mem::take(&mut self.vars);
        self.vars
            .extend(f.params.iter().map(|p| p.name.as_str()).zip(args));
        let r = self.block(&f.body);
        self.vars = saved;
        self.depth -= 1;
        Ok(match r? {
            Flow::Return(v) => v,
            _ if f.ret == Type::Void => Value::Void,
            // Only main may fall off its end; typecheck rejects the rest.
            _ => Value::Int(0),
        })
    }

    fn intrinsic(&mut self, i: Intrinsic, args: &[Value], span: SourceSpan) -> Exec<Value> {
        let arg = |k: usize| args[k].as_int().expect("typechecked int argument");
        Ok(Value::Int(match i {
            Intrinsic::Abs => semantics::abs(arg(0)),
            Intrinsic::Min => arg(0).min(arg(1)),
            Intrinsic::Max => arg(0).max(arg(1)),
            Intrinsic::Printf => 0,
            Intrinsic::NondetInt => match self.inputs {
                None => return Err(Stop::Fatal(InterpError::NondetForbidden(span))),
                Some(inp) => {
                    let v = *inp
                        .get(self.next_input)
                        .ok_or(Stop::Fatal(InterpError::InputsExhausted(span)))?;
                    self.next_input += 1;
                    v
                }
            },
        }))
    }

    fn block(&mut self, b: &'p Block) -> Exec<Flow> {
        let mark = self.vars.len();
        let r = self.stmts(&b.stmts);
        self.vars.truncate(mark);
        r
    }

    fn stmts(&mut self, stmts: &'p [Stmt]) -> Exec<Flow> {
        for s in stmts {
            match self.stmt(s)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn cond(&mut self, c: &'p Cond) -> Exec<bool> {
        self.tick(c.span)?;
        Ok(self.int(&c.expr)? != 0)
    }

    fn stmt(&mut self, s: &'p Stmt) -> Exec<Flow> {
        if !matches!(
            s.kind,
            StmtKind::Block(_)
                | StmtKind::If { .. }
                | StmtKind::While { .. }
                | StmtKind::For { .. }
        ) {
            self.tick(s.span)?;
        }
        match &s.kind {
            StmtKind::Declare { name, init, .. } => {
                let v = match init {
                    Some(e) => self.eval(e)?,
                    None => Value::Int(0),
                };
                self.vars.push((name, v));
            }
            StmtKind::Assign { target, value } => {
                let v = self.int(value)?;
                self.store(target, v);
            }
            StmtKind::CompoundAssign { target, op, value } => {
                let v = self.int(value)?;
                let cur = self.lookup(target).as_int().expect("int variable");
                let r = eval_binop(*op, cur, v)
                    .map_err(|_| Self::runtime(RuntimeErrorKind::DivByZero, s.span))?;
                self.store(target, r);
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.cond(cond)? {
                    return self.block(then_branch);
                } else if let Some(e) = else_branch {
                    return self.block(e);
                }
            }
            StmtKind::While { cond, body } => {
                while self.cond(cond)? {
                    match self.block(body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal | Flow::Continue => {}
                    }
                }
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                let mark = self.vars.len();
                let r = (|| {
                    self.stmts(init)?;
                    loop {
                        if let Some(c) = cond {
                            if !self.cond(c)? {
                                break;
                            }
                        } else {
                            self.tick(s.span)?;
                        }
                        match self.block(body)? {
                            Flow::Break => break,
                            Flow::Return(v) => return Ok(Flow::Return(v)),
                            Flow::Normal | Flow::Continue => {}
                        }
                        self.stmts(update)?;
                    }
                    Ok(Flow::Normal)
                })();
                self.vars.truncate(mark);
                return r;
            }
            StmtKind::Break => return Ok(Flow::Break),
            StmtKind::Continue => return Ok(Flow::Continue),
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(e)?,
                    None => Value::Void,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Expr(e) => {
                self.eval(e)?;
            }
            StmtKind::Assert(e) => {
                if self.int(e)? == 0 {
                    return Err(Stop::Halt(Status::AssertionViolated { span: s.span }));
                }
            }
            StmtKind::Assume(e) => {
                if self.int(e)? == 0 {
                    return Err(Stop::Halt(Status::AssumeViolated { span: s.span }));
                }
            }
            StmtKind::Block(b) => return self.block(b),
        }
        Ok(Flow::Normal)
    }
}

fn machine<'p, 'i>(
    prog: &'p CheckedProgram,
    limits: &Limits,
    inputs: Option<&'i [i32]>,
) -> Machine<'p, 'i> {
    Machine {
        prog,
        limits: *limits,
        started: Instant::now(),
        steps: 0,
        depth: 0,
        inputs,
        next_input: 0,
        vars: Vec::new(),
    }
}

fn run_main(
    prog: &CheckedProgram,
    limits: &Limits,
    inputs: Option<&[i32]>,
) -> Result<ExecutionOutcome, InterpError> {
    let mut m = machine(prog, limits, inputs);
    let main = prog
        .function_index("main")
        .expect("checked programs have main");
    let status = match m.call(Callee::User(main), Vec::new(), prog.main().span) {
        Ok(v) => Status::Completed {
            exit: v.as_int().unwrap_or(0),
        },
        Err(Stop::Halt(st)) => st,
        Err(Stop::Fatal(e)) => return Err(e),
    };
    Ok(ExecutionOutcome {
        status,
        steps: m.steps,
    })
}

/// Runs `main` concretely. Programs that read `nondet_int` are rejected.
pub fn interpret_main(
    prog: &CheckedProgram,
    limits: &Limits,
) -> Result<ExecutionOutcome, InterpError> {
    run_main(prog, limits, None)
}

/// Runs `main`, answering the i-th `nondet_int()` call with `inputs[i]`.
pub fn interpret_with_inputs(
    prog: &CheckedProgram,
    limits: &Limits,
    inputs: &[i32],
) -> Result<ExecutionOutcome, InterpError> {
    run_main(prog, limits, Some(inputs))
}

/// Calls a user function with concrete arguments.
pub fn call_function(
    prog: &CheckedProgram,
    name: &str,
    args: &[Value],
    limits: &Limits,
) -> Result<Value, InterpError> {
    let idx = prog
        .function_index(name)
        .ok_or_else(|| InterpError::UnknownFunction(name.to_string()))?;
    let f = &prog.program().functions[idx];
    let ok = f.params.len() == args.len()
        && f.params.iter().zip(args).all(|(p, a)| {
            matches!(
                (p.ty, a),
                (Type::Int, Value::Int(_)) | (Type::Str, Value::Str(_))
            )
        });
    if !ok {
        return Err(InterpError::BadArguments(name.to_string()));
    }
    let mut m = machine(prog, limits, None);
    match m.call(Callee::User(idx), args.to_vec(), f.span) {
        Ok(v) => Ok(v),
        Err(Stop::Halt(st)) => Err(InterpError::Halted(st)),
        Err(Stop::Fatal(e)) => Err(e),
    }
}
