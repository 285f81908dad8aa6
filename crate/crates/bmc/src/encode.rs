//! Bit-precise CNF encoding of a guarded SSA program.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use minic::{BinOp, StatementId, UnOp};

use crate::blast::{const_word, decode_word, lit_value, Blaster, Word, TRUE};
use crate::ssa::{ObligationInfo, SExpr, SsaProgram, SsaRhs, SsaVar};
use crate::unroll::CheckKind;
use crate::BmcError;

pub const DEFAULT_MAX_VARS: u32 = 5_000_000;

/// What the encoding asserts about the program's obligations.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Polarity {
    /// Some obligation fails: the classic trace formula. Unwinding checks
    /// join the disjunction only when `include_unwinding` is set.
    Violation { include_unwinding: bool },
    /// Every assumption and every non-unwinding obligation holds on the
    /// path that reaches it. Unwinding checks act as assumptions.
    Hold,
    /// Nothing is asserted; callers pick obligations through their
    /// violation literals.
    Open,
}

#[derive(Clone, Debug)]
pub struct EncodeOptions {
    pub polarity: Polarity,
    /// Statements whose definitions are made conditional on a healthy
    /// variable. `None` guards nothing.
    pub guards: Option<BTreeSet<StatementId>>,
    pub max_vars: u32,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            polarity: Polarity::Violation {
                include_unwinding: false,
            },
            guards: None,
            max_vars: DEFAULT_MAX_VARS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EncodedObligation {
    pub info: ObligationInfo,
    /// True exactly when the obligation is reached with every earlier
    /// assumption satisfied and its condition is false.
    pub violated: i32,
    /// Position of the obligation in definition order.
    pub position: u32,
}

/// A statement executed on a path, with the literal that says it ran.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub origin: StatementId,
    pub reached: i32,
    pub position: u32,
}

#[derive(Clone, Debug)]
pub struct TraceFormula {
    pub num_vars: u32,
    /// Hard clauses.
    pub clauses: Vec<Vec<i32>>,
    /// Versioned variable name to its 32 literals, least significant first.
    pub bitvectors: Vec<(String, Word)>,
    pub obligations: Vec<EncodedObligation>,
    /// Healthy variable per guarded statement.
    pub guards: BTreeMap<StatementId, i32>,
    /// Soft unit clauses, one per guard, weight 1.
    pub soft: Vec<i32>,
    /// Nondeterministic inputs in program order with their reach literal.
    pub inputs: Vec<(Word, i32)>,
    pub path: Vec<PathStep>,
}

impl TraceFormula {
    pub fn cnf(&self) -> solver::CnfInstance {
        solver::CnfInstance {
            num_vars: self.num_vars,
            clauses: self.clauses.clone(),
        }
    }

    pub fn maxsat(&self) -> solver::PartialMaxSatInstance {
        solver::PartialMaxSatInstance {
            hard: self.cnf(),
            soft: self
                .soft
                .iter()
                .map(|&l| solver::SoftClause {
                    lits: vec![l],
                    weight: 1,
                })
                .collect(),
        }
    }

    /// Values of the inputs the model's path actually consumes.
    pub fn decode_inputs(&self, model: &[bool]) -> Vec<i32> {
        self.inputs
            .iter()
            .filter(|(_, reached)| lit_value(*reached, model))
            .map(|(w, _)| decode_word(w, model))
            .collect()
    }

    /// Values of every input occurrence, reached or not.
    pub fn decode_slots(&self, model: &[bool]) -> Vec<i32> {
        self.inputs
            .iter()
            .map(|(w, _)| decode_word(w, model))
            .collect()
    }

    /// Statement origins executed under `model`, up to and including
    /// definition position `until`.
    pub fn decode_path(&self, model: &[bool], until: u32) -> Vec<StatementId> {
        let mut out: Vec<StatementId> = Vec::new();
        for s in &self.path {
            if s.position > until {
                break;
            }
            if lit_value(s.reached, model) && out.last() != Some(&s.origin) {
                out.push(s.origin);
            }
        }
        out
    }

    /// Value of a versioned variable under `model`.
    pub fn value(&self, name: &str, model: &[bool]) -> Option<i32> {
        self.bitvectors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| decode_word(w, model))
    }

    /// DIMACS text of the hard clauses.
    pub fn to_dimacs(&self) -> String {
        self.cnf().to_dimacs()
    }

    /// Sidecar lines `var <id> = <name>[bit]` for every non-constant bit.
    pub fn var_map(&self) -> String {
        let mut out = String::new();
        for (name, w) in &self.bitvectors {
            for (bit, &l) in w.iter().enumerate() {
                if l.abs() > TRUE {
                    let neg = if l < 0 { "!" } else { "" };
                    let _ = writeln!(out, "var {} = {neg}{name}[{bit}]", l.abs());
                }
            }
        }
        out
    }
}

struct Encoder {
    b: Blaster,
    words: Vec<Word>,
    guards: BTreeMap<StatementId, i32>,
    soft: Vec<i32>,
    max_vars: u32,
}

impl Encoder {
    fn capacity(&self) -> Result<(), BmcError> {
        if self.b.num_vars() > self.max_vars {
            return Err(BmcError::Capacity {
                vars: self.b.num_vars(),
                limit: self.max_vars,
            });
        }
        Ok(())
    }

    fn word(&self, v: SsaVar) -> Word {
        self.words[v.0 as usize]
    }

    fn bit(&mut self, v: SsaVar) -> i32 {
        let w = self.word(v);
        self.b.truth(&w)
    }

    fn expr(&mut self, e: &SExpr) -> Word {
        match e {
            SExpr::Const(v) => const_word(*v),
            SExpr::Var(v) => self.word(*v),
            SExpr::Unary(op, a) => {
                let a = self.expr(a);
                match op {
                    UnOp::Neg => self.b.neg(&a),
                    UnOp::BitNot => self.b.not_word(&a),
                    UnOp::Not => {
                        let t = self.b.truth(&a);
                        self.b.bool_word(-t)
                    }
                }
            }
            SExpr::Binary(op, a, c) => {
                let a = self.expr(a);
                let c = self.expr(c);
                self.binop(*op, &a, &c)
            }
            SExpr::Ite(c, a, e) => {
                let c = self.expr(c);
                let c = self.b.truth(&c);
                let a = self.expr(a);
                let e = self.expr(e);
                self.b.ite_word(c, &a, &e)
            }
            SExpr::StrIndex(bytes, i) => {
                let i = self.expr(i);
                self.b.select_byte(bytes, &i)
            }
        }
    }

    fn binop(&mut self, op: BinOp, a: &Word, c: &Word) -> Word {
        let b = &mut self.b;
        let flag = |b: &mut Blaster, l: i32| b.bool_word(l);
        match op {
            BinOp::Add => b.add(a, c),
            BinOp::Sub => b.sub(a, c),
            BinOp::Mul => b.mul(a, c),
            BinOp::Div => b.sdivrem(a, c).0,
            BinOp::Rem => b.sdivrem(a, c).1,
            BinOp::Lt => {
                let l = b.slt(a, c);
                flag(b, l)
            }
            BinOp::Gt => {
                let l = b.slt(c, a);
                flag(b, l)
            }
            BinOp::Le => {
                let l = b.slt(c, a);
                flag(b, -l)
            }
            BinOp::Ge => {
                let l = b.slt(a, c);
                flag(b, -l)
            }
            BinOp::Eq => {
                let l = b.eq(a, c);
                flag(b, l)
            }
            BinOp::Ne => {
                let l = b.eq(a, c);
                flag(b, -l)
            }
            BinOp::And => {
                let x = b.truth(a);
                let y = b.truth(c);
                let l = b.and(x, y);
                flag(b, l)
            }
            BinOp::Or => {
                let x = b.truth(a);
                let y = b.truth(c);
                let l = b.or(x, y);
                flag(b, l)
            }
            BinOp::BitAnd => std::array::from_fn(|i| b.and(a[i], c[i])),
            BinOp::BitOr => std::array::from_fn(|i| b.or(a[i], c[i])),
            BinOp::BitXor => std::array::from_fn(|i| b.xor(a[i], c[i])),
            BinOp::Shl => b.shl(a, c),
            BinOp::Shr => b.shr(a, c),
        }
    }

    fn guard(&mut self, s: StatementId) -> i32 {
        if let Some(&h) = self.guards.get(&s) {
            return h;
        }
        let h = self.b.fresh();
        self.guards.insert(s, h);
        self.soft.push(h);
        h
    }

    /// Fresh word constrained to equal `value` only while `h` holds.
    fn relaxable(&mut self, h: i32, value: &Word) -> Word {
        let x = self.b.fresh_word();
        for (&xi, &vi) in x.iter().zip(value) {
            self.b.clause(&[-h, -xi, vi]);
            self.b.clause(&[-h, xi, -vi]);
        }
        x
    }
}

/// Encodes `s` into CNF according to `opts`.
pub fn encode_cnf(s: &SsaProgram, opts: &EncodeOptions) -> Result<TraceFormula, BmcError> {
    let mut enc = Encoder {
        b: Blaster::new(),
        words: Vec::with_capacity(s.defs.len()),
        guards: BTreeMap::new(),
        soft: Vec::new(),
        max_vars: opts.max_vars,
    };
    let mut path = Vec::new();
    let mut inputs = Vec::new();
    let mut bitvectors = Vec::new();
    for d in &s.defs {
        let value = match &d.rhs {
            SsaRhs::Expr(e) => enc.expr(e),
            SsaRhs::Input(_) => enc.b.fresh_word(),
            SsaRhs::Merge { cond, then, other } => {
                let c = enc.bit(*cond);
                let (t, o) = (enc.word(*then), enc.word(*other));
                enc.b.ite_word(c, &t, &o)
            }
        };
        let guarded = match (&opts.guards, d.origin) {
            (Some(g), Some(o)) if g.contains(&o) && matches!(d.rhs, SsaRhs::Expr(_)) => Some(o),
            _ => None,
        };
        let word = match guarded {
            Some(o) => {
                let h = enc.guard(o);
                enc.relaxable(h, &value)
            }
            None => value,
        };
        enc.words.push(word);
        let reached = enc.bit(d.pc);
        if matches!(d.rhs, SsaRhs::Input(_)) {
            inputs.push((word, reached));
        }
        if let Some(o) = d.origin {
            path.push(PathStep {
                origin: o,
                reached,
                position: d.var.0,
            });
        }
        bitvectors.push((d.name.clone(), word));
        enc.capacity()?;
    }

    let mut obligations = Vec::with_capacity(s.obligations.len());
    for ob in &s.obligations {
        let pc = enc.bit(ob.pc);
        let prefix = enc.bit(ob.prefix);
        let cond = enc.bit(ob.cond);
        let reach = enc.b.and(prefix, pc);
        let violated = enc.b.and(reach, -cond);
        if let Some(o) = ob.info.origin {
            path.push(PathStep {
                origin: o,
                reached: reach,
                position: ob.cond.0,
            });
        }
        obligations.push(EncodedObligation {
            info: ob.info.clone(),
            violated,
            position: ob.cond.0,
        });
    }
    path.sort_by_key(|p| p.position);

    match opts.polarity {
        Polarity::Violation { include_unwinding } => {
            let lits: Vec<i32> = obligations
                .iter()
                .filter(|o| include_unwinding || o.info.kind != CheckKind::Unwinding)
                .map(|o| o.violated)
                .collect();
            let any = enc.b.or_all(&lits);
            enc.b.clause(&[any]);
        }
        Polarity::Hold => {
            for a in &s.assumptions {
                let pc = enc.bit(a.pc);
                let c = enc.bit(a.cond);
                enc.b.clause(&[-pc, c]);
            }
            for ob in &s.obligations {
                if ob.info.kind == CheckKind::Unwinding {
                    continue;
                }
                let pc = enc.bit(ob.pc);
                let c = enc.bit(ob.cond);
                enc.b.clause(&[-pc, c]);
            }
        }
        Polarity::Open => {}
    }
    enc.capacity()?;

    let guards = enc.guards;
    let soft = enc.soft;
    let (num_vars, clauses) = enc.b.into_parts();
    Ok(TraceFormula {
        num_vars,
        clauses,
        bitvectors,
        obligations,
        guards,
        soft,
        inputs,
        path,
    })
}
