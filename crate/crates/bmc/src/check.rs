//! Verdicts from the trace formula.

use minic::{CheckedProgram, SourceSpan, StatementId};
use serde::{Deserialize, Serialize};
use solver::{Answer, Lit, Solver};

use crate::encode::{encode_cnf, EncodeOptions, Polarity, TraceFormula, DEFAULT_MAX_VARS};
use crate::ssa::{to_ssa, ObligationInfo};
use crate::unroll::{unroll, CheckKind};
use crate::BmcError;

pub const DEFAULT_UNWIND: u32 = 64;
pub const DEFAULT_INLINE_DEPTH: u32 = 8;

/// What happens to executions that need more loop iterations than the bound.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnwindPolicy {
    /// An unwinding assertion that can fail yields `BoundExceeded`.
    #[default]
    Fail,
    /// Such executions are silently dropped.
    Assume,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BmcConfig {
    pub unwind: u32,
    pub inline_depth: u32,
    pub unwind_policy: UnwindPolicy,
    pub max_vars: u32,
    pub conflict_budget: Option<u64>,
}

impl Default for BmcConfig {
    fn default() -> Self {
        BmcConfig {
            unwind: DEFAULT_UNWIND,
            inline_depth: DEFAULT_INLINE_DEPTH,
            unwind_policy: UnwindPolicy::Fail,
            max_vars: DEFAULT_MAX_VARS,
            conflict_budget: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Values of every `nondet_int` call on the failing path, in order.
    pub inputs: Vec<i32>,
    /// Value of every `nondet_int` occurrence in the unrolled program,
    /// including unreached ones, for pinning the same run elsewhere.
    pub slots: Vec<i32>,
    /// Statements executed on the failing path, ending at the failure.
    pub path: Vec<StatementId>,
    pub failed: ObligationInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Verified { bound: u32 },
    Violated(Counterexample),
    BoundExceeded { span: SourceSpan },
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated(_))
    }
}

/// Loads a trace formula's hard clauses into a fresh solver.
pub fn solver_for(tf: &TraceFormula, budget: Option<u64>) -> Solver {
    let mut s = Solver::new();
    s.reserve_vars(tf.num_vars as usize);
    s.set_conflict_budget(budget);
    let mut buf = Vec::new();
    for c in &tf.clauses {
        buf.clear();
        buf.extend(c.iter().map(|&l| Lit::from_dimacs(l)));
        if !s.add_clause(&buf) {
            break;
        }
    }
    s
}

/// Adds `act -> OR(lits)` on a fresh activation variable and returns it.
fn activation(s: &mut Solver, lits: &[i32]) -> Lit {
    let act = s.new_var().pos();
    let mut clause = vec![!act];
    clause.extend(lits.iter().map(|&l| Lit::from_dimacs(l)));
    s.add_clause(&clause);
    act
}

/// Model checks `prog` with default settings and the given bounds.
pub fn check_bounded(prog: &CheckedProgram, k: u32, d: u32) -> Result<Verdict, BmcError> {
    check_with(
        prog,
        &BmcConfig {
            unwind: k,
            inline_depth: d,
            ..BmcConfig::default()
        },
    )
}

pub fn check_with(prog: &CheckedProgram, cfg: &BmcConfig) -> Result<Verdict, BmcError> {
    let u = unroll(prog, cfg.unwind, cfg.inline_depth)?;
    let ssa = to_ssa(&u);
    let tf = encode_cnf(
        &ssa,
        &EncodeOptions {
            polarity: Polarity::Open,
            guards: None,
            max_vars: cfg.max_vars,
        },
    )?;
    let mut s = solver_for(&tf, cfg.conflict_budget);

    let (unwinding, errors): (Vec<_>, Vec<_>) = tf
        .obligations
        .iter()
        .partition(|o| o.info.kind == CheckKind::Unwinding);
    let error_lits: Vec<i32> = errors.iter().map(|o| o.violated).collect();
    let act = activation(&mut s, &error_lits);
    if s.solve(&[act])? == Answer::Sat {
        let model = s.model().to_vec();
        let first = errors
            .iter()
            .filter(|o| solver::clause_satisfied(&[o.violated], &model))
            .min_by_key(|o| o.position)
            .expect("a violated obligation in the model");
        return Ok(Verdict::Violated(Counterexample {
            inputs: tf.decode_inputs(&model),
            slots: tf.decode_slots(&model),
            path: tf.decode_path(&model, first.position),
            failed: first.info.clone(),
        }));
    }

    if cfg.unwind_policy == UnwindPolicy::Fail && !unwinding.is_empty() {
        let lits: Vec<i32> = unwinding.iter().map(|o| o.violated).collect();
        let act = activation(&mut s, &lits);
        if s.solve(&[act])? == Answer::Sat {
            let model = s.model().to_vec();
            let first = unwinding
                .iter()
                .filter(|o| solver::clause_satisfied(&[o.violated], &model))
                .min_by_key(|o| o.position)
                .expect("a violated unwinding check in the model");
            return Ok(Verdict::BoundExceeded {
                span: first.info.span,
            });
        }
    }
    Ok(Verdict::Verified { bound: cfg.unwind })
}
