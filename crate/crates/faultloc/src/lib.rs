//! Formula-based fault localisation.
//!
//! Every localisable statement gets a healthy variable `h`; its constraints
//! only bind while `h` is true. With the failing run's inputs pinned and the
//! assertions required to hold, a partial MaxSAT optimum over the soft units
//! `h` names a minimum set of statements whose relaxation explains the
//! failure. All optima are enumerated by blocking each one in turn.

pub mod sinks;

use std::collections::{BTreeMap, BTreeSet};

use bmc::{
    check_with, encode_cnf, solver_for, to_ssa, unroll, BmcConfig, BmcError, Counterexample,
    EncodeOptions, Polarity, TraceFormula, UnwindPolicy, Verdict,
};
use minic::{CheckedProgram, SourceSpan, StatementId, StatementInfo, StatementKind};
use serde::{Deserialize, Serialize};
use solver::{Answer, Lit, MaxSatSession, OptResult, SolverError};

pub use sinks::output_sinks;

pub const DEFAULT_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LocalizeError {
    #[error("the specification is unsatisfiable even with every statement relaxed")]
    UnsatSpecification,
    #[error(transparent)]
    Bmc(#[from] BmcError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizeConfig {
    pub unwind: u32,
    pub inline_depth: u32,
    pub cap: usize,
    pub max_vars: u32,
    pub conflict_budget: Option<u64>,
}

impl Default for LocalizeConfig {
    fn default() -> Self {
        LocalizeConfig {
            unwind: bmc::DEFAULT_UNWIND,
            inline_depth: bmc::DEFAULT_INLINE_DEPTH,
            cap: DEFAULT_CAP,
            max_vars: bmc::DEFAULT_MAX_VARS,
            conflict_budget: None,
        }
    }
}

/// Trace formula with the assertions asserted to hold and one healthy
/// variable per localisable statement.
#[derive(Clone, Debug)]
pub struct GuardedFormula {
    pub tf: TraceFormula,
    /// Loop unwinding bound the formula was built at.
    pub unwind: u32,
    pub statements: BTreeMap<StatementId, StatementInfo>,
    pub sinks: BTreeSet<StatementId>,
    pub conflict_budget: Option<u64>,
}

impl GuardedFormula {
    /// Healthy variable of each guarded statement.
    pub fn guards(&self) -> &BTreeMap<StatementId, i32> {
        &self.tf.guards
    }

    /// Whether the hard clauses are satisfiable with exactly `relaxed`
    /// switched off and every other guard on.
    pub fn relaxation_holds(&self, relaxed: &BTreeSet<StatementId>) -> Result<bool, SolverError> {
        let mut s = solver_for(&self.tf, self.conflict_budget);
        let assumptions: Vec<Lit> = self
            .tf
            .guards
            .iter()
            .map(|(id, &h)| Lit::from_dimacs(if relaxed.contains(id) { -h } else { h }))
            .collect();
        Ok(s.solve(&assumptions)? == Answer::Sat)
    }

    /// Whether the program passes the pinned run as written.
    pub fn all_healthy_sat(&self) -> Result<bool, SolverError> {
        self.relaxation_holds(&BTreeSet::new())
    }
}

/// Statement kinds that receive a healthy variable. Returns of `main` and
/// every assert and assume stay hard.
fn localisable(s: &StatementInfo) -> bool {
    match s.kind {
        StatementKind::Declare { has_init } => has_init,
        StatementKind::Assign | StatementKind::CompoundAssign => true,
        StatementKind::Return => s.function != "main",
        k => k.is_condition(),
    }
}

/// Builds the guarded formula for `prog`. `slots` pins the value of every
/// `nondet_int` occurrence (as recorded in a counterexample); without it
/// inputs stay free.
pub fn encode_guarded(
    prog: &CheckedProgram,
    cfg: &LocalizeConfig,
    slots: Option<&[i32]>,
) -> Result<GuardedFormula, LocalizeError> {
    let u = unroll(prog, cfg.unwind, cfg.inline_depth)?;
    let ssa = to_ssa(&u);
    let candidates: BTreeSet<StatementId> = prog
        .statements()
        .iter()
        .filter(|s| localisable(s))
        .map(|s| s.id)
        .collect();
    let mut tf = encode_cnf(
        &ssa,
        &EncodeOptions {
            polarity: Polarity::Hold,
            guards: Some(candidates),
            max_vars: cfg.max_vars,
        },
    )?;
    if let Some(slots) = slots {
        for ((word, _), &v) in tf.inputs.iter().zip(slots) {
            for (bit, &l) in word.iter().enumerate() {
                tf.clauses
                    .push(vec![if (v >> bit) & 1 == 1 { l } else { -l }]);
            }
        }
    }
    let statements = tf
        .guards
        .keys()
        .filter_map(|id| prog.statement(*id).map(|s| (*id, s.clone())))
        .collect();
    let g = GuardedFormula {
        tf,
        unwind: cfg.unwind,
        statements,
        sinks: output_sinks(prog),
        conflict_budget: cfg.conflict_budget,
    };
    let mut s = solver_for(&g.tf, cfg.conflict_budget);
    let all_relaxed: Vec<Lit> =
        g.tf.guards
            .values()
            .map(|&h| Lit::from_dimacs(-h))
            .collect();
    if s.solve(&all_relaxed)? == Answer::Unsat {
        return Err(LocalizeError::UnsatSpecification);
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosedStatement {
    pub id: StatementId,
    pub line: u32,
    pub span: SourceSpan,
    pub function: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub statements: Vec<DiagnosedStatement>,
    pub cost: u64,
    /// Contains a final write to a value an assertion inspects.
    pub output_sink: bool,
}

impl Diagnosis {
    pub fn ids(&self) -> BTreeSet<StatementId> {
        self.statements.iter().map(|s| s.id).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosisSet {
    pub diagnoses: Vec<Diagnosis>,
    pub cost: u64,
    /// More diagnoses of the same cost exist beyond the cap.
    pub truncated: bool,
}

fn diagnosis_from_model(g: &GuardedFormula, model: &[bool], cost: u64) -> Diagnosis {
    let statements: Vec<DiagnosedStatement> =
        g.tf.guards
            .iter()
            .filter(|(_, &h)| !solver::clause_satisfied(&[h], model))
            .map(|(id, _)| {
                let info = &g.statements[id];
                DiagnosedStatement {
                    id: *id,
                    line: info.span.line,
                    span: info.span,
                    function: info.function.clone(),
                    text: info.text.clone(),
                }
            })
            .collect();
    let output_sink = statements.iter().any(|s| g.sinks.contains(&s.id));
    Diagnosis {
        statements,
        cost,
        output_sink,
    }
}

/// Enumerates minimum-cost diagnoses, at most `cap` of them.
pub fn enumerate_diagnoses(g: &GuardedFormula, cap: usize) -> Result<DiagnosisSet, LocalizeError> {
    let mut session = MaxSatSession::new(g.tf.maxsat())?;
    session.set_conflict_budget(g.conflict_budget);
    let (model, cost) = match session.optimize()? {
        OptResult::HardUnsat => return Err(LocalizeError::UnsatSpecification),
        OptResult::Optimal { model, cost } => (model, cost),
    };
    if cost == 0 {
        return Ok(DiagnosisSet::default());
    }
    let mut out = DiagnosisSet {
        diagnoses: Vec::new(),
        cost,
        truncated: false,
    };
    let mut next = Some(model);
    while let Some(model) = next.take() {
        if out.diagnoses.len() == cap {
            out.truncated = true;
            break;
        }
        let d = diagnosis_from_model(g, &model, cost);
        // At least one member of this diagnosis must be healthy from now on.
        let block: Vec<i32> = d.statements.iter().map(|s| g.tf.guards[&s.id]).collect();
        session.add_hard(&block);
        out.diagnoses.push(d);
        next = session.solve_with_cost_at_most(cost)?.map(|(m, _)| m);
    }
    Ok(out)
}

/// Line-sorted, deduplicated `(line, text)` pairs of every diagnosed statement.
pub fn map_diagnosis_to_source(ds: &DiagnosisSet, prog: &CheckedProgram) -> Vec<(u32, String)> {
    let ids: BTreeSet<StatementId> = ds.diagnoses.iter().flat_map(|d| d.ids()).collect();
    let mut out: Vec<(u32, String)> = ids
        .into_iter()
        .filter_map(|id| prog.statement(id))
        .map(|s| (s.span.line, s.text.clone()))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Guarded encoding plus enumeration in one call.
pub fn localize(
    prog: &CheckedProgram,
    cfg: &LocalizeConfig,
    slots: Option<&[i32]>,
) -> Result<(GuardedFormula, DiagnosisSet), LocalizeError> {
    let g = encode_guarded(prog, cfg, slots)?;
    let ds = enumerate_diagnoses(&g, cfg.cap)?;
    Ok((g, ds))
}

/// Unwind bound for localising a failure seen along `path`: twice the most
/// evaluations of any loop condition plus two, capped at `limit`. Relaxations
/// that would need more iterations are excluded by the unwinding
/// assumptions, so every reported diagnosis stays valid.
pub fn unwind_for_path(prog: &CheckedProgram, path: &[StatementId], limit: u32) -> u32 {
    let mut counts: BTreeMap<StatementId, u32> = BTreeMap::new();
    for id in path {
        let is_loop = prog.statement(*id).is_some_and(|s| {
            matches!(
                s.kind,
                StatementKind::WhileCondition | StatementKind::ForCondition
            )
        });
        if is_loop {
            *counts.entry(*id).or_default() += 1;
        }
    }
    let busiest = counts.values().copied().max().unwrap_or(0);
    busiest.saturating_mul(2).saturating_add(2).min(limit)
}

/// Localises the failure of `cex`, found at `cfg.unwind`, under the bound
/// from [`unwind_for_path`]. The counterexample is re-derived at that bound
/// so its input slots match the smaller unrolling.
pub fn localize_counterexample(
    prog: &CheckedProgram,
    cfg: &LocalizeConfig,
    cex: &Counterexample,
) -> Result<(GuardedFormula, DiagnosisSet), LocalizeError> {
    let unwind = unwind_for_path(prog, &cex.path, cfg.unwind);
    if unwind < cfg.unwind {
        let bmc_cfg = BmcConfig {
            unwind,
            inline_depth: cfg.inline_depth,
            unwind_policy: UnwindPolicy::Assume,
            max_vars: cfg.max_vars,
            conflict_budget: cfg.conflict_budget,
        };
        if let Verdict::Violated(small) = check_with(prog, &bmc_cfg)? {
            let small_cfg = LocalizeConfig {
                unwind,
                ..cfg.clone()
            };
            return localize(prog, &small_cfg, Some(&small.slots));
        }
    }
    localize(prog, cfg, Some(&cex.slots))
}
