//! Decision procedures used by the verifier and the fault localiser:
//! an in-repo CDCL SAT engine with assumptions and cores, a partial MaxSAT
//! optimiser on top of it, and DIMACS CNF/WCNF interchange.

pub mod cdcl;
pub mod dimacs;
pub mod external;
pub mod lit;
pub mod maxsat;

use thiserror::Error;

pub use cdcl::{Answer, Solver};
pub use dimacs::{format_model, parse_dimacs, DimacsInstance, FormatError};
pub use lit::{Lit, Var};
pub use maxsat::{solve_partial_maxsat, MaxSatSession, OptResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("conflict budget exhausted after {conflicts} conflicts")]
    ResourceLimit { conflicts: u64 },
    #[error("malformed instance: {0}")]
    Malformed(String),
}

/// A CNF formula in DIMACS convention: variables `1..=num_vars`, literals are
/// non-zero integers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfInstance {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfInstance {
    pub fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> Result<Self, SolverError> {
        let inst = CnfInstance { num_vars, clauses };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        for (i, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(SolverError::Malformed(format!("clause {i} is empty")));
            }
            for &l in c {
                if l == 0 || l.unsigned_abs() > self.num_vars {
                    return Err(SolverError::Malformed(format!(
                        "clause {i}: literal {l} outside [-{v}, {v}]",
                        v = self.num_vars
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluates every clause under `model` (indexed by zero-based variable).
    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| clause_satisfied(c, model))
    }
}

pub fn clause_satisfied(clause: &[i32], model: &[bool]) -> bool {
    clause.iter().any(|&l| {
        let v = model
            .get(l.unsigned_abs() as usize - 1)
            .copied()
            .unwrap_or(false);
        v == (l > 0)
    })
}

/// A weighted soft clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftClause {
    pub lits: Vec<i32>,
    pub weight: u64,
}

/// Hard clauses (must hold) plus weighted soft clauses (violations cost weight).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialMaxSatInstance {
    pub hard: CnfInstance,
    pub soft: Vec<SoftClause>,
}

impl PartialMaxSatInstance {
    pub fn validate(&self) -> Result<(), SolverError> {
        self.hard.validate()?;
        for (i, s) in self.soft.iter().enumerate() {
            if s.weight == 0 {
                return Err(SolverError::Malformed(format!(
                    "soft clause {i} has weight 0"
                )));
            }
            if s.lits.is_empty() {
                return Err(SolverError::Malformed(format!("soft clause {i} is empty")));
            }
            if s.lits
                .iter()
                .any(|&l| l == 0 || l.unsigned_abs() > self.hard.num_vars)
            {
                return Err(SolverError::Malformed(format!(
                    "soft clause {i} has an out-of-range literal"
                )));
            }
        }
        Ok(())
    }

    /// Total weight of soft clauses falsified by `model`.
    pub fn cost(&self, model: &[bool]) -> u64 {
        self.soft
            .iter()
            .filter(|s| !clause_satisfied(&s.lits, model))
            .map(|s| s.weight)
            .sum()
    }
}

/// Result of [`solve_cnf`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CnfOutcome {
    /// Model indexed by zero-based variable.
    Sat(Vec<bool>),
    /// Subset of the assumptions (DIMACS literals) sufficient for unsatisfiability.
    Unsat(Vec<i32>),
}

/// Decides `instance` under `assumptions` with a fresh solver context.
pub fn solve_cnf(instance: &CnfInstance, assumptions: &[i32]) -> Result<CnfOutcome, SolverError> {
    solve_cnf_with_budget(instance, assumptions, None)
}

pub fn solve_cnf_with_budget(
    instance: &CnfInstance,
    assumptions: &[i32],
    conflict_budget: Option<u64>,
) -> Result<CnfOutcome, SolverError> {
    instance.validate()?;
    if let Some(&bad) = assumptions
        .iter()
        .find(|&&a| a == 0 || a.unsigned_abs() > instance.num_vars)
    {
        return Err(SolverError::Malformed(format!(
            "assumption {bad} out of range"
        )));
    }
    let mut solver = Solver::new();
    solver.reserve_vars(instance.num_vars as usize);
    solver.set_conflict_budget(conflict_budget);
    for c in &instance.clauses {
        let lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l)).collect();
        solver.add_clause(&lits);
    }
    let assumps: Vec<Lit> = assumptions.iter().map(|&l| Lit::from_dimacs(l)).collect();
    match solver.solve(&assumps)? {
        Answer::Sat => {
            let mut model = solver.model().to_vec();
            model.resize(instance.num_vars as usize, false);
            Ok(CnfOutcome::Sat(model))
        }
        Answer::Unsat => Ok(CnfOutcome::Unsat(
            solver.core().iter().map(|l| l.to_dimacs()).collect(),
        )),
    }
}
