//! Partial MaxSAT by selector relaxation and linear cost ascent.
//!
//! Every soft clause gets a relaxation literal that is true when the clause is
//! allowed to be violated. A generalized totalizer over the relaxation
//! literals turns "cost <= b" into a set of assumptions, so the whole search
//! (and diagnosis enumeration on top of it) runs in a single solver context.

use std::collections::BTreeMap;

use crate::cdcl::{Answer, Solver};
use crate::lit::Lit;
use crate::{PartialMaxSatInstance, SolverError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OptResult {
    /// `model` is indexed by zero-based variable; `cost` is the total weight of
    /// soft clauses it falsifies.
    Optimal {
        model: Vec<bool>,
        cost: u64,
    },
    HardUnsat,
}

/// Output of one totalizer node: clipped partial sum -> literal "sum >= key".
type SumLits = BTreeMap<u64, Lit>;

#[derive(Debug)]
struct Totalizer {
    clip: u64,
    outputs: SumLits,
}

/// An incremental partial MaxSAT context.
#[derive(Debug)]
pub struct MaxSatSession {
    solver: Solver,
    instance: PartialMaxSatInstance,
    relax: Vec<(Lit, u64)>,
    totalizer: Option<Totalizer>,
}

impl MaxSatSession {
    pub fn new(instance: PartialMaxSatInstance) -> Result<Self, SolverError> {
        instance.validate()?;
        let mut solver = Solver::new();
        solver.reserve_vars(instance.hard.num_vars as usize);
        for c in &instance.hard.clauses {
            let lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l)).collect();
            solver.add_clause(&lits);
        }
        let mut relax = Vec::with_capacity(instance.soft.len());
        for s in &instance.soft {
            let r = if s.lits.len() == 1 {
                !Lit::from_dimacs(s.lits[0])
            } else {
                let r = solver.new_var().pos();
                let mut lits: Vec<Lit> = s.lits.iter().map(|&l| Lit::from_dimacs(l)).collect();
                lits.push(r);
                solver.add_clause(&lits);
                r
            };
            // Prefer satisfying soft clauses when branching.
            solver.set_phase(r.var(), r.is_negated());
            relax.push((r, s.weight));
        }
        Ok(MaxSatSession {
            solver,
            instance,
            relax,
            totalizer: None,
        })
    }

    pub fn instance(&self) -> &PartialMaxSatInstance {
        &self.instance
    }

    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.solver.set_conflict_budget(budget);
    }

    /// Adds a hard clause over the instance's variables.
    pub fn add_hard(&mut self, clause: &[i32]) {
        let lits: Vec<Lit> = clause.iter().map(|&l| Lit::from_dimacs(l)).collect();
        self.solver.add_clause(&lits);
        self.instance.hard.clauses.push(clause.to_vec());
    }

    fn current_model(&self) -> Vec<bool> {
        let mut m = self.solver.model().to_vec();
        m.resize(self.instance.hard.num_vars as usize, false);
        m
    }

    fn build_totalizer(&mut self, clip: u64) {
        let mut nodes: Vec<SumLits> = self
            .relax
            .iter()
            .map(|&(r, w)| {
                let mut m = SumLits::new();
                m.insert(w.min(clip), r);
                m
            })
            .collect();
        if nodes.is_empty() {
            self.totalizer = Some(Totalizer {
                clip,
                outputs: SumLits::new(),
            });
            return;
        }
        while nodes.len() > 1 {
            let mut next = Vec::with_capacity(nodes.len().div_ceil(2));
            let mut it = nodes.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(self.merge(&a, &b, clip)),
                    None => next.push(a),
                }
            }
            nodes = next;
        }
        self.totalizer = Some(Totalizer {
            clip,
            outputs: nodes.pop().unwrap(),
        });
    }

    fn merge(&mut self, a: &SumLits, b: &SumLits, clip: u64) -> SumLits {
        let mut out = SumLits::new();
        let zero = std::iter::once((0u64, None));
        let la: Vec<(u64, Option<Lit>)> = zero
            .clone()
            .chain(a.iter().map(|(&s, &l)| (s, Some(l))))
            .collect();
        let lb: Vec<(u64, Option<Lit>)> =
            zero.chain(b.iter().map(|(&s, &l)| (s, Some(l)))).collect();
        for &(sa, _) in &la {
            for &(sb, _) in &lb {
                let s = (sa + sb).min(clip);
                if s > 0 && !out.contains_key(&s) {
                    let v = self.solver.new_var().pos();
                    out.insert(s, v);
                }
            }
        }
        for &(sa, xa) in &la {
            for &(sb, xb) in &lb {
                let s = (sa + sb).min(clip);
                if s == 0 {
                    continue;
                }
                let mut clause = Vec::with_capacity(3);
                if let Some(x) = xa {
                    clause.push(!x);
                }
                if let Some(x) = xb {
                    clause.push(!x);
                }
                clause.push(out[&s]);
                self.solver.add_clause(&clause);
            }
        }
        out
    }

    /// Assumptions enforcing total relaxed weight `<= bound`.
    fn bound_assumptions(&mut self, bound: u64) -> Vec<Lit> {
        let total: u64 = self.relax.iter().map(|&(_, w)| w).sum();
        if bound >= total {
            return Vec::new();
        }
        let rebuild = match &self.totalizer {
            None => true,
            Some(t) => bound >= t.clip,
        };
        if rebuild {
            self.build_totalizer((bound + 1).max(1));
        }
        let t = self.totalizer.as_ref().unwrap();
        let mut assumps: Vec<Lit> = t.outputs.range(bound + 1..).map(|(_, &l)| !l).collect();
        // Any soft heavier than the bound must hold outright.
        assumps.extend(
            self.relax
                .iter()
                .filter(|&&(_, w)| w > bound)
                .map(|&(r, _)| !r),
        );
        assumps
    }

    /// Finds a model of cost at most `bound` (with the current hard clauses).
    pub fn solve_with_cost_at_most(
        &mut self,
        bound: u64,
    ) -> Result<Option<(Vec<bool>, u64)>, SolverError> {
        let assumps = self.bound_assumptions(bound);
        match self.solver.solve(&assumps)? {
            Answer::Sat => {
                let m = self.current_model();
                let c = self.instance.cost(&m);
                debug_assert!(c <= bound);
                Ok(Some((m, c)))
            }
            Answer::Unsat => Ok(None),
        }
    }

    /// Computes an optimal model under the current hard clauses.
    pub fn optimize(&mut self) -> Result<OptResult, SolverError> {
        if !self.solver.is_ok() {
            return Ok(OptResult::HardUnsat);
        }
        // Cost 0 check: every soft clause satisfied.
        let all_sat: Vec<Lit> = self.relax.iter().map(|&(r, _)| !r).collect();
        let lower = match self.solver.solve(&all_sat)? {
            Answer::Sat => {
                let model = self.current_model();
                let cost = self.instance.cost(&model);
                debug_assert_eq!(cost, 0);
                return Ok(OptResult::Optimal { model, cost });
            }
            Answer::Unsat => {
                let core = self.solver.core().to_vec();
                if core.is_empty() {
                    return Ok(OptResult::HardUnsat);
                }
                // Some soft clause of the core must be violated.
                core.iter()
                    .filter_map(|&c| self.relax.iter().find(|&&(r, _)| !r == c).map(|&(_, w)| w))
                    .min()
                    .unwrap_or(1)
            }
        };
        // Ascend from the core bound; the first satisfiable bound is optimal.
        // Small optima (the common case for diagnosis) stay cheap this way.
        let total: u64 = self.relax.iter().map(|&(_, w)| w).sum();
        let mut bound = lower;
        loop {
            if let Some((model, cost)) = self.solve_with_cost_at_most(bound)? {
                return Ok(OptResult::Optimal { model, cost });
            }
            if bound >= total {
                return Ok(OptResult::HardUnsat);
            }
            bound += 1;
        }
    }
}

/// Solves a partial MaxSAT instance to optimality.
pub fn solve_partial_maxsat(instance: &PartialMaxSatInstance) -> Result<OptResult, SolverError> {
    MaxSatSession::new(instance.clone())?.optimize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CnfInstance, SoftClause};

    fn soft(lits: &[i32], weight: u64) -> SoftClause {
        SoftClause {
            lits: lits.to_vec(),
            weight,
        }
    }

    #[test]
    fn forced_soft_violation() {
        let inst = PartialMaxSatInstance {
            hard: CnfInstance {
                num_vars: 2,
                clauses: vec![vec![1, 2], vec![-1]],
            },
            soft: vec![soft(&[-2], 1)],
        };
        match solve_partial_maxsat(&inst).unwrap() {
            OptResult::Optimal { model, cost } => {
                assert_eq!(cost, 1);
                assert!(model[1]);
            }
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn complementary_soft_units() {
        let inst = PartialMaxSatInstance {
            hard: CnfInstance {
                num_vars: 1,
                clauses: vec![],
            },
            soft: vec![soft(&[1], 1), soft(&[-1], 1)],
        };
        assert!(matches!(
            solve_partial_maxsat(&inst).unwrap(),
            OptResult::Optimal { cost: 1, .. }
        ));
    }

    #[test]
    fn contradictory_hard_clauses() {
        let inst = PartialMaxSatInstance {
            hard: CnfInstance {
                num_vars: 1,
                clauses: vec![vec![1], vec![-1]],
            },
            soft: vec![],
        };
        assert_eq!(solve_partial_maxsat(&inst).unwrap(), OptResult::HardUnsat);
    }

    #[test]
    fn weighted_prefers_cheap_violation() {
        let inst = PartialMaxSatInstance {
            hard: CnfInstance {
                num_vars: 2,
                clauses: vec![vec![-1, -2]],
            },
            soft: vec![soft(&[1], 5), soft(&[2], 3), soft(&[1, 2], 2)],
        };
        assert!(matches!(
            solve_partial_maxsat(&inst).unwrap(),
            OptResult::Optimal { cost: 3, .. }
        ));
    }

    #[test]
    fn session_enumerates_equal_cost_optima() {
        // Exactly one of 1..=3 may be false; each soft unit asks for truth.
        let inst = PartialMaxSatInstance {
            hard: CnfInstance {
                num_vars: 3,
                clauses: vec![vec![-1, -2, -3]],
            },
            soft: vec![soft(&[1], 1), soft(&[2], 1), soft(&[3], 1)],
        };
        let mut s = MaxSatSession::new(inst).unwrap();
        let OptResult::Optimal { model, cost } = s.optimize().unwrap() else {
            panic!()
        };
        assert_eq!(cost, 1);
        let mut seen = vec![model.iter().position(|&b| !b).unwrap()];
        s.add_hard(&[seen[0] as i32 + 1]);
        while let Some((m, c)) = s.solve_with_cost_at_most(1).unwrap() {
            assert_eq!(c, 1);
            let off = m.iter().position(|&b| !b).unwrap();
            seen.push(off);
            s.add_hard(&[off as i32 + 1]);
        }
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2]);
    }
}
