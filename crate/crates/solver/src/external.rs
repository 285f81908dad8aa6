//! Escape hatch: run any DIMACS-speaking SAT solver executable.

use std::path::PathBuf;
use std::process::Command;

use crate::dimacs::parse_model_lines;
use crate::{CnfInstance, CnfOutcome, SolverError};

#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl ExternalSolver {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        ExternalSolver {
            program: program.into(),
            args: Vec::new(),
        }
    }

    /// Writes `instance` (with assumptions as unit clauses) to a temporary
    /// DIMACS file, runs the solver on it and parses `s`/`v` lines.
    /// Cores are not available from external solvers: on UNSAT the whole
    /// assumption list is returned.
    pub fn solve(
        &self,
        instance: &CnfInstance,
        assumptions: &[i32],
    ) -> Result<CnfOutcome, SolverError> {
        let mut inst = instance.clone();
        inst.clauses.extend(assumptions.iter().map(|&a| vec![a]));
        inst.validate()?;
        let path = std::env::temp_dir().join(format!(
            "solver-ext-{}-{}.cnf",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_nanos())
                .unwrap_or(0)
        ));
        std::fs::write(&path, inst.to_dimacs())
            .map_err(|e| SolverError::Malformed(format!("cannot write {}: {e}", path.display())))?;
        let output = Command::new(&self.program)
            .args(&self.args)
            .arg(&path)
            .output();
        let _ = std::fs::remove_file(&path);
        let output = output.map_err(|e| {
            SolverError::Malformed(format!("cannot run {}: {e}", self.program.display()))
        })?;
        let stdout = String::from_utf8_lossy(&output.stdout);
        let status = stdout
            .lines()
            .find_map(|l| l.trim().strip_prefix("s ").map(str::trim))
            .unwrap_or("");
        match status {
            "SATISFIABLE" => {
                let model = parse_model_lines(&stdout, inst.num_vars)
                    .map_err(|e| SolverError::Malformed(e.to_string()))?;
                Ok(CnfOutcome::Sat(model))
            }
            "UNSATISFIABLE" => Ok(CnfOutcome::Unsat(assumptions.to_vec())),
            other => Err(SolverError::Malformed(format!(
                "external solver reported '{other}' (exit {:?})",
                output.status.code()
            ))),
        }
    }
}
