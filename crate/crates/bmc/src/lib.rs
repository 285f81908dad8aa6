//! Bounded model checking for MiniC programs.
//!
//! The pipeline is `unroll` (loops and calls expanded to a loop-free
//! program), `to_ssa` (guarded single assignment), `encode_cnf` (bit-blasted
//! trace formula) and `check_bounded` (verdict with counterexample).

pub mod blast;
pub mod check;
pub mod encode;
pub mod ssa;
pub mod unroll;

use minic::SourceSpan;

pub use check::{
    check_bounded, check_with, solver_for, BmcConfig, Counterexample, UnwindPolicy, Verdict,
    DEFAULT_INLINE_DEPTH, DEFAULT_UNWIND,
};
pub use encode::{
    encode_cnf, EncodeOptions, EncodedObligation, PathStep, Polarity, TraceFormula,
    DEFAULT_MAX_VARS,
};
pub use ssa::{to_ssa, version_chains, ObligationInfo, SsaProgram};
pub use unroll::{evaluate, unroll, CheckKind, UnrolledOutcome, UnrolledProgram, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BmcError {
    #[error("{span}: call to '{function}' exceeds the inline depth {depth}")]
    RecursionBound {
        function: String,
        span: SourceSpan,
        depth: u32,
    },
    #[error("formula needs {vars} variables, above the limit of {limit}")]
    Capacity { vars: u32, limit: u32 },
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
}
