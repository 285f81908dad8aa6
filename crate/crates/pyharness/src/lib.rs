//! The Python side of the pipeline: running programs under an external
//! interpreter, a small tokenizer, and WBO/ADC mutation injection.

pub mod lex;
pub mod mutate;
pub mod problem;
pub mod run;

pub use lex::{tokenize, LexError, Token, TokenKind};
pub use mutate::{
    apply_record, mutate, mutate_adc, mutate_wbo, scan_mutation_sites, validate_mutant, HangPolicy,
    MutantRecord, MutateError, MutationKind, RejectReason, Site, SiteSelection, Validation,
};
pub use problem::{
    load_problem, load_problems, save_problem, split_assertions, ProblemError, PythonProblem,
};
pub use run::{run_python, EnvError, PythonConfig, RunOutcome, RunStatus, DEFAULT_TIMEOUT};
