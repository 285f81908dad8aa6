//! MiniC: the bounded C subset shared by the interpreter, the model checker
//! and the fault localiser.

pub mod ast;
#[cfg(feature = "gen")]
pub mod gen;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod semantics;
pub mod span;
pub mod typeck;

pub use ast::{
    BinOp, Block, Cond, Expr, ExprKind, FunctionDef, MiniCProgram, Param, StatementId, Stmt,
    StmtKind, Type, UnOp,
};
pub use interp::{
    call_function, interpret_main, interpret_with_inputs, ExecutionOutcome, InterpError, Limits,
    RuntimeErrorKind, Status, Value,
};
pub use lexer::{tokenize_minic, LexError, Token, TokenKind};
pub use parser::{parse_expr, parse_minic, ParseError};
pub use pretty::pretty_print;
pub use span::SourceSpan;
pub use typeck::{
    typecheck, Callee, CheckError, CheckedProgram, Intrinsic, StatementInfo, StatementKind,
};

/// Any failure to turn source text into a checked program.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

impl FrontendError {
    pub fn span(&self) -> SourceSpan {
        match self {
            FrontendError::Parse(e) => e.span(),
            FrontendError::Check(e) => e.span(),
        }
    }

    fn message(&self) -> String {
        match self {
            FrontendError::Parse(e) => e.message(),
            FrontendError::Check(CheckError::TypeError { message, .. }) => message.clone(),
            FrontendError::Check(CheckError::UndefinedSymbol { name, .. }) => {
                format!("undefined symbol '{name}'")
            }
        }
    }

    /// Compiler-style `file:line:col: message` line.
    pub fn render(&self, file: &str) -> String {
        let sp = self.span();
        format!("{file}:{}:{}: {}", sp.line, sp.col, self.message())
    }
}

/// Parses and type checks `source`.
pub fn load(source: &str) -> Result<CheckedProgram, FrontendError> {
    Ok(typecheck(parse_minic(source)?)?)
}
