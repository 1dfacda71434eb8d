use std::fmt;

use thiserror::Error;

/// Location of a syntax error inside some input text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    /// Byte offset into the parsed text.
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn at(text: &str, offset: usize, message: impl Into<String>) -> Self {
        let offset = offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = match before.rfind('\n') {
            Some(nl) => offset - nl,
            None => offset + 1,
        };
        SyntaxError {
            offset,
            line,
            column,
            message: message.into(),
        }
    }

    /// Shift the reported line numbers, used when a snippet is parsed out of a larger file.
    pub fn shifted(mut self, line_delta: usize) -> Self {
        self.line += line_delta;
        self
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Error)]
pub enum RelicError {
    #[error("incompatible state spaces: {0}")]
    SpaceMismatch(String),
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),
    #[error("state space has no fail element")]
    MissingFail,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("evaluation budget exceeded: {needed} evaluations needed, budget is {budget}; use random mode")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("out of contract: {0}")]
    OutOfContract(String),
}

impl From<SyntaxError> for RelicError {
    fn from(e: SyntaxError) -> Self {
        RelicError::Syntax(e)
    }
}

pub type Result<T> = std::result::Result<T, RelicError>;
