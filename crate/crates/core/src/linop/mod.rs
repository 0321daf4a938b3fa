//! Linear differential operators with exponential-polynomial coefficients.

mod hform;
mod op;
mod pde;

pub use hform::{from_h_form, nested_anticommutator, to_h_form};
pub use op::{LinDiffOp, OpKey};
pub use pde::{operator_determining_solve, OperatorAnsatz, OperatorPde, OperatorSolution};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LinopError {
    #[error("operators live in different variable contexts")]
    ContextMismatch,
    #[error("invalid operator equation: {0}")]
    InvalidOperatorPde(String),
    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),
    #[error("operator involves derivatives other than the h-form axis")]
    NotInHForm,
}
