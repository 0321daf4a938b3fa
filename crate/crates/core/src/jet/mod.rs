//! Jet spaces, total derivatives, prolongations and generalized symmetries.

mod context;
mod evolution;
mod system;
mod vector_field;

pub use context::{jet_name, multi_indices, order_of, JetContext};
pub use evolution::{ansatz_terms, evolution_determining_solve, EvolutionAnsatz, EvolutionSolution};
pub use system::{PdeSystem, SolvedRule};
pub use vector_field::{lie_bracket, total_derivative, total_derivative_multi, GenVectorField, Prolongation};

use crate::poly::PolyError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum JetError {
    #[error("jet order {needed} exceeds the declared maximum {max_order}")]
    OrderOverflow { needed: usize, max_order: usize },
    #[error("not in solved form: {0}")]
    NotSolvedForm(String),
    #[error("equation {0} is constant")]
    DegenerateEquation(usize),
    #[error("objects live in different jet contexts")]
    ContextMismatch,
    #[error("invalid jet context: {0}")]
    InvalidContext(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
