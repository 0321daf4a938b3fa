//! Adjoint action of translations on symmetry spaces and the structured
//! (exponential times polynomial) basis built from its decomposition.

mod element;
mod space;
mod structured;

pub use element::{coordinate_matrix, express_in, rank_of, Element, ElementKey, SpaceKind};
pub use space::SymmetrySpace;
pub use structured::{
    ansatz_dimensions, expand, structured_basis, DimensionReport, StructuredBasis, StructuredBlock,
    StructuredElement, Verification,
};

use crate::linalg::LinalgError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("basis elements are linearly dependent")]
    NotIndependent,
    #[error("order {order} does not contain the lower levels")]
    NotNested { order: usize },
    #[error("order {0} is not part of the filtration")]
    UnknownOrder(usize),
    #[error("d/d{variable} of basis element {element} leaves the space: {residual}")]
    ClosureViolation {
        element: usize,
        variable: String,
        residual: String,
    },
    #[error("adjoint matrices of {first} and {second} do not commute")]
    NotCommuting { first: String, second: String },
    #[error("eigenvalues outside Q(i): irreducible factor {factor}")]
    Unresolved { factor: String },
    #[error("{0} is not a translation variable")]
    NotTranslationVariable(String),
    #[error("element does not lie in a single primary component")]
    NotPrimary,
    #[error("elements of different kinds")]
    KindMismatch,
    #[error("elements live in different variable contexts")]
    ContextMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
