//! Exact linear algebra over the Gaussian rationals.
//!
//! Dense [`ExactMatrix`] for small matrices (adjoint representations),
//! [`SparseEliminator`] for the large determining systems, and the
//! decomposition machinery for commuting families.

mod charpoly;
mod decompose;
mod matrix;
mod sparse;
mod unipoly;

pub use charpoly::{char_poly, gaussian_roots, nilpotency_index, RootSplit};
pub use decompose::{
    block_exp, common_decompose, restrict, Block, BlockDecomposition, ExpPolyMatrix, Unresolved,
};
pub use matrix::{ExactMatrix, Rref};
pub use sparse::{dense_to_sparse, sparse_to_dense, SparseEliminator, SparseRow};
pub use unipoly::UniPoly;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("coefficient matrix does not have full column rank")]
    RankDeficient,
    #[error("linear system is inconsistent (right-hand column {column})")]
    Inconsistent { column: usize },
    #[error("family members {first} and {second} do not commute")]
    NotCommuting { first: usize, second: usize },
    #[error("subspace is not invariant under the matrix")]
    NotInvariant,
    #[error("matrix minus lambda is not nilpotent of the stated index")]
    NotNilpotentAtLambda,
    #[error("`{0}` carries no exponential weight slot")]
    NotTranslationVariable(String),
    #[error("empty matrix family")]
    EmptyFamily,
}
