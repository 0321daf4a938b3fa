//! Exact symbolic engine for generalized symmetries of partial differential
//! equations.
//!
//! The crate is layered bottom-up:
//!
//! * [`field`]: Gaussian rationals, the exact scalar field.
//! * [`poly`]: polynomials and exponential-polynomials over it.
//! * [`linalg`]: exact matrices, nullspaces, characteristic polynomials,
//!   common primary decomposition of commuting matrices, truncated
//!   exponentials.
//! * [`jet`]: total derivatives, prolongation, Lie brackets and
//!   determining systems for evolutionary symmetries.
//! * [`linop`]: linear differential operators and symmetry operators of
//!   linear equations.
//! * [`structure`]: adjoint matrices of translations on a symmetry space
//!   and the resulting structured basis.
//! * [`casestudies`]: the free Schrödinger equation and evolution
//!   equations worked end to end.

pub mod casestudies;
pub mod field;
pub mod jet;
pub mod linalg;
pub mod linop;
pub mod poly;
pub mod structure;

pub use field::GaussRat;
pub use poly::{ExpPoly, Monomial, MultiPoly, VarContext, VarId, Weight};
