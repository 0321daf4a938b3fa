//! Multivariate polynomials and exponential-polynomials over [`GaussRat`].
//!
//! [`ExpPoly`] is the function class for every coefficient in the engine:
//! a finite sum of `exp(sum_s w_s z_s) * p(vars)` where only the designated
//! translation variables `z_s` of the [`VarContext`] carry exponential
//! weights.
//!
//! [`GaussRat`]: crate::field::GaussRat

mod context;
mod exp;
mod multi;

pub use context::{Var, VarContext, VarId, VarKind};
pub use exp::{CoeffEntry, ExpPoly, Weight};
pub use multi::{Monomial, MultiPoly};

pub(crate) use context::same_context;
pub(crate) use multi::render_scaled;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operands live in different variable contexts")]
    VariableMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("`{0}` cannot be a translation variable (jet coordinates carry no exponential weight)")]
    BadTranslation(String),
}
