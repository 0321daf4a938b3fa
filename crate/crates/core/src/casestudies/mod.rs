//! Worked case studies: symmetry operators of the free Schrodinger equation
//! and evolutionary symmetries of evolution equations.

mod evolution;
mod schrodinger;

pub use evolution::{evolution_case, heat_system, lambda_samples, EvolutionCaps, EvolutionReport, EvolutionRun};
pub use schrodinger::{
    ansatz_basis, cross_validate, dimension_formula, exponential_scan, h_table, lambda_mu_grid,
    schrodinger_context, schrodinger_pde, schrodinger_space, solve_ansatz, solve_recurrence,
    CrossValidation, ScanPoint, SchrodingerReport, T, X,
};

use crate::jet::JetError;
use crate::linop::LinopError;
use crate::structure::StructureError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CaseError {
    #[error("routes disagree at order {q}: {witness} lies in only one span")]
    SpanMismatch { q: usize, witness: String },
    #[error(transparent)]
    Linop(#[from] LinopError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}
