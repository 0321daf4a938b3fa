//! Front end for `symkit`: a small language for PDE problems and stored
//! symmetries, and the commands behind the `symkit` binary.
//!
//! A problem file declares variables, one equation and an optional task:
//!
//! ```text
//! vars t, x;
//! unknowns psi;
//! translations t, x;
//! eq i*D[psi, t] + D[psi, x, x] = 0;
//! task solve order=2 lambda=[0];
//! ```

pub mod ast;
pub mod commands;
pub mod lower;
pub mod parse;

pub use commands::{render_json, CliError, Outcome, Overrides};
pub use parse::{parse_expr, parse_lambda_list, parse_problem, parse_symmetry, SyntaxError};
