//! Symbolic vector fields: expression trees, parsing, differentiation, and
//! automatic Taylor-coefficient generation for perturbed systems.

mod expr;
mod jet;
mod parse;
mod system;

pub use expr::{Expr, Var};
pub use parse::parse_expr;
pub use system::{PerturbedSystem, TaylorCoeffs};
