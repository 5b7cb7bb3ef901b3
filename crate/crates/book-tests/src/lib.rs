//! Runs every code sample in the guide (`book/`) as a doc-test, so the
//! prose can never drift from the library. Each chapter becomes an empty
//! module whose documentation is the chapter source.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/intervals.md")]
pub mod intervals {}

#[doc = include_str!("../../../book/src/sets.md")]
pub mod sets {}

#[doc = include_str!("../../../book/src/perturbation-bounds.md")]
pub mod perturbation_bounds {}

#[doc = include_str!("../../../book/src/poincare.md")]
pub mod poincare {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
