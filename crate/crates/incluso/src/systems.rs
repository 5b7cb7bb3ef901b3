//! Ready-made perturbed systems used by the examples, tests, and the CLI.

use crate::interval::Interval;
use crate::linalg::IVector;
use crate::model::{Expr, PerturbedSystem};

/// Planar rotation with additive perturbation radii:
/// `x₁' ∈ x₂ + [−eps1, eps1]`, `x₂' ∈ −x₁ + [−eps2, eps2]`.
pub fn harmonic_oscillator(eps1: f64, eps2: f64) -> PerturbedSystem {
    PerturbedSystem::additive(
        vec![Expr::state(1), -Expr::state(0)],
        IVector::from(vec![
            Interval::centered(0.0, eps1),
            Interval::centered(0.0, eps2),
        ]),
    )
    .expect("well-formed two-dimensional system")
}

/// The Rössler system with componentwise additive perturbation radii:
/// `x₁' = −(x₂ + x₃)`, `x₂' = x₁ + 0.2·x₂`, `x₃' = 0.2 + x₃·(x₁ − a)`.
pub fn rossler(a: f64, eps: [f64; 3]) -> PerturbedSystem {
    let field = vec![
        -(Expr::state(1) + Expr::state(2)),
        Expr::state(0) + Expr::constant(0.2) * Expr::state(1),
        Expr::constant(0.2) + Expr::state(2) * (Expr::state(0) - Expr::constant(a)),
    ];
    PerturbedSystem::additive(
        field,
        eps.iter().map(|&e| Interval::centered(0.0, e)).collect(),
    )
    .expect("well-formed three-dimensional system")
}
