//! Guaranteed enclosures for ODEs under bounded perturbations.
//!
//! `incluso` integrates differential inclusions of the form
//! `x' ∈ f(x) + [perturbation box]` with directed-rounding interval
//! arithmetic, so every reported box is a mathematically rigorous
//! enclosure of *all* trajectories: every initial state in the starting
//! set and every measurable selection of the perturbation inside its
//! bound. The core combines a Taylor-method interval integrator with
//! wrapping control (doubleton/quadruple set representations) and a
//! per-step deviation bound computed either from a logarithmic norm or
//! from a componentwise matrix-exponential integral. On top of the
//! stepper sit whole-step reachability tubes and a rigorous first-return
//! (Poincaré) map for linear sections.
//!
//! ```
//! use incluso::{inclusion::integrate, systems, EnclosureSet, IVector, SolverConfig};
//!
//! // Rotation with perturbation radius 0.05 on each component.
//! let sys = systems::harmonic_oscillator(0.05, 0.05);
//! let set0 = EnclosureSet::doubleton(&IVector::point(&[1.0, 0.0]));
//! let cfg = SolverConfig::new(0.1);
//! let (t_end, set_end) = integrate(&sys, &set0, 0.0, 10, &cfg).unwrap();
//!
//! // The unperturbed trajectory is one admissible selection, so its
//! // endpoint must lie in the enclosure.
//! assert!((t_end - 1.0).abs() < 1e-12);
//! let hull = set_end.hull();
//! assert!(hull.contains_point(&[t_end.cos(), -t_end.sin()]));
//! ```

mod error;
mod round;

pub mod inclusion;
pub mod interval;
pub mod linalg;
pub mod lohner;
pub mod model;
pub mod poincare;
pub mod systems;

pub use error::{Error, Result};
pub use inclusion::{CwVariant, Method, SolverConfig, StepBundle};
pub use interval::Interval;
pub use linalg::{IMatrix, IVector, NormKind};
pub use lohner::{EnclosureSet, InflationPolicy, Representation};
pub use model::{Expr, PerturbedSystem};
pub use poincare::{poincare_map, CrossingDirection, Section};
