//! Trajectories of one-dimensional discrete dynamical systems: generation,
//! box-dimension and Minkowski-content measurement, and classification of
//! fixed points at bifurcation parameters.
//!
//! The crate is organized around the pipeline
//! `map -> orbit -> point set / distance sequence -> dimension estimate`:
//!
//! * [`expr`] — a small expression language for maps `F(lam, x)` evaluated
//!   through truncated power series ([`jet`]), so derivatives are exact.
//! * [`dynamics`] — built-in map families, orbit generation, fixed-point and
//!   cycle location.
//! * [`fractal`] — epsilon-neighborhood (Minkowski sausage) measure, two
//!   independent box-dimension estimators, content estimates and bounds,
//!   power-law fitting.
//! * [`classify`] — fixed-point classification with predicted dimension and
//!   decay rate, and bifurcation-condition checks for parameterized families.

pub mod classify;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod fractal;
pub mod jet;

pub use error::{DomainError, Error, Result};
pub use expr::MapExpr;
pub use jet::Jet;
