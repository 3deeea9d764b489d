//! Exact verification of Poincare-Hopf identities on global-quotient
//! orbifolds with boundary.

pub mod boundary;
pub mod catalog;
pub mod chain;
pub mod double;
pub mod inertia;
pub mod report;
pub mod scenario;
pub mod verify;
pub mod error;
pub mod euler;
pub mod expr;
pub mod field;
pub mod group;
pub mod presentation;
pub mod rational;
pub mod simplicial;
pub mod tol;

pub use error::{Error, Result};
pub use rational::Rational;
pub use tol::Tolerances;
