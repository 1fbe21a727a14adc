//! Constrained Nevanlinna-Pick interpolation over cusp subalgebras of
//! polynomial algebras.
//!
//! The pipeline: a subalgebra spec (numerical semigroup, `C1 + fC[z]`,
//! or the fixed two-variable cusp) determines a conductor ideal and an
//! Artinian quotient ring. Unit-group orbits of the quotient carry the
//! labels of a family of reproducing kernels; an interpolation problem
//! is solvable in the closed unit ball of the algebra iff every family
//! Pick matrix is positive semidefinite. This crate computes conductor
//! data, orbit coordinates, and the kernels exactly, sweeps Pick-matrix
//! positivity over sampled parameters, and cross-validates verdicts
//! against an independent minimax oracle on the disc.
//!
//! Start with the runnable examples (`cargo run --example ...`) or the
//! `pickfam` command-line front end.

pub mod daspace;
pub mod exact;
pub mod files;
pub mod oracle;
pub mod pick;
pub mod quotient;
pub mod rational;
pub mod semigroup;

pub use daspace::poly::MultiPoly;
pub use quotient::{JetElement, QuotientRing, Subalgebra, SubalgebraSpec};
pub use semigroup::NumericalSemigroup;
