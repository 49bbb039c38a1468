//! Pairs of operators `(A, B)` on finite-dimensional spaces and the linear
//! relation `L(A, B) = {(Af, Bf)}` they induce.
//!
//! The crate computes closures and adjoints of such relations, the canonical
//! contractions `C_A`, `C_B`, classifies `B` against `A` (dominated, almost
//! dominated, singular), and produces Lebesgue decompositions and
//! Radon-Nikodym derivatives. Every verdict is reached along several
//! independent routes that are cross-checked against each other.
//!
//! Two scalar modes exist: exact rationals ([`linalg::Rational`]) for
//! tolerance-free subspace decisions, and `f64` where square roots are needed.

pub mod classify;
pub mod error;
pub mod lebesgue;
pub mod linalg;
pub mod linrel;
pub mod pairs;
pub mod towers;

pub use error::{Error, Result};
pub use linalg::{Field, Matrix, Mode, Rational, Subspace, Tolerance};
