//! Scalar fields, dense matrices and subspace algebra.

pub mod exact;
mod field;
pub mod float;
mod matrix;
mod psd;
mod subspace;
mod tolerance;

pub use field::{
    parse_rational, rational, rational_from_f64, rational_to_f64, Field, Mode, Rational,
};
pub use matrix::Matrix;
pub use psd::{is_psd, psd_order_leq, psd_sqrt};
pub use subspace::Subspace;
pub use tolerance::{Tolerance, DEFAULT_EQ_ATOL, DEFAULT_RANK_RTOL};

pub fn adjoint<F: Field>(m: &Matrix<F>) -> Matrix<F> {
    m.adjoint()
}

pub fn range<F: Field>(m: &Matrix<F>, tol: &Tolerance) -> Subspace<F> {
    Subspace::range(m, tol)
}

pub fn kernel<F: Field>(m: &Matrix<F>, tol: &Tolerance) -> Subspace<F> {
    Subspace::kernel(m, tol)
}

/// Moore-Penrose pseudoinverse. The pseudoinverse of a zero matrix is zero.
pub fn pinv<F: Field>(m: &Matrix<F>, tol: &Tolerance) -> Matrix<F> {
    F::pinv(m, tol)
}

/// Operator norm (largest singular value); computed in f64 for rational input.
pub fn operator_norm<F: Field>(m: &Matrix<F>) -> f64 {
    F::spectral_norm(m)
}

/// Whether `M^* M` is the orthogonal projection onto `(ker M)^perp`.
pub fn is_partial_isometry<F: Field>(m: &Matrix<F>, tol: &Tolerance) -> bool {
    let mtm = m.gram();
    let target = Subspace::range(&m.adjoint(), tol).projection();
    F::approx_eq(&mtm, &target, tol)
}
