use super::field::{Field, Mode};
use super::matrix::Matrix;
use super::tolerance::Tolerance;
use crate::error::{dim_mismatch, Error, Result};

fn check_symmetric<F: Field>(m: &Matrix<F>, tol: &Tolerance) -> Result<()> {
    if !m.is_square() {
        return Err(dim_mismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !F::approx_eq(m, &m.adjoint(), tol) {
        return Err(Error::InvalidInput("matrix is not symmetric".into()));
    }
    Ok(())
}

/// `M <= N` in the PSD order, i.e. `N - M` is positive semidefinite.
///
/// Exact mode decides by pivoted LDL^T; float mode by the smallest eigenvalue
/// of `N - M` against `-eq_atol`.
pub fn psd_order_leq<F: Field>(m: &Matrix<F>, n: &Matrix<F>, tol: &Tolerance) -> Result<bool> {
    if m.shape() != n.shape() {
        return Err(dim_mismatch(format!(
            "PSD order between {}x{} and {}x{}",
            m.rows(),
            m.cols(),
            n.rows(),
            n.cols()
        )));
    }
    check_symmetric(m, tol)?;
    check_symmetric(n, tol)?;
    Ok(F::is_psd(&(n - m), tol))
}

pub fn is_psd<F: Field>(m: &Matrix<F>, tol: &Tolerance) -> Result<bool> {
    check_symmetric(m, tol)?;
    Ok(F::is_psd(m, tol))
}

/// Principal square root of a symmetric PSD matrix (float mode only).
/// Eigenvalues within the rank cutoff of zero are clamped to zero.
pub fn psd_sqrt<F: Field>(m: &Matrix<F>, tol: &Tolerance) -> Result<Matrix<F>> {
    if F::MODE == Mode::Exact {
        return Err(Error::ExactModeUnsupported("square root of a PSD matrix"));
    }
    check_symmetric(m, tol)?;
    F::psd_sqrt(m, tol)
}
