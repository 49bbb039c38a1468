use super::field::Field;
use super::matrix::Matrix;
use super::tolerance::Tolerance;
use crate::error::{dim_mismatch, Result};

/// A linear subspace of `F^n`, held by a canonical basis.
///
/// Exact mode keeps the reduced column echelon basis, so derived equality is
/// set equality. Float mode keeps an orthonormal basis; compare float
/// subspaces with [`Subspace::same_as`].
#[derive(Clone, PartialEq)]
pub struct Subspace<F> {
    ambient_dim: usize,
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    /// Span of the columns of `vectors`.
    pub fn span(vectors: &Matrix<F>, tol: &Tolerance) -> Self {
        Subspace {
            ambient_dim: vectors.rows(),
            basis: F::range_basis(vectors, tol),
        }
    }

    fn span_scaled(vectors: &Matrix<F>, scale: f64, tol: &Tolerance) -> Self {
        Subspace {
            ambient_dim: vectors.rows(),
            basis: F::range_basis_scaled(vectors, scale, tol),
        }
    }

    pub fn zero(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: Matrix::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: Matrix::identity(n),
        }
    }

    /// Column span of `m`.
    pub fn range(m: &Matrix<F>, tol: &Tolerance) -> Self {
        Self::span(m, tol)
    }

    /// Column span of `m`, with float rank decided relative to `scale`
    /// rather than the norm of `m`. Use when `m` may be numerically zero.
    pub fn range_scaled(m: &Matrix<F>, scale: f64, tol: &Tolerance) -> Self {
        Self::span_scaled(m, scale, tol)
    }

    /// Null space of `m`.
    pub fn kernel(m: &Matrix<F>, tol: &Tolerance) -> Self {
        Subspace {
            ambient_dim: m.cols(),
            basis: F::kernel_basis(m, tol),
        }
    }

    /// Null space of `m`, with float rank decided relative to `scale`.
    pub fn kernel_scaled(m: &Matrix<F>, scale: f64, tol: &Tolerance) -> Self {
        Subspace {
            ambient_dim: m.cols(),
            basis: F::kernel_basis_scaled(m, scale, tol),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(dim_mismatch(format!(
                "subspaces of F^{} and F^{}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Self, tol: &Tolerance) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(Self::span_scaled(
            &self.basis.hstack(&other.basis)?,
            1.0,
            tol,
        ))
    }

    /// Intersection through the null space of `[U | -V]`.
    pub fn intersect(&self, other: &Self, tol: &Tolerance) -> Result<Self> {
        self.check_ambient(other)?;
        let stacked = self.basis.hstack(&(-&other.basis))?;
        let null = F::kernel_basis_scaled(&stacked, scale_of(&stacked), tol);
        let coeffs = null.submatrix(0..self.rank(), 0..null.cols());
        let vectors = &self.basis * &coeffs;
        Ok(Self::span_scaled(&vectors, scale_of(&self.basis), tol))
    }

    /// `{x : M x in W}`, computed as `ker((I - P_W) M)`.
    pub fn preimage(m: &Matrix<F>, w: &Self, tol: &Tolerance) -> Result<Self> {
        if m.rows() != w.ambient_dim {
            return Err(dim_mismatch(format!(
                "preimage under a {}x{} map of a subspace of F^{}",
                m.rows(),
                m.cols(),
                w.ambient_dim
            )));
        }
        let residual = &w.complement_projection() * m;
        Ok(Subspace {
            ambient_dim: m.cols(),
            basis: F::kernel_basis_scaled(&residual, scale_of(m), tol),
        })
    }

    /// Image `M(U)`.
    pub fn image(m: &Matrix<F>, u: &Self, tol: &Tolerance) -> Result<Self> {
        if m.cols() != u.ambient_dim {
            return Err(dim_mismatch(format!(
                "image under a {}x{} map of a subspace of F^{}",
                m.rows(),
                m.cols(),
                u.ambient_dim
            )));
        }
        Ok(Self::span_scaled(&(m * &u.basis), scale_of(m), tol))
    }

    pub fn orthogonal_complement(&self, tol: &Tolerance) -> Self {
        if self.ambient_dim == 0 {
            return Subspace::zero(0);
        }
        Subspace {
            ambient_dim: self.ambient_dim,
            basis: F::kernel_basis_scaled(&self.basis.adjoint(), 1.0, tol),
        }
    }

    /// Orthogonal projection onto the subspace; symmetric and idempotent.
    pub fn projection(&self) -> Matrix<F> {
        F::projection_from_basis(&self.basis)
    }

    /// `I - P`, the projection onto the orthogonal complement.
    pub fn complement_projection(&self) -> Matrix<F> {
        &Matrix::identity(self.ambient_dim) - &self.projection()
    }

    pub fn contains_vector(&self, v: &[F], tol: &Tolerance) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let residual = &self.complement_projection() * &Matrix::column_vector(v);
        F::approx_eq(&residual, &Matrix::zeros(v.len(), 1), tol)
    }

    pub fn is_subspace_of(&self, other: &Self, tol: &Tolerance) -> Result<bool> {
        self.check_ambient(other)?;
        if self.rank() > other.rank() {
            return Ok(false);
        }
        let residual = &other.complement_projection() * &self.basis;
        Ok(F::approx_eq(
            &residual,
            &Matrix::zeros(residual.rows(), residual.cols()),
            tol,
        ))
    }

    /// Set equality: structural in exact mode, projection distance in float mode.
    pub fn same_as(&self, other: &Self, tol: &Tolerance) -> bool {
        self.ambient_dim == other.ambient_dim && F::same_span(&self.basis, &other.basis, tol)
    }

    /// Product subspace `self x other` inside `F^{n+m}`.
    pub fn product(&self, other: &Self) -> Self {
        // block-diagonal stacking of canonical bases is canonical again
        Subspace {
            ambient_dim: self.ambient_dim + other.ambient_dim,
            basis: Matrix::block_diag(&self.basis, &other.basis),
        }
    }
}

fn scale_of<F: Field>(m: &Matrix<F>) -> f64 {
    match F::MODE {
        super::Mode::Exact => 1.0,
        super::Mode::Float => F::spectral_norm(m),
    }
}

impl<F: Field> std::fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Subspace(dim {} in F^{}, basis {:?})",
            self.rank(),
            self.ambient_dim,
            self.basis
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::Rational;

    type Q = Rational;

    fn q(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_i64(rows)
    }

    #[test]
    fn range_and_kernel_of_ones() {
        let tol = Tolerance::default();
        let m = q(&[&[1, 1], &[1, 1]]);
        assert_eq!(
            Subspace::range(&m, &tol),
            Subspace::span(&q(&[&[1], &[1]]), &tol)
        );
        assert_eq!(
            Subspace::kernel(&m, &tol),
            Subspace::span(&q(&[&[1], &[-1]]), &tol)
        );
    }

    #[test]
    fn zero_and_identity_maps() {
        let tol = Tolerance::default();
        let z = Matrix::<Q>::zeros(3, 2);
        assert_eq!(Subspace::range(&z, &tol).rank(), 0);
        assert_eq!(Subspace::kernel(&z, &tol).rank(), 2);
        let i = Matrix::<Q>::identity(3);
        assert_eq!(Subspace::range(&i, &tol).rank(), 3);
        assert_eq!(Subspace::kernel(&i, &tol).rank(), 0);
    }

    #[test]
    fn orthogonal_lines_meet_in_zero() {
        let tol = Tolerance::default();
        let e1 = Subspace::span(&q(&[&[1], &[0]]), &tol);
        let e2 = Subspace::span(&q(&[&[0], &[1]]), &tol);
        assert_eq!(e1.intersect(&e2, &tol).unwrap().rank(), 0);
        assert!(e1.sum(&e2, &tol).unwrap().is_full());
    }

    #[test]
    fn hand_elimination_intersection() {
        let tol = Tolerance::default();
        let u = Subspace::span(&q(&[&[1], &[1], &[0]]), &tol);
        let v = Subspace::span(&q(&[&[1, 0], &[1, 0], &[1, 1]]), &tol);
        assert_eq!(u.intersect(&v, &tol).unwrap(), u);
    }

    #[test]
    fn preimage_under_identity() {
        let tol = Tolerance::default();
        let w = Subspace::span(&q(&[&[1], &[2], &[3]]), &tol);
        assert_eq!(
            Subspace::preimage(&Matrix::identity(3), &w, &tol).unwrap(),
            w
        );
    }

    #[test]
    fn mismatched_ambient_is_rejected() {
        let tol = Tolerance::default();
        let a = Subspace::<Q>::full(2);
        let b = Subspace::<Q>::full(3);
        assert!(a.intersect(&b, &tol).is_err());
        assert!(a.sum(&b, &tol).is_err());
        assert!(Subspace::preimage(&Matrix::identity(2), &b, &tol).is_err());
    }

    #[test]
    fn zero_dimensional_space() {
        let tol = Tolerance::default();
        let z = Subspace::<Q>::full(0);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.orthogonal_complement(&tol).rank(), 0);
        assert_eq!(z.projection().shape(), (0, 0));
    }

    #[test]
    fn float_subspace_equality_by_projection() {
        let tol = Tolerance::default();
        let a = Subspace::span(&Matrix::from_f64_rows(&[&[1.0], &[1.0]]), &tol);
        let b = Subspace::span(&Matrix::from_f64_rows(&[&[-3.0], &[-3.0]]), &tol);
        assert!(a.same_as(&b, &tol));
        let c = Subspace::span(&Matrix::from_f64_rows(&[&[1.0], &[0.0]]), &tol);
        assert!(!a.same_as(&c, &tol));
    }
}
