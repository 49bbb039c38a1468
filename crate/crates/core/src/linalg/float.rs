//! Float kernels backed by faer's SVD and self-adjoint eigendecomposition.

use faer::{Mat, Side};

use super::matrix::Matrix;
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

fn to_faer(m: &Matrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Full SVD: `u` is `rows x min(rows, cols)`, `v` is `cols x cols`, and
/// `sigma` is non-increasing.
struct Svd {
    u: Matrix<f64>,
    sigma: Vec<f64>,
    v: Matrix<f64>,
}

fn svd(m: &Matrix<f64>) -> Svd {
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    let s = to_faer(m).svd().expect("SVD of a finite matrix converges");
    let (u, d, v) = (s.U(), s.S(), s.V());
    Svd {
        u: Matrix::from_fn(rows, p, |i, k| u[(i, k)]),
        sigma: (0..p).map(|k| d[k]).collect(),
        v: Matrix::from_fn(cols, cols, |i, k| v[(i, k)]),
    }
}

fn numerical_rank(sigma: &[f64], scale: Option<f64>, tol: &Tolerance) -> usize {
    let top = scale.unwrap_or_else(|| sigma.first().copied().unwrap_or(0.0));
    let cutoff = tol.rank_cutoff(top);
    sigma.iter().take_while(|&&s| s > cutoff && s > 0.0).count()
}

pub fn spectral_norm(m: &Matrix<f64>) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    svd(m).sigma.first().copied().unwrap_or(0.0)
}

/// Orthonormal basis of the column span from the leading left singular vectors.
pub fn range_basis(m: &Matrix<f64>, scale: Option<f64>, tol: &Tolerance) -> Matrix<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Matrix::zeros(m.rows(), 0);
    }
    let s = svd(m);
    let r = numerical_rank(&s.sigma, scale, tol);
    Matrix::from_fn(m.rows(), r, |i, j| s.u[(i, j)])
}

/// Orthonormal basis of the null space from the trailing right singular vectors.
pub fn kernel_basis(m: &Matrix<f64>, scale: Option<f64>, tol: &Tolerance) -> Matrix<f64> {
    let n = m.cols();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    if m.rows() == 0 {
        return Matrix::identity(n);
    }
    let s = svd(m);
    let r = numerical_rank(&s.sigma, scale, tol);
    Matrix::from_fn(n, n - r, |i, j| s.v[(i, r + j)])
}

pub fn pinv(m: &Matrix<f64>, tol: &Tolerance) -> Matrix<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Matrix::zeros(cols, rows);
    }
    let s = svd(m);
    let r = numerical_rank(&s.sigma, None, tol);
    Matrix::from_fn(cols, rows, |i, j| {
        (0..r).map(|k| s.v[(i, k)] * s.u[(j, k)] / s.sigma[k]).sum()
    })
}

/// Eigen-decomposition of the symmetric part of `m`, eigenvalues ascending.
pub fn symmetric_eigen(m: &Matrix<f64>) -> (Vec<f64>, Matrix<f64>) {
    let n = m.rows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let sym = Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let e = sym
        .self_adjoint_eigen(Side::Lower)
        .expect("eigendecomposition of a finite symmetric matrix converges");
    let (values, vectors) = (e.S(), e.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    let sorted = order.iter().map(|&k| values[k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, k| vectors[(i, order[k])]);
    (sorted, vectors)
}

pub fn min_eigenvalue(m: &Matrix<f64>) -> f64 {
    symmetric_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// Clamped spectral data of a symmetric PSD matrix: eigenvectors and the
/// square roots of the eigenvalues, with eigenvalues at or below the rank
/// cutoff set to zero.
pub struct PsdRoot {
    pub vectors: Matrix<f64>,
    pub roots: Vec<f64>,
}

impl PsdRoot {
    pub fn new(m: &Matrix<f64>, tol: &Tolerance) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "square root of a non-square {}x{} matrix",
                m.rows(),
                m.cols()
            )));
        }
        let (values, vectors) = symmetric_eigen(m);
        let top = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let cutoff = tol.rank_cutoff(top);
        if let Some(&lo) = values.first() {
            if lo < -cutoff {
                return Err(Error::NotPsd(lo));
            }
        }
        let roots = values
            .iter()
            .map(|&v| if v > cutoff { v.sqrt() } else { 0.0 })
            .collect();
        Ok(PsdRoot { vectors, roots })
    }

    fn assemble(&self, f: impl Fn(f64) -> f64) -> Matrix<f64> {
        let n = self.roots.len();
        Matrix::from_fn(n, n, |i, j| {
            (0..n)
                .filter(|&k| self.roots[k] > 0.0)
                .map(|k| self.vectors[(i, k)] * f(self.roots[k]) * self.vectors[(j, k)])
                .sum()
        })
    }

    pub fn sqrt(&self) -> Matrix<f64> {
        self.assemble(|r| r)
    }

    /// Pseudoinverse of the square root, `(M^{1/2})^+`.
    pub fn pinv_sqrt(&self) -> Matrix<f64> {
        self.assemble(|r| 1.0 / r)
    }

    /// Projection onto the range of `M`.
    pub fn support_projection(&self) -> Matrix<f64> {
        self.assemble(|_| 1.0)
    }

    pub fn rank(&self) -> usize {
        self.roots.iter().filter(|&&r| r > 0.0).count()
    }
}

/// Polar decomposition `M = W S` from one SVD of `M`. A singular value
/// counts as zero when its square is within the rank cutoff of `M*M`, the
/// same rule [`PsdRoot`] applies to the eigenvalues of `M*M`.
pub fn polar(m: &Matrix<f64>, tol: &Tolerance) -> (Matrix<f64>, Matrix<f64>) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (Matrix::zeros(rows, cols), Matrix::zeros(cols, cols));
    }
    let s = svd(m);
    let cutoff = tol.rank_cutoff(s.sigma[0] * s.sigma[0]);
    let r = s
        .sigma
        .iter()
        .take_while(|&&x| x > 0.0 && x * x > cutoff)
        .count();
    let w = Matrix::from_fn(rows, cols, |i, j| {
        (0..r).map(|k| s.u[(i, k)] * s.v[(j, k)]).sum()
    });
    let root = Matrix::from_fn(cols, cols, |i, j| {
        (0..r).map(|k| s.v[(i, k)] * s.sigma[k] * s.v[(j, k)]).sum()
    });
    (w, root)
}

pub fn psd_sqrt(m: &Matrix<f64>, tol: &Tolerance) -> Result<Matrix<f64>> {
    Ok(PsdRoot::new(m, tol)?.sqrt())
}
