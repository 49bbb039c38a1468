//! Exact rational kernels: Gauss-Jordan elimination, full-rank factorization,
//! and the pivoted LDL^T positive semidefiniteness test.

use num_bigint::BigInt;

use super::field::{Field, Rational};
use super::matrix::Matrix;

type Q = Rational;

/// Reduced row echelon form and its pivot columns.
pub fn rref(m: &Matrix<Q>) -> (Matrix<Q>, Vec<usize>) {
    let (rows, cols) = m.shape();
    let mut a = m.row_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = Q::one() / a[r][c].clone();
        for x in a[r].iter_mut().skip(c) {
            *x = x.clone() * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x -= &(factor.clone() * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let out = Matrix::from_rows(a).unwrap_or_else(|_| Matrix::zeros(rows, cols));
    (
        if rows == 0 {
            Matrix::zeros(0, cols)
        } else {
            out
        },
        pivots,
    )
}

pub fn rank(m: &Matrix<Q>) -> usize {
    rref(m).1.len()
}

/// Reduced column echelon basis of the column span: the transpose of the
/// nonzero rows of `rref(m^T)`. Unique for each subspace.
pub fn column_echelon_basis(m: &Matrix<Q>) -> Matrix<Q> {
    let (r, pivots) = rref(&m.adjoint());
    let k = pivots.len();
    Matrix::from_fn(m.rows(), k, |i, j| r[(j, i)].clone())
}

/// Canonical basis of the null space.
pub fn null_space(m: &Matrix<Q>) -> Matrix<Q> {
    let n = m.cols();
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let raw = Matrix::from_fn(n, free.len(), |i, j| {
        let f = free[j];
        if i == f {
            Q::one()
        } else if let Some(row) = pivots.iter().position(|&p| p == i) {
            -r[(row, f)].clone()
        } else {
            Q::zero()
        }
    });
    column_echelon_basis(&raw)
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(m: &Matrix<Q>) -> Option<Matrix<Q>> {
    let n = m.rows();
    if !m.is_square() {
        return None;
    }
    let aug = m.hstack(&Matrix::identity(n)).ok()?;
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(r.submatrix(0..n, n..2 * n))
}

/// Moore-Penrose inverse via the full-rank factorization `M = F G`, with `F`
/// the canonical column basis and `G` the rows of `M` at the pivot rows of `F`.
pub fn pinv(m: &Matrix<Q>) -> Matrix<Q> {
    let f = column_echelon_basis(m);
    let k = f.cols();
    if k == 0 {
        return Matrix::zeros(m.cols(), m.rows());
    }
    // column j of the reduced column echelon basis has a unit at its pivot row
    // and zeros at the other pivot rows, so M = F * M[pivot rows, :]
    let pivot_rows: Vec<usize> = (0..k)
        .map(|j| {
            (0..f.rows())
                .find(|&i| !f[(i, j)].is_zero())
                .expect("nonzero basis column")
        })
        .collect();
    let g = m.select_rows(&pivot_rows);
    let gt = g.adjoint();
    let ft = f.adjoint();
    let ggt_inv = inverse(&(&g * &gt)).expect("G has full row rank");
    let ftf_inv = inverse(&(&ft * &f)).expect("F has full column rank");
    &(&(&gt * &ggt_inv) * &ftf_inv) * &ft
}

/// `B (B^T B)^{-1} B^T` for a full-column-rank basis `B`.
pub fn projection(basis: &Matrix<Q>) -> Matrix<Q> {
    let n = basis.rows();
    if basis.cols() == 0 {
        return Matrix::zeros(n, n);
    }
    let bt = basis.adjoint();
    let inv = inverse(&(&bt * basis)).expect("basis has full column rank");
    &(basis * &inv) * &bt
}

/// Symmetric PSD test by LDL^T with diagonal pivoting.
///
/// At each step a positive diagonal entry is eliminated; a negative diagonal
/// entry, or a zero diagonal whose row is not zero, certifies indefiniteness.
pub fn is_psd_ldlt(m: &Matrix<Q>) -> bool {
    ldlt_pivots(m).is_some()
}

/// Positive pivots of the pivoted LDL^T factorization of a symmetric PSD
/// matrix, `None` if the matrix is not symmetric PSD. Their number is the
/// rank and their product a principal minor of that order.
pub fn ldlt_pivots(m: &Matrix<Q>) -> Option<Vec<Q>> {
    if !m.is_symmetric() {
        return None;
    }
    let n = m.rows();
    let mut a = m.row_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    while !active.is_empty() {
        if active.iter().any(|&i| a[i][i].is_negative()) {
            return None;
        }
        let Some(pos) = active.iter().position(|&i| !a[i][i].is_zero()) else {
            // all remaining diagonal entries vanish: the block must be zero
            let zero_block = active
                .iter()
                .all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
            return zero_block.then_some(pivots);
        };
        let p = active.swap_remove(pos);
        let d = a[p][p].clone();
        let col: Vec<(usize, Q)> = active
            .iter()
            .filter(|&&i| !a[i][p].is_zero())
            .map(|&i| (i, a[i][p].clone() / d.clone()))
            .collect();
        for &(i, ref li) in &col {
            for &(j, _) in &col {
                let update = li.clone() * &a[p][j];
                a[i][j] -= &update;
            }
        }
        pivots.push(d);
    }
    Some(pivots)
}

/// Lower bound for the smallest nonzero eigenvalue of a symmetric PSD
/// matrix `M` of rank `r`: `prod(pivots) * ((r - 1) / tr M)^(r - 1)`.
///
/// The pivot product is a principal minor of order `r`, hence at most the
/// product of the `r` nonzero eigenvalues; the other `r - 1` of them have
/// product at most `(tr M / (r - 1))^(r - 1)`.
pub fn positive_spectrum_floor(m: &Matrix<Q>) -> Option<Q> {
    let pivots = ldlt_pivots(m)?;
    let r = pivots.len();
    if r == 0 {
        return None;
    }
    let minor = pivots.into_iter().fold(Q::one(), |acc, d| acc * d);
    if r == 1 {
        return Some(minor);
    }
    let others = Q::from_integer(BigInt::from(r - 1)) / m.trace();
    Some(minor * num_traits::pow(others, r - 1))
}
