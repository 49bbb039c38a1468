//! Pairs of operators `A: E -> H`, `B: E -> K` with a shared domain, the
//! column/row calculus, reduction, normalization, and the canonical
//! contractions `C_A`, `C_B` with `A = C_A S`, `B = C_B S`,
//! `S = (A*A + B*B)^{1/2}`.

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{self, Field, Matrix, Mode, Subspace, Tolerance};
use crate::linrel::LinearRelation;

/// Column operator `c(A, B) f = (Af, Bf)`.
pub fn column<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Result<Matrix<F>> {
    a.vstack(b)
}

/// Row operator `r(A, B)(h, k) = Ah + Bk`.
pub fn row<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Result<Matrix<F>> {
    a.hstack(b)
}

#[derive(Clone)]
pub struct OperatorPair<F> {
    a: Matrix<F>,
    b: Matrix<F>,
    gram: Matrix<F>,
}

impl<F: Field> OperatorPair<F> {
    pub fn new(a: Matrix<F>, b: Matrix<F>) -> Result<Self> {
        if a.cols() != b.cols() {
            return Err(dim_mismatch(format!(
                "A is {}x{} and B is {}x{}; domains differ",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        let gram = &a.gram() + &b.gram();
        Ok(OperatorPair { a, b, gram })
    }

    pub fn a(&self) -> &Matrix<F> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<F> {
        &self.b
    }

    /// `A*A + B*B`, computed once at construction.
    pub fn gram(&self) -> &Matrix<F> {
        &self.gram
    }

    pub fn dim_e(&self) -> usize {
        self.a.cols()
    }

    pub fn dim_h(&self) -> usize {
        self.a.rows()
    }

    pub fn dim_k(&self) -> usize {
        self.b.rows()
    }

    pub fn column(&self) -> Matrix<F> {
        column(&self.a, &self.b).expect("validated at construction")
    }

    pub fn relation(&self, tol: &Tolerance) -> LinearRelation<F> {
        LinearRelation::from_pair(&self.a, &self.b, tol).expect("validated at construction")
    }

    /// `ker A ∩ ker B`, equal to `ker(A*A + B*B)`.
    pub fn redundant_subspace(&self, tol: &Tolerance) -> Subspace<F> {
        Subspace::kernel(&self.gram, tol)
    }

    /// Restriction to `ran(A*A + B*B)`, the orthogonal complement of the
    /// redundant subspace `ker A ∩ ker B`.
    pub fn reduce(&self, tol: &Tolerance) -> ReducedPair<F> {
        let support = Subspace::range(&self.gram, tol);
        let embedding = support.basis().clone();
        let pair =
            OperatorPair::new(&self.a * &embedding, &self.b * &embedding).expect("same domain");
        ReducedPair {
            pair,
            embedding,
            redundant: self.redundant_subspace(tol),
        }
    }

    fn psd_root(&self, m: &Matrix<F>, tol: &Tolerance) -> Result<Matrix<F>> {
        linalg::psd_sqrt(m, tol)
    }

    /// Normalized representative `(A0 G^{-1/2}, B0 G^{-1/2})` of the same
    /// relation, with `G` the Gram matrix of the reduced pair.
    pub fn normalize(&self, tol: &Tolerance) -> Result<OperatorPair<F>> {
        if F::MODE == Mode::Exact {
            return Err(Error::ExactModeUnsupported(
                "normalization needs an inverse square root",
            ));
        }
        let reduced = self.reduce(tol).pair;
        let root = self.psd_root(reduced.gram(), tol)?;
        let inv_root = F::pinv(&root, tol);
        OperatorPair::new(&reduced.a * &inv_root, &reduced.b * &inv_root)
    }

    fn q_defect(&self) -> f64 {
        let q = &self.gram;
        let idem = (&(q * q) - q).max_abs();
        let sym = (q - &q.adjoint()).max_abs();
        idem.max(sym)
    }

    fn require_q_normalized(&self, tol: &Tolerance) -> Result<()> {
        let q = &self.gram;
        if F::approx_eq(&(q * q), q, tol) && F::approx_eq(q, &q.adjoint(), tol) {
            Ok(())
        } else {
            Err(Error::NotQNormalized(self.q_defect()))
        }
    }

    /// Whether `A*A + B*B` is the identity on `E`.
    pub fn is_normalized(&self, tol: &Tolerance) -> bool {
        F::approx_eq(&self.gram, &Matrix::identity(self.dim_e()), tol)
    }

    /// Projection of `H x K` onto `L(A, B)` when `A*A + B*B` is a projection:
    /// `[[AA*, AB*], [BA*, BB*]]`.
    pub fn graph_projection(&self, tol: &Tolerance) -> Result<Matrix<F>> {
        self.require_q_normalized(tol)?;
        let (a, b) = (&self.a, &self.b);
        let (at, bt) = (a.adjoint(), b.adjoint());
        Matrix::block(&(a * &at), &(a * &bt), &(b * &at), &(b * &bt))
    }

    /// Projection of `K x H` onto `L(A, B)*` when `A*A + B*B` is a projection:
    /// `[[I - BB*, BA*], [AB*, I - AA*]]`.
    pub fn adjoint_graph_projection(&self, tol: &Tolerance) -> Result<Matrix<F>> {
        self.require_q_normalized(tol)?;
        let (a, b) = (&self.a, &self.b);
        let (at, bt) = (a.adjoint(), b.adjoint());
        Matrix::block(
            &(&Matrix::identity(self.dim_k()) - &(b * &bt)),
            &(b * &at),
            &(a * &bt),
            &(&Matrix::identity(self.dim_h()) - &(a * &at)),
        )
    }

    /// `L(A, B)*` as the span of the columns of the block operator
    /// `[[I - BB*, BA*], [AB*, I - AA*]]`. Meaningful when `A*A + B*B` is a
    /// projection; no check is made.
    pub fn adjoint_from_blocks(&self, tol: &Tolerance) -> LinearRelation<F> {
        let (a, b) = (&self.a, &self.b);
        let (at, bt) = (a.adjoint(), b.adjoint());
        let blocks = Matrix::block(
            &(&Matrix::identity(self.dim_k()) - &(b * &bt)),
            &(b * &at),
            &(a * &bt),
            &(&Matrix::identity(self.dim_h()) - &(a * &at)),
        )
        .expect("conformal blocks");
        // the blocks form a projection, so rank is judged against norm 1
        LinearRelation::from_graph(
            self.dim_k(),
            self.dim_h(),
            Subspace::range_scaled(&blocks, 1.0, tol),
        )
        .expect("K x H ambient")
    }

    /// `C_A = A S^+`, `C_B = B S^+`. The pseudoinverse makes both vanish on
    /// `ker S = ker A ∩ ker B`, which singles out the unique pair. Computed
    /// as the polar factor of `c(A, B)`, which avoids squaring its condition
    /// number through `A*A + B*B`.
    pub fn canonical_contractions(&self, tol: &Tolerance) -> Result<CanonicalPair<F>> {
        let (w, s) = F::polar(&self.column(), tol)?;
        let (m, n) = (self.dim_h(), self.dim_e());
        Ok(CanonicalPair {
            c_a: w.submatrix(0..m, 0..n),
            c_b: w.submatrix(m..m + self.dim_k(), 0..n),
            s,
            parent: self.clone(),
        })
    }

    /// Closure of `L(A, B)`: `L(C_A, C_B)` in float mode. Exact mode returns
    /// `L(A, B)` itself, which is already closed.
    pub fn closure(&self, tol: &Tolerance) -> Result<LinearRelation<F>> {
        match F::MODE {
            Mode::Exact => Ok(self.relation(tol)),
            Mode::Float => {
                let cp = self.canonical_contractions(tol)?;
                LinearRelation::from_pair(&cp.c_a, &cp.c_b, tol)
            }
        }
    }

    /// Parametrization of `L(A, B)*` for a normalized pair:
    /// `{((I - BB*)^{1/2} k, V_A B* k + P_{ker A*} h)}`, where `V_A` is the
    /// partial isometry in the polar decomposition of `A`.
    pub fn adjoint_param_representation(&self, tol: &Tolerance) -> Result<AdjointParams<F>> {
        if F::MODE == Mode::Exact {
            return Err(Error::ExactModeUnsupported(
                "parametrization uses square roots",
            ));
        }
        if !self.is_normalized(tol) {
            let defect = (&self.gram - &Matrix::identity(self.dim_e())).max_abs();
            return Err(Error::NotNormalized(defect));
        }
        let bbt = &self.b * &self.b.adjoint();
        let first = self.psd_root(&(&Matrix::identity(self.dim_k()) - &bbt), tol)?;
        let abs_a = self.psd_root(&self.a.gram(), tol)?;
        let v_a = &self.a * &F::pinv(&abs_a, tol);
        let second = &v_a * &self.b.adjoint();
        let ker_a_adj = Subspace::kernel(&self.a.adjoint(), tol);
        Ok(AdjointParams {
            first,
            second,
            v_a,
            ker_a_adjoint: ker_a_adj,
        })
    }
}

impl<F: Field> std::fmt::Debug for OperatorPair<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorPair")
            .field("a", &self.a)
            .field("b", &self.b)
            .finish()
    }
}

/// Result of [`OperatorPair::reduce`].
#[derive(Clone, Debug)]
pub struct ReducedPair<F: Field> {
    /// `(A0, B0)`: `A` and `B` composed with `embedding`.
    pub pair: OperatorPair<F>,
    /// Basis of `ran(A*A + B*B)` as columns (orthonormal in float mode).
    pub embedding: Matrix<F>,
    /// `ker A ∩ ker B`.
    pub redundant: Subspace<F>,
}

/// The canonical contractions of a pair.
#[derive(Clone, Debug)]
pub struct CanonicalPair<F: Field> {
    pub c_a: Matrix<F>,
    pub c_b: Matrix<F>,
    /// `S = (A*A + B*B)^{1/2}`.
    pub s: Matrix<F>,
    pub parent: OperatorPair<F>,
}

impl<F: Field> CanonicalPair<F> {
    pub fn column(&self) -> Matrix<F> {
        column(&self.c_a, &self.c_b).expect("shared domain")
    }

    pub fn as_pair(&self) -> OperatorPair<F> {
        OperatorPair::new(self.c_a.clone(), self.c_b.clone()).expect("shared domain")
    }

    /// `C_A* C_A + C_B* C_B`.
    pub fn gram(&self) -> Matrix<F> {
        &self.c_a.gram() + &self.c_b.gram()
    }

    /// Projection onto `ran(A*A + B*B)`.
    pub fn support_projection(&self, tol: &Tolerance) -> Matrix<F> {
        Subspace::range(self.parent.gram(), tol).projection()
    }

    /// `c(C_A, C_B)` is a partial isometry with initial space
    /// `ran(A*A + B*B)` and final space `ran c(A, B)`.
    pub fn check_polar(&self, tol: &Tolerance) -> bool {
        let m = self.column();
        let initial_ok = F::approx_eq(&m.gram(), &self.support_projection(tol), tol);
        let final_ok =
            Subspace::range(&m, tol).same_as(&Subspace::range(&self.parent.column(), tol), tol);
        initial_ok && final_ok
    }

    /// `C_A S = A` and `C_B S = B`.
    pub fn reproduces_parent(&self, tol: &Tolerance) -> bool {
        F::approx_eq(&(&self.c_a * &self.s), self.parent.a(), tol)
            && F::approx_eq(&(&self.c_b * &self.s), self.parent.b(), tol)
    }

    /// `C_B C_A^+` restricted to `ran C_A`, as the relation
    /// `{(C_A f, C_B f) : f in (ker C_A)^perp}`.
    pub fn closure_operator_part(&self, tol: &Tolerance) -> LinearRelation<F> {
        let coimage = Subspace::range(&self.c_a.adjoint(), tol).projection();
        LinearRelation::from_pair(&(&self.c_a * &coimage), &(&self.c_b * &coimage), tol)
            .expect("shared domain")
    }

    /// Matrix `C_B C_A^+`.
    pub fn quotient(&self, tol: &Tolerance) -> Matrix<F> {
        &self.c_b * &F::pinv(&self.c_a, tol)
    }
}

/// Pieces of the parametrization of the adjoint of a normalized pair.
#[derive(Clone, Debug)]
pub struct AdjointParams<F: Field> {
    /// `(I - BB*)^{1/2}` on `K`.
    pub first: Matrix<F>,
    /// `V_A B*` from `K` to `H`.
    pub second: Matrix<F>,
    /// Partial isometry of the polar decomposition of `A`.
    pub v_a: Matrix<F>,
    /// `ker A*` inside `H`.
    pub ker_a_adjoint: Subspace<F>,
}

impl<F: Field> AdjointParams<F> {
    fn summands(&self) -> (Matrix<F>, Matrix<F>) {
        let dim_k = self.first.rows();
        let dim_h = self.second.rows();
        let from_k = self.first.vstack(&self.second).expect("shared columns");
        let from_h = Matrix::zeros(dim_k, dim_h)
            .vstack(&self.ker_a_adjoint.projection())
            .expect("shared columns");
        (from_k, from_h)
    }

    /// The relation `{((I - BB*)^{1/2} k, V_A B* k + P_{ker A*} h)}` in `K x H`.
    pub fn assemble(&self, tol: &Tolerance) -> LinearRelation<F> {
        let (from_k, from_h) = self.summands();
        let gens = from_k.hstack(&from_h).expect("shared rows");
        LinearRelation::from_graph(
            self.first.rows(),
            self.second.rows(),
            Subspace::range(&gens, tol),
        )
        .expect("K x H ambient")
    }

    /// The `k`-summand and the `h`-summand of the parametrization are orthogonal.
    pub fn summands_orthogonal(&self, tol: &Tolerance) -> bool {
        let (from_k, from_h) = self.summands();
        let cross = &from_k.adjoint() * &from_h;
        F::approx_eq(&cross, &Matrix::zeros(cross.rows(), cross.cols()), tol)
    }
}

/// The parametrization above applied to the canonical contractions of the
/// reduced pair, which form a normalized pair.
pub fn canonical_adjoint_params<F: Field>(
    p: &OperatorPair<F>,
    tol: &Tolerance,
) -> Result<AdjointParams<F>> {
    let reduced = p.reduce(tol).pair;
    reduced
        .canonical_contractions(tol)?
        .as_pair()
        .adjoint_param_representation(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rational, Rational};

    type Q = Rational;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn f(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_f64_rows(rows)
    }

    #[test]
    fn column_and_row_shapes() {
        let a = Matrix::<Q>::from_i64(&[&[2]]);
        let b = Matrix::<Q>::from_i64(&[&[5]]);
        assert_eq!(column(&a, &b).unwrap(), Matrix::from_i64(&[&[2], &[5]]));
        assert_eq!(row(&a, &b).unwrap(), Matrix::from_i64(&[&[2, 5]]));
        assert!(column(&Matrix::<Q>::zeros(1, 2), &b).is_err());
        assert!(row(&Matrix::<Q>::zeros(2, 1), &b).is_err());
        assert!(OperatorPair::new(Matrix::<Q>::zeros(1, 2), b).is_err());
    }

    #[test]
    fn reduce_removes_common_kernel() {
        let p = OperatorPair::new(
            Matrix::<Q>::from_i64(&[&[1, 0]]),
            Matrix::from_i64(&[&[0, 0]]),
        )
        .unwrap();
        let r = p.reduce(&tol());
        assert_eq!(
            r.redundant,
            Subspace::span(&Matrix::from_i64(&[&[0], &[1]]), &tol())
        );
        assert_eq!(r.pair.a(), &Matrix::from_i64(&[&[1]]));
        assert_eq!(r.pair.b(), &Matrix::from_i64(&[&[0]]));
        assert_eq!(r.pair.relation(&tol()), p.relation(&tol()));
    }

    #[test]
    fn reduce_zero_pair() {
        let p = OperatorPair::new(Matrix::<Q>::zeros(2, 3), Matrix::zeros(1, 3)).unwrap();
        let r = p.reduce(&tol());
        assert_eq!(r.pair.dim_e(), 0);
        assert_eq!(r.redundant.rank(), 3);
    }

    #[test]
    fn normalize_scalar() {
        let p = OperatorPair::new(f(&[&[2.0]]), f(&[&[0.0]])).unwrap();
        let n = p.normalize(&tol()).unwrap();
        assert!((n.a()[(0, 0)] - 1.0).abs() < 1e-14);
        assert_eq!(n.b()[(0, 0)], 0.0);
        let exact = OperatorPair::new(Matrix::<Q>::identity(1), Matrix::zeros(1, 1)).unwrap();
        assert!(matches!(
            exact.normalize(&tol()),
            Err(Error::ExactModeUnsupported(_))
        ));
    }

    #[test]
    fn graph_projection_of_balanced_scalar_pair() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = OperatorPair::new(f(&[&[h]]), f(&[&[h]])).unwrap();
        let proj = p.graph_projection(&tol()).unwrap();
        assert!((&proj - &Matrix::from_fn(2, 2, |_, _| 0.5)).max_abs() < 1e-15);
        let adj = p.adjoint_graph_projection(&tol()).unwrap();
        assert!((&adj - &Matrix::from_fn(2, 2, |_, _| 0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn graph_projection_requires_projection_gram() {
        let p = OperatorPair::new(Matrix::<Q>::from_i64(&[&[2]]), Matrix::zeros(1, 1)).unwrap();
        assert!(matches!(
            p.graph_projection(&tol()),
            Err(Error::NotQNormalized(_))
        ));
    }

    #[test]
    fn graph_projection_of_zero_operator() {
        let p = OperatorPair::new(Matrix::<Q>::identity(2), Matrix::zeros(2, 2)).unwrap();
        let proj = p.graph_projection(&tol()).unwrap();
        assert_eq!(
            proj,
            Matrix::block_diag(&Matrix::identity(2), &Matrix::zeros(2, 2))
        );
        let adj = p.adjoint_graph_projection(&tol()).unwrap();
        assert_eq!(
            adj,
            Matrix::block_diag(&Matrix::identity(2), &Matrix::zeros(2, 2))
        );
    }

    #[test]
    fn scalar_canonical_contractions() {
        let p = OperatorPair::new(f(&[&[1.0]]), f(&[&[1.0]])).unwrap();
        let cp = p.canonical_contractions(&tol()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((cp.s[(0, 0)] - 2f64.sqrt()).abs() < 1e-14);
        assert!((cp.c_a[(0, 0)] - h).abs() < 1e-14);
        assert!((cp.c_b[(0, 0)] - h).abs() < 1e-14);
        assert!((cp.gram()[(0, 0)] - 1.0).abs() < 1e-14);
        assert!(cp.check_polar(&tol()));
    }

    #[test]
    fn canonical_contractions_of_zero_pair() {
        let p = OperatorPair::new(Matrix::<f64>::zeros(2, 2), Matrix::zeros(1, 2)).unwrap();
        let cp = p.canonical_contractions(&tol()).unwrap();
        assert!(cp.c_a.is_zero() && cp.c_b.is_zero());
        assert!(cp.check_polar(&tol()));
    }

    #[test]
    fn canonical_contractions_need_float() {
        let p = OperatorPair::new(Matrix::<Q>::identity(1), Matrix::identity(1)).unwrap();
        assert!(matches!(
            p.canonical_contractions(&tol()),
            Err(Error::ExactModeUnsupported(_))
        ));
        // exact closure is the relation itself
        assert_eq!(p.closure(&tol()).unwrap(), p.relation(&tol()));
    }

    #[test]
    fn adjoint_params_for_identity_and_zero() {
        let p = OperatorPair::new(Matrix::<f64>::identity(2), Matrix::zeros(3, 2)).unwrap();
        let params = p.adjoint_param_representation(&tol()).unwrap();
        assert!((&params.first - &Matrix::identity(3)).max_abs() < 1e-14);
        assert!(params.second.max_abs() < 1e-14);
        assert!(params.ker_a_adjoint.is_zero());
        assert!(params.summands_orthogonal(&tol()));
        let unnormalized = OperatorPair::new(f(&[&[2.0]]), f(&[&[0.0]])).unwrap();
        assert!(matches!(
            unnormalized.adjoint_param_representation(&tol()),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn exact_pythagorean_pair_is_normalized() {
        let a = Matrix::<Q>::identity(2).scale(&rational(3, 5));
        let b = Matrix::<Q>::identity(2).scale(&rational(4, 5));
        let p = OperatorPair::new(a, b).unwrap();
        assert!(p.is_normalized(&tol()));
        let proj = p.graph_projection(&tol()).unwrap();
        assert_eq!(proj, p.relation(&tol()).graph().projection());
    }
}
