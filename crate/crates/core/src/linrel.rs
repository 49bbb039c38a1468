//! Linear relations as graph subspaces of `H x K`, and operator ranges with
//! their intrinsic inner product.

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{Field, Matrix, Subspace, Tolerance};

/// A linear subspace of `H x K`, with the `H` coordinates stacked above the
/// `K` coordinates. In finite dimensions every relation is closed.
#[derive(Clone, PartialEq)]
pub struct LinearRelation<F> {
    dim_h: usize,
    dim_k: usize,
    graph: Subspace<F>,
}

impl<F: Field> LinearRelation<F> {
    pub fn from_graph(dim_h: usize, dim_k: usize, graph: Subspace<F>) -> Result<Self> {
        if graph.ambient_dim() != dim_h + dim_k {
            return Err(dim_mismatch(format!(
                "graph in F^{} for a relation from F^{dim_h} to F^{dim_k}",
                graph.ambient_dim()
            )));
        }
        Ok(LinearRelation {
            dim_h,
            dim_k,
            graph,
        })
    }

    /// `L(A, B) = {(Af, Bf) : f in E}`, the range of the column operator.
    pub fn from_pair(a: &Matrix<F>, b: &Matrix<F>, tol: &Tolerance) -> Result<Self> {
        if a.cols() != b.cols() {
            return Err(dim_mismatch(format!(
                "A is {}x{} and B is {}x{}; domains differ",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        let column = a.vstack(b)?;
        Ok(LinearRelation {
            dim_h: a.rows(),
            dim_k: b.rows(),
            graph: Subspace::range(&column, tol),
        })
    }

    /// Graph of an everywhere defined operator.
    pub fn graph_of(m: &Matrix<F>, tol: &Tolerance) -> Self {
        Self::from_pair(&Matrix::identity(m.cols()), m, tol).expect("identity matches domain")
    }

    /// The relation `dom x ran` (a product of subspaces).
    pub fn product(dom: &Subspace<F>, ran: &Subspace<F>) -> Self {
        LinearRelation {
            dim_h: dom.ambient_dim(),
            dim_k: ran.ambient_dim(),
            graph: dom.product(ran),
        }
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn graph(&self) -> &Subspace<F> {
        &self.graph
    }

    /// The two blocks of the canonical graph basis; `from_pair` of the result
    /// reproduces this relation.
    pub fn to_pair(&self) -> (Matrix<F>, Matrix<F>) {
        let basis = self.graph.basis();
        let r = basis.cols();
        (
            basis.submatrix(0..self.dim_h, 0..r),
            basis.submatrix(self.dim_h..self.dim_h + self.dim_k, 0..r),
        )
    }

    pub fn dom(&self, tol: &Tolerance) -> Subspace<F> {
        unit_span(&self.to_pair().0, tol)
    }

    pub fn ran(&self, tol: &Tolerance) -> Subspace<F> {
        unit_span(&self.to_pair().1, tol)
    }

    /// `{h : (h, 0) in T}`, read off `T ∩ (H x {0})`.
    pub fn ker(&self, tol: &Tolerance) -> Subspace<F> {
        let axis = Subspace::full(self.dim_h).product(&Subspace::zero(self.dim_k));
        let meet = self
            .graph
            .intersect(&axis, tol)
            .expect("same ambient space");
        let b = meet.basis();
        unit_span(&b.submatrix(0..self.dim_h, 0..b.cols()), tol)
    }

    /// `{k : (0, k) in T}`, read off `T ∩ ({0} x K)`.
    pub fn mul(&self, tol: &Tolerance) -> Subspace<F> {
        let axis = Subspace::zero(self.dim_h).product(&Subspace::full(self.dim_k));
        let meet = self
            .graph
            .intersect(&axis, tol)
            .expect("same ambient space");
        let b = meet.basis();
        unit_span(
            &b.submatrix(self.dim_h..self.dim_h + self.dim_k, 0..b.cols()),
            tol,
        )
    }

    pub fn is_operator(&self, tol: &Tolerance) -> bool {
        self.mul(tol).is_zero()
    }

    /// Always true: a subspace of a finite-dimensional space is closed.
    pub fn is_closed(&self) -> bool {
        true
    }

    /// The flip `J(f, g) = (g, -f)` from `H x K` to `K x H`.
    pub fn flip_matrix(dim_h: usize, dim_k: usize) -> Matrix<F> {
        Matrix::block(
            &Matrix::zeros(dim_k, dim_h),
            &Matrix::identity(dim_k),
            &(-&Matrix::identity(dim_h)),
            &Matrix::zeros(dim_h, dim_k),
        )
        .expect("blocks are conformal")
    }

    /// Adjoint relation `T* = (J T)^perp`, a relation from `K` to `H`.
    pub fn adjoint(&self, tol: &Tolerance) -> Self {
        let j = Self::flip_matrix(self.dim_h, self.dim_k);
        let flipped = Subspace::image(&j, &self.graph, tol).expect("J acts on H x K");
        LinearRelation {
            dim_h: self.dim_k,
            dim_k: self.dim_h,
            graph: flipped.orthogonal_complement(tol),
        }
    }

    /// Orthogonal operator part `{(f, (I - P_mul) g) : (f, g) in T}`.
    pub fn operator_part(&self, tol: &Tolerance) -> Self {
        let (top, bottom) = self.to_pair();
        let proj = self.mul(tol).complement_projection();
        let column = top
            .vstack(&(&proj * &bottom))
            .expect("blocks share columns");
        LinearRelation {
            dim_h: self.dim_h,
            dim_k: self.dim_k,
            graph: unit_span(&column, tol),
        }
    }

    /// `{(f, P g) : (f, g) in T}` for an operator `P` on `K`.
    pub fn map_k(&self, p: &Matrix<F>, tol: &Tolerance) -> Result<Self> {
        if !p.is_square() || p.rows() != self.dim_k {
            return Err(dim_mismatch("map on K must be square of side dim K"));
        }
        let block = Matrix::block_diag(&Matrix::identity(self.dim_h), p);
        Ok(LinearRelation {
            dim_h: self.dim_h,
            dim_k: self.dim_k,
            graph: Subspace::image(&block, &self.graph, tol)?,
        })
    }

    /// Matrix of an operator relation, extended by zero off its domain.
    /// `None` when the relation has a nontrivial multivalued part.
    pub fn operator_matrix(&self, tol: &Tolerance) -> Option<Matrix<F>> {
        if !self.is_operator(tol) {
            return None;
        }
        let (top, bottom) = self.to_pair();
        Some(&bottom * &F::pinv(&top, tol))
    }

    pub fn contains(&self, other: &Self, tol: &Tolerance) -> Result<bool> {
        self.check_shape(other)?;
        other.graph.is_subspace_of(&self.graph, tol)
    }

    pub fn same_as(&self, other: &Self, tol: &Tolerance) -> bool {
        self.dim_h == other.dim_h
            && self.dim_k == other.dim_k
            && self.graph.same_as(&other.graph, tol)
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.dim_h != other.dim_h || self.dim_k != other.dim_k {
            return Err(dim_mismatch(format!(
                "relations F^{} -> F^{} and F^{} -> F^{}",
                self.dim_h, self.dim_k, other.dim_h, other.dim_k
            )));
        }
        Ok(())
    }
}

/// Span of vectors cut out of an orthonormal basis: float rank is judged
/// against 1, not against the (possibly tiny) norm of the block.
fn unit_span<F: Field>(m: &Matrix<F>, tol: &Tolerance) -> Subspace<F> {
    Subspace::range_scaled(m, 1.0, tol)
}

impl<F: Field> std::fmt::Debug for LinearRelation<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LinearRelation(F^{} -> F^{}, {:?})",
            self.dim_h, self.dim_k, self.graph
        )
    }
}

/// `L(A, B)*` computed algebraically as `{(k, h) : B* k = A* h}`.
pub fn adjoint_of_pair<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    tol: &Tolerance,
) -> Result<LinearRelation<F>> {
    if a.cols() != b.cols() {
        return Err(dim_mismatch("A and B must share a domain"));
    }
    let constraint = b.adjoint().hstack(&(-&a.adjoint()))?;
    LinearRelation::from_graph(b.rows(), a.rows(), Subspace::kernel(&constraint, tol))
}

/// A range `ran Z` carrying the inner product `(Zx, Zy)_+ = (x, y)` for
/// `x, y` in `(ker Z)^perp`.
#[derive(Clone)]
pub struct OperatorRange<F> {
    representative: Matrix<F>,
    reduced_pinv: Matrix<F>,
    range: Subspace<F>,
}

impl<F: Field> OperatorRange<F> {
    pub fn new(z: Matrix<F>, tol: &Tolerance) -> Self {
        let reduced_pinv = F::pinv(&z, tol);
        let range = Subspace::range(&z, tol);
        OperatorRange {
            representative: z,
            reduced_pinv,
            range,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.representative.rows()
    }

    pub fn representative(&self) -> &Matrix<F> {
        &self.representative
    }

    pub fn range(&self) -> &Subspace<F> {
        &self.range
    }

    pub fn contains(&self, u: &[F], tol: &Tolerance) -> bool {
        self.range.contains_vector(u, tol)
    }

    /// `(u, v)_+ = <Z^+ u, Z^+ v>`.
    pub fn plus_inner(&self, u: &[F], v: &[F], tol: &Tolerance) -> Result<F> {
        if u.len() != self.ambient_dim() || v.len() != self.ambient_dim() {
            return Err(dim_mismatch(
                "vector length differs from the ambient dimension",
            ));
        }
        if !self.contains(u, tol) || !self.contains(v, tol) {
            return Err(Error::NotInRange);
        }
        let x = &self.reduced_pinv * &Matrix::column_vector(u);
        let y = &self.reduced_pinv * &Matrix::column_vector(v);
        Ok((&x.adjoint() * &y)[(0, 0)].clone())
    }

    pub fn plus_norm(&self, u: &[F], tol: &Tolerance) -> Result<f64> {
        Ok(self.plus_inner(u, u, tol)?.to_f64().max(0.0).sqrt())
    }

    /// Gram matrix of the plus inner product on the canonical range basis.
    pub fn plus_gram(&self) -> Matrix<F> {
        let coords = &self.reduced_pinv * self.range.basis();
        coords.gram()
    }
}

impl<F: Field> std::fmt::Debug for OperatorRange<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OperatorRange(ran {:?})", self.representative)
    }
}

/// `W = Z^+ Z1`, the operator with `Z W = Z1` relating two representations
/// of the same range.
pub fn representation_equivalence<F: Field>(
    z: &Matrix<F>,
    z1: &Matrix<F>,
    tol: &Tolerance,
) -> Result<Matrix<F>> {
    if z.rows() != z1.rows() {
        return Err(dim_mismatch("representatives map into different spaces"));
    }
    if !Subspace::range(z, tol).same_as(&Subspace::range(z1, tol), tol) {
        return Err(Error::RangesDiffer);
    }
    Ok(&F::pinv(z, tol) * z1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rational, Rational};

    type Q = Rational;

    fn q(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_i64(rows)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn zero_operator_and_purely_multivalued() {
        let t = LinearRelation::from_pair(&Matrix::<Q>::identity(2), &Matrix::zeros(2, 2), &tol())
            .unwrap();
        assert_eq!(t.graph().rank(), 2);
        assert!(t.is_operator(&tol()));
        assert!(t.dom(&tol()).is_full());
        let t = LinearRelation::from_pair(&q(&[&[0]]), &q(&[&[1]]), &tol()).unwrap();
        assert!(t.dom(&tol()).is_zero());
        assert!(t.mul(&tol()).is_full());
        let (a, b) = t.to_pair();
        assert!(a.is_zero());
        assert_eq!(Subspace::range(&b, &tol()).rank(), 1);
    }

    #[test]
    fn pair_with_kernel_contains_expected_vectors() {
        let t = LinearRelation::from_pair(&q(&[&[1, 0], &[0, 0]]), &Matrix::identity(2), &tol())
            .unwrap();
        assert_eq!(t.graph().rank(), 2);
        let one = rational(1, 1);
        let zero = rational(0, 1);
        assert!(t.graph().contains_vector(
            &[one.clone(), zero.clone(), one.clone(), zero.clone()],
            &tol()
        ));
        assert!(t
            .graph()
            .contains_vector(&[zero.clone(), zero.clone(), zero, one], &tol()));
    }

    #[test]
    fn kernel_and_multivalued_part() {
        let t = LinearRelation::from_pair(&q(&[&[1, 0], &[0, 0]]), &q(&[&[0, 0], &[0, 1]]), &tol())
            .unwrap();
        assert_eq!(t.mul(&tol()), Subspace::span(&q(&[&[0], &[1]]), &tol()));
        assert_eq!(t.ker(&tol()), Subspace::span(&q(&[&[1], &[0]]), &tol()));
        let id = LinearRelation::graph_of(&Matrix::<Q>::identity(2), &tol());
        assert!(id.mul(&tol()).is_zero());
        assert!(id.ker(&tol()).is_zero());
    }

    #[test]
    fn adjoint_of_an_operator_graph() {
        let m = q(&[&[1, 2, 0], &[3, -1, 4]]);
        let t = LinearRelation::graph_of(&m, &tol());
        assert_eq!(
            t.adjoint(&tol()),
            LinearRelation::graph_of(&m.adjoint(), &tol())
        );
        assert_eq!(t.adjoint(&tol()).adjoint(&tol()), t);
    }

    #[test]
    fn operator_part_of_multivalued() {
        let t = LinearRelation::from_pair(&q(&[&[0]]), &q(&[&[1]]), &tol()).unwrap();
        assert_eq!(t.operator_part(&tol()).graph().rank(), 0);
        let op = LinearRelation::graph_of(&q(&[&[1, 2], &[3, 4]]), &tol());
        assert_eq!(op.operator_part(&tol()), op);
    }

    #[test]
    fn plus_inner_scaling() {
        let z = Matrix::<Q>::identity(2).scale(&rational(2, 1));
        let w = OperatorRange::new(z, &tol());
        let u = [rational(3, 1), rational(4, 1)];
        assert_eq!(w.plus_inner(&u, &u, &tol()).unwrap(), rational(25, 4));
    }

    #[test]
    fn plus_inner_rejects_vectors_outside_range() {
        let w = OperatorRange::new(q(&[&[1], &[0]]), &tol());
        let u = [rational(0, 1), rational(1, 1)];
        assert_eq!(w.plus_inner(&u, &u, &tol()), Err(Error::NotInRange));
    }

    #[test]
    fn equivalence_with_itself_is_the_coimage_projection() {
        let z = q(&[&[1, 1], &[1, 1]]);
        let w = representation_equivalence(&z, &z, &tol()).unwrap();
        assert_eq!(w, Subspace::range(&z.adjoint(), &tol()).projection());
        assert_eq!(
            representation_equivalence(&z, &Matrix::identity(2), &tol()),
            Err(Error::RangesDiffer)
        );
    }
}
