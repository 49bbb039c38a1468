//! Lebesgue decomposition `B = B_reg + B_sing` relative to `A`, Lebesgue-type
//! decompositions indexed by a subspace `L`, and Radon-Nikodym derivatives.

use crate::classify::{classify, d_subspace, CriterionVerdict};
use crate::error::{dim_mismatch, Error, LRejection, Result};
use crate::linalg::{psd_sqrt, Field, Matrix, Mode, Subspace, Tolerance};
use crate::linrel::{adjoint_of_pair, LinearRelation};
use crate::pairs::OperatorPair;

/// Agreement bound between the two Radon-Nikodym routes, relative to the
/// size of the representative.
pub const ROUTE_ATOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LebesgueDecomposition<F: Field> {
    pub b_reg: Matrix<F>,
    pub b_sing: Matrix<F>,
    /// Orthogonal projection onto `m_subspace`.
    pub projector: Matrix<F>,
    /// `D(A, B)^perp + L`.
    pub m_subspace: Subspace<F>,
    pub l_subspace: Subspace<F>,
    /// Only `L = {0}` is admissible when `D(A, B)` is closed.
    pub unique: bool,
    pub verification: Vec<CriterionVerdict>,
}

fn check_pair<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Result<()> {
    if a.cols() != b.cols() {
        return Err(dim_mismatch(format!(
            "A is {}x{} and B is {}x{}; domains differ",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// A float part at roundoff level relative to `b` is zero; left alone its
/// rank would be judged against its own noise.
fn flush_negligible<F: Field>(part: Matrix<F>, b: &Matrix<F>, tol: &Tolerance) -> Matrix<F> {
    if F::MODE == Mode::Float && part.max_abs() <= tol.rank_cutoff(b.max_abs()) {
        Matrix::zeros(part.rows(), part.cols())
    } else {
        part
    }
}

fn split<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    m_subspace: Subspace<F>,
    l_subspace: Subspace<F>,
    tol: &Tolerance,
) -> Result<LebesgueDecomposition<F>> {
    let k = b.rows();
    let projector = m_subspace.projection();
    let complement = &Matrix::identity(k) - &projector;
    let b_reg = flush_negligible(&complement * b, b, tol);
    let b_sing = flush_negligible(&projector * b, b, tol);

    let (reg, sing) = rayon::join(|| classify(a, &b_reg, tol), || classify(a, &b_sing, tol));
    let (reg, sing) = (reg?, sing?);
    let orthogonal = F::approx_eq(
        &(&b_reg.adjoint() * &b_sing),
        &Matrix::zeros(b.cols(), b.cols()),
        tol,
    );
    let sums = F::approx_eq(&(&b_reg + &b_sing), b, tol);
    let relation = LinearRelation::from_pair(a, b, tol)?;
    let composed = relation
        .map_k(&complement, tol)?
        .same_as(&LinearRelation::from_pair(a, &b_reg, tol)?, tol)
        && relation
            .map_k(&projector, tol)?
            .same_as(&LinearRelation::from_pair(a, &b_sing, tol)?, tol);

    let verification = vec![
        CriterionVerdict {
            property: "lebesgue",
            criterion: "regular part almost dominated",
            verdict: reg.almost_dominated,
        },
        CriterionVerdict {
            property: "lebesgue",
            criterion: "singular part singular",
            verdict: sing.singular,
        },
        CriterionVerdict {
            property: "lebesgue",
            criterion: "ranges orthogonal",
            verdict: orthogonal,
        },
        CriterionVerdict {
            property: "lebesgue",
            criterion: "parts sum to B",
            verdict: sums,
        },
        CriterionVerdict {
            property: "lebesgue",
            criterion: "parts are projections of L(A,B)",
            verdict: composed,
        },
    ];
    if let Some(failed) = verification.iter().find(|c| !c.verdict) {
        return Err(Error::VerificationFailed(failed.criterion.to_string()));
    }
    Ok(LebesgueDecomposition {
        b_reg,
        b_sing,
        projector,
        m_subspace,
        l_subspace,
        unique: true,
        verification,
    })
}

/// The canonical decomposition with `P` the projection onto `D(A, B)^perp`.
pub fn lebesgue_decompose<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    tol: &Tolerance,
) -> Result<LebesgueDecomposition<F>> {
    check_pair(a, b)?;
    let d = d_subspace(a, b, tol)?;
    split(
        a,
        b,
        d.orthogonal_complement(tol),
        Subspace::zero(b.rows()),
        tol,
    )
}

/// Checks that `L` may index a Lebesgue-type decomposition of `L(A, B)`.
///
/// `L` has to lie in the closure of `dom T*` and meet `dom T*` only in zero;
/// it must also satisfy `clos(L^perp ∩ D) = L^perp ∩ clos D`. Since
/// `dom T* = D(A, B)` is closed here, only `L = {0}` passes.
pub fn validate_l<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    l: &Subspace<F>,
    tol: &Tolerance,
) -> Result<()> {
    check_pair(a, b)?;
    if l.ambient_dim() != b.rows() {
        return Err(dim_mismatch(format!(
            "L lives in F^{}, expected F^{}",
            l.ambient_dim(),
            b.rows()
        )));
    }
    let dom = adjoint_of_pair(a, b, tol)?.dom(tol);
    // a finite-dimensional subspace is its own closure
    let closure = dom.clone();
    if !l.is_subspace_of(&closure, tol)? {
        return Err(Error::InvalidL(LRejection::NotInDomainClosure));
    }
    if !l.intersect(&dom, tol)?.is_zero() {
        return Err(Error::InvalidL(LRejection::MeetsDomain));
    }
    let l_perp = l.orthogonal_complement(tol);
    let lhs = l_perp.intersect(&dom, tol)?;
    let rhs = l_perp.intersect(&closure, tol)?;
    if !lhs.same_as(&rhs, tol) {
        return Err(Error::IncompatibleL);
    }
    Ok(())
}

/// Lebesgue-type decomposition with `M = D(A, B)^perp + L`, after validating
/// `L`. Also checks `B_1* B_1 <= B_reg* B_reg`.
pub fn lebesgue_type_decompose<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    l: &Subspace<F>,
    tol: &Tolerance,
) -> Result<LebesgueDecomposition<F>> {
    validate_l(a, b, l, tol)?;
    let canonical = lebesgue_decompose(a, b, tol)?;
    let m = canonical.m_subspace.sum(l, tol)?;
    let mut dec = split(a, b, m, l.clone(), tol)?;
    let optimal = F::is_psd(&(&canonical.b_reg.gram() - &dec.b_reg.gram()), tol);
    dec.verification.push(CriterionVerdict {
        property: "lebesgue",
        criterion: "B1*B1 <= B_reg*B_reg",
        verdict: optimal,
    });
    if !optimal {
        return Err(Error::VerificationFailed("B1*B1 <= B_reg*B_reg".into()));
    }
    Ok(dec)
}

/// The Radon-Nikodym derivative of `B1` with respect to `A`: the closure of
/// `L(A, B1)`, with domain `ran A`.
#[derive(Debug, Clone)]
pub struct RadonNikodymDerivative<F: Field> {
    pub a: Matrix<F>,
    pub b1: Matrix<F>,
    pub graph: LinearRelation<F>,
    pub domain: Subspace<F>,
    /// `R` with `R A = B1`, zero on `ran A^perp`.
    pub representative: Matrix<F>,
    pub bounded: bool,
    pub bound: Option<f64>,
    /// Distance between the two routes on `ran A` (float mode only).
    pub route_gap: Option<f64>,
}

fn route_bound(scale: f64) -> f64 {
    ROUTE_ATOL * scale.max(1.0)
}

/// Computes `R = B1 A^+`; in float mode also `C_{B0} C_{A0}^+` from the
/// reduced canonical pair, and requires the two to agree on `ran A`.
pub fn rn_derivative<F: Field>(
    a: &Matrix<F>,
    b1: &Matrix<F>,
    tol: &Tolerance,
) -> Result<RadonNikodymDerivative<F>> {
    check_pair(a, b1)?;
    if !Subspace::kernel(a, tol).is_subspace_of(&Subspace::kernel(b1, tol), tol)? {
        return Err(Error::NotAlmostDominated);
    }
    let pair = OperatorPair::new(a.clone(), b1.clone())?;
    let graph = pair.closure(tol)?;
    if !graph.is_operator(tol) {
        return Err(Error::VerificationFailed(
            "closure of L(A,B1) is multivalued".into(),
        ));
    }
    let representative = b1 * &F::pinv(a, tol);
    if !F::approx_eq(&(&representative * a), b1, tol) {
        return Err(Error::VerificationFailed("R A differs from B1".into()));
    }
    let domain = Subspace::range(a, tol);

    let route_gap = match F::MODE {
        Mode::Exact => None,
        Mode::Float => {
            let reduced = pair.reduce(tol).pair;
            let cp = reduced.canonical_contractions(tol)?;
            let guard = Subspace::kernel(&cp.c_a, tol)
                .is_subspace_of(&Subspace::kernel(&cp.c_b, tol), tol)?;
            if !guard {
                return Err(Error::NotAlmostDominated);
            }
            let quotient = cp.quotient(tol);
            let on_range = domain.projection();
            let gap = (&(&representative - &quotient) * &on_range).max_abs();
            let scale = representative.max_abs().max(quotient.max_abs());
            if gap > route_bound(scale) {
                return Err(Error::RouteDisagreement(gap));
            }
            Some(gap)
        }
    };

    Ok(RadonNikodymDerivative {
        a: a.clone(),
        b1: b1.clone(),
        graph,
        domain,
        bound: Some(F::spectral_norm(&representative)),
        representative,
        // almost domination is domination in finite dimensions
        bounded: true,
        route_gap,
    })
}

/// Whether the derivative's graph lies inside the graph of a competing
/// factorization `B1 = C A`.
pub fn rn_minimality_check<F: Field>(
    d: &RadonNikodymDerivative<F>,
    c: &Matrix<F>,
    tol: &Tolerance,
) -> Result<bool> {
    if c.cols() != d.a.rows() || c.rows() != d.b1.rows() {
        return Err(Error::NotAFactorization);
    }
    if !F::approx_eq(&(c * &d.a), &d.b1, tol) {
        return Err(Error::NotAFactorization);
    }
    LinearRelation::graph_of(c, tol).contains(&d.graph, tol)
}

/// Derivatives of `A` and `B` with respect to `S = (A*A + B*B)^{1/2}`; their
/// representatives are the canonical contractions.
pub fn rn_of_gram_components<F: Field>(
    p: &OperatorPair<F>,
    tol: &Tolerance,
) -> Result<(RadonNikodymDerivative<F>, RadonNikodymDerivative<F>)> {
    if F::MODE == Mode::Exact {
        return Err(Error::ExactModeUnsupported(
            "derivatives with respect to a square root",
        ));
    }
    let s = psd_sqrt(p.gram(), tol)?;
    let (da, db) = rayon::join(
        || rn_derivative(&s, p.a(), tol),
        || rn_derivative(&s, p.b(), tol),
    );
    let (da, db) = (da?, db?);
    let cp = p.canonical_contractions(tol)?;
    let on_range = Subspace::range(&s, tol).projection();
    let matches =
        |r: &Matrix<F>, c: &Matrix<F>| F::approx_eq(&(r * &on_range), &(c * &on_range), tol);
    if !matches(&da.representative, &cp.c_a) || !matches(&db.representative, &cp.c_b) {
        return Err(Error::VerificationFailed(
            "derivative differs from canonical contraction".into(),
        ));
    }
    Ok((da, db))
}

/// Whether two pairs with the same relation `L(A, B) = L(A', B')` give the
/// same derivative of their regular parts.
pub fn rn_representation_invariance<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    a2: &Matrix<F>,
    b2: &Matrix<F>,
    tol: &Tolerance,
) -> Result<bool> {
    let first = LinearRelation::from_pair(a, b, tol)?;
    let second = LinearRelation::from_pair(a2, b2, tol)?;
    if !first.same_as(&second, tol) {
        return Err(Error::RelationsDiffer);
    }
    let (reg, reg2) = rayon::join(
        || lebesgue_decompose(a, b, tol),
        || lebesgue_decompose(a2, b2, tol),
    );
    let (d, d2) = rayon::join(
        || rn_derivative(a, &reg?.b_reg, tol),
        || rn_derivative(a2, &reg2?.b_reg, tol),
    );
    Ok(d?.graph.same_as(&d2?.graph, tol))
}
