//! Domination, almost domination and singularity of `B` with respect to `A`.
//!
//! Each property is decided by every available equivalent criterion and the
//! verdicts are cross-checked. A disagreement is reported as
//! [`Error::CriteriaDisagree`], never resolved by majority.

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{Field, Matrix, Mode, Subspace, Tolerance};
use crate::linrel::{adjoint_of_pair, LinearRelation};
use crate::pairs::OperatorPair;

/// One evaluated criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionVerdict {
    pub property: &'static str,
    pub criterion: &'static str,
    pub verdict: bool,
}

impl CriterionVerdict {
    fn new(property: &'static str, criterion: &'static str, verdict: bool) -> Self {
        CriterionVerdict {
            property,
            criterion,
            verdict,
        }
    }
}

/// Least `c` with `|Bf| <= c |Af|` for all `f`.
///
/// `squared_lower < c^2 <= squared_upper`, except that both bounds equal
/// `c^2` when it is known exactly. In float mode both hold `value^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationConstant<F> {
    pub value: f64,
    pub squared_lower: F,
    pub squared_upper: F,
}

#[derive(Debug, Clone)]
pub struct Domination<F> {
    pub dominated: bool,
    pub constant: Option<DominationConstant<F>>,
    pub trace: Vec<CriterionVerdict>,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub holds: bool,
    pub trace: Vec<CriterionVerdict>,
}

#[derive(Debug, Clone)]
pub struct Classification<F: Field> {
    /// `D(A, B) = {k : B* k in ran A*}`, a subspace of `K`.
    pub d_subspace: Subspace<F>,
    /// `R(A, B) = {h : A* h in ran B*}`, a subspace of `H`.
    pub r_subspace: Subspace<F>,
    pub dominated: bool,
    pub domination_constant: Option<DominationConstant<F>>,
    pub almost_dominated: bool,
    pub singular: bool,
    /// Almost domination and domination coincide in finite dimensions.
    pub finite_dim_collapse: bool,
    pub criteria_trace: Vec<CriterionVerdict>,
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

fn agree(property: &'static str, trace: &[CriterionVerdict]) -> Result<bool> {
    let mut verdicts = trace
        .iter()
        .filter(|c| c.property == property)
        .map(|c| c.verdict);
    let first = verdicts.next().unwrap_or(false);
    if verdicts.all(|v| v == first) {
        return Ok(first);
    }
    let rendered = trace
        .iter()
        .filter(|c| c.property == property)
        .map(|c| format!("{}={}", c.criterion, c.verdict))
        .collect::<Vec<_>>()
        .join(", ");
    Err(Error::CriteriaDisagree {
        property,
        trace: rendered,
    })
}

/// `D(A, B)`: the preimage of `ran A*` under `B*`.
pub fn d_subspace<F: Field>(a: &Matrix<F>, b: &Matrix<F>, tol: &Tolerance) -> Result<Subspace<F>> {
    check_pair(a, b)?;
    Subspace::preimage(&b.adjoint(), &Subspace::range(&a.adjoint(), tol), tol)
}

/// `R(A, B)`: the preimage of `ran B*` under `A*`.
pub fn r_subspace<F: Field>(a: &Matrix<F>, b: &Matrix<F>, tol: &Tolerance) -> Result<Subspace<F>> {
    check_pair(a, b)?;
    Subspace::preimage(&a.adjoint(), &Subspace::range(&b.adjoint(), tol), tol)
}

/// PSD test of `t A*A - B*B`. Float mode allows slack relative to the
/// magnitude of both terms rather than of their difference.
struct OrderTest<'a, F: Field> {
    ata: &'a Matrix<F>,
    btb: &'a Matrix<F>,
    tol: &'a Tolerance,
}

impl<F: Field> OrderTest<'_, F> {
    fn holds(&self, t: &F) -> bool {
        let m = &self.ata.scale(t) - self.btb;
        match F::MODE {
            Mode::Exact => F::is_psd(&m, self.tol),
            Mode::Float => {
                let scale = (t.to_f64().abs() * self.ata.max_abs()).max(self.btb.max_abs());
                let slack = F::from_f64(self.tol.eq_threshold(scale));
                let shifted = &m + &Matrix::identity(m.rows()).scale(&slack);
                F::is_psd(&shifted, self.tol)
            }
        }
    }
}

fn relative_gap<F: Field>() -> F {
    F::from_ratio(1, 1 << 40)
}

/// Bound on `c^2`, rigorous in exact mode, valid whenever `B` is dominated:
/// `lambda_max(B*B) / lambda_min+(A*A) <= tr(B*B) / floor(A*A)`.
fn squared_constant_cap<F: Field>(
    ata: &Matrix<F>,
    btb: &Matrix<F>,
    estimate: f64,
    tol: &Tolerance,
) -> F {
    match F::MODE {
        Mode::Exact => match F::positive_spectrum_floor(ata, tol) {
            Some(floor) => btb.trace() / floor,
            None => F::zero(),
        },
        Mode::Float => F::from_f64(estimate * estimate * (1.0 + 1e-8)),
    }
}

/// Narrows `c^2` to an interval of relative width `2^-40` by bisection over
/// dyadic rationals, given that `cap` passes the order test.
fn bisect_squared_constant<F: Field>(test: &OrderTest<'_, F>, cap: F, estimate: f64) -> (F, F) {
    let zero = F::zero();
    if test.holds(&zero) {
        return (zero.clone(), zero);
    }
    let gap = relative_gap::<F>();
    let too_wide = |hi: &F, lo: &F| {
        let excess = hi.clone() - lo.clone() - hi.clone() * &gap;
        !excess.is_negative() && !excess.is_zero()
    };
    // try the float estimate first: an exactly representable c^2 is common
    let guess = F::from_f64(estimate * estimate);
    if !guess.is_zero() && !guess.is_negative() && test.holds(&guess) {
        let below = guess.clone() - guess.clone() * &gap;
        if !test.holds(&below) {
            return (below, guess);
        }
    }
    let (mut lo, mut hi) = seed_bracket(test, cap, estimate);
    let two = F::from_i64(2);
    while too_wide(&hi, &lo) {
        let mid = (lo.clone() + hi.clone()) / two.clone();
        if test.holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

fn seed_bracket<F: Field>(test: &OrderTest<'_, F>, cap: F, estimate: f64) -> (F, F) {
    let sq = estimate * estimate;
    if sq.is_finite() && sq > 0.0 {
        let lo = F::from_f64(sq * (1.0 - 1e-9));
        let hi = F::from_f64(sq * (1.0 + 1e-9));
        if !test.holds(&lo) && test.holds(&hi) {
            return (lo, hi);
        }
    }
    let two = F::from_i64(2);
    let mut hi = F::one();
    if test.holds(&hi) {
        loop {
            let half = hi.clone() / two.clone();
            if test.holds(&half) {
                hi = half;
            } else {
                return (half, hi);
            }
        }
    }
    // 1 fails; double until the test passes, stopping at the cap
    let mut lo = hi.clone();
    loop {
        let next = hi.clone() * two.clone();
        if (cap.clone() - next.clone()).is_negative() {
            return (lo, cap);
        }
        hi = next;
        if test.holds(&hi) {
            return (lo, hi);
        }
        lo = hi.clone();
    }
}

/// Whether `B` is dominated by `A`, with the least constant when it is.
///
/// Criteria: `ran B* ⊆ ran A*`; `B*B <= c^2 A*A` for the certified cap on
/// `c^2`; `L(A, B)` has trivial multivalued part (its domain `ran A` is
/// closed in finite dimensions).
pub fn is_dominated<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    tol: &Tolerance,
) -> Result<Domination<F>> {
    check_pair(a, b)?;
    let range_a_adj = Subspace::range(&a.adjoint(), tol);
    let range_b_adj = Subspace::range(&b.adjoint(), tol);
    let by_ranges = range_b_adj.is_subspace_of(&range_a_adj, tol)?;

    let ata = a.gram();
    let btb = b.gram();
    let estimate = F::spectral_norm(&(b * &F::pinv(a, tol)));
    let cap = squared_constant_cap(&ata, &btb, estimate, tol);
    let test = OrderTest {
        ata: &ata,
        btb: &btb,
        tol,
    };
    // a passing float-seeded candidate already certifies domination; the cap
    // is needed only to certify failure
    let candidate = F::from_f64(estimate * estimate * (1.0 + 1e-6));
    let by_order = (estimate.is_finite() && test.holds(&candidate)) || test.holds(&cap);

    let by_relation = LinearRelation::from_pair(a, b, tol)?.mul(tol).is_zero();

    let trace = vec![
        CriterionVerdict::new("dominated", "ran B* in ran A*", by_ranges),
        CriterionVerdict::new("dominated", "B*B <= c^2 A*A", by_order),
        CriterionVerdict::new("dominated", "L(A,B) is a bounded operator", by_relation),
    ];
    let dominated = agree("dominated", &trace)?;
    let constant = dominated.then(|| match F::MODE {
        Mode::Float => {
            let sq = F::from_f64(estimate * estimate);
            DominationConstant {
                value: estimate,
                squared_lower: sq.clone(),
                squared_upper: sq,
            }
        }
        Mode::Exact => {
            let (lo, hi) = bisect_squared_constant(&test, cap, estimate);
            let value = if lo == hi {
                lo.to_f64().sqrt()
            } else {
                hi.to_f64().sqrt()
            };
            DominationConstant {
                value,
                squared_lower: lo,
                squared_upper: hi,
            }
        }
    });
    Ok(Domination {
        dominated,
        constant,
        trace,
    })
}

/// Whether `B` is almost dominated by `A`, i.e. `L(A, B)` is regular.
///
/// Criteria: `D(A, B)` is all of `K`; `ker A ⊆ ker B`; in float mode also
/// `ker C_A ⊆ ker C_B` for the canonical contractions.
pub fn is_almost_dominated<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    tol: &Tolerance,
) -> Result<Verdict> {
    check_pair(a, b)?;
    let dense = d_subspace(a, b, tol)?.is_full();
    let kernels = Subspace::kernel(a, tol).is_subspace_of(&Subspace::kernel(b, tol), tol)?;
    let mut trace = vec![
        CriterionVerdict::new("almost_dominated", "D(A,B) = K", dense),
        CriterionVerdict::new("almost_dominated", "ker A in ker B", kernels),
    ];
    if F::MODE == Mode::Float {
        let cp = OperatorPair::new(a.clone(), b.clone())?.canonical_contractions(tol)?;
        let canonical = Subspace::kernel_scaled(&cp.c_a, 1.0, tol)
            .is_subspace_of(&Subspace::kernel_scaled(&cp.c_b, 1.0, tol), tol)?;
        trace.push(CriterionVerdict::new(
            "almost_dominated",
            "ker C_A in ker C_B",
            canonical,
        ));
    }
    let holds = agree("almost_dominated", &trace)?;
    Ok(Verdict { holds, trace })
}

/// Whether `B` is singular with respect to `A` (a symmetric relation).
///
/// Criteria: `ran A* ∩ ran B* = {0}`; `L(A, B)* = ker B* x ker A*`;
/// the closure of `L(A, B)` is `ran A x ran B`; in float mode also
/// `ker C_A + ker C_B = E`.
pub fn is_singular<F: Field>(a: &Matrix<F>, b: &Matrix<F>, tol: &Tolerance) -> Result<Verdict> {
    check_pair(a, b)?;
    let meet = Subspace::range(&a.adjoint(), tol)
        .intersect(&Subspace::range(&b.adjoint(), tol), tol)?
        .is_zero();

    let pair = OperatorPair::new(a.clone(), b.clone())?;
    let relation = pair.relation(tol);
    let kernels_product = LinearRelation::product(
        &Subspace::kernel(&b.adjoint(), tol),
        &Subspace::kernel(&a.adjoint(), tol),
    );
    let adjoint_split = relation.adjoint(tol).same_as(&kernels_product, tol);

    let ranges_product =
        LinearRelation::product(&Subspace::range(a, tol), &Subspace::range(b, tol));
    let closure_split = pair.closure(tol)?.same_as(&ranges_product, tol);

    let mut trace = vec![
        CriterionVerdict::new("singular", "ran A* meets ran B* in 0", meet),
        CriterionVerdict::new("singular", "L(A,B)* = ker B* x ker A*", adjoint_split),
        CriterionVerdict::new("singular", "closure L(A,B) = ran A x ran B", closure_split),
    ];
    if F::MODE == Mode::Float {
        let cp = pair.canonical_contractions(tol)?;
        let spans = Subspace::kernel_scaled(&cp.c_a, 1.0, tol)
            .sum(&Subspace::kernel_scaled(&cp.c_b, 1.0, tol), tol)?
            .is_full();
        trace.push(CriterionVerdict::new(
            "singular",
            "ker C_A + ker C_B = E",
            spans,
        ));
    }
    let holds = agree("singular", &trace)?;
    Ok(Verdict { holds, trace })
}

/// Runs every criterion and checks the relations between the properties.
pub fn classify<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    tol: &Tolerance,
) -> Result<Classification<F>> {
    check_pair(a, b)?;
    let (spaces, (domination, (almost, singular))) = rayon::join(
        || -> Result<_> {
            let d = d_subspace(a, b, tol)?;
            let r = r_subspace(a, b, tol)?;
            let d_via_adjoint = adjoint_of_pair(a, b, tol)?.dom(tol);
            Ok((d, r, d_via_adjoint))
        },
        || {
            rayon::join(
                || is_dominated(a, b, tol),
                || rayon::join(|| is_almost_dominated(a, b, tol), || is_singular(a, b, tol)),
            )
        },
    );
    let (d, r, d_via_adjoint) = spaces?;
    let domination = domination?;
    let almost = almost?;
    let singular = singular?;

    if !d.same_as(&d_via_adjoint, tol) {
        return Err(Error::CriteriaDisagree {
            property: "d_subspace",
            trace: "preimage of ran A* differs from dom L(A,B)*".into(),
        });
    }
    let mut trace = vec![CriterionVerdict::new(
        "d_subspace",
        "preimage equals dom L(A,B)*",
        true,
    )];
    trace.extend(domination.trace);
    trace.extend(almost.trace);
    trace.extend(singular.trace);

    // dominated and almost dominated coincide here
    if domination.dominated != almost.holds {
        return Err(Error::CriteriaDisagree {
            property: "almost_dominated",
            trace: format!(
                "dominated={} almost_dominated={}",
                domination.dominated, almost.holds
            ),
        });
    }
    if singular.holds && almost.holds {
        let support = Subspace::range(&(&a.gram() + &b.gram()), tol).projection();
        let vanishes = F::approx_eq(&(b * &support), &Matrix::zeros(b.rows(), b.cols()), tol);
        if !vanishes {
            return Err(Error::CriteriaDisagree {
                property: "singular",
                trace: "singular and almost dominated but B is nonzero".into(),
            });
        }
    }

    Ok(Classification {
        d_subspace: d,
        r_subspace: r,
        dominated: domination.dominated,
        domination_constant: domination.constant,
        almost_dominated: almost.holds,
        singular: singular.holds,
        finite_dim_collapse: true,
        criteria_trace: trace,
    })
}
