//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{
    cayley_orthogonal, float_matrix, float_pair, invertible_rational, max_diff, rational_matrix,
    rational_pair, rng, RandomPair, Shape, Q,
};
use oprange::classify::{classify, is_dominated};
use oprange::lebesgue::{
    lebesgue_decompose, lebesgue_type_decompose, rn_derivative, rn_minimality_check,
    rn_representation_invariance, validate_l, ROUTE_ATOL,
};
use oprange::linalg::{operator_norm, psd_order_leq, rational};
use oprange::linrel::{adjoint_of_pair, LinearRelation};
use oprange::pairs::{column, OperatorPair};
use oprange::towers::{run_tower, DiagonalTower, Generator, SectionConstant, TowerVerdict};
use oprange::{Error, Field, Matrix, Subspace, Tolerance};
use rand::Rng;
use serde_json::Value;

type Check = Result<String, String>;

const CORPUS_SIZE: usize = 1000;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(case: usize, r: oprange::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("case {case}: {e}"))
}

fn rational_corpus() -> Vec<RandomPair<Q>> {
    let mut r = rng(0x5eed_0001);
    (0..CORPUS_SIZE).map(|_| rational_pair(&mut r, 6)).collect()
}

fn criterion_of(trace: &[oprange::classify::CriterionVerdict], name: &str) -> Option<bool> {
    trace
        .iter()
        .find(|v| v.criterion == name)
        .map(|v| v.verdict)
}

fn rank<F: Field>(m: &Matrix<F>) -> usize {
    Subspace::range(m, &tol()).rank()
}

fn douglas(corpus: &[RandomPair<Q>]) -> Check {
    let start = Instant::now();
    let t = tol();
    let mut dominated = 0;
    for (i, p) in corpus.iter().enumerate() {
        let d = core(i, is_dominated(&p.a, &p.b, &t))?;
        let inclusion = criterion_of(&d.trace, "ran B* in ran A*");
        let order = criterion_of(&d.trace, "B*B <= c^2 A*A");
        ensure(inclusion.is_some() && inclusion == order, || {
            format!("case {i}: range inclusion {inclusion:?} vs PSD order {order:?}")
        })?;
        let oracle = rank(&p.a) == rank(&column(&p.a, &p.b).unwrap());
        ensure(oracle == d.dominated, || {
            format!("case {i}: rank oracle says {oracle}")
        })?;
        ensure(p.shape != Shape::Factored || d.dominated, || {
            format!("case {i}: B = T A not dominated")
        })?;
        if let Some(c) = &d.constant {
            dominated += 1;
            let (bb, aa) = (p.b.gram(), p.a.gram());
            let upper_ok = core(i, psd_order_leq(&bb, &aa.scale(&c.squared_upper), &t))?;
            let lower_fails = c.squared_lower == c.squared_upper
                || !core(i, psd_order_leq(&bb, &aa.scale(&c.squared_lower), &t))?;
            ensure(upper_ok && lower_fails, || {
                format!("case {i}: constant bracket is wrong")
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(60), || {
        format!("took {elapsed:.1?}, limit 60s")
    })?;
    Ok(format!(
        "{} pairs, {dominated} dominated, {elapsed:.1?}",
        corpus.len()
    ))
}

fn adjoint_duality(corpus: &[RandomPair<Q>]) -> Check {
    let t = tol();
    for (i, p) in corpus.iter().enumerate() {
        let geometric = core(i, LinearRelation::from_pair(&p.a, &p.b, &t))?.adjoint(&t);
        let algebraic = core(i, adjoint_of_pair(&p.a, &p.b, &t))?;
        ensure(geometric.same_as(&algebraic, &t), || {
            format!("case {i}: adjoints differ")
        })?;
        let expected = p.a.rows() + p.b.rows() - rank(&column(&p.a, &p.b).unwrap());
        ensure(geometric.graph().rank() == expected, || {
            format!("case {i}: adjoint has wrong dimension")
        })?;
    }
    Ok(format!("{} pairs, zero failures", corpus.len()))
}

fn closure_via_contractions() -> Check {
    let t = tol();
    let mut r = rng(0x5eed_0003);
    let (mut worst_graph, mut worst_gram) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let p = float_pair(&mut r, 8);
        let pair = core(i, OperatorPair::new(p.a.clone(), p.b.clone()))?;
        let cp = core(i, pair.canonical_contractions(&t))?;
        let original = Subspace::range(&pair.column(), &t).projection();
        let canonical = Subspace::range(&cp.column(), &t).projection();
        let graph_gap = operator_norm(&(&original - &canonical));
        let support = Subspace::range(pair.gram(), &t).projection();
        let gram_gap = operator_norm(&(&cp.gram() - &support));
        worst_graph = worst_graph.max(graph_gap);
        worst_gram = worst_gram.max(gram_gap);
        ensure(graph_gap <= 1e-9, || {
            format!("case {i}: graph projections differ by {graph_gap:e}")
        })?;
        ensure(gram_gap <= 1e-9, || {
            format!("case {i}: C_A*C_A + C_B*C_B off by {gram_gap:e}")
        })?;
        ensure(cp.check_polar(&t), || {
            format!("case {i}: polar check failed")
        })?;
    }
    Ok(format!(
        "200 pairs, max graph gap {worst_graph:.1e}, max projection gap {worst_gram:.1e}"
    ))
}

/// Partial isometry `U_r V_r*` from two rational orthogonal matrices, split
/// into `(A, B)` with `A` on top.
fn q_normalized_pair(r: &mut impl Rng) -> (Matrix<Q>, Matrix<Q>) {
    let n = r.random_range(1..=4);
    let m = r.random_range(1..=3);
    let k = r.random_range(1..=3);
    let rank = r.random_range(0..=n.min(m + k));
    let left = cayley_orthogonal(r, m + k).submatrix(0..m + k, 0..rank);
    let right = cayley_orthogonal(r, n).submatrix(0..n, 0..rank);
    let w = &left * &right.adjoint();
    (w.submatrix(0..m, 0..n), w.submatrix(m..m + k, 0..n))
}

fn independent_projections<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> (Matrix<F>, Matrix<F>) {
    let t = tol();
    let graph = Subspace::range(&column(a, b).unwrap(), &t).projection();
    // L(A,B)* is the orthogonal complement of ran [B; -A] in K x H
    let flipped = column(b, &a.scale(&F::from_i64(-1))).unwrap();
    let adjoint = Subspace::range(&flipped, &t).complement_projection();
    (graph, adjoint)
}

fn graph_projection_formulas() -> Check {
    let t = tol();
    let mut r = rng(0x5eed_0004);
    let mut worst = 0.0f64;
    for i in 0..60 {
        let (a, b) = q_normalized_pair(&mut r);
        let pair = core(i, OperatorPair::new(a.clone(), b.clone()))?;
        let (graph, adjoint) = independent_projections(&a, &b);
        ensure(core(i, pair.graph_projection(&t))? == graph, || {
            format!("case {i}: exact graph projection")
        })?;
        ensure(
            core(i, pair.adjoint_graph_projection(&t))? == adjoint,
            || format!("case {i}: exact adjoint graph projection"),
        )?;

        let (af, bf) = (a.to_f64(), b.to_f64());
        let fpair = core(i, OperatorPair::new(af.clone(), bf.clone()))?;
        let (graph, adjoint) = independent_projections(&af, &bf);
        let gap = max_diff(&core(i, fpair.graph_projection(&t))?, &graph).max(max_diff(
            &core(i, fpair.adjoint_graph_projection(&t))?,
            &adjoint,
        ));
        worst = worst.max(gap);
        ensure(gap <= 1e-10, || {
            format!("case {i}: float projections differ by {gap:e}")
        })?;
    }
    Ok(format!(
        "60 Cayley constructions exact, float max gap {worst:.1e}"
    ))
}

/// `B_reg = (I - P) B`, with `P` the projection onto the complement of
/// `{k : (I - P_{ran A*}) B* k = 0}`.
fn regular_part_oracle(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
    let t = tol();
    let off_row_space = Subspace::range(&a.adjoint(), &t).complement_projection();
    let d = Subspace::kernel(&(&off_row_space * &b.adjoint()), &t);
    &d.projection() * b
}

fn lebesgue(corpus: &[RandomPair<Q>]) -> Check {
    let t = tol();
    let mut nonunique_singular = 0;
    for (i, p) in corpus.iter().enumerate() {
        let dec = core(i, lebesgue_decompose(&p.a, &p.b, &t))?;
        ensure(&dec.b_reg + &dec.b_sing == p.b, || {
            format!("case {i}: parts do not sum to B")
        })?;
        ensure(dec.b_reg == regular_part_oracle(&p.a, &p.b), || {
            format!("case {i}: B_reg differs from oracle")
        })?;
        ensure(
            core(i, classify(&p.a, &dec.b_reg, &t))?.almost_dominated,
            || format!("case {i}: regular part not almost dominated"),
        )?;
        ensure(core(i, classify(&p.a, &dec.b_sing, &t))?.singular, || {
            format!("case {i}: singular part not singular")
        })?;
        ensure((&dec.b_reg.adjoint() * &dec.b_sing).is_zero(), || {
            format!("case {i}: ranges not orthogonal")
        })?;
        let again = core(i, lebesgue_decompose(&p.a, &dec.b_reg, &t))?;
        ensure(again.b_reg == dec.b_reg && again.b_sing.is_zero(), || {
            format!("case {i}: regular part not fixed")
        })?;
        let again = core(i, lebesgue_decompose(&p.a, &dec.b_sing, &t))?;
        ensure(again.b_sing == dec.b_sing && again.b_reg.is_zero(), || {
            format!("case {i}: singular part not fixed")
        })?;
        if !dec.b_sing.is_zero() {
            nonunique_singular += 1;
        }
    }
    Ok(format!(
        "{} pairs, {nonunique_singular} with nonzero singular part",
        corpus.len()
    ))
}

fn random_nonzero_subspace(r: &mut impl Rng, spanning: &Matrix<Q>) -> Option<Subspace<Q>> {
    let width = spanning.cols();
    if width == 0 {
        return None;
    }
    for _ in 0..10 {
        let count = r.random_range(1..=width);
        let coeffs = rational_matrix(r, width, count);
        let s = Subspace::span(&(spanning * &coeffs), &tol());
        if !s.is_zero() {
            return Some(s);
        }
    }
    None
}

fn optimality(corpus: &[RandomPair<Q>]) -> Check {
    let t = tol();
    for (i, p) in corpus.iter().enumerate().take(300) {
        let zero = Subspace::zero(p.b.rows());
        let dec = core(i, lebesgue_type_decompose(&p.a, &p.b, &zero, &t))?;
        let reference = core(i, lebesgue_decompose(&p.a, &p.b, &t))?;
        ensure(
            core(
                i,
                psd_order_leq(&dec.b_reg.gram(), &reference.b_reg.gram(), &t),
            )?,
            || format!("case {i}: B1*B1 exceeds B_reg*B_reg"),
        )?;
    }
    let mut r = rng(0x5eed_0006);
    let (mut tried, mut outside, mut meets) = (0usize, 0usize, 0usize);
    let mut i = 0;
    while tried < 600 {
        let p = &corpus[i % corpus.len()];
        i += 1;
        let k = p.b.rows();
        let d = oprange::classify::d_subspace(&p.a, &p.b, &t).map_err(|e| e.to_string())?;
        let source = match tried % 3 {
            0 => Matrix::<Q>::identity(k),
            1 => d.basis().clone(),
            _ => d.orthogonal_complement(&t).basis().clone(),
        };
        let Some(l) = random_nonzero_subspace(&mut r, &source) else {
            continue;
        };
        tried += 1;
        match validate_l(&p.a, &p.b, &l, &t) {
            Err(Error::InvalidL(reason)) => match reason {
                oprange::error::LRejection::NotInDomainClosure => outside += 1,
                oprange::error::LRejection::MeetsDomain => meets += 1,
            },
            Ok(()) => return fail(format!("nonzero L of rank {} accepted", l.rank())),
            Err(e) => return fail(format!("unexpected error {e}")),
        }
    }
    Ok(format!(
        "L = 0 optimal on 300 pairs; rejected {tried}/{tried} nonzero L ({outside} outside closure, {meets} meeting domain)"
    ))
}

/// `C = R + Z (I - P_{ran A})` for random `Z`; each satisfies `C A = B1`.
fn competitors<F: Field>(
    rep: &Matrix<F>,
    a: &Matrix<F>,
    mut draw: impl FnMut(usize, usize) -> Matrix<F>,
) -> Vec<Matrix<F>> {
    let off_range = Subspace::range(a, &tol()).complement_projection();
    (0..10)
        .map(|_| rep + &(&draw(rep.rows(), rep.cols()) * &off_range))
        .collect()
}

fn radon_nikodym(corpus: &[RandomPair<Q>]) -> Check {
    let t = tol();
    let mut r = rng(0x5eed_0007);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for i in 0..150 {
        let n = r.random_range(1..=8);
        let m = r.random_range(1..=8);
        let k = r.random_range(1..=8);
        let rank = r.random_range(1..=m.min(n));
        let a = &float_matrix(&mut r, m, rank) * &float_matrix(&mut r, rank, n);
        let b1 = &float_matrix(&mut r, k, m) * &a;
        let d = core(i, rn_derivative(&a, &b1, &t))?;
        let gap = d.route_gap.ok_or("float route not run")?;
        let scale = d.representative.max_abs().max(1.0);
        ensure(gap <= ROUTE_ATOL * scale, || {
            format!("case {i}: route gap {gap:e}")
        })?;
        worst = worst.max(gap / scale);
        for c in competitors(&d.representative, &a, |i, j| float_matrix(&mut r, i, j)) {
            ensure(core(i, rn_minimality_check(&d, &c, &t))?, || {
                format!("case {i}: float competitor smaller")
            })?;
            checked += 1;
        }
    }
    for (i, p) in corpus.iter().enumerate().take(200) {
        let b1 = &rational_matrix(&mut r, p.b.rows(), p.a.rows()) * &p.a;
        let d = core(i, rn_derivative(&p.a, &b1, &t))?;
        for c in competitors(&d.representative, &p.a, |i, j| {
            rational_matrix(&mut r, i, j)
        }) {
            ensure(core(i, rn_minimality_check(&d, &c, &t))?, || {
                format!("case {i}: exact competitor smaller")
            })?;
            checked += 1;
        }
        let g = invertible_rational(&mut r, p.a.cols());
        let same = core(
            i,
            rn_representation_invariance(&p.a, &p.b, &(&p.a * &g), &(&p.b * &g), &t),
        )?;
        ensure(same, || {
            format!("case {i}: derivative changed under reparametrization")
        })?;
    }
    Ok(format!(
        "150 float cases, max relative route gap {worst:.1e}; {checked} competitors; 200 exact reparametrizations"
    ))
}

fn q(rows: &[&[i64]]) -> Matrix<Q> {
    Matrix::from_i64(rows)
}

fn fixed_cases() -> Check {
    let t = tol();
    let a = q(&[&[1, 0], &[0, 0]]);
    let dec = lebesgue_decompose(&a, &Matrix::identity(2), &t).map_err(|e| e.to_string())?;
    ensure(dec.b_reg == a, || "b_reg != diag(1,0)".into())?;
    ensure(dec.b_sing == q(&[&[0, 0], &[0, 1]]), || {
        "b_sing != diag(0,1)".into()
    })?;
    let d = rn_derivative(&a, &dec.b_reg, &t).map_err(|e| e.to_string())?;
    ensure(d.representative == a, || {
        "RN representative != diag(1,0)".into()
    })?;

    let ones = q(&[&[1, 1], &[1, 1]]);
    let dec = lebesgue_decompose(&a, &ones, &t).map_err(|e| e.to_string())?;
    ensure(dec.b_reg.is_zero() && dec.b_sing == ones, || {
        "rank-one case: b_reg != 0".into()
    })?;
    ensure(
        classify(&a, &ones, &t).map_err(|e| e.to_string())?.singular,
        || "rank-one case not singular".into(),
    )?;

    let half = Matrix::diag(&[rational(1, 1), rational(1, 2)]);
    let d = rn_derivative(&half, &Matrix::identity(2), &t).map_err(|e| e.to_string())?;
    ensure(
        d.representative == Matrix::diag(&[rational(1, 1), rational(2, 1)]),
        || "diag(1,1/2) case".into(),
    )?;
    Ok("3 worked cases reproduced exactly".into())
}

fn towers() -> Check {
    let start = Instant::now();
    let t = tol();
    let tower = DiagonalTower::new(Generator::reciprocal(), Generator::unit(), 64)
        .map_err(|e| e.to_string())?;
    let report = run_tower(&tower, &t).map_err(|e| e.to_string())?;
    for (n, c) in report.dims.iter().zip(&report.constants) {
        ensure(
            *c == SectionConstant::Finite(rational(*n as i64, 1)),
            || format!("c_{n} = {c}"),
        )?;
    }
    ensure(report.constants.len() == 64, || "missing sections".into())?;
    ensure(report.sections.iter().all(|s| s.dominated), || {
        "a section is not dominated".into()
    })?;
    ensure(
        report.verdict == TowerVerdict::AlmostDominatedNotDominated,
        || format!("verdict {}", report.verdict),
    )?;
    ensure(report.all_cross_validated(), || {
        "classifier intervals miss c_n".into()
    })?;

    let flat =
        DiagonalTower::new(Generator::unit(), Generator::unit(), 64).map_err(|e| e.to_string())?;
    let flat = run_tower(&flat, &t).map_err(|e| e.to_string())?;
    ensure(
        flat.constants
            .iter()
            .all(|c| *c == SectionConstant::Finite(rational(1, 1))),
        || "unit tower c_n != 1".into(),
    )?;
    ensure(flat.verdict == TowerVerdict::DominatedLimit, || {
        format!("unit verdict {}", flat.verdict)
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(5), || {
        format!("took {elapsed:.1?}, limit 5s")
    })?;
    Ok(format!(
        "c_n = n for n <= 64, unit tower constant 1, {elapsed:.2?}"
    ))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn cli_determinism() -> Check {
    let schema_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let examples: Vec<(Vec<String>, i32)> = vec![
        (
            vec![
                "classify".into(),
                fixture("diag_1_0.csv"),
                fixture("diag_0_1.csv"),
            ],
            0,
        ),
        (
            vec![
                "classify".into(),
                fixture("identity.csv"),
                fixture("identity.csv"),
            ],
            0,
        ),
        (
            vec![
                "classify".into(),
                fixture("malformed.csv"),
                fixture("identity.csv"),
            ],
            2,
        ),
        (
            vec![
                "decompose".into(),
                fixture("diag_1_0.csv"),
                fixture("identity.csv"),
            ],
            0,
        ),
        (
            vec![
                "rnderiv".into(),
                fixture("diag_1_half.csv"),
                fixture("identity.csv"),
            ],
            0,
        ),
        (
            vec!["tower".into(), fixture("tower_reciprocal_unit.json")],
            0,
        ),
        (
            vec![
                "--mode".into(),
                "float".into(),
                "closure".into(),
                fixture("pair_a.json"),
                fixture("pair_b.json"),
            ],
            0,
        ),
        (
            vec![
                "adjoint".into(),
                fixture("pair_a.json"),
                fixture("pair_b.json"),
            ],
            0,
        ),
    ];
    for (args, expected) in &examples {
        let go = || {
            Command::new(env!("CARGO_BIN_EXE_oprange"))
                .env_remove("OPRANGE_MODE")
                .args(args)
                .output()
                .map_err(|e| e.to_string())
        };
        let (first, second) = (go()?, go()?);
        let label = args.join(" ");
        ensure(first.status.code() == Some(*expected), || {
            format!("{label}: exit {:?}", first.status.code())
        })?;
        ensure(first.stdout == second.stdout, || {
            format!("{label}: output differs between runs")
        })?;
        let v: Value =
            serde_json::from_slice(&first.stdout).map_err(|e| format!("{label}: {e}"))?;
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        ensure(errors.is_empty(), || {
            format!("{label}: schema violations {errors:?}")
        })?;
    }
    Ok(format!(
        "{} documented invocations byte-identical and schema-valid",
        examples.len()
    ))
}

fn run(id: usize, name: &str, check: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(detail) => println!("PASS  [{id:>2}] {name}: {detail} ({secs:.2}s)"),
        Err(why) => println!("FAIL  [{id:>2}] {name}: {why} ({secs:.2}s)"),
    }
    outcome.is_ok()
}

fn main() {
    let corpus = rational_corpus();
    let results = [
        run(1, "domination criteria agree", || douglas(&corpus)),
        run(2, "geometric and algebraic adjoints agree", || {
            adjoint_duality(&corpus)
        }),
        run(
            3,
            "closure via canonical contractions",
            closure_via_contractions,
        ),
        run(
            4,
            "graph projection block formulas",
            graph_projection_formulas,
        ),
        run(5, "Lebesgue decomposition", || lebesgue(&corpus)),
        run(6, "optimality and L validation", || optimality(&corpus)),
        run(7, "Radon-Nikodym derivative", || radon_nikodym(&corpus)),
        run(8, "worked cases", fixed_cases),
        run(9, "tower distinction", towers),
        run(10, "CLI determinism and schema", cli_determinism),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
