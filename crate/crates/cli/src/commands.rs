//! Per-command payloads: `(results, verification)` for each subcommand.

use std::collections::BTreeMap;

use oprange::classify::classify;
use oprange::lebesgue::{
    lebesgue_decompose, lebesgue_type_decompose, rn_derivative, LebesgueDecomposition,
};
use oprange::linalg::parse_rational;
use oprange::linrel::{adjoint_of_pair, LinearRelation};
use oprange::pairs::OperatorPair;
use oprange::towers::{run_tower, DiagonalTower, Generator, SectionConstant, BOUNDED_SLOPE};
use oprange::{Matrix, Mode, Rational, Result, Subspace, Tolerance};
use serde_json::{json, Value};

use crate::io::{matrix_json, Scalar};
use crate::report::{relation_json, subspace_json};

#[derive(Debug, Clone)]
pub struct Payload {
    pub results: Value,
    pub verification: BTreeMap<String, bool>,
    pub finite_dim_collapse: Option<bool>,
}

impl Payload {
    fn new(results: Value, verification: BTreeMap<String, bool>) -> Self {
        Payload {
            results,
            verification,
            finite_dim_collapse: None,
        }
    }
}

pub fn classify_payload<F: Scalar>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    tol: &Tolerance,
) -> Result<Payload> {
    let c = classify(a, b, tol)?;
    let constant = match &c.domination_constant {
        Some(k) => json!({
            "value": k.value,
            "squared_lower": k.squared_lower.to_json(),
            "squared_upper": k.squared_upper.to_json(),
        }),
        None => Value::Null,
    };
    let results = json!({
        "d_subspace": subspace_json(&c.d_subspace),
        "r_subspace": subspace_json(&c.r_subspace),
        "dominated": c.dominated,
        "domination_constant": constant,
        "almost_dominated": c.almost_dominated,
        "singular": c.singular,
    });
    let verification = c
        .criteria_trace
        .iter()
        .map(|v| (format!("{}: {}", v.property, v.criterion), v.verdict))
        .collect();
    Ok(Payload {
        results,
        verification,
        finite_dim_collapse: Some(c.finite_dim_collapse),
    })
}

fn decomposition_payload<F: Scalar>(dec: &LebesgueDecomposition<F>) -> Payload {
    let results = json!({
        "b_reg": matrix_json(&dec.b_reg),
        "b_sing": matrix_json(&dec.b_sing),
        "projector": matrix_json(&dec.projector),
        "m_subspace": subspace_json(&dec.m_subspace),
        "l_subspace": subspace_json(&dec.l_subspace),
        "unique": dec.unique,
    });
    let verification = dec
        .verification
        .iter()
        .map(|v| (v.criterion.to_string(), v.verdict))
        .collect();
    Payload::new(results, verification)
}

pub fn decompose_payload<F: Scalar>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    l: Option<&Subspace<F>>,
    tol: &Tolerance,
) -> Result<Payload> {
    let dec = match l {
        Some(l) => lebesgue_type_decompose(a, b, l, tol)?,
        None => lebesgue_decompose(a, b, tol)?,
    };
    Ok(decomposition_payload(&dec))
}

pub fn rnderiv_payload<F: Scalar>(
    a: &Matrix<F>,
    b1: &Matrix<F>,
    tol: &Tolerance,
) -> Result<Payload> {
    let d = rn_derivative(a, b1, tol)?;
    let results = json!({
        "representative": matrix_json(&d.representative),
        "domain": subspace_json(&d.domain),
        "graph": relation_json(&d.graph, tol),
        "bounded": d.bounded,
        "bound": d.bound,
        "route_gap": d.route_gap,
    });
    let mut verification = BTreeMap::new();
    verification.insert("R A = B1".to_string(), true);
    verification.insert(
        "closure of L(A,B1) is an operator".to_string(),
        d.graph.is_operator(tol),
    );
    if d.route_gap.is_some() {
        verification.insert("routes agree on ran A".to_string(), true);
    }
    Ok(Payload::new(results, verification))
}

pub fn closure_payload<F: Scalar>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    tol: &Tolerance,
) -> Result<Payload> {
    let pair = OperatorPair::new(a.clone(), b.clone())?;
    let closure = pair.closure(tol)?;
    let mut verification = BTreeMap::new();
    verification.insert(
        "closure contains L(A,B)".to_string(),
        closure.contains(&pair.relation(tol), tol)?,
    );
    let canonical = match F::MODE {
        Mode::Exact => Value::Null,
        Mode::Float => {
            let cp = pair.canonical_contractions(tol)?;
            verification.insert(
                "C_A S = A and C_B S = B".to_string(),
                cp.reproduces_parent(tol),
            );
            verification.insert(
                "c(C_A, C_B) is a partial isometry".to_string(),
                cp.check_polar(tol),
            );
            json!({"c_a": matrix_json(&cp.c_a), "c_b": matrix_json(&cp.c_b), "s": matrix_json(&cp.s)})
        }
    };
    let operator = closure.operator_matrix(tol);
    let results = json!({
        "closure": relation_json(&closure, tol),
        "operator_matrix": operator.as_ref().map(matrix_json),
        "canonical_contractions": canonical,
    });
    Ok(Payload::new(results, verification))
}

pub fn adjoint_payload<F: Scalar>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    tol: &Tolerance,
) -> Result<Payload> {
    let geometric = LinearRelation::from_pair(a, b, tol)?.adjoint(tol);
    let algebraic = adjoint_of_pair(a, b, tol)?;
    let d = oprange::classify::d_subspace(a, b, tol)?;
    let mut verification = BTreeMap::new();
    verification.insert(
        "(J T)^perp equals {(k, h): B* k = A* h}".to_string(),
        geometric.same_as(&algebraic, tol),
    );
    verification.insert(
        "dom T* = D(A,B)".to_string(),
        geometric.dom(tol).same_as(&d, tol),
    );
    let results = json!({ "adjoint": relation_json(&geometric, tol) });
    Ok(Payload::new(results, verification))
}

fn rational_field(v: &Value, what: &str) -> std::result::Result<Rational, String> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(format!("{what} must be a number or a \"p/q\" string")),
    };
    parse_rational(&text).map_err(|e| format!("{what}: {e}"))
}

/// `"reciprocal"`, `"unit"`, or an object with a `family` tag.
pub fn parse_generator(v: &Value) -> std::result::Result<Generator, String> {
    if let Some(name) = v.as_str() {
        return match name {
            "reciprocal" => Ok(Generator::reciprocal()),
            "unit" => Ok(Generator::unit()),
            other => Err(format!("unknown generator shorthand '{other}'")),
        };
    }
    let family = v
        .get("family")
        .and_then(Value::as_str)
        .ok_or("generator needs a \"family\"")?;
    let field = |key: &str| {
        v.get(key)
            .ok_or_else(|| format!("{family} generator needs \"{key}\""))
    };
    match family {
        "reciprocal" => {
            let power = match v.get("power") {
                None => 1,
                Some(p) => p
                    .as_u64()
                    .and_then(|p| u32::try_from(p).ok())
                    .filter(|&p| p >= 1)
                    .ok_or("\"power\" must be a positive integer")?,
            };
            Ok(Generator::Reciprocal { power })
        }
        "geometric" => Ok(Generator::Geometric {
            ratio: rational_field(field("ratio")?, "ratio")?,
        }),
        "constant" => Ok(Generator::Constant {
            value: rational_field(field("value")?, "value")?,
        }),
        "list" => {
            let values = field("values")?
                .as_array()
                .ok_or("\"values\" must be an array")?
                .iter()
                .map(|x| rational_field(x, "list entry"))
                .collect::<std::result::Result<_, _>>()?;
            Ok(Generator::List { values })
        }
        other => Err(format!("unknown generator family '{other}'")),
    }
}

/// Tower configuration: `{"alpha": .., "beta": .., "max_dim": N}`.
pub fn parse_tower(text: &str) -> std::result::Result<DiagonalTower, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let alpha = parse_generator(v.get("alpha").ok_or("missing \"alpha\"")?)?;
    let beta = parse_generator(v.get("beta").ok_or("missing \"beta\"")?)?;
    let max_dim = v
        .get("max_dim")
        .and_then(Value::as_u64)
        .ok_or("\"max_dim\" must be a nonnegative integer")? as usize;
    DiagonalTower::new(alpha, beta, max_dim).map_err(|e| e.to_string())
}

fn generator_json(g: &Generator) -> Value {
    match g {
        Generator::Reciprocal { power } => json!({"family": "reciprocal", "power": power}),
        Generator::Geometric { ratio } => {
            json!({"family": "geometric", "ratio": ratio.to_string()})
        }
        Generator::Constant { value } => json!({"family": "constant", "value": value.to_string()}),
        Generator::List { values } => {
            json!({"family": "list", "values": values.iter().map(|x| x.to_string()).collect::<Vec<_>>()})
        }
    }
}

pub fn tower_payload(tower: &DiagonalTower, tol: &Tolerance) -> Result<Payload> {
    let report = run_tower(tower, tol)?;
    let constants: Vec<String> = report
        .constants
        .iter()
        .map(SectionConstant::to_string)
        .collect();
    let sections: Vec<Value> = report
        .sections
        .iter()
        .map(|s| {
            let interval = s
                .squared_interval
                .as_ref()
                .map(|(lo, hi)| json!([lo.to_string(), hi.to_string()]));
            json!({
                "dim": s.dim,
                "constant": s.constant.to_string(),
                "dominated": s.dominated,
                "regular": s.regular,
                "singular": s.singular,
                "squared_constant_interval": interval,
            })
        })
        .collect();
    let fit = report.growth_fit.as_ref().map(|f| {
        json!({
            "model": f.model.as_str(),
            "parameter": f.parameter,
            "residual": f.residual,
            "tail_slope": f.tail_slope,
        })
    });
    let results = json!({
        "alpha": generator_json(&tower.alpha),
        "beta": generator_json(&tower.beta),
        "max_dim": tower.max_dim,
        "dims": report.dims,
        "constants": constants,
        "verdict": report.verdict.as_str(),
        "growth_fit": fit,
        "bounded_slope_threshold": BOUNDED_SLOPE,
        "sections": sections,
    });
    let mut verification = BTreeMap::new();
    verification.insert(
        "constants match classifier".to_string(),
        report.all_cross_validated(),
    );
    verification.insert(
        "constants non-decreasing".to_string(),
        report.constants_monotone,
    );
    Ok(Payload::new(results, verification))
}
