//! Growing diagonal sections `A_n = diag(alpha_1..alpha_n)`,
//! `B_n = diag(beta_1..beta_n)` that expose the gap between domination and
//! almost domination, plus validation of approximating witness sequences.

use std::fmt;

use rayon::prelude::*;

use crate::classify::{is_dominated, DominationConstant};
use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{Field, Matrix, Rational, Subspace, Tolerance};

/// Slope of `ln c_n` against `ln n` below which `c_n` counts as bounded.
pub const BOUNDED_SLOPE: f64 = 0.05;

/// Diagonal entry families, indexed from `k = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `1 / k^power`.
    Reciprocal {
        power: u32,
    },
    /// `ratio^k`.
    Geometric {
        ratio: Rational,
    },
    Constant {
        value: Rational,
    },
    List {
        values: Vec<Rational>,
    },
}

impl Generator {
    pub fn reciprocal() -> Self {
        Generator::Reciprocal { power: 1 }
    }

    pub fn unit() -> Self {
        Generator::Constant {
            value: Rational::from_i64(1),
        }
    }

    /// Entry `k` (1-based); `None` past the end of a list.
    pub fn value(&self, k: usize) -> Option<Rational> {
        match self {
            Generator::Reciprocal { power } => {
                let denom = num_traits::pow(Rational::from_i64(k as i64), *power as usize);
                Some(Rational::from_i64(1) / denom)
            }
            Generator::Geometric { ratio } => Some(num_traits::pow(ratio.clone(), k)),
            Generator::Constant { value } => Some(value.clone()),
            Generator::List { values } => values.get(k.checked_sub(1)?).cloned(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Generator::Reciprocal { .. } => "reciprocal",
            Generator::Geometric { .. } => "geometric",
            Generator::Constant { .. } => "constant",
            Generator::List { .. } => "list",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalTower {
    pub alpha: Generator,
    pub beta: Generator,
    pub max_dim: usize,
}

impl DiagonalTower {
    pub fn new(alpha: Generator, beta: Generator, max_dim: usize) -> Result<Self> {
        if max_dim < 2 {
            return Err(Error::InvalidInput(format!(
                "tower needs max_dim >= 2, got {max_dim}"
            )));
        }
        for (name, g) in [("alpha", &alpha), ("beta", &beta)] {
            if g.value(max_dim).is_none() {
                return Err(Error::InvalidInput(format!(
                    "{name} list has fewer than {max_dim} entries"
                )));
            }
        }
        Ok(DiagonalTower {
            alpha,
            beta,
            max_dim,
        })
    }

    fn entries(&self, g: &Generator, n: usize) -> Vec<Rational> {
        (1..=n)
            .map(|k| g.value(k).expect("validated length"))
            .collect()
    }

    /// `(A_n, B_n)`.
    pub fn section(&self, n: usize) -> (Matrix<Rational>, Matrix<Rational>) {
        (
            Matrix::diag(&self.entries(&self.alpha, n)),
            Matrix::diag(&self.entries(&self.beta, n)),
        )
    }
}

/// Least domination constant of a section, or infinite when
/// `ker A_n` is not inside `ker B_n`.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionConstant {
    Finite(Rational),
    Infinite,
}

impl SectionConstant {
    pub fn to_f64(&self) -> f64 {
        match self {
            SectionConstant::Finite(c) => c.to_f64(),
            SectionConstant::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SectionConstant::Finite(_))
    }
}

impl fmt::Display for SectionConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectionConstant::Finite(c) => write!(f, "{c}"),
            SectionConstant::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TowerVerdict {
    DominatedLimit,
    AlmostDominatedNotDominated,
    SingularTrend,
    Undetermined,
}

impl TowerVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            TowerVerdict::DominatedLimit => "dominated-limit",
            TowerVerdict::AlmostDominatedNotDominated => "almost-dominated-not-dominated",
            TowerVerdict::SingularTrend => "singular-trend",
            TowerVerdict::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for TowerVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthModel {
    Constant,
    Logarithmic,
    Polynomial,
    Exponential,
}

impl GrowthModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthModel::Constant => "constant",
            GrowthModel::Logarithmic => "logarithmic",
            GrowthModel::Polynomial => "polynomial",
            GrowthModel::Exponential => "exponential",
        }
    }
}

/// Least-squares fit of `ln c_n`. The parameter is the level `c` for the
/// constant model and the slope against `ln(1 + ln n)`, `ln n` or `n`
/// otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub parameter: f64,
    pub residual: f64,
    /// Slope of `ln c_n` against `ln n` over the upper half of the sections.
    pub tail_slope: f64,
}

#[derive(Debug, Clone)]
pub struct SectionReport {
    pub dim: usize,
    pub constant: SectionConstant,
    pub dominated: bool,
    /// `ker A_n ⊆ ker B_n`: `L(A_n, B_n)` is an operator.
    pub regular: bool,
    /// `ran A_n* ∩ ran B_n* = {0}`.
    pub singular: bool,
    /// Bisection interval for `c_n^2` from the general classifier.
    pub squared_interval: Option<(Rational, Rational)>,
    /// The classifier agrees with the ratio formula.
    pub cross_validated: bool,
}

#[derive(Debug, Clone)]
pub struct TowerReport {
    pub dims: Vec<usize>,
    pub constants: Vec<SectionConstant>,
    pub sections: Vec<SectionReport>,
    pub verdict: TowerVerdict,
    pub growth_fit: Option<GrowthFit>,
    pub constants_monotone: bool,
}

impl TowerReport {
    pub fn all_cross_validated(&self) -> bool {
        self.sections.iter().all(|s| s.cross_validated)
    }
}

/// `max_{k <= n} |beta_k / alpha_k|`, infinite once some `alpha_k = 0` has
/// `beta_k != 0`.
fn ratio_constants(tower: &DiagonalTower) -> Vec<SectionConstant> {
    let mut out = Vec::with_capacity(tower.max_dim);
    let mut current = SectionConstant::Finite(Rational::zero());
    for k in 1..=tower.max_dim {
        let a = tower.alpha.value(k).expect("validated length");
        let b = tower.beta.value(k).expect("validated length");
        current = match current {
            SectionConstant::Infinite => SectionConstant::Infinite,
            SectionConstant::Finite(c) if a.is_zero() => {
                if b.is_zero() {
                    SectionConstant::Finite(c)
                } else {
                    SectionConstant::Infinite
                }
            }
            SectionConstant::Finite(c) => {
                let r = (b / a).abs();
                SectionConstant::Finite(if r > c { r } else { c })
            }
        };
        out.push(current.clone());
    }
    out
}

fn section_report(
    tower: &DiagonalTower,
    n: usize,
    constant: SectionConstant,
    tol: &Tolerance,
) -> Result<SectionReport> {
    let (a, b) = tower.section(n);
    let dom = is_dominated(&a, &b, tol)?;
    let regular = Subspace::kernel(&a, tol).is_subspace_of(&Subspace::kernel(&b, tol), tol)?;
    let singular = Subspace::range(&a, tol)
        .intersect(&Subspace::range(&b, tol), tol)?
        .is_zero();
    let squared_interval = dom.constant.map(|c| (c.squared_lower, c.squared_upper));
    let cross_validated = match (&constant, &squared_interval) {
        (SectionConstant::Finite(c), Some((lo, hi))) => {
            let sq = c.clone() * c;
            dom.dominated && lo <= &sq && &sq <= hi
        }
        (SectionConstant::Infinite, None) => !dom.dominated,
        _ => false,
    };
    Ok(SectionReport {
        dim: n,
        constant,
        dominated: dom.dominated,
        regular,
        singular,
        squared_interval,
        cross_validated,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    (intercept, slope, residual)
}

/// Fits the finite positive constants. `None` when fewer than two remain.
pub fn fit_growth(dims: &[usize], constants: &[SectionConstant]) -> Option<GrowthFit> {
    let points: Vec<(f64, f64)> = dims
        .iter()
        .zip(constants)
        .filter_map(|(&n, c)| match c {
            SectionConstant::Finite(c) if !c.is_zero() && !c.is_negative() => {
                Some((n as f64, c.to_f64().ln()))
            }
            _ => None,
        })
        .collect();
    if points.len() < 2 {
        return None;
    }
    let ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();

    let tail = &points[points.len() / 2..];
    let tail_x: Vec<f64> = tail.iter().map(|p| p.0.ln()).collect();
    let tail_y: Vec<f64> = tail.iter().map(|p| p.1).collect();
    let (_, tail_slope, _) = least_squares(&tail_x, &tail_y);

    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    if tail_slope.abs() < BOUNDED_SLOPE {
        let residual = ys.iter().map(|y| (y - mean).powi(2)).sum();
        return Some(GrowthFit {
            model: GrowthModel::Constant,
            parameter: mean.exp(),
            residual,
            tail_slope,
        });
    }
    let candidates = [
        (
            GrowthModel::Logarithmic,
            ns.iter().map(|n| (1.0 + n.ln()).ln()).collect::<Vec<_>>(),
        ),
        (GrowthModel::Polynomial, ns.iter().map(|n| n.ln()).collect()),
        (GrowthModel::Exponential, ns.clone()),
    ];
    candidates
        .into_iter()
        .map(|(model, xs)| {
            let (_, slope, residual) = least_squares(&xs, &ys);
            GrowthFit {
                model,
                parameter: slope,
                residual,
                tail_slope,
            }
        })
        .min_by(|x, y| x.residual.total_cmp(&y.residual))
}

/// Runs every section `n = 1..=max_dim`, cross-checks the ratio formula
/// against the general classifier, and labels the trend.
pub fn run_tower(tower: &DiagonalTower, tol: &Tolerance) -> Result<TowerReport> {
    let constants = ratio_constants(tower);
    let dims: Vec<usize> = (1..=tower.max_dim).collect();
    let sections = dims
        .par_iter()
        .zip(constants.par_iter())
        .map(|(&n, c)| section_report(tower, n, c.clone(), tol))
        .collect::<Result<Vec<_>>>()?;

    let constants_monotone = constants.windows(2).all(|w| match (&w[0], &w[1]) {
        (SectionConstant::Finite(x), SectionConstant::Finite(y)) => x <= y,
        (_, SectionConstant::Infinite) => true,
        (SectionConstant::Infinite, SectionConstant::Finite(_)) => false,
    });
    let growth_fit = fit_growth(&dims, &constants);

    let some_b = constants
        .iter()
        .any(|c| !matches!(c, SectionConstant::Finite(x) if x.is_zero()));
    let verdict = if sections.iter().all(|s| s.singular) && some_b {
        TowerVerdict::SingularTrend
    } else if constants.iter().any(|c| !c.is_finite()) {
        TowerVerdict::Undetermined
    } else {
        match &growth_fit {
            None => TowerVerdict::DominatedLimit,
            Some(fit) if fit.model == GrowthModel::Constant => TowerVerdict::DominatedLimit,
            Some(_) if sections.iter().all(|s| s.dominated && s.regular) => {
                TowerVerdict::AlmostDominatedNotDominated
            }
            Some(_) => TowerVerdict::Undetermined,
        }
    };

    Ok(TowerReport {
        dims,
        constants,
        sections,
        verdict,
        growth_fit,
        constants_monotone,
    })
}

#[derive(Debug, Clone)]
pub struct WitnessReport<F> {
    /// Check (a): domination constant of each witness.
    pub constants: Vec<Option<DominationConstant<F>>>,
    pub all_dominated: bool,
    /// Check (b): `B_n* B_n <= B_{n+1}* B_{n+1}`.
    pub monotone: bool,
    /// First `n` (0-based) with `B_n* B_n` not below `B_{n+1}* B_{n+1}`.
    pub first_violation: Option<usize>,
    /// Check (c): `B_N* B_N <= B* B`.
    pub terminal_below: bool,
    /// `|B* B - B_N* B_N|` in the spectral norm.
    pub terminal_gap: f64,
    /// The gap vanishes identically.
    pub terminal_exact: bool,
}

impl<F> WitnessReport<F> {
    pub fn passed(&self) -> bool {
        self.all_dominated && self.monotone && self.terminal_below
    }
}

/// Checks a finite approximating sequence `B_1, .., B_N` for `B`: each
/// dominated by `A`, increasing in the PSD order of `B_n* B_n`, and ending
/// below `B* B`.
pub fn validate_ad_witness<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    witnesses: &[Matrix<F>],
    tol: &Tolerance,
) -> Result<WitnessReport<F>> {
    if a.cols() != b.cols() {
        return Err(dim_mismatch("A and B must share a domain"));
    }
    if witnesses.is_empty() {
        return Err(Error::InvalidInput("empty witness sequence".into()));
    }
    if let Some(w) = witnesses
        .iter()
        .find(|w| w.cols() != a.cols() || w.rows() != b.rows())
    {
        return Err(dim_mismatch(format!(
            "witness is {}x{}, expected {}x{}",
            w.rows(),
            w.cols(),
            b.rows(),
            a.cols()
        )));
    }
    let doms = witnesses
        .par_iter()
        .map(|w| is_dominated(a, w, tol))
        .collect::<Result<Vec<_>>>()?;
    let all_dominated = doms.iter().all(|d| d.dominated);
    let constants = doms.into_iter().map(|d| d.constant).collect();

    let grams: Vec<Matrix<F>> = witnesses.iter().map(|w| w.gram()).collect();
    let first_violation = grams
        .windows(2)
        .position(|w| !F::is_psd(&(&w[1] - &w[0]), tol));
    let last = grams.last().expect("nonempty");
    let diff = &b.gram() - last;
    Ok(WitnessReport {
        constants,
        all_dominated,
        monotone: first_violation.is_none(),
        first_violation,
        terminal_below: F::is_psd(&diff, tol),
        terminal_gap: F::spectral_norm(&diff),
        terminal_exact: diff.is_zero(),
    })
}
