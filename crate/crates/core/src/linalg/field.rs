use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::Matrix;
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

/// Exact rational scalar. Always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Scalar field tag carried by every matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "rational" => Ok(Mode::Exact),
            "float" | "f64" => Ok(Mode::Float),
            other => Err(Error::InvalidInput(format!(
                "unknown scalar mode '{other}'"
            ))),
        }
    }
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A scalar field together with the mode-specific linear algebra kernel.
///
/// Everything generic in this crate is written against this trait. The two
/// implementations differ only where a discrete decision is made: exact
/// elimination for [`Rational`], SVD / symmetric eigendecomposition with a
/// rank cutoff for `f64`.
pub trait Field:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Nearest representable value; exact for rationals (a dyadic fraction).
    /// Non-finite input maps to zero.
    fn from_f64(x: f64) -> Self;
    /// Structural zero test: exact in rational mode, `== 0.0` in float mode.
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    fn is_negative(&self) -> bool;

    /// Canonical basis of the column span.
    fn range_basis(m: &Matrix<Self>, tol: &Tolerance) -> Matrix<Self>;
    /// Canonical basis of the column span, deciding rank relative to `scale`
    /// instead of the matrix's own largest singular value.
    fn range_basis_scaled(m: &Matrix<Self>, scale: f64, tol: &Tolerance) -> Matrix<Self>;
    /// Canonical basis of the null space.
    fn kernel_basis(m: &Matrix<Self>, tol: &Tolerance) -> Matrix<Self>;
    fn kernel_basis_scaled(m: &Matrix<Self>, scale: f64, tol: &Tolerance) -> Matrix<Self>;
    /// Moore-Penrose pseudoinverse.
    fn pinv(m: &Matrix<Self>, tol: &Tolerance) -> Matrix<Self>;
    /// Orthogonal projection onto the span of a canonical basis.
    fn projection_from_basis(basis: &Matrix<Self>) -> Matrix<Self>;
    /// Positive semidefiniteness of a symmetric matrix.
    fn is_psd(m: &Matrix<Self>, tol: &Tolerance) -> bool;
    /// Principal square root of a symmetric PSD matrix.
    fn psd_sqrt(m: &Matrix<Self>, tol: &Tolerance) -> Result<Matrix<Self>>;
    /// Entrywise equality: exact, or within `eq_atol` scaled by the entry magnitude.
    fn approx_eq(a: &Matrix<Self>, b: &Matrix<Self>, tol: &Tolerance) -> bool;
    /// Equality of the subspaces spanned by two canonical bases.
    fn same_span(u: &Matrix<Self>, v: &Matrix<Self>, tol: &Tolerance) -> bool;
    /// Largest singular value, approximated in float for rational input.
    fn spectral_norm(m: &Matrix<Self>) -> f64;
    /// A positive lower bound for the smallest nonzero eigenvalue of a
    /// symmetric PSD matrix, or `None` for the zero matrix or a matrix that is
    /// not PSD. Rigorous in exact mode.
    fn positive_spectrum_floor(m: &Matrix<Self>, tol: &Tolerance) -> Option<Self>;
    /// Polar decomposition `M = W S`: `S = (M*M)^{1/2}` and `W` a partial
    /// isometry vanishing on `ker M`.
    fn polar(m: &Matrix<Self>, tol: &Tolerance) -> Result<(Matrix<Self>, Matrix<Self>)>;
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        // huge numerators/denominators: scale both down by a common power of two
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Exact rational value of a finite binary64 number.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `p`, `p/q`, or a plain decimal such as `-0.125` / `1e-3` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse '{s}' as a rational number"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in '{s}'")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

impl Field for Rational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        rational(num, den)
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn from_f64(x: f64) -> Self {
        rational_from_f64(x).unwrap_or_else(Zero::zero)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn range_basis(m: &Matrix<Self>, _tol: &Tolerance) -> Matrix<Self> {
        super::exact::column_echelon_basis(m)
    }
    fn range_basis_scaled(m: &Matrix<Self>, _scale: f64, _tol: &Tolerance) -> Matrix<Self> {
        super::exact::column_echelon_basis(m)
    }
    fn kernel_basis(m: &Matrix<Self>, _tol: &Tolerance) -> Matrix<Self> {
        super::exact::null_space(m)
    }
    fn kernel_basis_scaled(m: &Matrix<Self>, _scale: f64, _tol: &Tolerance) -> Matrix<Self> {
        super::exact::null_space(m)
    }
    fn pinv(m: &Matrix<Self>, _tol: &Tolerance) -> Matrix<Self> {
        super::exact::pinv(m)
    }
    fn projection_from_basis(basis: &Matrix<Self>) -> Matrix<Self> {
        super::exact::projection(basis)
    }
    fn is_psd(m: &Matrix<Self>, _tol: &Tolerance) -> bool {
        super::exact::is_psd_ldlt(m)
    }
    fn psd_sqrt(_m: &Matrix<Self>, _tol: &Tolerance) -> Result<Matrix<Self>> {
        Err(Error::ExactModeUnsupported("square root of a PSD matrix"))
    }
    fn approx_eq(a: &Matrix<Self>, b: &Matrix<Self>, _tol: &Tolerance) -> bool {
        a == b
    }
    fn same_span(u: &Matrix<Self>, v: &Matrix<Self>, _tol: &Tolerance) -> bool {
        // canonical reduced column echelon bases are unique
        u == v
    }
    fn spectral_norm(m: &Matrix<Self>) -> f64 {
        super::float::spectral_norm(&m.to_f64())
    }
    fn positive_spectrum_floor(m: &Matrix<Self>, _tol: &Tolerance) -> Option<Self> {
        super::exact::positive_spectrum_floor(m)
    }
    fn polar(_m: &Matrix<Self>, _tol: &Tolerance) -> Result<(Matrix<Self>, Matrix<Self>)> {
        Err(Error::ExactModeUnsupported("polar decomposition"))
    }
}

impl Field for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            x
        } else {
            0.0
        }
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn range_basis(m: &Matrix<Self>, tol: &Tolerance) -> Matrix<Self> {
        super::float::range_basis(m, None, tol)
    }
    fn range_basis_scaled(m: &Matrix<Self>, scale: f64, tol: &Tolerance) -> Matrix<Self> {
        super::float::range_basis(m, Some(scale), tol)
    }
    fn kernel_basis(m: &Matrix<Self>, tol: &Tolerance) -> Matrix<Self> {
        super::float::kernel_basis(m, None, tol)
    }
    fn kernel_basis_scaled(m: &Matrix<Self>, scale: f64, tol: &Tolerance) -> Matrix<Self> {
        super::float::kernel_basis(m, Some(scale), tol)
    }
    fn pinv(m: &Matrix<Self>, tol: &Tolerance) -> Matrix<Self> {
        super::float::pinv(m, tol)
    }
    fn projection_from_basis(basis: &Matrix<Self>) -> Matrix<Self> {
        // float bases are orthonormal
        basis * &basis.adjoint()
    }
    fn is_psd(m: &Matrix<Self>, tol: &Tolerance) -> bool {
        super::float::min_eigenvalue(m) >= -tol.eq_threshold(m.max_abs())
    }
    fn psd_sqrt(m: &Matrix<Self>, tol: &Tolerance) -> Result<Matrix<Self>> {
        super::float::psd_sqrt(m, tol)
    }
    fn approx_eq(a: &Matrix<Self>, b: &Matrix<Self>, tol: &Tolerance) -> bool {
        if a.shape() != b.shape() {
            return false;
        }
        let scale = a.max_abs().max(b.max_abs());
        let limit = tol.eq_threshold(scale);
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .all(|(x, y)| (x - y).abs() <= limit)
    }
    fn same_span(u: &Matrix<Self>, v: &Matrix<Self>, tol: &Tolerance) -> bool {
        if u.rows() != v.rows() || u.cols() != v.cols() {
            return false;
        }
        let diff = &Self::projection_from_basis(u) - &Self::projection_from_basis(v);
        diff.max_abs() <= tol.eq_atol
    }
    fn spectral_norm(m: &Matrix<Self>) -> f64 {
        super::float::spectral_norm(m)
    }
    fn positive_spectrum_floor(m: &Matrix<Self>, tol: &Tolerance) -> Option<Self> {
        let (values, _) = super::float::symmetric_eigen(m);
        let top = values.last().copied().unwrap_or(0.0);
        let cutoff = tol.rank_cutoff(top);
        values
            .into_iter()
            .find(|&v| v > cutoff && v > 0.0)
            .map(|v| v * 0.5)
    }
    fn polar(m: &Matrix<Self>, tol: &Tolerance) -> Result<(Matrix<Self>, Matrix<Self>)> {
        Ok(super::float::polar(m, tol))
    }
}
