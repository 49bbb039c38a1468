use crate::error::{Error, Result};

/// Float-mode decision thresholds. Exact mode ignores both fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Singular values at or below `rank_rtol * scale` count as zero.
    pub rank_rtol: f64,
    /// Absolute tolerance for matrix comparisons, multiplied by `max(1, |entries|)`.
    pub eq_atol: f64,
}

pub const DEFAULT_RANK_RTOL: f64 = 1e-11;
pub const DEFAULT_EQ_ATOL: f64 = 1e-9;

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rtol: DEFAULT_RANK_RTOL,
            eq_atol: DEFAULT_EQ_ATOL,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rtol: f64, eq_atol: f64) -> Result<Self> {
        if !(rank_rtol > 0.0 && rank_rtol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rank_rtol must be positive, got {rank_rtol}"
            )));
        }
        if !(eq_atol > 0.0 && eq_atol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "eq_atol must be positive, got {eq_atol}"
            )));
        }
        Ok(Tolerance { rank_rtol, eq_atol })
    }

    /// Cutoff below which a singular value of an operator of norm `scale` is treated as zero.
    pub fn rank_cutoff(&self, scale: f64) -> f64 {
        self.rank_rtol * scale
    }

    /// Absolute comparison threshold at the given magnitude.
    pub fn eq_threshold(&self, scale: f64) -> f64 {
        self.eq_atol * scale.max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive() {
        assert!(Tolerance::new(0.0, 1e-9).is_err());
        assert!(Tolerance::new(1e-12, -1.0).is_err());
        assert!(Tolerance::new(f64::NAN, 1e-9).is_err());
        assert!(Tolerance::new(1e-12, 1e-9).is_ok());
    }
}
