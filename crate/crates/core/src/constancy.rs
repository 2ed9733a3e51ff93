//! Numeric meaning of "constant" and "non-zero constant" along a curve.

use serde::{Deserialize, Serialize};

use crate::curve::JetMode;
use crate::error::{GeomError, Result};
use crate::pseudometric::DEFAULT_NULL_TOL;

/// Tolerance set shared by every verdict in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
    /// A mean below this magnitude counts as zero.
    pub atol_zero: f64,
    pub null_tol: f64,
    /// Relative floor on `|g(E,E)| / |E|^2` during Gram–Schmidt.
    pub degeneracy: f64,
    /// Curvatures at or below this value break the proper-curve gate.
    pub curvature_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::for_mode(JetMode::Analytic)
    }
}

impl Tolerances {
    pub fn for_mode(mode: JetMode) -> Self {
        let rtol = match mode {
            JetMode::Analytic => 1e-7,
            JetMode::FiniteDifference => 1e-4,
        };
        Self {
            atol: 1e-9,
            rtol,
            atol_zero: 1e-6,
            null_tol: DEFAULT_NULL_TOL,
            degeneracy: 1e-10,
            curvature_floor: 1e-9,
        }
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstancyVerdict {
    pub mean: f64,
    pub max_abs_dev: f64,
    pub rel_dev: f64,
    pub is_constant: bool,
    pub is_nonzero: bool,
}

pub fn constancy_test(values: &[f64], atol: f64, rtol: f64, atol_zero: f64) -> Result<ConstancyVerdict> {
    constancy_with_floor(values, atol, rtol, atol_zero, 0.0)
}

/// As [`constancy_test`], with an extra absolute allowance for values that
/// carry finite-difference noise.
pub fn constancy_with_floor(
    values: &[f64],
    atol: f64,
    rtol: f64,
    atol_zero: f64,
    noise_floor: f64,
) -> Result<ConstancyVerdict> {
    if values.is_empty() {
        return Err(GeomError::EmptyInput);
    }
    let base = values[0];
    let mean = base + values.iter().map(|v| v - base).sum::<f64>() / values.len() as f64;
    let max_abs_dev = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    let is_constant = max_abs_dev <= atol + rtol * mean.abs() + noise_floor;
    Ok(ConstancyVerdict {
        mean,
        max_abs_dev,
        rel_dev: max_abs_dev / (atol + mean.abs()),
        is_constant,
        is_nonzero: mean.abs() > atol_zero,
    })
}

impl Tolerances {
    pub fn constancy(&self, values: &[f64]) -> Result<ConstancyVerdict> {
        constancy_test(values, self.atol, self.rtol, self.atol_zero)
    }
}
