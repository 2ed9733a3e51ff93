//! Constant diagonal pseudo-Euclidean metrics on R^n.
//!
//! A metric is a list of signs `σ_j ∈ {-1, +1}`; the inner product is
//! `g(X, Y) = Σ σ_j X_j Y_j`. With constant coefficients the Levi-Civita
//! connection is the ordinary directional derivative, which is what the rest
//! of the crate relies on.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GeomError, Result};

/// Default relative tolerance for classifying a vector as null.
pub const DEFAULT_NULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MetricRepr", into = "MetricRepr")]
pub struct SignatureMetric {
    signs: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
struct MetricRepr {
    signs: Vec<i64>,
}

impl TryFrom<MetricRepr> for SignatureMetric {
    type Error = GeomError;

    fn try_from(repr: MetricRepr) -> Result<Self> {
        let signs = repr
            .signs
            .into_iter()
            .map(|s| match s {
                -1 => Ok(-1i8),
                1 => Ok(1i8),
                other => Err(GeomError::InvalidSpec(format!(
                    "metric sign must be -1 or +1, got {other}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        SignatureMetric::new(signs)
    }
}

impl From<SignatureMetric> for MetricRepr {
    fn from(m: SignatureMetric) -> Self {
        MetricRepr {
            signs: m.signs.into_iter().map(i64::from).collect(),
        }
    }
}

/// Causal character of a vector under an indefinite metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Null,
}

impl SignatureMetric {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(GeomError::InvalidSpec("metric needs at least one sign".into()));
        }
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(GeomError::InvalidSpec(format!(
                "metric sign must be -1 or +1, got {bad}"
            )));
        }
        Ok(Self { signs })
    }

    /// Positive-definite metric diag(+1, ..., +1).
    pub fn euclidean(dim: usize) -> Self {
        Self { signs: vec![1; dim] }
    }

    /// Lorentzian metric diag(-1, +1, ..., +1) with the first axis timelike.
    pub fn minkowski(dim: usize) -> Self {
        let mut signs = vec![1; dim];
        signs[0] = -1;
        Self { signs }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, j: usize) -> i8 {
        self.signs[j]
    }

    /// Number of negative entries.
    pub fn index(&self) -> usize {
        self.signs.iter().filter(|s| **s < 0).count()
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.g(x, y))
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        Ok(self.inner(x, x)?.abs().sqrt())
    }

    /// Null iff `|g(X,X)| <= null_tol * (1 + |X|^2)`; otherwise the sign decides.
    pub fn causal_character(&self, x: &[f64], null_tol: f64) -> Result<CausalCharacter> {
        let q = self.inner(x, x)?;
        Ok(self.classify(q, euclid_norm_sq(x), null_tol))
    }

    /// Converts a covector `df` into the vector `∇f` with `g(∇f, X) = df(X)`.
    pub fn raise_covector(&self, df: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), df.len())?;
        Ok(self.raise(df))
    }

    // Unchecked variants for callers that already validated dimensions.

    pub(crate) fn g(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        self.signs
            .iter()
            .zip(x.iter().zip(y))
            .map(|(s, (a, b))| f64::from(*s) * a * b)
            .sum()
    }

    pub(crate) fn g_norm(&self, x: &[f64]) -> f64 {
        self.g(x, x).abs().sqrt()
    }

    pub(crate) fn raise(&self, df: &[f64]) -> Vec<f64> {
        self.signs
            .iter()
            .zip(df)
            .map(|(s, d)| f64::from(*s) * d)
            .collect()
    }

    pub(crate) fn classify(&self, q: f64, euclid_sq: f64, null_tol: f64) -> CausalCharacter {
        if q.abs() <= null_tol * (1.0 + euclid_sq) {
            CausalCharacter::Null
        } else if q > 0.0 {
            CausalCharacter::Spacelike
        } else {
            CausalCharacter::Timelike
        }
    }
}

pub(crate) fn euclid_norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub(crate) fn euclid_norm(x: &[f64]) -> f64 {
    euclid_norm_sq(x).sqrt()
}
