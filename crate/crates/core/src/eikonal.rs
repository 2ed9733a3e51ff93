//! Scalar fields, eikonal and parallelism gates, f-eikonal V_n-slant helix
//! detection, the harmonic-curvature identity system and axis reconstruction.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::constancy::{ConstancyVerdict, Tolerances};
use crate::error::{check_dim, GeomError, Result};
use crate::fd::{grid_derivative, interior};
use crate::frenet::FrameField;
use crate::harmonic::{corollary32_residual, last_harmonic_verdict, lemma32_check, sum_invariant, HarmonicProfile, Lemma32Report};
use crate::pseudometric::SignatureMetric;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type CovectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type HessianFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// Names accepted by [`ScalarField::builtin`].
pub const BUILTIN_FIELDS: &[(&str, &str)] = &[
    ("quadratic_x1", "f = x_1^2"),
    ("half_radial_x1x2", "f = (x_1^2 + x_2^2) / 2"),
    ("linear_sum_x1x2", "f = x_1 + x_2 (analytic form, zero Hessian)"),
];

#[derive(Clone)]
pub enum FieldForm {
    /// `f(x) = df · x`; the gradient is constant and the Hessian vanishes.
    Linear { df: Vec<f64> },
    Analytic {
        value: ScalarFn,
        differential: CovectorFn,
        hessian: Option<HessianFn>,
    },
}

#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    form: FieldForm,
    label: String,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish()
    }
}

fn fmt_covector(df: &[f64]) -> String {
    let parts: Vec<String> = df.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(","))
}

impl ScalarField {
    pub fn linear(df: Vec<f64>) -> Self {
        let label = format!("linear df={}", fmt_covector(&df));
        Self {
            dim: df.len(),
            form: FieldForm::Linear { df },
            label,
        }
    }

    pub fn analytic(
        dim: usize,
        label: impl Into<String>,
        value: ScalarFn,
        differential: CovectorFn,
        hessian: Option<HessianFn>,
    ) -> Self {
        Self {
            dim,
            form: FieldForm::Analytic {
                value,
                differential,
                hessian,
            },
            label: label.into(),
        }
    }

    pub fn builtin(name: &str, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(GeomError::InvalidSpec("builtin fields need dimension >= 2".into()));
        }
        let diag = move |d: Vec<f64>| -> Vec<Vec<f64>> {
            (0..dim)
                .map(|i| (0..dim).map(|j| if i == j { d[i] } else { 0.0 }).collect())
                .collect()
        };
        let unit = |entries: &[(usize, f64)]| -> Vec<f64> {
            let mut v = vec![0.0; dim];
            for (i, x) in entries {
                v[*i] = *x;
            }
            v
        };
        let field = match name {
            "quadratic_x1" => {
                let h = diag(unit(&[(0, 2.0)]));
                Self::analytic(
                    dim,
                    name,
                    Arc::new(|x: &[f64]| x[0] * x[0]),
                    Arc::new(move |x: &[f64]| {
                        let mut d = vec![0.0; x.len()];
                        d[0] = 2.0 * x[0];
                        d
                    }),
                    Some(Arc::new(move |_: &[f64]| h.clone())),
                )
            }
            "half_radial_x1x2" => {
                let h = diag(unit(&[(0, 1.0), (1, 1.0)]));
                Self::analytic(
                    dim,
                    name,
                    Arc::new(|x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1])),
                    Arc::new(move |x: &[f64]| {
                        let mut d = vec![0.0; x.len()];
                        d[0] = x[0];
                        d[1] = x[1];
                        d
                    }),
                    Some(Arc::new(move |_: &[f64]| h.clone())),
                )
            }
            "linear_sum_x1x2" => {
                let d = unit(&[(0, 1.0), (1, 1.0)]);
                let zero = vec![vec![0.0; dim]; dim];
                Self::analytic(
                    dim,
                    name,
                    Arc::new(|x: &[f64]| x[0] + x[1]),
                    Arc::new(move |_: &[f64]| d.clone()),
                    Some(Arc::new(move |_: &[f64]| zero.clone())),
                )
            }
            other => return Err(GeomError::InvalidSpec(format!("unknown builtin field '{other}'"))),
        };
        Ok(field)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn form(&self) -> &FieldForm {
        &self.form
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        match &self.form {
            FieldForm::Linear { df } => df.iter().zip(x).map(|(a, b)| a * b).sum(),
            FieldForm::Analytic { value, .. } => value(x),
        }
    }

    pub fn differential_at(&self, x: &[f64]) -> Vec<f64> {
        match &self.form {
            FieldForm::Linear { df } => df.clone(),
            FieldForm::Analytic { differential, .. } => differential(x),
        }
    }

    /// Parses `{"dim": n, "form": "linear", "df": [...]}` or
    /// `{"form": "analytic", "builtin": name}`; analytic fields take `dim`
    /// from the curve when absent.
    pub fn from_json(text: &str, curve_dim: usize) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct FieldJson {
            dim: Option<usize>,
            form: String,
            df: Option<Vec<f64>>,
            builtin: Option<String>,
        }
        let raw: FieldJson =
            serde_json::from_str(text).map_err(|e| GeomError::InvalidSpec(format!("field JSON: {e}")))?;
        let dim = raw.dim.unwrap_or(curve_dim);
        check_dim(curve_dim, dim)?;
        match raw.form.as_str() {
            "linear" => {
                let df = raw
                    .df
                    .ok_or_else(|| GeomError::InvalidSpec("linear field needs 'df'".into()))?;
                check_dim(dim, df.len())?;
                Ok(Self::linear(df))
            }
            "analytic" => {
                let name = raw
                    .builtin
                    .ok_or_else(|| GeomError::InvalidSpec("analytic field needs 'builtin'".into()))?;
                Self::builtin(&name, dim)
            }
            other => Err(GeomError::InvalidSpec(format!("unknown field form '{other}'"))),
        }
    }
}

fn check_field(m: &SignatureMetric, sf: &ScalarField, ff: &FrameField) -> Result<()> {
    check_dim(m.dim(), ff.dim())?;
    check_dim(m.dim(), sf.dim)
}

/// `∇f` at every sample point of the frame field.
pub fn gradient_along_curve(m: &SignatureMetric, sf: &ScalarField, ff: &FrameField) -> Result<Vec<Vec<f64>>> {
    check_field(m, sf, ff)?;
    ff.apparatus
        .iter()
        .map(|a| {
            let df = sf.differential_at(&a.point);
            check_dim(m.dim(), df.len())?;
            Ok(m.raise(&df))
        })
        .collect()
}

/// Constancy of `g(∇f, ∇f)` along the curve.
pub fn eikonal_check(m: &SignatureMetric, sf: &ScalarField, ff: &FrameField, tol: &Tolerances) -> Result<ConstancyVerdict> {
    let grad = gradient_along_curve(m, sf, ff)?;
    let q: Vec<f64> = grad.iter().map(|v| m.g(v, v)).collect();
    tol.constancy(&q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParallelCheck {
    pub hessian_max: f64,
    /// Largest centred-difference derivative of a gradient component along the grid.
    pub fd_max: f64,
    pub fd_threshold: f64,
    pub parallel: bool,
}

/// `∇f` is parallel iff the Hessian vanishes at every sample; the grid
/// derivative of `∇f` must agree.
pub fn parallel_detail(m: &SignatureMetric, sf: &ScalarField, ff: &FrameField, tol: &Tolerances) -> Result<ParallelCheck> {
    check_field(m, sf, ff)?;
    let hessian = match &sf.form {
        FieldForm::Linear { .. } => {
            return Ok(ParallelCheck {
                hessian_max: 0.0,
                fd_max: 0.0,
                fd_threshold: tol.atol,
                parallel: true,
            })
        }
        FieldForm::Analytic { hessian: None, .. } => return Err(GeomError::MissingHessian(sf.label.clone())),
        FieldForm::Analytic { hessian: Some(h), .. } => h,
    };
    let mut hessian_max = 0.0f64;
    for a in &ff.apparatus {
        for row in hessian(&a.point) {
            for v in row {
                hessian_max = hessian_max.max(v.abs());
            }
        }
    }
    let grad = gradient_along_curve(m, sf, ff)?;
    let scale = grad.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let mut fd_max = 0.0f64;
    for c in 0..m.dim() {
        let comp: Vec<f64> = grad.iter().map(|g| g[c]).collect();
        let d = grid_derivative(ff.arclengths(), &comp);
        for j in interior(ff.len()) {
            fd_max = fd_max.max(d[j].abs());
        }
    }
    let fd_threshold = tol.atol + tol.rtol * scale;
    Ok(ParallelCheck {
        hessian_max,
        fd_max,
        fd_threshold,
        parallel: hessian_max <= tol.atol && fd_max <= fd_threshold,
    })
}

pub fn parallel_check(m: &SignatureMetric, sf: &ScalarField, ff: &FrameField, tol: &Tolerances) -> Result<bool> {
    Ok(parallel_detail(m, sf, ff, tol)?.parallel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Eikonal,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SlantHelix,
    NotSlant,
    HypothesisFailed(Hypothesis),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::SlantHelix => f.write_str("SlantHelix"),
            Verdict::NotSlant => f.write_str("NotSlant"),
            Verdict::HypothesisFailed(Hypothesis::Eikonal) => f.write_str("HypothesisFailed(eikonal)"),
            Verdict::HypothesisFailed(Hypothesis::Parallel) => f.write_str("HypothesisFailed(parallel)"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlantDetection {
    pub eikonal: ConstancyVerdict,
    pub parallel_ok: bool,
    /// Constancy of `g(∇f, V_n)`.
    pub slant: ConstancyVerdict,
    pub verdict: Verdict,
}

pub fn slant_detect(m: &SignatureMetric, sf: &ScalarField, ff: &FrameField, tol: &Tolerances) -> Result<SlantDetection> {
    let eikonal = eikonal_check(m, sf, ff, tol)?;
    let parallel_ok = parallel_check(m, sf, ff, tol)?;
    let grad = gradient_along_curve(m, sf, ff)?;
    let n = m.dim();
    let along: Vec<f64> = grad
        .iter()
        .zip(&ff.apparatus)
        .map(|(g, a)| m.g(g, &a.frame[n - 1]))
        .collect();
    let slant = tol.constancy(&along)?;
    let verdict = if !eikonal.is_constant {
        Verdict::HypothesisFailed(Hypothesis::Eikonal)
    } else if !parallel_ok {
        Verdict::HypothesisFailed(Hypothesis::Parallel)
    } else if slant.is_constant && slant.is_nonzero {
        Verdict::SlantHelix
    } else {
        Verdict::NotSlant
    };
    Ok(SlantDetection {
        eikonal,
        parallel_ok,
        slant,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm31Residual {
    /// `max |g(V_{n-(i+1)}, ∇f) − H*_i g(V_n, ∇f)|` over samples and i = 1..=n-2.
    pub max_system_residual: f64,
    /// `max |g(∇f, V_{n-1})|`.
    pub vn1_orthogonality: f64,
}

pub fn theorem31_residual(
    m: &SignatureMetric,
    sf: &ScalarField,
    ff: &FrameField,
    hp: &HarmonicProfile,
) -> Result<Thm31Residual> {
    let grad = gradient_along_curve(m, sf, ff)?;
    check_dim(ff.len(), hp.len())?;
    let n = m.dim();
    let mut sys = 0.0f64;
    let mut orth = 0.0f64;
    for ((g, a), h) in grad.iter().zip(&ff.apparatus).zip(&hp.values) {
        let along = m.g(g, &a.frame[n - 1]);
        for i in 1..=n - 2 {
            let lhs = m.g(&a.frame[n - i - 2], g);
            sys = sys.max((lhs - h[i] * along).abs());
        }
        orth = orth.max(m.g(g, &a.frame[n - 2]).abs());
    }
    Ok(Thm31Residual {
        max_system_residual: sys,
        vn1_orthogonality: orth,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisDecomposition {
    /// Frame coefficients predicted from harmonic curvatures:
    /// `λ_j = ε_{j-1} H*_{n-1-j} c` for j <= n-2, `λ_{n-1} = 0`, `λ_n = ε_{n-1} c`.
    pub coefficients: Vec<f64>,
    /// Measured coefficients `ε_{j-1} g(∇f, V_j)`.
    pub measured: Vec<f64>,
    /// `Σ λ_j V_j`.
    pub reconstructed_axis: Vec<f64>,
    pub comparison_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisSummary {
    /// Mean of `g(∇f, V_n)` over the grid.
    pub detected_constant: f64,
    pub max_comparison_error: f64,
    pub max_lambda_n1: f64,
}

/// Rebuilds `∇f` from the frame, the harmonic curvatures and the detected
/// constant `c = g(∇f, V_n)`.
pub fn axis_reconstruct(
    m: &SignatureMetric,
    sf: &ScalarField,
    ff: &FrameField,
    hp: &HarmonicProfile,
) -> Result<(Vec<AxisDecomposition>, AxisSummary)> {
    let grad = gradient_along_curve(m, sf, ff)?;
    check_dim(ff.len(), hp.len())?;
    let n = m.dim();
    let c = grad
        .iter()
        .zip(&ff.apparatus)
        .map(|(g, a)| m.g(g, &a.frame[n - 1]))
        .sum::<f64>()
        / ff.len() as f64;
    let mut per_sample = Vec::with_capacity(ff.len());
    let mut max_err = 0.0f64;
    let mut max_l = 0.0f64;
    for ((g, a), h) in grad.iter().zip(&ff.apparatus).zip(&hp.values) {
        let eps = |j: usize| f64::from(a.epsilons[j]);
        let mut coefficients = vec![0.0; n];
        for j in 1..=n - 2 {
            coefficients[j - 1] = eps(j - 1) * h[n - 1 - j] * c;
        }
        coefficients[n - 1] = eps(n - 1) * c;
        let measured: Vec<f64> = (0..n).map(|j| eps(j) * m.g(g, &a.frame[j])).collect();
        let mut axis = vec![0.0; n];
        for (lam, v) in coefficients.iter().zip(&a.frame) {
            for (x, y) in axis.iter_mut().zip(v) {
                *x += lam * y;
            }
        }
        let err = axis.iter().zip(g).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        max_err = max_err.max(err);
        max_l = max_l.max(measured[n - 2].abs());
        per_sample.push(AxisDecomposition {
            coefficients,
            measured,
            reconstructed_axis: axis,
            comparison_error: err,
        });
    }
    Ok((
        per_sample,
        AxisSummary {
            detected_constant: c,
            max_comparison_error: max_err,
            max_lambda_n1: max_l,
        },
    ))
}

pub const MODEL_REGIME: &str = "flat/parallel ⇒ constant axis, coincides with V_n-slant helix";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlantReport {
    pub eikonal: ConstancyVerdict,
    pub parallel_ok: bool,
    pub slant: ConstancyVerdict,
    pub thm31_max_residual: f64,
    pub vn1_orthogonality: f64,
    pub axis: AxisSummary,
    /// Constancy of the signed sum of squared harmonic curvatures.
    pub thm33: ConstancyVerdict,
    /// Verdict on `|H*_{n-2}|`.
    pub last_harmonic: ConstancyVerdict,
    /// Slant helix whose signed sum is constant but zero.
    pub thm33_anomalous: bool,
    pub lemma32: Lemma32Report,
    pub cor32_residual: f64,
    pub near_null: bool,
    pub model_regime: &'static str,
    pub verdict: Verdict,
}

pub fn full_report(
    m: &SignatureMetric,
    sf: &ScalarField,
    ff: &FrameField,
    hp: &HarmonicProfile,
    tol: &Tolerances,
) -> Result<SlantReport> {
    let det = slant_detect(m, sf, ff, tol)?;
    let thm31 = theorem31_residual(m, sf, ff, hp)?;
    let (_, axis) = axis_reconstruct(m, sf, ff, hp)?;
    let thm33 = sum_invariant(hp, tol)?;
    let last_harmonic = last_harmonic_verdict(hp, tol)?;
    let lemma32 = lemma32_check(hp, ff, tol)?;
    let cor32_residual = corollary32_residual(hp, ff);
    let report = SlantReport {
        thm33_anomalous: det.verdict == Verdict::SlantHelix && thm33.is_constant && !thm33.is_nonzero,
        eikonal: det.eikonal,
        parallel_ok: det.parallel_ok,
        slant: det.slant,
        thm31_max_residual: thm31.max_system_residual,
        vn1_orthogonality: thm31.vn1_orthogonality,
        axis,
        thm33,
        last_harmonic,
        lemma32,
        cor32_residual,
        near_null: ff.grid.near_null,
        model_regime: MODEL_REGIME,
        verdict: det.verdict,
    };
    debug_assert!(
        report.verdict != Verdict::SlantHelix
            || (report.eikonal.is_constant && report.parallel_ok && report.slant.is_constant && report.slant.is_nonzero)
    );
    Ok(report)
}
