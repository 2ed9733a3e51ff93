//! Curve representations, parameter and arclength jets, and sample grids.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constancy::Tolerances;
use crate::error::{check_dim, GeomError, Result};
use crate::fd::{composite_central, fornberg_weights, jet_step};
use crate::pseudometric::{euclid_norm_sq, CausalCharacter, SignatureMetric};
use crate::series::Series;

/// Smallest grid accepted by any derivative-bearing computation.
pub const MIN_SAMPLES: usize = 9;

/// Absolute tolerance of the arclength quadrature.
pub const ARCLENGTH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JetMode {
    #[serde(rename = "analytic")]
    Analytic,
    #[serde(rename = "fd")]
    FiniteDifference,
}

/// Point and derivatives `d^k α / dt^k`, k = 1..=order, at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub point: Vec<f64>,
    pub derivs: Vec<Vec<f64>>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.derivs.len()
    }
}

/// Callback returning the jet of a curve at `t` up to the requested order.
pub type JetFn = Arc<dyn Fn(f64, usize) -> Jet + Send + Sync>;

/// Closed-form curve families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `(a cos t, a sin t, b t)`.
    EuclidHelix { a: f64, b: f64 },
    /// `(b t, a cos t, a sin t)` with the first axis timelike; timelike when `b^2 > a^2`.
    MinkowskiHelix { a: f64, b: f64 },
    /// `(a cos pt, a sin pt, b cos qt, b sin qt)`.
    WCurve { a: f64, p: f64, b: f64, q: f64 },
    /// One row of ascending-power coefficients per coordinate.
    Polynomial { coeffs: Vec<Vec<f64>> },
}

#[derive(Clone)]
pub enum CurveForm {
    Family(Family),
    Jets(JetFn),
    Table { params: Vec<f64>, points: Vec<Vec<f64>> },
}

impl fmt::Debug for CurveForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveForm::Family(fam) => f.debug_tuple("Family").field(fam).finish(),
            CurveForm::Jets(_) => f.write_str("Jets(<callback>)"),
            CurveForm::Table { params, .. } => write!(f, "Table({} samples)", params.len()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CurveSpec {
    dim: usize,
    form: CurveForm,
    domain: (f64, f64),
    label: String,
}

fn check_domain(domain: (f64, f64)) -> Result<()> {
    if domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1 {
        Ok(())
    } else {
        Err(GeomError::InvalidSpec(format!(
            "domain must satisfy t_min < t_max, got [{}, {}]",
            domain.0, domain.1
        )))
    }
}

impl CurveSpec {
    pub fn family(family: Family, domain: (f64, f64)) -> Result<Self> {
        check_domain(domain)?;
        let (dim, label) = match &family {
            Family::EuclidHelix { a, b } => {
                if !(*a > 0.0) || *b == 0.0 {
                    return Err(GeomError::InvalidSpec("euclid_helix needs a > 0 and b != 0".into()));
                }
                (3, format!("euclid_helix({a},{b})"))
            }
            Family::MinkowskiHelix { a, b } => {
                if !(*a > 0.0) || !(b * b > a * a) {
                    return Err(GeomError::InvalidSpec(
                        "minkowski_helix needs a > 0 and b^2 > a^2".into(),
                    ));
                }
                (3, format!("minkowski_helix({a},{b})"))
            }
            Family::WCurve { a, p, b, q } => {
                if !(*a > 0.0 && *b > 0.0 && *p > 0.0 && *q > 0.0) || p == q {
                    return Err(GeomError::InvalidSpec(
                        "w_curve needs positive a, p, b, q with p != q".into(),
                    ));
                }
                (4, format!("w_curve({a},{p},{b},{q})"))
            }
            Family::Polynomial { coeffs } => {
                if coeffs.len() < 2 || coeffs.iter().any(|r| r.is_empty()) {
                    return Err(GeomError::InvalidSpec(
                        "polynomial needs one non-empty coefficient row per coordinate".into(),
                    ));
                }
                (coeffs.len(), "polynomial".to_string())
            }
        };
        Ok(Self {
            dim,
            form: CurveForm::Family(family),
            domain,
            label,
        })
    }

    pub fn euclid_helix(a: f64, b: f64, domain: (f64, f64)) -> Result<Self> {
        Self::family(Family::EuclidHelix { a, b }, domain)
    }

    pub fn minkowski_helix(a: f64, b: f64, domain: (f64, f64)) -> Result<Self> {
        Self::family(Family::MinkowskiHelix { a, b }, domain)
    }

    pub fn w_curve(a: f64, p: f64, b: f64, q: f64, domain: (f64, f64)) -> Result<Self> {
        Self::family(Family::WCurve { a, p, b, q }, domain)
    }

    pub fn polynomial(coeffs: Vec<Vec<f64>>, domain: (f64, f64)) -> Result<Self> {
        Self::family(Family::Polynomial { coeffs }, domain)
    }

    /// Curve given by an analytic jet provider.
    pub fn from_jets(dim: usize, domain: (f64, f64), label: impl Into<String>, jets: JetFn) -> Result<Self> {
        check_domain(domain)?;
        Ok(Self {
            dim,
            form: CurveForm::Jets(jets),
            domain,
            label: label.into(),
        })
    }

    /// Tabulated curve; derivatives come from local interpolation.
    pub fn table(params: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self> {
        if params.len() < MIN_SAMPLES || params.len() != points.len() {
            return Err(GeomError::InvalidSpec(format!(
                "table needs at least {MIN_SAMPLES} parameter/point pairs"
            )));
        }
        if params.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(GeomError::InvalidSpec("table parameters must increase strictly".into()));
        }
        let dim = points[0].len();
        if dim != 3 {
            return Err(GeomError::InvalidSpec("sampled tables are limited to dimension 3".into()));
        }
        for p in &points {
            check_dim(dim, p.len())?;
        }
        let domain = (params[0], params[params.len() - 1]);
        Ok(Self {
            dim,
            form: CurveForm::Table { params, points },
            domain,
            label: "table".into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn form(&self) -> &CurveForm {
        &self.form
    }

    /// The curve `u -> α(scale * u + shift)`, scale > 0, on the matching domain.
    pub fn affine_reparam(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(GeomError::InvalidSpec("reparametrization scale must be positive".into()));
        }
        if matches!(self.form, CurveForm::Table { .. }) {
            return Err(GeomError::InvalidSpec("cannot reparametrize a sampled table".into()));
        }
        let inner = self.clone();
        let jets: JetFn = Arc::new(move |u, order| {
            let j = inner.exact_jet(scale * u + shift, order);
            let derivs = j
                .derivs
                .into_iter()
                .enumerate()
                .map(|(k, d)| {
                    let f = scale.powi(k as i32 + 1);
                    d.into_iter().map(|x| f * x).collect()
                })
                .collect();
            Jet { point: j.point, derivs }
        });
        let domain = ((self.domain.0 - shift) / scale, (self.domain.1 - shift) / scale);
        Self::from_jets(self.dim, domain, format!("{}∘({scale}u+{shift})", self.label), jets)
    }

    fn width(&self) -> f64 {
        self.domain.1 - self.domain.0
    }

    /// Jet from the closed form or callback; callers guarantee a non-table form.
    fn exact_jet(&self, t: f64, order: usize) -> Jet {
        match &self.form {
            CurveForm::Family(fam) => family_jet(fam, t, order),
            CurveForm::Jets(f) => f(t, order),
            CurveForm::Table { .. } => unreachable!("tables have no exact jets"),
        }
    }

    fn position(&self, t: f64) -> Vec<f64> {
        self.exact_jet(t, 0).point
    }

    fn table_jet(&self, t: f64, order: usize) -> Jet {
        let CurveForm::Table { params, points } = &self.form else {
            unreachable!()
        };
        let m = params.len();
        let width = 7.min(m);
        let pos = params.partition_point(|p| *p < t);
        let lo = pos.saturating_sub(width / 2).min(m - width);
        let nodes = &params[lo..lo + width];
        let w = fornberg_weights(t, nodes, order);
        let apply = |wk: &[f64]| -> Vec<f64> {
            (0..self.dim)
                .map(|i| wk.iter().enumerate().map(|(j, c)| c * points[lo + j][i]).sum())
                .collect()
        };
        Jet {
            point: apply(&w[0]),
            derivs: (1..=order).map(|k| apply(&w[k])).collect(),
        }
    }
}

pub fn cos_derivative(amp: f64, freq: f64, t: f64, k: usize) -> f64 {
    let x = freq * t;
    let s = amp * freq.powi(k as i32);
    match k % 4 {
        0 => s * x.cos(),
        1 => -s * x.sin(),
        2 => -s * x.cos(),
        _ => s * x.sin(),
    }
}

pub fn sin_derivative(amp: f64, freq: f64, t: f64, k: usize) -> f64 {
    let x = freq * t;
    let s = amp * freq.powi(k as i32);
    match k % 4 {
        0 => s * x.sin(),
        1 => s * x.cos(),
        2 => -s * x.sin(),
        _ => -s * x.cos(),
    }
}

pub fn linear_derivative(slope: f64, t: f64, k: usize) -> f64 {
    match k {
        0 => slope * t,
        1 => slope,
        _ => 0.0,
    }
}

fn poly_derivative(coeffs: &[f64], t: f64, k: usize) -> f64 {
    // Horner on the k-th derivative's coefficients
    let mut acc = 0.0;
    for (p, c) in coeffs.iter().enumerate().skip(k).rev() {
        let falling: f64 = ((p - k + 1)..=p).map(|x| x as f64).product();
        acc = acc * t + c * falling;
    }
    acc
}

fn family_jet(fam: &Family, t: f64, order: usize) -> Jet {
    let comp = |k: usize| -> Vec<f64> {
        match fam {
            Family::EuclidHelix { a, b } => vec![
                cos_derivative(*a, 1.0, t, k),
                sin_derivative(*a, 1.0, t, k),
                linear_derivative(*b, t, k),
            ],
            Family::MinkowskiHelix { a, b } => vec![
                linear_derivative(*b, t, k),
                cos_derivative(*a, 1.0, t, k),
                sin_derivative(*a, 1.0, t, k),
            ],
            Family::WCurve { a, p, b, q } => vec![
                cos_derivative(*a, *p, t, k),
                sin_derivative(*a, *p, t, k),
                cos_derivative(*b, *q, t, k),
                sin_derivative(*b, *q, t, k),
            ],
            Family::Polynomial { coeffs } => coeffs.iter().map(|row| poly_derivative(row, t, k)).collect(),
        }
    };
    Jet {
        point: comp(0),
        derivs: (1..=order).map(comp).collect(),
    }
}

/// Parameter jet of `c` at `t`.
pub fn jet_eval(c: &CurveSpec, t: f64, order: usize, mode: JetMode) -> Result<Jet> {
    if order == 0 || order > c.dim {
        return Err(GeomError::Order { order, dim: c.dim });
    }
    let (lo, hi) = c.domain;
    let slack = 1e-12 * c.width();
    if !(t >= lo - slack && t <= hi + slack) {
        return Err(GeomError::Domain { t, lo, hi });
    }
    if let CurveForm::Table { .. } = c.form {
        if order > 3 {
            return Err(GeomError::UnsupportedOrder(order));
        }
        return Ok(c.table_jet(t, order));
    }
    let jet = match mode {
        JetMode::Analytic => c.exact_jet(t, order),
        JetMode::FiniteDifference => {
            let point = c.position(t);
            let stencil = |k: usize, h: f64| -> Vec<f64> {
                let mut acc = vec![0.0; c.dim];
                for (o, w) in composite_central(k) {
                    let p = c.position(t + o as f64 * h);
                    for (a, x) in acc.iter_mut().zip(p) {
                        *a += w * x;
                    }
                }
                let scale = h.powi(k as i32);
                acc.into_iter().map(|a| a / scale).collect()
            };
            // one Richardson level on top of the fourth-order stencil
            let derivs = (1..=order)
                .map(|k| {
                    let h = jet_step(k, c.width());
                    let coarse = stencil(k, h);
                    let fine = stencil(k, 0.5 * h);
                    fine.iter().zip(&coarse).map(|(f, g)| (16.0 * f - g) / 15.0).collect()
                })
                .collect();
            Jet { point, derivs }
        }
    };
    check_dim(c.dim, jet.point.len())?;
    if jet.derivs.len() < order {
        return Err(GeomError::InvalidSpec(format!(
            "jet provider returned {} derivatives, {order} requested",
            jet.derivs.len()
        )));
    }
    Ok(Jet {
        point: jet.point,
        derivs: jet.derivs.into_iter().take(order).collect(),
    })
}

/// `‖dα/dt‖` from a jet of order at least one.
pub fn speed(m: &SignatureMetric, j: &Jet) -> Result<f64> {
    let v = j.derivs.first().ok_or(GeomError::Order { order: 1, dim: m.dim() })?;
    m.norm(v)
}

/// Uniform parameter grid with cumulative arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub params: Vec<f64>,
    pub arclengths: Vec<f64>,
    /// Set when the tangent came within ten times the null tolerance.
    pub near_null: bool,
}

impl SampleGrid {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }
}

fn velocity(c: &CurveSpec, t: f64) -> Vec<f64> {
    match c.form {
        CurveForm::Table { .. } => c.table_jet(t, 1).derivs.remove(0),
        _ => c.exact_jet(t, 1).derivs.remove(0),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect()
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, eps, 40)
}

/// Uniform grid over the curve's domain with arclength from adaptive Simpson
/// quadrature of the speed. Fails if the tangent is null anywhere on a
/// four-times refined grid.
pub fn build_grid(m: &SignatureMetric, c: &CurveSpec, samples: usize, tol: &Tolerances) -> Result<SampleGrid> {
    if samples < MIN_SAMPLES {
        return Err(GeomError::TooFewSamples { required: MIN_SAMPLES, got: samples });
    }
    check_dim(m.dim(), c.dim)?;
    let (lo, hi) = c.domain;
    let mut near_null = false;
    for t in linspace(lo, hi, 4 * (samples - 1) + 1) {
        let v = velocity(c, t);
        let q = m.g(&v, &v);
        let e2 = euclid_norm_sq(&v);
        if m.classify(q, e2, tol.null_tol) == CausalCharacter::Null {
            return Err(GeomError::NullCurve { t });
        }
        if q.abs() <= 10.0 * tol.null_tol * (1.0 + e2) {
            near_null = true;
        }
    }
    let params = linspace(lo, hi, samples);
    let speed_at = |t: f64| m.g_norm(&velocity(c, t));
    let eps = ARCLENGTH_TOL / (samples - 1) as f64;
    let mut arclengths = Vec::with_capacity(samples);
    arclengths.push(0.0);
    let mut s = 0.0;
    for w in params.windows(2) {
        s += adaptive_simpson(&speed_at, w[0], w[1], eps);
        arclengths.push(s);
    }
    Ok(SampleGrid { params, arclengths, near_null })
}

/// Converts a parameter jet into an arclength jet (`d^k α / ds^k`) by
/// applying `d/ds = (1/v) d/dt` to truncated Taylor series.
pub fn arclength_jet(m: &SignatureMetric, j: &Jet, t: f64, null_tol: f64) -> Result<Jet> {
    check_dim(m.dim(), j.point.len())?;
    let order = j.order();
    if order == 0 {
        return Err(GeomError::Order { order, dim: m.dim() });
    }
    let comps: Vec<Series> = (0..m.dim())
        .map(|i| {
            let mut d = Vec::with_capacity(order + 1);
            d.push(j.point[i]);
            d.extend(j.derivs.iter().map(|v| v[i]));
            Series::from_derivatives(&d)
        })
        .collect();
    let vel: Vec<Series> = comps.iter().map(Series::derivative).collect();
    let mut q = vel[0].mul(&vel[0]).scale(f64::from(m.sign(0)));
    for (i, v) in vel.iter().enumerate().skip(1) {
        q = q.add(&v.mul(v).scale(f64::from(m.sign(i))));
    }
    let v0: Vec<f64> = vel.iter().map(Series::value).collect();
    if m.classify(q.value(), euclid_norm_sq(&v0), null_tol) == CausalCharacter::Null {
        return Err(GeomError::NullCurve { t });
    }
    let speed = q.scale(q.value().signum()).sqrt();
    let mut x: Vec<Series> = vel.iter().map(|v| v.div(&speed)).collect();
    let mut derivs = vec![x.iter().map(Series::value).collect::<Vec<_>>()];
    for _ in 1..order {
        x = x
            .iter()
            .map(|xi| {
                let d = xi.derivative();
                d.div(&speed.truncate(d.order()))
            })
            .collect();
        derivs.push(x.iter().map(Series::value).collect());
    }
    Ok(Jet {
        point: j.point.clone(),
        derivs,
    })
}

pub fn unit_speed_jet(
    m: &SignatureMetric,
    c: &CurveSpec,
    t: f64,
    order: usize,
    mode: JetMode,
    null_tol: f64,
) -> Result<Jet> {
    check_dim(m.dim(), c.dim)?;
    let j = jet_eval(c, t, order, mode)?;
    arclength_jet(m, &j, t, null_tol)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveJson {
    dim: usize,
    family: String,
    #[serde(default)]
    params: serde_json::Value,
    #[serde(default)]
    domain: Option<[f64; 2]>,
}

#[derive(Deserialize)]
struct HelixParams {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct WParams {
    a: f64,
    p: f64,
    b: f64,
    q: f64,
}

#[derive(Deserialize)]
struct PolyParams {
    coefficients: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct TableParams {
    params: Vec<f64>,
    points: Vec<Vec<f64>>,
}

fn parse_params<T: serde::de::DeserializeOwned>(v: serde_json::Value, family: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| GeomError::InvalidSpec(format!("bad params for {family}: {e}")))
}

impl CurveSpec {
    /// Parses the JSON curve schema
    /// `{"dim": n, "family": ..., "params": {...}, "domain": [t0, t1]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CurveJson =
            serde_json::from_str(text).map_err(|e| GeomError::InvalidSpec(format!("curve JSON: {e}")))?;
        let need_domain = || -> Result<(f64, f64)> {
            raw.domain
                .map(|d| (d[0], d[1]))
                .ok_or_else(|| GeomError::InvalidSpec("curve JSON needs a domain".into()))
        };
        let curve = match raw.family.as_str() {
            "euclid_helix" => {
                let p: HelixParams = parse_params(raw.params.clone(), "euclid_helix")?;
                Self::euclid_helix(p.a, p.b, need_domain()?)?
            }
            "minkowski_helix" => {
                let p: HelixParams = parse_params(raw.params.clone(), "minkowski_helix")?;
                Self::minkowski_helix(p.a, p.b, need_domain()?)?
            }
            "w_curve" => {
                let p: WParams = parse_params(raw.params.clone(), "w_curve")?;
                Self::w_curve(p.a, p.p, p.b, p.q, need_domain()?)?
            }
            "polynomial" => {
                let p: PolyParams = parse_params(raw.params.clone(), "polynomial")?;
                Self::polynomial(p.coefficients, need_domain()?)?
            }
            "table" => {
                let p: TableParams = parse_params(raw.params.clone(), "table")?;
                Self::table(p.params, p.points)?
            }
            other => return Err(GeomError::InvalidSpec(format!("unknown curve family '{other}'"))),
        };
        check_dim(raw.dim, curve.dim)?;
        Ok(curve)
    }
}
