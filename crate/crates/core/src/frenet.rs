//! Frenet frames of non-null curves under an indefinite metric.
//!
//! The frame comes from Gram–Schmidt on the arclength derivatives
//! `α', α'', ...`: the j-th orthogonalised derivative equals
//! `k_1 ⋯ k_{j-1} V_j`, so each curvature is a ratio of successive norms. The
//! last vector is the g-orthogonal complement of the others, oriented so that
//! `det[V_1 … V_n] > 0`; `k_{n-1}` is then read off as
//! `ε_{n-1} g(α^{(n)}, V_n) / (k_1 ⋯ k_{n-2})` and must come out positive.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constancy::Tolerances;
use crate::curve::{unit_speed_jet, CurveSpec, JetMode, SampleGrid, MIN_SAMPLES};
use crate::error::{check_dim, GeomError, Result};
use crate::fd::{grid_derivative, interior};
use crate::pseudometric::{euclid_norm, SignatureMetric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrenetApparatus {
    /// `frame[i]` is `V_{i+1}`.
    pub frame: Vec<Vec<f64>>,
    /// `curvatures[i]` is `k_{i+1}`.
    pub curvatures: Vec<f64>,
    /// `epsilons[j]` is `ε_j = g(V_{j+1}, V_{j+1})`.
    pub epsilons: Vec<i8>,
    pub param: f64,
    /// Arclength from the start of the grid; zero for a standalone evaluation.
    pub arclength: f64,
    pub point: Vec<f64>,
}

impl FrenetApparatus {
    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    /// `ε_a ε_b` in integer arithmetic.
    pub fn eps_product(&self, a: usize, b: usize) -> i8 {
        self.epsilons[a] * self.epsilons[b]
    }

    /// `max |g(V_i, V_j) - δ_ij ε_{i-1}|`.
    pub fn orthonormality_defect(&self, m: &SignatureMetric) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { f64::from(self.epsilons[i]) } else { 0.0 };
                worst = worst.max((m.g(&self.frame[i], &self.frame[j]) - target).abs());
            }
        }
        worst
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// Vector `N` with `N · x = det[rows; x]` for `n - 1` rows of length `n`.
fn cofactor_normal(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len() + 1;
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                .collect();
            let sign = if (n - 1 + j).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * determinant(minor)
        })
        .collect()
}

/// Frenet apparatus from arclength derivatives `d^k α/ds^k`, k = 1..=n.
pub fn frenet_from_derivatives(
    m: &SignatureMetric,
    s_derivs: &[Vec<f64>],
    t: f64,
    tol: &Tolerances,
) -> Result<FrenetApparatus> {
    let n = m.dim();
    if n < 3 {
        return Err(GeomError::InvalidSpec("Frenet frames need dimension n >= 3".into()));
    }
    if s_derivs.len() < n {
        return Err(GeomError::Order { order: s_derivs.len(), dim: n });
    }
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut eps: Vec<i8> = Vec::with_capacity(n);
    let mut curvatures = Vec::with_capacity(n - 1);
    let mut prev_norm: f64 = 1.0;

    for (j, d) in s_derivs.iter().take(n - 1).enumerate() {
        check_dim(n, d.len())?;
        let mut e = d.clone();
        for (v, ev) in frame.iter().zip(&eps) {
            let c = f64::from(*ev) * m.g(&e, v);
            for (x, y) in e.iter_mut().zip(v) {
                *x -= c * y;
            }
        }
        let e_euclid = euclid_norm(&e);
        if j > 0 && e_euclid <= tol.curvature_floor * prev_norm.max(euclid_norm(d)).max(1.0) {
            return Err(GeomError::NotProperOrder { t, index: j });
        }
        let q = m.g(&e, &e);
        if q.abs() < tol.degeneracy * e_euclid * e_euclid {
            return Err(GeomError::DegenerateFrame { t, index: j + 1 });
        }
        let norm = q.abs().sqrt();
        if j > 0 {
            let k = norm / prev_norm;
            if k <= tol.curvature_floor {
                return Err(GeomError::NotProperOrder { t, index: j });
            }
            curvatures.push(k);
        }
        frame.push(e.iter().map(|x| x / norm).collect());
        eps.push(if q > 0.0 { 1 } else { -1 });
        prev_norm = norm;
    }

    // completion: w = raise(N) is g-orthogonal to V_1..V_{n-1} and det[V_1..V_{n-1}, w] = N · w
    let normal = cofactor_normal(&frame);
    let mut w = m.raise(&normal);
    let orient: f64 = normal.iter().zip(&w).map(|(a, b)| a * b).sum();
    if orient < 0.0 {
        w.iter_mut().for_each(|x| *x = -*x);
    }
    let w_euclid = euclid_norm(&w);
    let q = m.g(&w, &w);
    if w_euclid == 0.0 || q.abs() < tol.degeneracy * w_euclid * w_euclid {
        return Err(GeomError::DegenerateFrame { t, index: n });
    }
    let wn = q.abs().sqrt();
    let vn: Vec<f64> = w.iter().map(|x| x / wn).collect();
    let eps_last: i8 = if q > 0.0 { 1 } else { -1 };
    let dn = &s_derivs[n - 1];
    check_dim(n, dn.len())?;
    let k_last = f64::from(eps_last) * m.g(dn, &vn) / prev_norm;
    if k_last <= tol.curvature_floor {
        return Err(GeomError::NotProperOrder { t, index: n - 1 });
    }
    frame.push(vn);
    eps.push(eps_last);
    curvatures.push(k_last);

    Ok(FrenetApparatus {
        frame,
        curvatures,
        epsilons: eps,
        param: t,
        arclength: 0.0,
        point: Vec::new(),
    })
}

pub fn frenet_at(
    m: &SignatureMetric,
    c: &CurveSpec,
    t: f64,
    mode: JetMode,
    tol: &Tolerances,
) -> Result<FrenetApparatus> {
    check_dim(m.dim(), c.dim())?;
    let jet = unit_speed_jet(m, c, t, c.dim(), mode, tol.null_tol)?;
    let mut app = frenet_from_derivatives(m, &jet.derivs, t, tol)?;
    app.point = jet.point;
    Ok(app)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameField {
    pub grid: SampleGrid,
    pub apparatus: Vec<FrenetApparatus>,
    /// Number of frame vectors flipped by the continuity pass.
    pub flips: usize,
}

impl FrameField {
    pub fn dim(&self) -> usize {
        self.apparatus[0].dim()
    }

    pub fn len(&self) -> usize {
        self.apparatus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.apparatus.is_empty()
    }

    pub fn arclengths(&self) -> &[f64] {
        &self.grid.arclengths
    }

    /// Curvature `k_{i+1}` at every sample.
    pub fn curvature_series(&self, i: usize) -> Vec<f64> {
        self.apparatus.iter().map(|a| a.curvatures[i]).collect()
    }

    pub fn max_orthonormality_defect(&self, m: &SignatureMetric) -> f64 {
        self.apparatus
            .iter()
            .map(|a| a.orthonormality_defect(m))
            .fold(0.0, f64::max)
    }

    /// CSV with columns `t, s, k1..k{n-1}, eps0..eps{n-1}`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let n = self.dim();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string(), "s".to_string()];
        header.extend((1..n).map(|i| format!("k{i}")));
        header.extend((0..n).map(|j| format!("eps{j}")));
        w.write_record(&header)?;
        for a in &self.apparatus {
            let mut row = vec![fmt_sig(a.param, 12), fmt_sig(a.arclength, 12)];
            row.extend(a.curvatures.iter().map(|k| fmt_sig(*k, 12)));
            row.extend(a.epsilons.iter().map(|e| e.to_string()));
            w.write_record(&row)?;
        }
        w.flush()
    }
}

/// Formats `x` with `digits` significant digits, `%g` style.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -5 || exp >= digits as i32 {
        let mant = trim_zeros(mant);
        format!("{mant}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Frames at every grid point, followed by a sign-continuity pass.
pub fn frame_field(
    m: &SignatureMetric,
    c: &CurveSpec,
    grid: &SampleGrid,
    mode: JetMode,
    tol: &Tolerances,
) -> Result<FrameField> {
    if grid.len() < MIN_SAMPLES {
        return Err(GeomError::TooFewSamples { required: MIN_SAMPLES, got: grid.len() });
    }
    let mut apparatus = grid
        .params
        .par_iter()
        .zip(&grid.arclengths)
        .map(|(t, s)| {
            let mut a = frenet_at(m, c, *t, mode, tol)?;
            a.arclength = *s;
            Ok(a)
        })
        .collect::<Result<Vec<_>>>()?;
    let flips = align_signs(m, &mut apparatus, tol)?;
    Ok(FrameField {
        grid: grid.clone(),
        apparatus,
        flips,
    })
}

/// Flips any frame vector that reverses relative to its predecessor, then
/// re-extracts curvature signs and orientation; both must survive.
fn align_signs(m: &SignatureMetric, app: &mut [FrenetApparatus], tol: &Tolerances) -> Result<usize> {
    let mut flips = 0;
    for j in 1..app.len() {
        let (prev, cur) = app.split_at_mut(j);
        let prev = &prev[j - 1];
        let cur = &mut cur[0];
        let n = cur.dim();
        let signs: Vec<f64> = (0..n)
            .map(|i| {
                let overlap = m.g(&prev.frame[i], &cur.frame[i]) * f64::from(cur.epsilons[i]);
                if overlap < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            })
            .collect();
        if signs.iter().all(|s| *s > 0.0) {
            continue;
        }
        for (v, s) in cur.frame.iter_mut().zip(&signs) {
            if *s < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
                flips += 1;
            }
        }
        for (i, k) in cur.curvatures.iter_mut().enumerate() {
            *k *= signs[i] * signs[i + 1];
        }
        let det = determinant(cur.frame.clone());
        if cur.curvatures.iter().any(|k| *k <= tol.curvature_floor) || det <= 0.0 {
            return Err(GeomError::FrameDiscontinuity { t: cur.param });
        }
    }
    Ok(flips)
}

/// Maximum component-wise deviation of centred-difference `dV_i/ds` from the
/// Frenet right-hand sides, over all i and interior samples.
pub fn frenet_residual(ff: &FrameField) -> Result<f64> {
    let m = ff.len();
    if m < MIN_SAMPLES {
        return Err(GeomError::TooFewSamples { required: MIN_SAMPLES, got: m });
    }
    let n = ff.dim();
    let s = ff.arclengths();
    let mut worst = 0.0f64;
    for i in 0..n {
        for c in 0..n {
            let comp: Vec<f64> = ff.apparatus.iter().map(|a| a.frame[i][c]).collect();
            let d = grid_derivative(s, &comp);
            for j in interior(m) {
                let a = &ff.apparatus[j];
                let mut rhs = 0.0;
                if i > 0 {
                    rhs -= f64::from(a.eps_product(i - 1, i)) * a.curvatures[i - 1] * a.frame[i - 1][c];
                }
                if i + 1 < n {
                    rhs += a.curvatures[i] * a.frame[i + 1][c];
                }
                worst = worst.max((d[j] - rhs).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::build_grid;
    use std::f64::consts::{PI, SQRT_2};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(vec![vec![2.0, 0.0], vec![0.0, 3.0]]), 6.0);
        assert!((determinant(vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn euclid_helix_apparatus() {
        let e = SignatureMetric::euclidean(3);
        let c = CurveSpec::euclid_helix(1.0, 1.0, (0.0, 2.0 * PI)).unwrap();
        for t in [0.0, 0.8, 3.0, 5.5] {
            let a = frenet_at(&e, &c, t, JetMode::Analytic, &tol()).unwrap();
            assert!((a.curvatures[0] - 0.5).abs() < 1e-14);
            assert!((a.curvatures[1] - 0.5).abs() < 1e-14);
            assert_eq!(a.epsilons, vec![1, 1, 1]);
            assert!(determinant(a.frame.clone()) > 0.0);
            // binormal (sin t, -cos t, 1)/√2
            let b = [t.sin() / SQRT_2, -t.cos() / SQRT_2, 1.0 / SQRT_2];
            for (x, y) in a.frame[2].iter().zip(b) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn minkowski_helix_apparatus() {
        let l = SignatureMetric::minkowski(3);
        let c = CurveSpec::minkowski_helix(1.0, SQRT_2, (0.0, 2.0 * PI)).unwrap();
        for t in [0.0, 1.3, 4.4] {
            let a = frenet_at(&l, &c, t, JetMode::Analytic, &tol()).unwrap();
            assert!((a.curvatures[0] - 1.0).abs() < 1e-14);
            assert!((a.curvatures[1] - SQRT_2).abs() < 1e-14);
            assert_eq!(a.epsilons, vec![-1, 1, 1]);
            let (s, co) = t.sin_cos();
            let expect = [
                [SQRT_2, -s, co],
                [0.0, -co, -s],
                [-1.0, SQRT_2 * s, -SQRT_2 * co],
            ];
            for (v, ex) in a.frame.iter().zip(expect) {
                for (x, y) in v.iter().zip(ex) {
                    assert!((x - y).abs() < 1e-13, "{:?}", a.frame);
                }
            }
        }
    }

    #[test]
    fn straight_line_is_not_proper() {
        let e = SignatureMetric::euclidean(3);
        let line = CurveSpec::polynomial(vec![vec![0.0, 1.0], vec![0.0], vec![0.0]], (0.0, 1.0)).unwrap();
        assert!(matches!(
            frenet_at(&e, &line, 0.5, JetMode::Analytic, &tol()),
            Err(GeomError::NotProperOrder { index: 1, .. })
        ));
        // planar circle: k_2 = 0
        let circle = CurveSpec::polynomial(vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0], vec![0.0]], (0.0, 1.0)).unwrap();
        assert!(matches!(
            frenet_at(&e, &circle, 0.5, JetMode::Analytic, &tol()),
            Err(GeomError::NotProperOrder { index: 2, .. })
        ));
    }

    #[test]
    fn null_frame_vector_is_degenerate() {
        // unit-speed α = (t²/2, t, t²/2) in diag(-1,1,1) has null α'' = (1,0,1)
        let l = SignatureMetric::minkowski(3);
        let c = CurveSpec::polynomial(vec![vec![0.0, 0.0, 0.5], vec![0.0, 1.0], vec![0.0, 0.0, 0.5]], (-1.0, 1.0))
            .unwrap();
        let r = frenet_at(&l, &c, 0.0, JetMode::Analytic, &tol());
        assert!(matches!(r, Err(GeomError::DegenerateFrame { .. })), "{r:?}");
    }

    #[test]
    fn helix_field_constant_curvatures() {
        let e = SignatureMetric::euclidean(3);
        let c = CurveSpec::euclid_helix(1.0, 1.0, (0.0, 2.0 * PI)).unwrap();
        let g = build_grid(&e, &c, 101, &tol()).unwrap();
        let ff = frame_field(&e, &c, &g, JetMode::Analytic, &tol()).unwrap();
        assert_eq!(ff.len(), 101);
        assert_eq!(ff.flips, 0);
        for a in &ff.apparatus {
            assert!((a.curvatures[0] - 0.5).abs() < 1e-9 && (a.curvatures[1] - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn corrupted_field_has_large_residual() {
        let e = SignatureMetric::euclidean(3);
        let c = CurveSpec::euclid_helix(1.0, 1.0, (0.0, 2.0 * PI)).unwrap();
        let g = build_grid(&e, &c, 201, &tol()).unwrap();
        let mut ff = frame_field(&e, &c, &g, JetMode::Analytic, &tol()).unwrap();
        assert!(frenet_residual(&ff).unwrap() < 1e-6);
        let ds = ff.grid.arclengths[1];
        ff.apparatus[100].frame[1].iter_mut().for_each(|x| *x = -*x);
        let r = frenet_residual(&ff).unwrap();
        assert!(r > 0.1 / ds, "residual {r}");
    }

    #[test]
    fn fmt_sig_cases() {
        assert_eq!(fmt_sig(0.5, 12), "0.5");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(-2.0, 12), "-2");
        assert_eq!(fmt_sig(1.5e-9, 12), "1.5e-9");
        assert_eq!(fmt_sig(123456789012345.0, 12), "1.23456789012e14");
        assert_eq!(fmt_sig(0.0, 12), "0");
    }

    #[test]
    fn csv_layout() {
        let e = SignatureMetric::euclidean(3);
        let c = CurveSpec::euclid_helix(1.0, 1.0, (0.0, 1.0)).unwrap();
        let g = build_grid(&e, &c, 9, &tol()).unwrap();
        let ff = frame_field(&e, &c, &g, JetMode::Analytic, &tol()).unwrap();
        let mut buf = Vec::new();
        ff.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,s,k1,k2,eps0,eps1,eps2");
        assert_eq!(lines.next().unwrap(), "0,0,0.5,0.5,1,1,1");
        assert_eq!(text.lines().count(), 10);
    }
}
