//! Harmonic curvature functions `H*_i` along a frame field.
//!
//! ```text
//! H*_0 = 0
//! H*_1 = ε_{n-3} ε_{n-2} k_{n-1} / k_{n-2}
//! H*_i = (k_{n-i} H*_{i-2} - H*_{i-1}') ε_{n-(i+2)} ε_{n-(i+1)} / k_{n-(i+1)},  2 <= i <= n-2
//! ```
//!
//! Primes are arclength derivatives, taken with five-point stencils on the
//! grid. The finite-difference noise is estimated by recomputing everything on
//! the every-other-sample subgrid; that estimate is added to the tolerances of
//! every verdict that depends on a grid derivative.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::constancy::{constancy_test, constancy_with_floor, ConstancyVerdict, Tolerances};
use crate::curve::{SampleGrid, MIN_SAMPLES};
use crate::error::{GeomError, Result};
use crate::fd::{grid_derivative, interior};
use crate::frenet::{fmt_sig, FrameField, FrenetApparatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseFloor {
    /// Per `H*_i`, max |full-grid − half-grid| on shared samples.
    pub values: Vec<f64>,
    pub sum: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicProfile {
    pub dim: usize,
    pub grid: SampleGrid,
    /// `values[j][i]` is `H*_i` at sample j, i = 0..=n-2.
    pub values: Vec<Vec<f64>>,
    /// `ε_{n-3} H*_1² + ε_{n-4} H*_2² + … + ε_0 H*_{n-2}²`.
    pub sum_signed: Vec<f64>,
    /// `H*_{n-2}' − k_1 H*_{n-3}`; meaningful on interior samples.
    pub derivative_residual: Vec<f64>,
    pub noise: NoiseFloor,
}

struct Columns {
    /// `h[i][j]`
    h: Vec<Vec<f64>>,
    sum: Vec<f64>,
    residual: Vec<f64>,
}

fn columns(s: &[f64], app: &[&FrenetApparatus]) -> Result<Columns> {
    let n = app[0].dim();
    let m = app.len();
    // k(i) is k_i (1-based), e(j) is ε_j
    let k = |a: &FrenetApparatus, i: usize| a.curvatures[i - 1];
    for a in app {
        for i in 1..n {
            if k(a, i) <= 0.0 {
                return Err(GeomError::NotProperOrder { t: a.param, index: i });
            }
        }
    }
    let mut h = vec![vec![0.0; m]; n - 1];
    h[1] = app
        .iter()
        .map(|a| f64::from(a.eps_product(n - 3, n - 2)) * k(a, n - 1) / k(a, n - 2))
        .collect();
    for (i, (lo, hi)) in (2..=n - 2).zip(recursion_eps_indices(n)) {
        let dh = grid_derivative(s, &h[i - 1]);
        h[i] = app
            .iter()
            .enumerate()
            .map(|(j, a)| (k(a, n - i) * h[i - 2][j] - dh[j]) * f64::from(a.eps_product(lo, hi)) / k(a, n - (i + 1)))
            .collect();
    }
    let sum = (0..m)
        .map(|j| {
            (1..=n - 2)
                .map(|i| f64::from(app[j].epsilons[n - 2 - i]) * h[i][j] * h[i][j])
                .sum()
        })
        .collect();
    let dlast = grid_derivative(s, &h[n - 2]);
    let residual = (0..m).map(|j| dlast[j] - k(app[j], 1) * h[n - 3][j]).collect();
    Ok(Columns { h, sum, residual })
}

/// Pairs `(n-(i+2), n-(i+1))` of ε indices read by the recursion, i = 2..=n-2.
pub fn recursion_eps_indices(n: usize) -> Vec<(usize, usize)> {
    (2..=n.saturating_sub(2))
        .map(|i| {
            let pair = (n - (i + 2), n - (i + 1));
            assert!(pair.1 < n, "ε index out of range for n = {n}");
            pair
        })
        .collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn harmonic_profile(ff: &FrameField) -> Result<HarmonicProfile> {
    let m = ff.len();
    if m < MIN_SAMPLES {
        return Err(GeomError::TooFewSamples { required: MIN_SAMPLES, got: m });
    }
    let n = ff.dim();
    if n < 3 {
        return Err(GeomError::InvalidSpec("harmonic curvatures need n >= 3".into()));
    }
    let s = ff.arclengths();
    let all: Vec<&FrenetApparatus> = ff.apparatus.iter().collect();
    let full = columns(s, &all)?;

    let noise = if m >= 2 * MIN_SAMPLES - 1 {
        let idx: Vec<usize> = (0..m).step_by(2).collect();
        let sub_s: Vec<f64> = idx.iter().map(|&j| s[j]).collect();
        let sub_app: Vec<&FrenetApparatus> = idx.iter().map(|&j| &ff.apparatus[j]).collect();
        let coarse = columns(&sub_s, &sub_app)?;
        let pick = |v: &[f64]| -> Vec<f64> { idx.iter().map(|&j| v[j]).collect() };
        let ci = interior(idx.len());
        let fine_res = pick(&full.residual);
        NoiseFloor {
            values: (0..n - 1).map(|i| max_diff(&pick(&full.h[i]), &coarse.h[i])).collect(),
            sum: max_diff(&pick(&full.sum), &coarse.sum),
            residual: max_diff(&fine_res[ci.clone()], &coarse.residual[ci]),
        }
    } else {
        NoiseFloor {
            values: vec![0.0; n - 1],
            sum: 0.0,
            residual: 0.0,
        }
    };

    let values = (0..m).map(|j| full.h.iter().map(|col| col[j]).collect()).collect();
    Ok(HarmonicProfile {
        dim: n,
        grid: ff.grid.clone(),
        values,
        sum_signed: full.sum,
        derivative_residual: full.residual,
        noise,
    })
}

impl HarmonicProfile {
    /// `H*_i` at every sample.
    pub fn series(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[i]).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV with columns `s, H0..H{n-2}, sum_signed, derivative_residual`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["s".to_string()];
        header.extend((0..self.dim - 1).map(|i| format!("H{i}")));
        header.push("sum_signed".into());
        header.push("derivative_residual".into());
        w.write_record(&header)?;
        for j in 0..self.len() {
            let mut row = vec![fmt_sig(self.grid.arclengths[j], 12)];
            row.extend(self.values[j].iter().map(|v| fmt_sig(*v, 12)));
            row.push(fmt_sig(self.sum_signed[j], 12));
            row.push(fmt_sig(self.derivative_residual[j], 12));
            w.write_record(&row)?;
        }
        w.flush()
    }
}

/// Constancy verdict on the signed sum of squared harmonic curvatures.
pub fn sum_invariant(hp: &HarmonicProfile, tol: &Tolerances) -> Result<ConstancyVerdict> {
    constancy_with_floor(&hp.sum_signed, tol.atol, tol.rtol, tol.atol_zero, hp.noise.sum)
}

/// Verdict on `|H*_{n-2}|`: the nonzero hypothesis of the equivalence check.
pub fn last_harmonic_verdict(hp: &HarmonicProfile, tol: &Tolerances) -> Result<ConstancyVerdict> {
    let abs: Vec<f64> = hp.series(hp.dim - 2).iter().map(|v| v.abs()).collect();
    constancy_test(&abs, tol.atol, tol.rtol, tol.atol_zero)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lemma32Outcome {
    Evaluated,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma32Report {
    pub outcome: Lemma32Outcome,
    /// Signed sum is a non-zero constant.
    pub sum_constant: bool,
    /// `H*_{n-2}' = k_1 H*_{n-3}` on interior samples.
    pub identity_holds: bool,
    pub agree: bool,
    pub max_identity_residual: f64,
    pub identity_threshold: f64,
}

/// Checks that the signed sum being a non-zero constant agrees with the
/// derivative identity `H*_{n-2}' = k_1 H*_{n-3}`, when `H*_{n-2}` is nonzero.
pub fn lemma32_check(hp: &HarmonicProfile, ff: &FrameField, tol: &Tolerances) -> Result<Lemma32Report> {
    let n = hp.dim;
    let sum = sum_invariant(hp, tol)?;
    let sum_constant = sum.is_constant && sum.is_nonzero;
    let mut max_res = 0.0f64;
    let mut scale = 0.0f64;
    for j in interior(hp.len()) {
        max_res = max_res.max(hp.derivative_residual[j].abs());
        scale = scale.max((ff.apparatus[j].curvatures[0] * hp.values[j][n - 3]).abs());
    }
    let threshold = tol.atol + tol.rtol * scale + hp.noise.residual;
    let identity_holds = max_res <= threshold;
    let outcome = if last_harmonic_verdict(hp, tol)?.is_nonzero {
        Lemma32Outcome::Evaluated
    } else {
        Lemma32Outcome::NotApplicable
    };
    Ok(Lemma32Report {
        outcome,
        sum_constant,
        identity_holds,
        agree: outcome == Lemma32Outcome::Evaluated && sum_constant == identity_holds,
        max_identity_residual: max_res,
        identity_threshold: threshold,
    })
}

/// `max |H*_{n-2}' − k_1 H*_{n-3}|` over interior samples.
pub fn corollary32_residual(hp: &HarmonicProfile, ff: &FrameField) -> f64 {
    let n = hp.dim;
    let last = hp.series(n - 2);
    let d = grid_derivative(ff.arclengths(), &last);
    interior(hp.len())
        .map(|j| (d[j] - ff.apparatus[j].curvatures[0] * hp.values[j][n - 3]).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_grid, CurveSpec, JetMode};
    use crate::frenet::frame_field;
    use crate::pseudometric::SignatureMetric;
    use std::f64::consts::{PI, SQRT_2};

    fn field(m: &SignatureMetric, c: &CurveSpec, samples: usize) -> FrameField {
        let tol = Tolerances::default();
        let g = build_grid(m, c, samples, &tol).unwrap();
        frame_field(m, c, &g, JetMode::Analytic, &tol).unwrap()
    }

    #[test]
    fn helix_profiles() {
        let tol = Tolerances::default();
        let e = SignatureMetric::euclidean(3);
        let ff = field(&e, &CurveSpec::euclid_helix(1.0, 1.0, (0.0, 2.0 * PI)).unwrap(), 101);
        let hp = harmonic_profile(&ff).unwrap();
        for v in &hp.values {
            assert_eq!(v.len(), 2);
            assert_eq!(v[0], 0.0);
            assert!((v[1] - 1.0).abs() < 1e-12);
        }
        let s = sum_invariant(&hp, &tol).unwrap();
        assert!(s.is_constant && s.is_nonzero && (s.mean - 1.0).abs() < 1e-12);
        let l32 = lemma32_check(&hp, &ff, &tol).unwrap();
        assert_eq!(l32.outcome, Lemma32Outcome::Evaluated);
        assert!(l32.sum_constant && l32.identity_holds && l32.agree);

        let l = SignatureMetric::minkowski(3);
        let ff = field(&l, &CurveSpec::minkowski_helix(1.0, SQRT_2, (0.0, 2.0 * PI)).unwrap(), 101);
        let hp = harmonic_profile(&ff).unwrap();
        for v in &hp.values {
            assert!((v[1] + SQRT_2).abs() < 1e-12);
        }
        let s = sum_invariant(&hp, &tol).unwrap();
        assert!(s.is_constant && (s.mean + 2.0).abs() < 1e-12);
        assert!(lemma32_check(&hp, &ff, &tol).unwrap().agree);
        assert!(corollary32_residual(&hp, &ff) < 1e-6);
    }

    #[test]
    fn w_curve_last_harmonic_vanishes() {
        let tol = Tolerances::default();
        let e = SignatureMetric::euclidean(4);
        let ff = field(&e, &CurveSpec::w_curve(1.0, 1.0, 1.0, 2.0, (0.0, 2.0 * PI)).unwrap(), 101);
        let hp = harmonic_profile(&ff).unwrap();
        for (j, v) in hp.values.iter().enumerate() {
            assert_eq!(v.len(), 3);
            assert_eq!(v[0], 0.0);
            let a = &ff.apparatus[j];
            assert!((v[1] - a.curvatures[2] / a.curvatures[1]).abs() < 1e-14);
            assert!(v[2].abs() < 1e-9, "H*_2 = {}", v[2]);
        }
        let l32 = lemma32_check(&hp, &ff, &tol).unwrap();
        assert_eq!(l32.outcome, Lemma32Outcome::NotApplicable);
        assert!(!l32.agree);
    }

    #[test]
    fn cubic_sum_varies() {
        let tol = Tolerances::default();
        let e = SignatureMetric::euclidean(3);
        let cubic = CurveSpec::polynomial(
            vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0]],
            (-1.0, 1.0),
        )
        .unwrap();
        let ff = field(&e, &cubic, 201);
        let hp = harmonic_profile(&ff).unwrap();
        assert!(!sum_invariant(&hp, &tol).unwrap().is_constant);
        let l32 = lemma32_check(&hp, &ff, &tol).unwrap();
        assert_eq!(l32.outcome, Lemma32Outcome::Evaluated);
        assert!(!l32.sum_constant && !l32.identity_holds && l32.agree);
        assert!(corollary32_residual(&hp, &ff) > 0.1);
    }

    #[test]
    fn eps_indices() {
        assert!(recursion_eps_indices(3).is_empty());
        assert_eq!(recursion_eps_indices(4), vec![(0, 1)]);
        assert_eq!(recursion_eps_indices(5), vec![(1, 2), (0, 1)]);
        for n in 3..12 {
            assert_eq!(recursion_eps_indices(n).len(), n - 3);
        }
    }

    #[test]
    fn csv_layout() {
        let e = SignatureMetric::euclidean(3);
        let ff = field(&e, &CurveSpec::euclid_helix(1.0, 1.0, (0.0, 1.0)).unwrap(), 9);
        let hp = harmonic_profile(&ff).unwrap();
        let mut buf = Vec::new();
        hp.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "s,H0,H1,sum_signed,derivative_residual");
        assert_eq!(text.lines().count(), 10);
    }
}
