#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::sync::Arc;

use helixlab_core::curve::{cos_derivative, linear_derivative, sin_derivative};
use helixlab_core::*;

pub struct Case {
    pub name: &'static str,
    pub metric: SignatureMetric,
    pub curve: CurveSpec,
    pub df: Vec<f64>,
}

fn jets(name: &'static str, domain: (f64, f64), comps: Vec<fn(f64, usize) -> f64>) -> CurveSpec {
    let dim = comps.len();
    let f = Arc::new(move |t: f64, order: usize| {
        let eval = |k: usize| comps.iter().map(|c| c(t, k)).collect::<Vec<f64>>();
        Jet {
            point: eval(0),
            derivs: (1..=order).map(eval).collect(),
        }
    });
    CurveSpec::from_jets(dim, domain, name, f).unwrap()
}

pub fn slant_e4() -> CurveSpec {
    jets(
        "slant_e4",
        (-1.5, 1.5),
        vec![
            |t, k| cos_derivative(1.0, 1.0, t, k),
            |t, k| sin_derivative(1.0, 1.0, t, k),
            |t, k| linear_derivative(-1.0, t, k),
            |t, k| cos_derivative(2.0, FRAC_1_SQRT_2, t, k),
        ],
    )
}

pub fn slant_minkowski4() -> CurveSpec {
    jets(
        "slant_minkowski4",
        (-1.5, 1.5),
        vec![
            |t, k| cos_derivative(1.0, FRAC_1_SQRT_2, t, k),
            |t, k| cos_derivative(1.0, 1.0, t, k),
            |t, k| sin_derivative(1.0, 1.0, t, k),
            |t, k| linear_derivative(1.0, t, k),
        ],
    )
}

pub fn w_curve5() -> CurveSpec {
    jets(
        "w_curve5",
        (0.0, 2.0 * PI),
        vec![
            |t, k| cos_derivative(1.0, 1.0, t, k),
            |t, k| sin_derivative(1.0, 1.0, t, k),
            |t, k| cos_derivative(2.0, 2.0, t, k),
            |t, k| sin_derivative(2.0, 2.0, t, k),
            |t, k| linear_derivative(1.0, t, k),
        ],
    )
}

pub fn cubic() -> CurveSpec {
    CurveSpec::polynomial(vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0]], (-1.0, 1.0)).unwrap()
}

pub fn euclid_helix() -> CurveSpec {
    CurveSpec::euclid_helix(1.0, 1.0, (0.0, 2.0 * PI)).unwrap()
}

pub fn minkowski_helix() -> CurveSpec {
    CurveSpec::minkowski_helix(1.0, SQRT_2, (0.0, 2.0 * PI)).unwrap()
}

pub fn w_curve() -> CurveSpec {
    CurveSpec::w_curve(1.0, 1.0, 2.0, 2.0, (0.0, 2.0 * PI)).unwrap()
}

pub fn gallery() -> Vec<Case> {
    let e = SignatureMetric::euclidean;
    vec![
        Case { name: "euclid_helix", metric: e(3), curve: euclid_helix(), df: vec![0.0, 0.0, 1.0] },
        Case { name: "minkowski_helix", metric: SignatureMetric::minkowski(3), curve: minkowski_helix(), df: vec![1.0, 0.0, 0.0] },
        Case { name: "w_curve", metric: e(4), curve: w_curve(), df: vec![0.0, 0.0, 0.0, 1.0] },
        Case { name: "cubic", metric: e(3), curve: cubic(), df: vec![0.0, 0.0, 1.0] },
        Case { name: "slant_e4", metric: e(4), curve: slant_e4(), df: vec![0.0, 0.0, 0.0, 1.0] },
        Case { name: "slant_minkowski4", metric: SignatureMetric::minkowski(4), curve: slant_minkowski4(), df: vec![1.0, 0.0, 0.0, 0.0] },
        Case { name: "w_curve5", metric: e(5), curve: w_curve5(), df: vec![0.0, 0.0, 0.0, 0.0, 1.0] },
    ]
}

pub fn slant_cases() -> Vec<Case> {
    gallery()
        .into_iter()
        .filter(|c| !matches!(c.name, "w_curve" | "cubic"))
        .collect()
}

pub fn pipeline(m: &SignatureMetric, c: &CurveSpec, samples: usize, mode: JetMode) -> (FrameField, HarmonicProfile) {
    let tol = Tolerances::for_mode(mode);
    let g = build_grid(m, c, samples, &tol).unwrap();
    let ff = frame_field(m, c, &g, mode, &tol).unwrap();
    let hp = harmonic_profile(&ff).unwrap();
    (ff, hp)
}
