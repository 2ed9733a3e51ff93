//! Named analytic curves that are not covered by the closed-form families.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use helixlab_core::curve::{cos_derivative, linear_derivative, sin_derivative};
use helixlab_core::{CurveSpec, Jet, Result};

type Component = fn(f64, usize) -> f64;

fn from_components(name: &str, domain: (f64, f64), comps: Vec<Component>) -> Result<CurveSpec> {
    let dim = comps.len();
    let jets = Arc::new(move |t: f64, order: usize| {
        let eval = |k: usize| comps.iter().map(|c| c(t, k)).collect::<Vec<f64>>();
        Jet {
            point: eval(0),
            derivs: (1..=order).map(eval).collect(),
        }
    });
    CurveSpec::from_jets(dim, domain, name, jets)
}

/// `(cos t, sin t, -t, 2 cos(t/√2))` in E^4: `g(e_4, V_4)` is constant.
pub fn slant_e4() -> Result<CurveSpec> {
    from_components(
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

/// `(cos(t/√2), cos t, sin t, t)` with the first axis timelike.
pub fn slant_minkowski4() -> Result<CurveSpec> {
    from_components(
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

/// `(cos t, sin t, 2 cos 2t, 2 sin 2t, t)` in E^5, all curvatures constant.
pub fn w_curve5() -> Result<CurveSpec> {
    from_components(
        "w_curve5",
        (0.0, 2.0 * std::f64::consts::PI),
        vec![
            |t, k| cos_derivative(1.0, 1.0, t, k),
            |t, k| sin_derivative(1.0, 1.0, t, k),
            |t, k| cos_derivative(2.0, 2.0, t, k),
            |t, k| sin_derivative(2.0, 2.0, t, k),
            |t, k| linear_derivative(1.0, t, k),
        ],
    )
}
