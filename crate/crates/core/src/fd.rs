//! Finite-difference machinery: arbitrary-node weights, grid derivatives and
//! composite central stencils for parameter jets.

/// Fornberg weights: `w[k][j]` is the weight of `nodes[j]` in the k-th
/// derivative approximation at `x0`, for k = 0..=max_deriv.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; max_deriv + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    (0..=max_deriv)
        .map(|k| (0..n).map(|j| c[j][k]).collect())
        .collect()
}

/// Window of five neighbouring nodes used for sample `j` of `m`: centred in
/// the interior, one-sided at the two ends.
pub(crate) fn stencil_start(j: usize, m: usize) -> usize {
    if j < 2 {
        0
    } else if j + 2 >= m {
        m - 5
    } else {
        j - 2
    }
}

/// Range of samples where the centred stencil applies.
pub fn interior(m: usize) -> std::ops::Range<usize> {
    2..m.saturating_sub(2)
}

/// First derivative of tabulated `ys(xs)` with five-point (fourth-order)
/// stencils on possibly non-uniform nodes. Needs at least five samples.
pub fn grid_derivative(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let m = xs.len();
    assert_eq!(m, ys.len());
    assert!(m >= 5, "grid_derivative needs five samples");
    (0..m)
        .map(|j| {
            let lo = stencil_start(j, m);
            let w = fornberg_weights(xs[j], &xs[lo..lo + 5], 1);
            w[1].iter().zip(&ys[lo..lo + 5]).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// Integer offsets and unscaled weights of the fourth-order central first
/// derivative stencil `(f(-2) - 8 f(-1) + 8 f(1) - f(2)) / 12` convolved with
/// itself `k` times. Divide by `h^k` to get the k-th derivative.
pub(crate) fn composite_central(k: usize) -> Vec<(i64, f64)> {
    let base: [(i64, f64); 4] = [(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];
    let mut acc: Vec<(i64, f64)> = vec![(0, 1.0)];
    for _ in 0..k {
        let mut next = std::collections::BTreeMap::<i64, f64>::new();
        for (o, w) in &acc {
            for (bo, bw) in &base {
                *next.entry(o + bo).or_insert(0.0) += w * bw;
            }
        }
        acc = next.into_iter().filter(|(_, w)| *w != 0.0).collect();
    }
    acc
}

/// Step for the k-th derivative: `eps^(1/(k+4))` scaled by the domain width.
pub(crate) fn jet_step(k: usize, width: f64) -> f64 {
    f64::EPSILON.powf(1.0 / (k as f64 + 4.0)) * width
}
