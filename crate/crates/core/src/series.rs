//! Truncated Taylor series in one variable.
//!
//! Used to push parameter jets through the chain rule: the arclength
//! derivatives of a curve are obtained by repeatedly applying `d/ds = (1/v) d/dt`
//! to series in `h = t - t0`, where `v` is the speed.

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Series(Vec<f64>);

impl Series {
    /// Series whose k-th derivative at the expansion point is `derivs[k]`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d / fact
            })
            .collect();
        Series(coeffs)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Series(self.0[..=order.min(self.order())].to_vec())
    }

    pub fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return Series(vec![0.0]);
        }
        Series(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, a: f64) -> Self {
        Series(self.0.iter().map(|c| a * c).collect())
    }

    pub fn add(&self, other: &Series) -> Self {
        let n = self.0.len().min(other.0.len());
        Series((0..n).map(|k| self.0[k] + other.0[k]).collect())
    }

    pub fn mul(&self, other: &Series) -> Self {
        let n = self.0.len().min(other.0.len());
        Series(
            (0..n)
                .map(|k| (0..=k).map(|j| self.0[j] * other.0[k - j]).sum())
                .collect(),
        )
    }

    /// Quotient; the divisor must have a nonzero constant term.
    pub fn div(&self, other: &Series) -> Self {
        let n = self.0.len().min(other.0.len());
        let b0 = other.0[0];
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let acc: f64 = (1..=k).map(|j| other.0[j] * out[k - j]).sum();
            out.push((self.0[k] - acc) / b0);
        }
        Series(out)
    }

    /// Square root; the constant term must be positive.
    pub fn sqrt(&self) -> Self {
        let n = self.0.len();
        let r0 = self.0[0].sqrt();
        let mut out = vec![r0];
        for k in 1..n {
            let acc: f64 = (1..k).map(|j| out[j] * out[k - j]).sum();
            out.push((self.0[k] - acc) / (2.0 * r0));
        }
        Series(out)
    }
}
