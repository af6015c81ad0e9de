use crate::error::{Error, Result};

/// A tabulated potential interpolated by a monotone (Fritsch–Carlson) cubic.
///
/// Outside the sampled range the potential is clamped to its asymptotic values,
/// and the end slopes are zero so the clamp joins smoothly.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    xs: Vec<f64>,
    vs: Vec<f64>,
    slopes: Vec<f64>,
    v_minus: f64,
    v_plus: f64,
}

impl SampledProfile {
    pub fn new(xs: Vec<f64>, vs: Vec<f64>, v_minus: f64, v_plus: f64) -> Result<Self> {
        if xs.len() < 2 || xs.len() != vs.len() {
            return Err(Error::InvalidParameter("sampled profile needs at least two (x, V) pairs".into()));
        }
        if xs.iter().chain(vs.iter()).any(|v| !v.is_finite()) || !v_minus.is_finite() || !v_plus.is_finite() {
            return Err(Error::InvalidParameter("sampled profile contains non-finite values".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("sampled x values must be strictly increasing".into()));
        }
        let slopes = fritsch_carlson(&xs, &vs);
        Ok(Self { xs, vs, slopes, v_minus, v_plus })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn vs(&self) -> &[f64] {
        &self.vs
    }

    pub fn asymptotes(&self) -> (f64, f64) {
        (self.v_minus, self.v_plus)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Largest mismatch between the end samples and the declared asymptotes.
    pub fn tail_mismatch(&self) -> f64 {
        let n = self.vs.len();
        (self.vs[0] - self.v_minus).abs().max((self.vs[n - 1] - self.v_plus).abs())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.v_minus;
        }
        if x >= self.xs[n - 1] {
            return self.v_plus;
        }
        let i = self.xs.partition_point(|&xi| xi <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.vs[i] + h10 * h * self.slopes[i] + h01 * self.vs[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

fn fritsch_carlson(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])).collect();
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            m[k] = 0.5 * (delta[k - 1] + delta[k]);
        }
    }
    for k in 0..n - 1 {
        if delta[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let a = m[k] / delta[k];
        let b = m[k + 1] / delta[k];
        let s = a * a + b * b;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m[k] = tau * a * delta[k];
            m[k + 1] = tau * b * delta[k];
        }
    }
    m
}
