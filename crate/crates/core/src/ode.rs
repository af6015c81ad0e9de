//! Dormand–Prince 5(4) integration of small real linear systems.
//!
//! Every system in this crate is a fixed-size real state (a complex wave
//! function and its derivative, a 2×2 matrix, a pair of complex coefficients)
//! so the stepper works on `[f64; N]`. Integration always stops exactly on
//! the requested end point, which is how interfaces and joints are honoured.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

/// Running statistics across one or more calls to [`integrate`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Sum over accepted steps of the local error estimate relative to the state norm.
    pub rel_err_sum: f64,
    /// Last accepted step size, reused as the first guess of the next call.
    pub last_step: f64,
}

fn norm<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction) and return `y(x1)`.
pub fn integrate<const N: usize, F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: [f64; N],
    cfg: &OdeConfig,
    stats: &mut OdeStats,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut h = if stats.last_step > 0.0 { stats.last_step } else { 1e-2 * span.abs() };
    h = h.min(span.abs());
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    loop {
        let remaining = (x1 - x) * dir;
        if remaining <= 0.0 {
            return Ok(y);
        }
        let last = h >= remaining * (1.0 - 1e-12);
        let step = if last { remaining } else { h };
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::StiffFailure { max_steps: cfg.max_steps, x });
        }
        let hs = step * dir;
        let k2 = f(x + C2 * hs, &axpy(&y, &[(A21, &k1)], hs));
        let k3 = f(x + C3 * hs, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
        let k4 = f(x + C4 * hs, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
        let k5 = f(x + C5 * hs, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs));
        let k6 = f(x + hs, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs));
        let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
        let x_new = if last { x1 } else { x + hs };
        let k7 = f(x_new, &y_new);
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let scale = norm(&y).max(norm(&y_new));
        let tol = cfg.abs_tol + cfg.rel_tol * scale;
        let ratio = norm(&err) / tol;
        if ratio <= 1.0 {
            stats.accepted += 1;
            stats.rel_err_sum += norm(&err) / scale.max(f64::MIN_POSITIVE);
            x = x_new;
            y = y_new;
            k1 = k7;
            if !last {
                stats.last_step = step;
            }
        } else {
            stats.rejected += 1;
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h = step * factor;
        if h < 1e-15 * x.abs().max(span.abs()) {
            return Err(Error::StiffFailure { max_steps: cfg.max_steps, x });
        }
    }
}
