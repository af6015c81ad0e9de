//! Wave scattering off a Schwarzschild black hole in geometric units
//! (`G = c = 1`): the Regge–Wheeler barrier, the tortoise coordinate, the two
//! closed-form greybody bounds and numeric greybody factors.

use std::sync::Arc;

use num_complex::Complex64;

use crate::bounds::{BoundKind, BoundResult};
use crate::error::{Error, Result};
use crate::model::Dispersion;
use crate::solver::{assemble, decompose, propagate, OdeStats, ScatteringResult, SolverConfig};

/// Mass `m`, spin `s` of the field, multipole `l >= s` and frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreybodyQuery {
    pub m: f64,
    pub s: u32,
    pub l: u32,
    pub omega: f64,
}

impl GreybodyQuery {
    pub fn new(m: f64, s: u32, l: u32, omega: f64) -> Result<Self> {
        let q = Self { m, s, l, omega };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {}", self.m)));
        }
        if self.s > 2 {
            return Err(Error::InvalidParameter(format!("spin must be 0, 1 or 2, got {}", self.s)));
        }
        if self.l < self.s {
            return Err(Error::InvalidParameter(format!("l = {} is below the spin {}", self.l, self.s)));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("frequency must be positive, got {}", self.omega)));
        }
        Ok(())
    }

    /// `l (l + 1)`.
    fn big_l(&self) -> f64 {
        let l = self.l as f64;
        l * (l + 1.0)
    }

    /// `2m (1 - s^2)`.
    fn sigma(&self) -> f64 {
        let s = self.s as f64;
        2.0 * self.m * (1.0 - s * s)
    }

    /// `V / (1 - 2m/r)`.
    fn reduced(&self, r: f64) -> f64 {
        self.big_l() / (r * r) + self.sigma() / (r * r * r)
    }
}

fn horizon_check(r: f64, m: f64) -> Result<()> {
    if r > 2.0 * m {
        Ok(())
    } else {
        Err(Error::InsideHorizon { r, horizon: 2.0 * m })
    }
}

/// `V(r) = (1 - 2m/r) (l(l+1)/r^2 + 2m(1 - s^2)/r^3)`.
pub fn regge_wheeler_potential(q: &GreybodyQuery, r: f64) -> Result<f64> {
    horizon_check(r, q.m)?;
    Ok((1.0 - 2.0 * q.m / r) * q.reduced(r))
}

/// `r* = r + 2m ln(r/2m - 1)`.
pub fn tortoise(r: f64, m: f64) -> Result<f64> {
    horizon_check(r, m)?;
    Ok(r + 2.0 * m * ((r - 2.0 * m) / (2.0 * m)).ln())
}

/// Principal branch of the Lambert W function for `x >= 0`.
pub fn lambert_w0(x: f64) -> f64 {
    if x == 0.0 || x.is_nan() {
        return x;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let mut w = if x < 3.0 {
        (1.0 + x).ln()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 1e-16 * w.abs().max(1e-300) {
            break;
        }
    }
    w
}

/// `W(e^y)`, usable when `e^y` overflows: solves `w + ln w = y`.
fn lambert_w0_exp(y: f64) -> f64 {
    if y < 700.0 {
        return lambert_w0(y.exp());
    }
    let mut w = y - y.ln();
    for _ in 0..50 {
        let step = (w + w.ln() - y) / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-16 * w {
            break;
        }
    }
    w
}

/// Inverse of `tortoise`: `r = 2m (1 + W(e^{(r* - 2m)/2m}))`.
pub fn radius_from_tortoise(r_star: f64, m: f64) -> f64 {
    2.0 * m * (1.0 + lambert_w0_exp(r_star / (2.0 * m) - 1.0))
}

/// `(r, 1 - 2m/r)` at tortoise position `r*`, with the redshift factor taken
/// straight from `W` so it keeps full precision near the horizon.
fn radius_and_redshift(r_star: f64, m: f64) -> (f64, f64) {
    let w = lambert_w0_exp(r_star / (2.0 * m) - 1.0);
    (2.0 * m * (1.0 + w), w / (1.0 + w))
}

/// Location and height of the barrier top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwPeak {
    pub r_peak: f64,
    pub v_peak: f64,
}

/// The barrier top. `V'(r) = 0` reduces to `2L r^2 - (6mL - 3 sigma) r - 8 m sigma = 0`
/// with `L = l(l+1)` and `sigma = 2m(1 - s^2)`, solved directly.
pub fn rw_peak(q: &GreybodyQuery) -> Result<RwPeak> {
    q.validate()?;
    let (m, big_l, sigma) = (q.m, q.big_l(), q.sigma());
    let b = 6.0 * m * big_l - 3.0 * sigma;
    let r_peak = if big_l == 0.0 {
        // linear case: 3 sigma r = 8 m sigma
        8.0 * m / 3.0
    } else {
        let disc = (b * b + 64.0 * big_l * m * sigma).sqrt();
        if b >= 0.0 {
            (b + disc) / (4.0 * big_l)
        } else {
            -16.0 * m * sigma / (b - disc)
        }
    };
    let v_peak = regge_wheeler_potential(q, r_peak)?;
    Ok(RwPeak { r_peak, v_peak })
}

/// `T >= sech^2(((l+1)^2 + l^2 - s^2) / (8 omega m))`, meaningful at every frequency.
pub fn greybody_bound_1(q: &GreybodyQuery) -> Result<BoundResult> {
    q.validate()?;
    let (l, s) = (q.l as f64, q.s as f64);
    let arg = ((l + 1.0).powi(2) + l * l - s * s) / (8.0 * q.omega * q.m);
    let c = arg.cosh();
    Ok(BoundResult::new(BoundKind::LowerT, "greybody-1", 1.0 / (c * c), arg, 0.0))
}

/// `T >= 1 - V_peak^2/(2 omega^2 - V_peak)^2` above the barrier top; flagged
/// invalid below it.
pub fn greybody_bound_2(q: &GreybodyQuery) -> Result<BoundResult> {
    let peak = rw_peak(q)?;
    let w2 = q.omega * q.omega;
    if w2 < peak.v_peak {
        return Ok(BoundResult::invalid(BoundKind::LowerT, "greybody-2", "frequency below the barrier top"));
    }
    let value = if q.s == 1 {
        let x = 27.0 * w2 * q.m * q.m;
        let big_l = q.big_l();
        4.0 * x * (x - big_l) / ((2.0 * x - big_l) * (2.0 * x - big_l))
    } else {
        let v = peak.v_peak;
        4.0 * w2 * (w2 - v) / ((2.0 * w2 - v) * (2.0 * w2 - v))
    };
    let mut b = BoundResult::new(BoundKind::LowerT, "greybody-2", value.max(0.0), f64::NAN, 0.0);
    b.parameter = Some(peak.v_peak);
    Ok(b)
}

/// `omega^2 - V` as a function of `r*`, truncated where `V < rel * omega^2`
/// on both sides. The right tail is polynomial, so this window can be long.
pub fn greybody_dispersion(q: &GreybodyQuery, rel: f64) -> Result<Dispersion> {
    q.validate()?;
    let (left, right) = (left_edge(q, rel), right_edge(q, rel));
    let qq = *q;
    let w2 = q.omega * q.omega;
    let k2 = move |x: f64| {
        let (r, f) = radius_and_redshift(x, qq.m);
        w2 - f * qq.reduced(r)
    };
    Ok(Dispersion::new(Arc::new(k2), q.omega, q.omega, (left, right), vec![], vec![], q.m))
}

/// Tortoise position near the horizon below which `V < rel * omega^2`.
fn left_edge(q: &GreybodyQuery, rel: f64) -> f64 {
    let m = q.m;
    // V/f is bounded by its value range on (2m, 3m]
    let cap = (q.big_l() + q.sigma().abs() / (2.0 * m)) / (4.0 * m * m);
    let f = (rel * q.omega * q.omega / cap.max(1e-300)).min(0.5);
    let r = 2.0 * m / (1.0 - f);
    tortoise(r, m).unwrap_or(-40.0 * m)
}

/// Tortoise position beyond which `V < rel * omega^2`.
fn right_edge(q: &GreybodyQuery, rel: f64) -> f64 {
    let target = rel * q.omega * q.omega;
    let peak = rw_peak(q).map(|p| p.r_peak).unwrap_or(3.0 * q.m);
    let v = |r: f64| regge_wheeler_potential(q, r).unwrap_or(0.0).abs();
    let mut r = peak.max(3.0 * q.m);
    while v(r) > target && r < 1e15 {
        r *= 2.0;
    }
    tortoise(r, q.m).unwrap_or(r)
}

/// Outgoing solution `e^{i omega r*} u(r)` with `u = \sum a_n r^{-n}`, as
/// `(psi, d psi/dr*)` at radius `r`. The series is asymptotic; it is summed
/// until its terms stop decreasing.
fn outgoing_series(q: &GreybodyQuery, r: f64) -> Result<(Complex64, Complex64)> {
    let (m, big_l, sigma, w) = (q.m, q.big_l(), q.sigma(), q.omega);
    let i = Complex64::i();
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    let mut u = Complex64::new(1.0, 0.0);
    let mut du = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for n in 0..400 {
        let nf = n as f64;
        let next = ((nf * (nf + 1.0) - big_l) * cur - (2.0 * m * (nf - 1.0) * (nf + 1.0) + sigma) * prev)
            / (2.0 * i * w * (nf + 1.0));
        let term = next / r.powi(n + 1);
        let mag = term.norm();
        if mag > last {
            break;
        }
        u += term;
        du -= (nf + 1.0) * term / r;
        last = mag;
        if mag <= 1e-17 * u.norm() {
            break;
        }
        prev = cur;
        cur = next;
    }
    let f = 1.0 - 2.0 * m / r;
    let phase = (i * w * tortoise(r, m)?).exp();
    Ok((phase * u, phase * (i * w * u + f * du)))
}

/// Numeric greybody factor together with the tortoise window it used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreybodyNumeric {
    pub result: ScatteringResult,
    pub window: (f64, f64),
}

/// Transmission through the barrier: the outgoing solution is started from its
/// large-`r` series at `r = max(40/omega, 100 m)` and integrated in `r*` down
/// to where `V < 1e-12 omega^2` near the horizon.
pub fn greybody_numeric(q: &GreybodyQuery, cfg: &SolverConfig) -> Result<GreybodyNumeric> {
    q.validate()?;
    cfg.validate()?;
    let m = q.m;
    let r_right = (40.0 / q.omega).max(100.0 * m);
    let x_r = tortoise(r_right, m)?;
    let x_l = left_edge(q, 1e-12).min(x_r - 1.0);
    let start = outgoing_series(q, r_right)?;
    let w2 = q.omega * q.omega;
    let qq = *q;
    let k2 = move |x: f64| {
        let (r, f) = radius_and_redshift(x, qq.m);
        w2 - f * qq.reduced(r)
    };
    let mut stats = OdeStats::default();
    let end = propagate(&k2, x_r, x_l, start, &[], &[], m, cfg, &mut stats)?;
    let (a, b) = decompose(end, q.omega, x_l);
    let result = assemble(a, b, q.omega, q.omega, &stats)?;
    Ok(GreybodyNumeric { result, window: (x_l, x_r) })
}
