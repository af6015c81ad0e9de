//! Numerical scattering: backward integration of `psi'' + k^2 psi = 0`,
//! the real monodromy matrix of a parametric oscillator, and the relative
//! (comparison) system.

use num_complex::Complex64;

use crate::comparison::ReferenceSolution;
use crate::error::{Error, Result};
use crate::model::{nudge, Dispersion, Interface};
pub(crate) use crate::ode::OdeStats;
use crate::ode::{self, OdeConfig};

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Extra distance added on both sides of the dispersion's window.
    pub window_padding: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_steps: 1_000_000, window_padding: 0.0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v <= 1e-2;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::InvalidParameter("tolerances must lie in (0, 1e-2]".into()));
        }
        if !(self.window_padding >= 0.0) || self.max_steps == 0 {
            return Err(Error::InvalidParameter("padding must be non-negative and max_steps positive".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = self.abs_tol.min(rel_tol);
        self
    }

    fn ode(&self) -> OdeConfig {
        OdeConfig { rel_tol: self.rel_tol, abs_tol: self.abs_tol, max_steps: self.max_steps }
    }
}

/// Amplitudes and probabilities from a numerical solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub t: Complex64,
    pub r: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub err_estimate: f64,
}

pub(crate) type State = (Complex64, Complex64);

fn pack(s: State) -> [f64; 4] {
    [s.0.re, s.0.im, s.1.re, s.1.im]
}

fn unpack(y: &[f64; 4]) -> State {
    (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
}

/// Cut points strictly between `lo` and `hi` from joints and interfaces, ascending.
fn cuts(lo: f64, hi: f64, joints: &[f64], interfaces: &[Interface]) -> Vec<f64> {
    let mut v = vec![lo];
    v.extend(joints.iter().copied().filter(|&x| x > lo && x < hi));
    v.extend(interfaces.iter().map(|i| i.x).filter(|&x| x > lo && x < hi));
    v.push(hi);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Carries `(psi, psi')` from `from` to `to` through a piecewise-smooth `k^2`,
/// applying derivative jumps at every interface in the closed interval.
#[allow(clippy::too_many_arguments)]
pub(crate) fn propagate(
    k2: &dyn Fn(f64) -> f64,
    from: f64,
    to: f64,
    state: State,
    joints: &[f64],
    interfaces: &[Interface],
    scale: f64,
    cfg: &SolverConfig,
    stats: &mut OdeStats,
) -> Result<State> {
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let forward = to >= from;
    let mut pts = cuts(lo, hi, joints, interfaces);
    if !forward {
        pts.reverse();
    }
    let jump = |x: f64, s: State| -> State {
        let mut s = s;
        for i in interfaces.iter().filter(|i| i.x == x) {
            if forward {
                s.1 += i.g * s.0;
            } else {
                s.1 -= i.g * s.0;
            }
        }
        s
    };
    let mut s = state;
    let oc = cfg.ode();
    for w in pts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        s = jump(x0, s);
        let (a, b) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
        let (ia, ib) = (nudge(a, 1.0, scale), nudge(b, -1.0, scale));
        let rhs = |x: f64, y: &[f64; 4]| {
            let q = k2(x.clamp(ia, ib));
            [y[2], y[3], -q * y[0], -q * y[1]]
        };
        let y = ode::integrate(rhs, x0, x1, pack(s), &oc, stats)?;
        s = unpack(&y);
    }
    if let Some(&last) = pts.last() {
        s = jump(last, s);
    }
    Ok(s)
}

/// Splits `(psi, psi')` at `x` into `A e^{ikx} + B e^{-ikx}`.
pub(crate) fn decompose(s: State, k: f64, x: f64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let a = 0.5 * (s.0 + s.1 / (i * k)) * (-i * k * x).exp();
    let b = 0.5 * (s.0 - s.1 / (i * k)) * (i * k * x).exp();
    (a, b)
}

/// Solves the scattering problem for `d`, including the interfaces it carries.
///
/// The solution is fixed to `e^{i k_+ x}` on the right and decomposed on the
/// left as `A e^{i k_- x} + B e^{-i k_- x}`.
pub fn solve_scattering(d: &Dispersion, cfg: &SolverConfig) -> Result<ScatteringResult> {
    cfg.validate()?;
    let (km, kp) = (d.k_minus, d.k_plus);
    if !(km > 0.0 && kp > 0.0) {
        return Err(Error::InvalidParameter("asymptotic wavenumbers must be positive".into()));
    }
    let x_l = d.window.0 - cfg.window_padding;
    let x_r = d.window.1 + cfg.window_padding;
    let i = Complex64::i();
    let psi = (i * kp * x_r).exp();
    let start = (psi, i * kp * psi);
    let mut stats = OdeStats::default();
    let k2 = d.k2_fn();
    let end = propagate(&*k2, x_r, x_l, start, &d.joints, &d.interfaces, d.scale, cfg, &mut stats)?;
    let (a, b) = decompose(end, km, x_l);
    assemble(a, b, km, kp, &stats)
}

/// Amplitudes from the left-side decomposition of a solution that is a unit
/// transmitted wave on the right.
pub(crate) fn assemble(a: Complex64, b: Complex64, km: f64, kp: f64, stats: &OdeStats) -> Result<ScatteringResult> {
    if a.norm() < 1e-13 {
        return Err(Error::DegenerateMatch(a.norm()));
    }
    let ratio = kp / km;
    let t = ratio.sqrt() / a;
    let r = b / a;
    let transmission = ratio / a.norm_sqr();
    let reflection = r.norm_sqr();
    let alpha = a / ratio.sqrt();
    let beta = alpha * r;
    let err_estimate = (2.0 * transmission.max(reflection) * stats.rel_err_sum)
        .max((transmission + reflection - 1.0).abs())
        .max(f64::EPSILON);
    Ok(ScatteringResult { t, r, transmission, reflection, alpha, beta, err_estimate })
}

/// The real transfer matrix of `phi'' + omega^2(t) phi = 0` in the `(phi, pi/omega0)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub interval: (f64, f64),
}

impl MonodromyMatrix {
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// `tr(M M^T)`.
    pub fn frobenius_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }
}

/// Integrates the matrix equation `dT/dt = [[0, w0], [-w^2/w0, 0]] T` with `T(t_i) = I`.
///
/// `breaks` lists times where `omega^2` is not smooth.
pub fn monodromy_matrix(
    omega2: &dyn Fn(f64) -> f64,
    t_i: f64,
    t_f: f64,
    omega0: f64,
    breaks: &[f64],
    cfg: &SolverConfig,
) -> Result<MonodromyMatrix> {
    cfg.validate()?;
    if !(omega0 > 0.0) || !(t_f > t_i) {
        return Err(Error::InvalidParameter("need omega0 > 0 and t_f > t_i".into()));
    }
    let pts = cuts(t_i, t_f, breaks, &[]);
    let scale = t_f - t_i;
    let mut y = [1.0, 0.0, 0.0, 1.0];
    let mut stats = OdeStats::default();
    let oc = cfg.ode();
    for w in pts.windows(2) {
        let (ia, ib) = (nudge(w[0], 1.0, scale), nudge(w[1], -1.0, scale));
        let rhs = |t: f64, y: &[f64; 4]| {
            let q = omega2(t.clamp(ia, ib)) / omega0;
            // columns (y0, y1) and (y2, y3)
            [omega0 * y[1], -q * y[0], omega0 * y[3], -q * y[2]]
        };
        y = ode::integrate(rhs, w[0], w[1], y, &oc, &mut stats)?;
    }
    Ok(MonodromyMatrix { a: y[0], b: y[2], c: y[1], d: y[3], interval: (t_i, t_f) })
}

/// `(|alpha|^2, |beta|^2)` from the trace formulas.
pub fn bogoliubov_from_monodromy(m: &MonodromyMatrix) -> (f64, f64) {
    let f = m.frobenius_sq();
    (0.25 * (f + 2.0), 0.25 * (f - 2.0))
}

/// Lower bound `max(0, (|tr M^2| - 2)/4)` on `|beta|^2`.
pub fn beta_lower_bound(m: &MonodromyMatrix) -> f64 {
    let tr2 = m.a * m.a + 2.0 * m.b * m.c + m.d * m.d;
    (0.25 * (tr2.abs() - 2.0)).max(0.0)
}

/// Outcome of integrating the relative system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeEvolution {
    pub a: Complex64,
    pub b: Complex64,
    /// Bogoliubov coefficients of the reference problem.
    pub alpha0: Complex64,
    pub beta0: Complex64,
    pub err_estimate: f64,
}

impl RelativeEvolution {
    pub fn alpha(&self) -> Complex64 {
        self.a * self.alpha0 + self.b * self.beta0.conj()
    }

    pub fn beta(&self) -> Complex64 {
        self.a * self.beta0 + self.b * self.alpha0.conj()
    }

    pub fn transmission(&self) -> f64 {
        1.0 / self.alpha().norm_sqr()
    }
}

pub(crate) fn flux(s: State) -> f64 {
    (s.0.conj() * s.1).im
}

/// Integrates `a' = (i/2)(k^2 - k0^2)(a |psi0|^2 + b psi0*^2)`,
/// `b' = -(i/2)(k^2 - k0^2)(a psi0^2 + b |psi0|^2)` with `a = 1, b = 0` on the left.
pub fn evolve_relative(reference: &ReferenceSolution, d: &Dispersion, cfg: &SolverConfig) -> Result<RelativeEvolution> {
    cfg.validate()?;
    let d0 = &reference.dispersion;
    let tol_k = 1e-9 * d.k_minus.max(d.k_plus);
    if (d0.k_minus - d.k_minus).abs() > tol_k || (d0.k_plus - d.k_plus).abs() > tol_k {
        return Err(Error::InvalidParameter("reference and target must share asymptotic wavenumbers".into()));
    }
    let x_l = d.window.0.min(d0.window.0) - cfg.window_padding;
    let x_r = d.window.1.max(d0.window.1) + cfg.window_padding;
    let scale = d.scale.min(d0.scale);
    let mut joints: Vec<f64> = d.joints.iter().chain(d0.joints.iter()).copied().collect();
    joints.extend(d.interfaces.iter().chain(d0.interfaces.iter()).map(|i| i.x));
    let pts = cuts(x_l, x_r, &joints, &[]);
    let g_at = |list: &[Interface], x: f64| list.iter().filter(|i| i.x == x).map(|i| i.g).sum::<f64>();
    let i = Complex64::i();

    let mut psi0 = reference.initial(x_l);
    let j0 = flux(psi0);
    if (j0 - 1.0).abs() > 1e-8 {
        return Err(Error::FluxViolation(j0));
    }
    let mut a = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(0.0, 0.0);
    let mut stats = OdeStats::default();
    let oc = cfg.ode();
    let k2 = d.k2_fn();
    let k02 = d0.k2_fn();

    let apply = |x: f64, psi0: &mut State, a: &mut Complex64, b: &mut Complex64| {
        let g = g_at(&d.interfaces, x);
        let g0 = g_at(&d0.interfaces, x);
        if g0 != 0.0 {
            psi0.1 += g0 * psi0.0;
        }
        let dg = g - g0;
        if dg != 0.0 {
            let p = psi0.0;
            let m = p.norm_sqr();
            let (a0, b0) = (*a, *b);
            *a = a0 - 0.5 * i * dg * (a0 * m + b0 * p.conj() * p.conj());
            *b = b0 + 0.5 * i * dg * (a0 * p * p + b0 * m);
        }
    };

    for w in pts.windows(2) {
        apply(w[0], &mut psi0, &mut a, &mut b);
        let (ia, ib) = (nudge(w[0], 1.0, scale), nudge(w[1], -1.0, scale));
        let rhs = |x: f64, y: &[f64; 8]| {
            let xc = x.clamp(ia, ib);
            let q0 = k02(xc);
            let dq = k2(xc) - q0;
            let p = Complex64::new(y[0], y[1]);
            let aa = Complex64::new(y[4], y[5]);
            let bb = Complex64::new(y[6], y[7]);
            let m = p.norm_sqr();
            let da = 0.5 * i * dq * (aa * m + bb * p.conj() * p.conj());
            let db = -0.5 * i * dq * (aa * p * p + bb * m);
            [y[2], y[3], -q0 * y[0], -q0 * y[1], da.re, da.im, db.re, db.im]
        };
        let y0 = [psi0.0.re, psi0.0.im, psi0.1.re, psi0.1.im, a.re, a.im, b.re, b.im];
        let y = ode::integrate(rhs, w[0], w[1], y0, &oc, &mut stats)?;
        psi0 = (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]));
        a = Complex64::new(y[4], y[5]);
        b = Complex64::new(y[6], y[7]);
    }
    if let Some(&last) = pts.last() {
        apply(last, &mut psi0, &mut a, &mut b);
    }
    let j1 = flux(psi0);
    if (j1 - 1.0).abs() > 1e-8 {
        return Err(Error::FluxViolation(j1));
    }
    let kp = d0.k_plus;
    let (ap, bp) = decompose(psi0, kp, x_r);
    let alpha0 = ap * kp.sqrt();
    let beta0 = bp * kp.sqrt();
    let err_estimate =
        (2.0 * a.norm_sqr() * stats.rel_err_sum).max((a.norm_sqr() - b.norm_sqr() - 1.0).abs()).max(f64::EPSILON);
    Ok(RelativeEvolution { a, b, alpha0, beta0, err_estimate })
}
