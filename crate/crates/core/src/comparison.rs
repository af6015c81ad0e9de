//! Bounds relative to a solvable reference problem.
//!
//! With `psi0` the flux-normalised reference solution (`e^{i k_- x}/sqrt(k_-)`
//! on the left), the target's Bogoliubov coefficients differ from the
//! reference ones by a hyperbolic rotation whose size is controlled by
//! `Theta = (1/2) \int |k^2 - k0^2| |psi0|^2`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::bounds::{theta_integral, AuxiliaryChoice, BoundKind, BoundResult};
use crate::error::{Error, Result};
use crate::exact::{cos_sqrt, sinc_sqrt};
use crate::model::{
    asymptotic_wavenumbers, build_dispersion, Dispersion, Interface, Perturbation, PotentialSpec, UnitsConvention,
};
use crate::quadrature::{integrate, merge_breaks, QuadratureConfig};
use crate::solver::{decompose, flux, State};

#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    state: State,
    /// `k^2` from this node up to the next one.
    k2: f64,
}

/// Closed-form solution through constant layers and point interactions.
#[derive(Debug, Clone)]
struct PiecewiseWave {
    k_minus: f64,
    nodes: Vec<Node>,
}

impl PiecewiseWave {
    /// `events` holds `(x, g, k^2 to the right)` in increasing `x`.
    fn new(k_minus: f64, events: &[(f64, f64, f64)]) -> Self {
        let mut nodes: Vec<Node> = Vec::with_capacity(events.len());
        for &(x, g, k2) in events {
            let (psi, mut dpsi) = match nodes.last() {
                None => plane_wave(k_minus, x),
                Some(n) => step(n, x),
            };
            dpsi += g * psi;
            nodes.push(Node { x, state: (psi, dpsi), k2 });
        }
        Self { k_minus, nodes }
    }

    fn eval(&self, x: f64) -> State {
        match self.nodes.partition_point(|n| n.x <= x) {
            0 => plane_wave(self.k_minus, x),
            i => step(&self.nodes[i - 1], x),
        }
    }
}

fn plane_wave(k: f64, x: f64) -> State {
    let i = Complex64::i();
    let psi = (i * k * x).exp() / k.sqrt();
    (psi, i * k * psi)
}

fn step(n: &Node, x: f64) -> State {
    let w = x - n.x;
    let z = n.k2 * w * w;
    let c = cos_sqrt(z);
    let sw = w * sinc_sqrt(z);
    let (p, d) = n.state;
    (c * p + sw * d, -n.k2 * sw * p + c * d)
}

/// A reference problem carried alongside the target. Built from a dispersion
/// alone it can only be integrated numerically; built from one of the
/// solvable families it also provides `psi0` in closed form everywhere.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub dispersion: Dispersion,
    wave: Option<Arc<PiecewiseWave>>,
}

impl ReferenceSolution {
    pub fn new(dispersion: Dispersion) -> Self {
        Self { dispersion, wave: None }
    }

    /// Closed-form reference for the free particle, a step, a square barrier or a delta.
    pub fn from_potential(p: &PotentialSpec, energy: f64, units: UnitsConvention) -> Result<Self> {
        let (km, kp) = asymptotic_wavenumbers(p, energy, units)?;
        let s = units.k2_factor();
        let events: Vec<(f64, f64, f64)> = match *p {
            PotentialSpec::Free { .. } => vec![],
            PotentialSpec::Step { .. } => vec![(0.0, 0.0, kp * kp)],
            PotentialSpec::SquareBarrier { v0, width } => vec![(0.0, 0.0, s * (energy - v0)), (width, 0.0, kp * kp)],
            PotentialSpec::Delta { g, x0 } => vec![(x0, s * g, km * km)],
            _ => {
                return Err(Error::UnsupportedFamily(format!("no closed-form reference for {}", p.name())));
            }
        };
        let dispersion = build_dispersion(p, energy, units)?;
        Ok(Self { dispersion, wave: Some(Arc::new(PiecewiseWave::new(km, &events))) })
    }

    pub fn is_closed_form(&self) -> bool {
        self.wave.is_some()
    }

    /// `(psi0, psi0')` at `x`.
    pub fn psi(&self, x: f64) -> Result<State> {
        match &self.wave {
            Some(w) => Ok(w.eval(x)),
            None => Err(Error::UnsupportedFamily("reference has no closed-form solution".into())),
        }
    }

    /// Initial `(psi0, psi0')` at a point left of every feature.
    pub(crate) fn initial(&self, x: f64) -> State {
        plane_wave(self.dispersion.k_minus, x)
    }

    /// `(alpha0, beta0)` read off on the right of the last feature.
    pub fn coefficients(&self) -> Result<(Complex64, Complex64)> {
        let w = self
            .wave
            .as_ref()
            .ok_or_else(|| Error::UnsupportedFamily("reference has no closed-form solution".into()))?;
        let kp = self.dispersion.k_plus;
        let x = w.nodes.last().map_or(0.0, |n| n.x);
        let (a, b) = decompose(w.eval(x), kp, x);
        Ok((a * kp.sqrt(), b * kp.sqrt()))
    }

    pub fn transmission(&self) -> Result<f64> {
        Ok(1.0 / self.coefficients()?.0.norm_sqr())
    }

    fn is_free(&self) -> bool {
        self.wave.as_ref().is_some_and(|w| w.nodes.is_empty()) && self.dispersion.is_symmetric_asymptotically()
    }

    fn check_flux(&self) -> Result<()> {
        let (lo, hi) = self.dispersion.window;
        for x in [lo - 1.0, 0.5 * (lo + hi), hi + 1.0] {
            let j = flux(self.psi(x)?);
            if (j - 1.0).abs() > 1e-8 {
                return Err(Error::FluxViolation(j));
            }
        }
        Ok(())
    }
}

/// `Theta_bound = (1/2) \int |k^2 - k0^2| |psi0|^2` and `Theta0 = arccosh |alpha0|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaBudget {
    pub theta_bound: f64,
    pub theta0: f64,
    pub quad_err: f64,
}

fn same_asymptotes(r: &Dispersion, d: &Dispersion) -> Result<()> {
    let tol = 1e-9 * d.k_minus.max(d.k_plus);
    if (r.k_minus - d.k_minus).abs() > tol || (r.k_plus - d.k_plus).abs() > tol {
        return Err(Error::InvalidParameter("reference and target must share asymptotic wavenumbers".into()));
    }
    Ok(())
}

/// The rotation budget of the target `d` relative to `reference`. A delta of
/// strength `g` at `x0` contributes `|g| |psi0(x0)|^2 / 2`.
pub fn theta_bound(reference: &ReferenceSolution, d: &Dispersion, quad: &QuadratureConfig) -> Result<ThetaBudget> {
    let r = &reference.dispersion;
    same_asymptotes(r, d)?;
    reference.check_flux()?;
    let (alpha0, _) = reference.coefficients()?;
    let theta0 = alpha0.norm().max(1.0).acosh();
    if reference.is_free() {
        // identical arithmetic to the constant-h bound
        let ti = theta_integral(d, &AuxiliaryChoice::ConstantK(r.k_plus), quad)?;
        return Ok(ThetaBudget { theta_bound: ti.value, theta0, quad_err: ti.quad_err });
    }
    let lo = d.window.0.min(r.window.0);
    let hi = d.window.1.max(r.window.1);
    let mut brk = d.breakpoints();
    brk.extend(r.breakpoints());
    let f = |x: f64| match reference.psi(x) {
        Ok((p, _)) => 0.5 * (d.k2(x) - r.k2(x)).abs() * p.norm_sqr(),
        Err(_) => f64::NAN,
    };
    let est = integrate(f, &merge_breaks(lo, hi, brk), quad)?;
    let mut value = est.value;
    let mut sites: Vec<f64> = d.interfaces.iter().chain(r.interfaces.iter()).map(|i| i.x).collect();
    sites.sort_by(f64::total_cmp);
    sites.dedup();
    let strength = |list: &[Interface], x: f64| list.iter().filter(|i| i.x == x).map(|i| i.g).sum::<f64>();
    for x in sites {
        let dg = strength(&d.interfaces, x) - strength(&r.interfaces, x);
        value += 0.5 * dg.abs() * reference.psi(x)?.0.norm_sqr();
    }
    Ok(ThetaBudget { theta_bound: value, theta0, quad_err: est.abs_err })
}

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

/// `sech^2(Theta0 + Theta_bound) <= T`, and `T <= sech^2(Theta0 - Theta_bound)`
/// when `Theta0 > Theta_bound` (flagged invalid otherwise).
pub fn bracket_transmission(budget: &ThetaBudget) -> (BoundResult, BoundResult) {
    let (t0, tb) = (budget.theta0, budget.theta_bound);
    let lower = BoundResult::new(BoundKind::LowerT, "comparison", sech2(t0 + tb), t0 + tb, budget.quad_err);
    let upper = if t0 > tb {
        BoundResult::new(BoundKind::UpperT, "comparison", sech2(t0 - tb), t0 - tb, budget.quad_err)
    } else {
        BoundResult::invalid(BoundKind::UpperT, "comparison", "budget exceeds the reference rotation")
    };
    (lower, upper)
}

/// `sinh(max(Theta0 - Theta_bound, 0)) <= |beta| <= sinh(Theta0 + Theta_bound)`.
pub fn bracket_beta(budget: &ThetaBudget) -> (BoundResult, BoundResult) {
    let (t0, tb) = (budget.theta0, budget.theta_bound);
    let lo = (t0 - tb).max(0.0);
    (
        BoundResult::new(BoundKind::LowerAbsBeta, "comparison", lo.sinh(), lo, budget.quad_err),
        BoundResult::new(BoundKind::UpperAbsBeta, "comparison", (t0 + tb).sinh(), t0 + tb, budget.quad_err),
    )
}

/// Composition of two evolutions with `|beta_e|` and `|beta_delta|`:
/// returns the lower and upper bounds on the combined `|beta|`. Inputs are
/// taken by magnitude.
pub fn compose_bogoliubov_bounds(beta_e: f64, beta_delta: f64) -> (f64, f64) {
    let (e, d) = (beta_e.abs(), beta_delta.abs());
    let (ae, ad) = ((1.0 + e * e).sqrt(), (1.0 + d * d).sqrt());
    let upper = ae * d + e * ad;
    let lower = (e * ad - ae * d).abs();
    (lower.min(upper), upper)
}

/// First-order effect of `V -> V0 + eps dv` on top of a closed-form reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationEstimates {
    /// First-order `b(inf) = (i s eps / 2) \int dv psi0^2`.
    pub b_first_order: Complex64,
    /// `|b(inf)| <= (s eps / 2) \int |dv| |psi0|^2`.
    pub b_abs_bound: f64,
    /// `-T0 2 Re(beta0* b / alpha0)`. An estimate, not a bound.
    pub delta_t_est: f64,
    /// `|dT| <= s eps T0 sqrt(1 - T0) \int |dv| |psi0|^2` to first order.
    pub delta_t_bound: f64,
    /// `|dN| <= s eps sqrt(N0 (N0 + 1)) \int |dv| |psi0|^2` to first order.
    pub delta_n_bound: f64,
    /// `s eps \int |dv| |psi0|^2` is large enough (> 0.3) that first order is doubtful.
    pub large: bool,
}

pub fn perturbation_estimates(
    reference: &ReferenceSolution,
    dv: &Perturbation,
    eps: f64,
    units: UnitsConvention,
    quad: &QuadratureConfig,
) -> Result<PerturbationEstimates> {
    reference.check_flux()?;
    let (alpha0, beta0) = reference.coefficients()?;
    let (a, b) = dv.support;
    let mut brk = reference.dispersion.breakpoints();
    brk.retain(|&x| x > a && x < b);
    let breaks = merge_breaks(a, b, brk);
    let psi2 = |x: f64| reference.psi(x).map(|s| s.0 * s.0).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let abs_int = integrate(|x| (dv.f)(x).abs() * psi2(x).norm(), &breaks, quad)?;
    let re = integrate(|x| (dv.f)(x) * psi2(x).re, &breaks, quad)?;
    let im = integrate(|x| (dv.f)(x) * psi2(x).im, &breaks, quad)?;
    let s = units.k2_factor();
    let scale = s * eps;
    let b1 = Complex64::i() * 0.5 * scale * Complex64::new(re.value, im.value);
    let t0 = 1.0 / alpha0.norm_sqr();
    let n0 = beta0.norm_sqr();
    let weight = scale.abs() * abs_int.value;
    Ok(PerturbationEstimates {
        b_first_order: b1,
        b_abs_bound: 0.5 * weight,
        delta_t_est: -t0 * 2.0 * (beta0.conj() * b1 / alpha0).re,
        delta_t_bound: weight * t0 * (1.0 - t0).max(0.0).sqrt(),
        delta_n_bound: weight * (n0 * (n0 + 1.0)).sqrt(),
        large: weight > 0.3,
    })
}
