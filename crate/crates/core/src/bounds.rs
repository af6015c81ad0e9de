//! Rigorous bounds on transmission, reflection, Bogoliubov coefficients and
//! particle production, built on the non-negative integrand
//! `theta = sqrt(h'^2 + (k^2 - h^2)^2) / (2h)`.

use std::cell::Cell;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    build_dispersion, find_extrema, nudge, Dispersion, ExtremumKind, PotentialSpec, RealFn, UnitsConvention,
};
use crate::optimize::golden_max;
use crate::quadrature::{integrate, merge_breaks, QuadratureConfig};

/// What a bound constrains and in which direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    LowerT,
    UpperT,
    UpperR,
    UpperAbsAlpha,
    UpperAbsBeta,
    LowerAbsBeta,
    UpperN,
    /// An approximation to `T` with no guarantee.
    EstimateT,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::LowerT => "lowerT",
            BoundKind::UpperT => "upperT",
            BoundKind::UpperR => "upperR",
            BoundKind::UpperAbsAlpha => "upperAbsAlpha",
            BoundKind::UpperAbsBeta => "upperAbsBeta",
            BoundKind::LowerAbsBeta => "lowerAbsBeta",
            BoundKind::UpperN => "upperN",
            BoundKind::EstimateT => "estimateT",
        }
    }
}

/// One bound together with the integral it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub value: f64,
    pub bound_id: String,
    pub integral: f64,
    pub quad_err: f64,
    pub valid: bool,
    pub reason: Option<String>,
    /// True for approximations that carry no guarantee.
    pub estimate: bool,
    /// Named companion values (weaker forms, comparison thresholds).
    pub extras: Vec<(String, f64)>,
    /// Free parameter used (such as an optimised `k0`).
    pub parameter: Option<f64>,
}

impl BoundResult {
    pub fn new(kind: BoundKind, bound_id: impl Into<String>, value: f64, integral: f64, quad_err: f64) -> Self {
        Self {
            kind,
            value,
            bound_id: bound_id.into(),
            integral,
            quad_err,
            valid: true,
            reason: None,
            estimate: false,
            extras: Vec::new(),
            parameter: None,
        }
    }

    /// A row for a bound that does not apply, carrying the reason.
    pub fn invalid(kind: BoundKind, bound_id: impl Into<String>, reason: impl Into<String>) -> Self {
        let value = match kind {
            BoundKind::LowerT | BoundKind::LowerAbsBeta => 0.0,
            BoundKind::UpperR | BoundKind::UpperT => 1.0,
            BoundKind::EstimateT => f64::NAN,
            _ => f64::INFINITY,
        };
        let mut r = Self::new(kind, bound_id, value, f64::NAN, 0.0);
        r.valid = false;
        r.reason = Some(reason.into());
        r
    }

    pub fn with_invalid(mut self, reason: impl Into<String>) -> Self {
        self.valid = false;
        self.reason = Some(reason.into());
        self
    }
}

/// The four companion bounds implied by one value `I` of the integral:
/// `T >= sech^2 I`, `R <= tanh^2 I`, `|alpha| <= cosh I`, `|beta| <= sinh I`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet {
    pub lower_t: BoundResult,
    pub upper_r: BoundResult,
    pub upper_abs_alpha: BoundResult,
    pub upper_abs_beta: BoundResult,
}

impl BoundSet {
    pub fn from_integral(id: &str, integral: f64, quad_err: f64) -> Self {
        let c = integral.cosh();
        let sech2 = 1.0 / (c * c);
        Self {
            lower_t: BoundResult::new(BoundKind::LowerT, id, sech2, integral, quad_err),
            upper_r: BoundResult::new(BoundKind::UpperR, id, 1.0 - sech2, integral, quad_err),
            upper_abs_alpha: BoundResult::new(BoundKind::UpperAbsAlpha, id, c, integral, quad_err),
            upper_abs_beta: BoundResult::new(BoundKind::UpperAbsBeta, id, integral.sinh(), integral, quad_err),
        }
    }

    pub(crate) fn map(mut self, f: impl Fn(&mut BoundResult)) -> Self {
        f(&mut self.lower_t);
        f(&mut self.upper_r);
        f(&mut self.upper_abs_alpha);
        f(&mut self.upper_abs_beta);
        self
    }

    pub fn invalidate(self, reason: &str) -> Self {
        self.map(|b| {
            b.valid = false;
            b.reason = Some(reason.to_string());
        })
    }

    pub fn into_vec(self) -> Vec<BoundResult> {
        vec![self.lower_t, self.upper_r, self.upper_abs_alpha, self.upper_abs_beta]
    }
}

/// The auxiliary function `h(x) > 0` entering `theta`.
#[derive(Clone)]
pub enum AuxiliaryChoice {
    /// `h = k0`.
    ConstantK(f64),
    /// `h = k(x)`; needs `k^2 > 0` everywhere.
    PhaseEqualsK,
    /// `h = sqrt(max(k^2, k0^2))`.
    MaxClamp(f64),
    /// `h = k^eps k_inf^(1 - eps)`.
    PowerInterp(f64),
    UserFunction {
        h: RealFn,
        h_prime: RealFn,
    },
}

impl std::fmt::Debug for AuxiliaryChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AuxiliaryChoice::ConstantK(k) => write!(f, "ConstantK({k})"),
            AuxiliaryChoice::PhaseEqualsK => write!(f, "PhaseEqualsK"),
            AuxiliaryChoice::MaxClamp(k) => write!(f, "MaxClamp({k})"),
            AuxiliaryChoice::PowerInterp(e) => write!(f, "PowerInterp({e})"),
            AuxiliaryChoice::UserFunction { .. } => write!(f, "UserFunction"),
        }
    }
}

impl AuxiliaryChoice {
    pub fn user<H, P>(h: H, h_prime: P) -> Self
    where
        H: Fn(f64) -> f64 + Send + Sync + 'static,
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        AuxiliaryChoice::UserFunction { h: Arc::new(h), h_prime: Arc::new(h_prime) }
    }

    pub(crate) fn validate(&self, d: &Dispersion) -> Result<()> {
        match *self {
            AuxiliaryChoice::ConstantK(k0) | AuxiliaryChoice::MaxClamp(k0) if !(k0 > 0.0) => {
                Err(Error::ParameterOutOfRange(format!("k0 must be positive, got {k0}")))
            }
            AuxiliaryChoice::PowerInterp(e) if !(0.0..=1.0).contains(&e) => {
                Err(Error::ParameterOutOfRange(format!("epsilon must lie in [0, 1], got {e}")))
            }
            AuxiliaryChoice::PhaseEqualsK | AuxiliaryChoice::PowerInterp(_) if d.has_forbidden_region() => {
                Err(Error::ForbiddenRegion)
            }
            _ => Ok(()),
        }
    }

    /// `(h, h', k^2)` at `x`, taking one-sided limits from direction `dir` at joints.
    pub(crate) fn eval(&self, d: &Dispersion, x: f64, dir: f64) -> (f64, f64, f64) {
        match self {
            AuxiliaryChoice::ConstantK(k0) => (*k0, 0.0, d.k2(x)),
            AuxiliaryChoice::PhaseEqualsK => {
                let (k2, dk2, _) = d.k2_derivs(x, dir);
                let h = k2.max(0.0).sqrt();
                (h, dk2 / (2.0 * h), k2)
            }
            AuxiliaryChoice::MaxClamp(k0) => {
                let (k2, dk2, _) = d.k2_derivs(x, dir);
                if k2 > k0 * k0 {
                    let h = k2.sqrt();
                    (h, dk2 / (2.0 * h), k2)
                } else {
                    (*k0, 0.0, k2)
                }
            }
            AuxiliaryChoice::PowerInterp(eps) => {
                let (k2, dk2, _) = d.k2_derivs(x, dir);
                let kinf = 0.5 * (d.k_minus + d.k_plus);
                let h = k2.max(0.0).powf(0.5 * eps) * kinf.powf(1.0 - eps);
                (h, eps * h * dk2 / (2.0 * k2), k2)
            }
            AuxiliaryChoice::UserFunction { h, h_prime } => (h(x), h_prime(x), d.k2(x)),
        }
    }

    pub(crate) fn extra_breaks(&self, d: &Dispersion) -> Vec<f64> {
        match self {
            AuxiliaryChoice::MaxClamp(k0) => d.regions_below(k0 * k0).iter().flat_map(|r| [r.0, r.1]).collect(),
            _ => Vec::new(),
        }
    }

    pub(crate) fn h_side(&self, d: &Dispersion, x: f64, dir: f64) -> f64 {
        self.eval(d, nudge(x, dir, d.scale), dir).0
    }
}

/// `sqrt(h'^2 + (k^2 - h^2)^2) / (2h)`.
pub fn vartheta(h: f64, h_prime: f64, k2: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::DomainError(format!("auxiliary function must be positive, got {h}")));
    }
    Ok(h_prime.hypot(k2 - h * h) / (2.0 * h))
}

/// The extended integrand with a second real auxiliary function `chi`.
pub fn vartheta_general(phi_p: f64, phi_pp: f64, chi: f64, chi_p: f64, k2: f64) -> Result<f64> {
    if !(phi_p > 0.0) {
        return Err(Error::DomainError(format!("phase derivative must be positive, got {phi_p}")));
    }
    let a = phi_pp + 2.0 * chi * phi_p;
    let b = k2 + chi * chi + chi_p - phi_p * phi_p;
    Ok(a.hypot(b) / (2.0 * phi_p))
}

/// Value of the integral of `theta` with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaIntegral {
    pub value: f64,
    pub quad_err: f64,
    /// `h` does not approach `k` at one of the ends, so the full integral diverges.
    pub divergent: bool,
}

/// Integrates `theta` over the dispersion window, adding point masses for
/// delta interfaces (`|g|/(2h)`) and for jumps of `h` at joints (`|ln(h+/h-)|/2`).
pub fn theta_integral(d: &Dispersion, aux: &AuxiliaryChoice, quad: &QuadratureConfig) -> Result<ThetaIntegral> {
    aux.validate(d)?;
    let integrand = |x: f64| {
        let (h, hp, k2) = aux.eval(d, x, 1.0);
        vartheta(h, hp, k2)
    };
    let h_side = |x: f64, dir: f64| aux.h_side(d, x, dir);
    let ends = (d.k_minus, d.k_plus);
    integrate_theta(d, &integrand, &h_side, aux.extra_breaks(d), ends, quad)
}

/// Shared driver for every `theta`-type integral: quadrature over the window
/// split at all known kinks, interface and joint point masses, and the check
/// that `h` reaches `target_ends` at the two ends.
pub(crate) fn integrate_theta(
    d: &Dispersion,
    integrand: &dyn Fn(f64) -> Result<f64>,
    h_side: &dyn Fn(f64, f64) -> f64,
    extra_breaks: Vec<f64>,
    target_ends: (f64, f64),
    quad: &QuadratureConfig,
) -> Result<ThetaIntegral> {
    let (lo, hi) = d.window;
    let mut extra = d.breakpoints();
    extra.extend(d.forbidden_regions.iter().flat_map(|r| [r.0, r.1]));
    extra.extend(extra_breaks);
    let breaks = merge_breaks(lo, hi, extra);
    let bad = Cell::new(None);
    let f = |x: f64| match integrand(x) {
        Ok(v) => v,
        Err(e) => {
            bad.set(Some(e));
            0.0
        }
    };
    let est = integrate(f, &breaks, quad)?;
    if let Some(e) = bad.take() {
        return Err(e);
    }
    let mut value = est.value;
    for i in &d.interfaces {
        let h = 0.5 * (h_side(i.x, -1.0) + h_side(i.x, 1.0));
        if !(h > 0.0) {
            return Err(Error::DomainError("auxiliary function vanishes at an interface".into()));
        }
        value += i.g.abs() / (2.0 * h);
    }
    for &j in &d.joints {
        if j < lo || j > hi {
            continue;
        }
        let (hl, hr) = (h_side(j, -1.0), h_side(j, 1.0));
        if hl > 0.0 && hr > 0.0 {
            value += 0.5 * (hr / hl).ln().abs();
        }
    }
    let off = |h: f64, k: f64| (h - k).abs() > 1e-6 * k;
    let divergent = off(h_side(lo, -1.0), target_ends.0) || off(h_side(hi, 1.0), target_ends.1);
    Ok(ThetaIntegral { value, quad_err: est.abs_err, divergent })
}

/// `T >= sech^2(I)` and companions for an arbitrary auxiliary function.
pub fn general_bound(d: &Dispersion, aux: &AuxiliaryChoice, quad: &QuadratureConfig) -> Result<BoundSet> {
    let ti = theta_integral(d, aux, quad)?;
    let set = BoundSet::from_integral("general", ti.value, ti.quad_err);
    Ok(if ti.divergent { set.invalidate("divergent integral") } else { set })
}

fn symmetric_asymptotes(p: &PotentialSpec) -> Result<f64> {
    let (vm, vp) = p.asymptotes()?;
    if (vm - vp).abs() > 1e-12 * vm.abs().max(vp.abs()).max(1.0) {
        return Err(Error::AsymmetricAsymptotes { minus: vm, plus: vp });
    }
    Ok(vm)
}

/// The constant-`h` bound on a dispersion with equal asymptotes; the integral is
/// `(1/2k) \int |k^2 - k_inf^2|` plus `|g|/(2k)` per delta.
pub fn bound_case1_dispersion(d: &Dispersion, quad: &QuadratureConfig) -> Result<BoundSet> {
    if !d.is_symmetric_asymptotically() {
        return Err(Error::AsymmetricAsymptotes { minus: d.k_minus, plus: d.k_plus });
    }
    let ti = theta_integral(d, &AuxiliaryChoice::ConstantK(d.k_plus), quad)?;
    let set = BoundSet::from_integral("case1", ti.value, ti.quad_err);
    let taylor = 1.0 - ti.value * ti.value;
    Ok(set.map(|b| {
        if b.kind == BoundKind::LowerT {
            b.extras.push(("taylor".into(), taylor));
        }
    }))
}

/// `T >= sech^2((m/(hbar^2 k)) \int |V - V_inf|)`, with the quadratic weakening as `secondary`.
pub fn bound_case1(p: &PotentialSpec, energy: f64, units: UnitsConvention) -> Result<BoundSet> {
    symmetric_asymptotes(p)?;
    let d = build_dispersion(p, energy, units)?;
    bound_case1_dispersion(&d, &QuadratureConfig::default())
}

/// `h = k`: `T >= sech^2(\int |k'|/(2k))`.
pub fn bound_case2(d: &Dispersion, quad: &QuadratureConfig) -> Result<BoundSet> {
    if d.has_forbidden_region() {
        return Err(Error::ForbiddenRegion);
    }
    let ti = theta_integral(d, &AuxiliaryChoice::PhaseEqualsK, quad)?;
    Ok(BoundSet::from_integral("case2", ti.value, ti.quad_err))
}

/// Half the total variation of `ln k` along the ordered list `k_-, k_1, ..., k_+`.
fn half_log_variation(ks: &[f64]) -> f64 {
    0.5 * ks.windows(2).map(|w| (w[1] / w[0]).ln().abs()).sum::<f64>()
}

/// Monotonic `k`: `T >= 4 k_- k_+ / (k_- + k_+)^2`.
pub fn bound_case2_monotonic(k_minus: f64, k_plus: f64) -> f64 {
    4.0 * k_minus * k_plus / ((k_minus + k_plus) * (k_minus + k_plus))
}

/// One extremum `k_ext`: `T >= 4 k_- k_+ k_ext^2 / (k_ext^2 + k_- k_+)^2`.
pub fn bound_case2_extremum(k_minus: f64, k_plus: f64, k_ext: f64) -> f64 {
    let e2 = k_ext * k_ext;
    let p = k_minus * k_plus;
    4.0 * p * e2 / ((e2 + p) * (e2 + p))
}

/// Any number of extrema, given in order: `T >= sech^2` of half the variation of `ln k`.
pub fn bound_case2_multi(k_minus: f64, extrema: &[f64], k_plus: f64) -> f64 {
    let mut ks = vec![k_minus];
    ks.extend_from_slice(extrema);
    ks.push(k_plus);
    let c = half_log_variation(&ks).cosh();
    1.0 / (c * c)
}

/// Extrema of `k` used by the closed-form case-2 variants.
pub fn wavenumber_extrema(d: &Dispersion) -> Result<Vec<f64>> {
    if d.has_forbidden_region() {
        return Err(Error::ForbiddenRegion);
    }
    let (lo, hi) = d.window;
    let pad = d.scale;
    let n = ((400.0 * (hi - lo + 2.0 * pad) / d.scale) as usize).clamp(2001, 200_001);
    Ok(find_extrema(d, (lo - pad, hi + pad), n).iter().map(|e| e.k2.max(0.0).sqrt()).collect())
}

/// Closed-form case-2 bounds from the detected extrema. `id` is `case2a`
/// (requires none), `case2b` (requires exactly one) or `case2c` (any number).
/// Delta interfaces add their point masses.
pub fn bound_case2_closed(d: &Dispersion, id: &str) -> Result<BoundSet> {
    let ext = wavenumber_extrema(d)?;
    let (km, kp) = (d.k_minus, d.k_plus);
    let mut ks = vec![km];
    match id {
        "case2a" if !ext.is_empty() => return Err(Error::UnsupportedFamily("k is not monotonic".into())),
        "case2b" if ext.len() != 1 => return Err(Error::UnsupportedFamily("k does not have a single extremum".into())),
        "case2a" | "case2b" | "case2c" => ks.extend(ext),
        _ => return Err(Error::InvalidParameter(format!("unknown case-2 variant {id}"))),
    }
    ks.push(kp);
    // with h = k each delta contributes |g| / (2k) at its location
    let kicks: f64 = d.interfaces.iter().map(|i| i.g.abs() / (2.0 * d.k2(i.x).sqrt())).sum();
    Ok(BoundSet::from_integral(id, half_log_variation(&ks) + kicks, 0.0))
}

/// `T >= 4 / ((sqrt(k_- k_+)/k0) e^B + (k0/sqrt(k_- k_+)) e^{-B})^2` with
/// `B = (1/2k0) \int kappa^2 + k0 L / 2` over the regions where `k^2 < k0^2`.
///
/// The shape assumption behind the prefactor (half the variation of `ln h`
/// equals `ln(sqrt(k_- k_+)/k0)`) is checked; the result is flagged invalid otherwise.
pub fn bound_case3(d: &Dispersion, k0: f64, quad: &QuadratureConfig) -> Result<BoundSet> {
    let (km, kp) = (d.k_minus, d.k_plus);
    if !(k0 > 0.0 && k0 < km.min(kp)) {
        return Err(Error::ParameterOutOfRange(format!("k0 = {k0} must lie in (0, min(k_-, k_+))")));
    }
    let regions = d.regions_below(k0 * k0);
    let mut len = 0.0;
    let mut kappa2 = 0.0;
    let mut err = 0.0;
    for &(a, b) in &regions {
        len += b - a;
        let mut brk = vec![];
        brk.extend(d.joints.iter().copied());
        brk.extend(d.forbidden_regions.iter().flat_map(|r| [r.0, r.1]));
        let e = integrate(|x| (-d.k2(x)).max(0.0), &merge_breaks(a, b, brk), quad)?;
        kappa2 += e.value;
        err += e.abs_err;
    }
    let b = kappa2 / (2.0 * k0) + 0.5 * k0 * len;
    let x = (km * kp).sqrt() / k0;
    let kicks: f64 = d.interfaces.iter().map(|i| i.g.abs() / (2.0 * d.k2(i.x).max(k0 * k0).sqrt())).sum();
    let integral = b + x.ln() + kicks;
    let mut set = BoundSet::from_integral("case3", integral, err / (2.0 * k0));
    // half the variation of ln h outside the clamped regions, where h = k
    let outside = shape_variation(d, k0, quad)?;
    if outside > x.ln() * (1.0 + 1e-9) + 1e-9 {
        set = set.invalidate("profile outside the clamped region is not monotone towards it");
    }
    Ok(set.map(|r| r.parameter = Some(k0)))
}

/// Half the variation of `ln max(k, k0)` across the window (including jumps).
fn shape_variation(d: &Dispersion, k0: f64, quad: &QuadratureConfig) -> Result<f64> {
    let aux = AuxiliaryChoice::MaxClamp(k0);
    let (lo, hi) = d.window;
    let mut extra = d.breakpoints();
    extra.extend(aux.extra_breaks(d));
    let breaks = merge_breaks(lo, hi, extra);
    let f = |x: f64| {
        let (h, hp, _) = aux.eval(d, x, 1.0);
        (hp / (2.0 * h)).abs()
    };
    let mut v = integrate(f, &breaks, quad)?.value;
    for &j in &d.joints {
        if j >= lo && j <= hi {
            v += 0.5 * (aux.h_side(d, j, 1.0) / aux.h_side(d, j, -1.0)).ln().abs();
        }
    }
    Ok(v)
}

/// Maximises a `k0`-dependent lower bound on `T` over `(0, k_max)`.
pub(crate) fn optimise_k0<F: Fn(f64) -> Result<BoundSet>>(f: F, k_max: f64) -> Result<BoundSet> {
    let score = |k: f64| match f(k) {
        Ok(s) if s.lower_t.valid => s.lower_t.value,
        _ => -1.0,
    };
    let (k, best) = golden_max(score, 1e-6 * k_max, k_max * (1.0 - 1e-9), 1e-6 * k_max, 200);
    if best < 0.0 {
        return Err(Error::ParameterOutOfRange("no admissible k0".into()));
    }
    f(k)
}

/// Case 3 with `k0` chosen to maximise the bound.
pub fn bound_case3_optimal(d: &Dispersion, quad: &QuadratureConfig) -> Result<BoundSet> {
    optimise_k0(|k| bound_case3(d, k, quad), d.k_minus.min(d.k_plus))
}

/// Single barrier with a forbidden region:
/// `T >= (k0^4/(k_- k_+ kappa_ext^2)) e^{-2 k0 L} e^{-2 \int kappa}`, with `L` the
/// width of the regions where `|k^2| < k0^2`.
pub fn bound_case4(d: &Dispersion, k0: f64, quad: &QuadratureConfig) -> Result<BoundSet> {
    if !d.has_forbidden_region() {
        return Err(Error::NoForbiddenRegion);
    }
    let kappa_ext = single_hump_depth(d)?;
    let (km, kp) = (d.k_minus, d.k_plus);
    if !(k0 > 0.0 && k0 < km.min(kp).min(kappa_ext)) {
        return Err(Error::ParameterOutOfRange(format!("k0 = {k0} must lie in (0, min(k_-, k_+, kappa_ext))")));
    }
    let below = d.regions_below(k0 * k0);
    let deep = d.regions_below(-k0 * k0);
    let width = |rs: &[(f64, f64)]| rs.iter().map(|r| r.1 - r.0).sum::<f64>();
    let len = width(&below) - width(&deep);
    let (ik, ik_err) = kappa_integral(d, quad)?;
    let ln_t = 4.0 * k0.ln() - (km * kp).ln() - 2.0 * kappa_ext.ln() - 2.0 * k0 * len - 2.0 * ik;
    let value = ln_t.exp();
    // express as an equivalent integral so the companions stay consistent
    let integral = -0.5 * ln_t;
    let mut set = BoundSet::from_integral("case4", integral, ik_err);
    set.lower_t.value = value;
    set.upper_r.value = 1.0 - value;
    Ok(set.map(|r| r.parameter = Some(k0)))
}

/// Case 4 with `k0` chosen to maximise the bound.
pub fn bound_case4_optimal(d: &Dispersion, quad: &QuadratureConfig) -> Result<BoundSet> {
    let kappa_ext = single_hump_depth(d)?;
    optimise_k0(|k| bound_case4(d, k, quad), d.k_minus.min(d.k_plus).min(kappa_ext))
}

/// Depth `kappa_ext` of a profile whose `k^2` has exactly one valley and no peak.
pub(crate) fn single_hump_depth(d: &Dispersion) -> Result<f64> {
    let (lo, hi) = d.window;
    let pad = d.scale;
    let n = ((400.0 * (hi - lo + 2.0 * pad) / d.scale) as usize).clamp(2001, 200_001);
    let ext = find_extrema(d, (lo - pad, hi + pad), n);
    match ext.as_slice() {
        [e] if e.kind == ExtremumKind::Valley && e.k2 < 0.0 => Ok((-e.k2).sqrt()),
        _ => Err(Error::NotSingleHump),
    }
}

/// `\int kappa` over the forbidden regions.
pub fn kappa_integral(d: &Dispersion, quad: &QuadratureConfig) -> Result<(f64, f64)> {
    let mut v = 0.0;
    let mut e = 0.0;
    for &(a, b) in &d.forbidden_regions {
        let est = integrate(|x| (-d.k2(x)).max(0.0).sqrt(), &merge_breaks(a, b, d.joints.iter().copied()), quad)?;
        v += est.value;
        e += est.abs_err;
    }
    Ok((v, e))
}

/// The textbook tunnelling estimate `sech^2(\int kappa + ln 2)`. Not a bound.
pub fn wkb_estimate(d: &Dispersion, quad: &QuadratureConfig) -> Result<f64> {
    if !d.has_forbidden_region() {
        return Err(Error::NoForbiddenRegion);
    }
    let (ik, _) = kappa_integral(d, quad)?;
    let c = (ik + std::f64::consts::LN_2).cosh();
    Ok(1.0 / (c * c))
}

/// First Born approximation `i \int (k_inf^2 - k^2)/(2 k_inf) e^{2 i k_inf x} dx` to `beta`.
pub fn born_beta_estimate(d: &Dispersion, quad: &QuadratureConfig) -> Result<Complex64> {
    if !d.is_symmetric_asymptotically() {
        return Err(Error::AsymmetricAsymptotes { minus: d.k_minus, plus: d.k_plus });
    }
    let k = d.k_plus;
    let (lo, hi) = d.window;
    let breaks = merge_breaks(lo, hi, d.breakpoints());
    // split further so each panel holds a few oscillations at most
    let n = ((hi - lo) * k / std::f64::consts::PI).ceil().max(1.0) as usize;
    let mut fine: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    fine.extend(breaks);
    let fine = merge_breaks(lo, hi, fine);
    let w = |x: f64| (k * k - d.k2(x)) / (2.0 * k);
    let re = integrate(|x| w(x) * (2.0 * k * x).cos(), &fine, quad)?;
    let im = integrate(|x| w(x) * (2.0 * k * x).sin(), &fine, quad)?;
    let mut b = Complex64::new(re.value, im.value);
    for i in &d.interfaces {
        b += i.g / (2.0 * k) * Complex64::from_polar(1.0, 2.0 * k * i.x);
    }
    Ok(Complex64::i() * b)
}

/// `N = (1 - T)/T`.
pub fn production_from_transmission(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::DomainError(format!("transmission {t} is outside (0, 1]")));
    }
    Ok((1.0 - t) / t)
}

/// `T = 1/(1 + N)`.
pub fn transmission_from_production(n: f64) -> Result<f64> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::DomainError(format!("production {n} must be finite and non-negative")));
    }
    Ok(1.0 / (1.0 + n))
}

/// A time-dependent frequency `omega^2(t)` with asymptotic values.
#[derive(Clone)]
pub struct TimeProfile {
    pub omega2: RealFn,
    pub omega_minus: f64,
    pub omega_plus: f64,
    /// Interval outside which `omega^2` has reached its asymptotic values.
    pub window: (f64, f64),
    /// Times where `omega^2` is not smooth.
    pub breaks: Vec<f64>,
}

impl TimeProfile {
    pub fn new<F>(omega2: F, omega_minus: f64, omega_plus: f64, window: (f64, f64), breaks: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(omega_minus > 0.0 && omega_plus > 0.0) || !omega_minus.is_finite() || !omega_plus.is_finite() {
            return Err(Error::InvalidParameter("asymptotic frequencies must be positive".into()));
        }
        if !(window.1 > window.0) {
            return Err(Error::InvalidParameter("time window must be non-empty".into()));
        }
        Ok(Self { omega2: Arc::new(omega2), omega_minus, omega_plus, window, breaks })
    }

    /// The same data read as a spatial problem with `t -> x`, `omega -> k`.
    pub fn to_dispersion(&self) -> Dispersion {
        let scale = (self.window.1 - self.window.0) / 10.0;
        Dispersion::new(
            self.omega2.clone(),
            self.omega_minus,
            self.omega_plus,
            self.window,
            self.breaks.clone(),
            Vec::new(),
            scale,
        )
    }
}

/// Bounds on `|alpha|`, `|beta|` and `N = |beta|^2` for a parametric oscillator.
pub fn time_domain_bounds(p: &TimeProfile, aux: &AuxiliaryChoice, quad: &QuadratureConfig) -> Result<Vec<BoundResult>> {
    let set = general_bound(&p.to_dispersion(), aux, quad)?;
    Ok(time_domain_rows(set))
}

fn time_domain_rows(set: BoundSet) -> Vec<BoundResult> {
    let i = set.upper_abs_beta.integral;
    let mut n = set.upper_abs_beta.clone();
    n.kind = BoundKind::UpperN;
    n.value = i.sinh().powi(2);
    vec![set.upper_abs_alpha, set.upper_abs_beta, n]
}

/// `|beta| <= |w_- - w_+| / (2 sqrt(w_- w_+))` for monotonic `omega`.
pub fn time_beta_monotonic(omega_minus: f64, omega_plus: f64) -> f64 {
    (omega_minus - omega_plus).abs() / (2.0 * (omega_minus * omega_plus).sqrt())
}

/// `|beta| <= |w_ext^2 - w0^2| / (2 w0 w_ext)` for one extremum and equal asymptotes.
pub fn time_beta_extremum(omega0: f64, omega_ext: f64) -> f64 {
    (omega_ext * omega_ext - omega0 * omega0).abs() / (2.0 * omega0 * omega_ext)
}

/// Time-domain versions of the case-2 and case-3 bounds.
pub fn time_domain_case_bounds(p: &TimeProfile, id: &str, quad: &QuadratureConfig) -> Result<Vec<BoundResult>> {
    let d = p.to_dispersion();
    let set = match id {
        "case2" => bound_case2(&d, quad)?,
        "case2a" | "case2b" | "case2c" => bound_case2_closed(&d, id)?,
        "case3" => bound_case3_optimal(&d, quad)?,
        _ => return Err(Error::InvalidParameter(format!("no time-domain form for {id}"))),
    };
    Ok(time_domain_rows(set))
}
