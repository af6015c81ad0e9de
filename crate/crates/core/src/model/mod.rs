//! Units, the potential catalogue and construction of `k^2(x)`.

mod dispersion;
mod mobius;
mod sampled;

use std::sync::Arc;

pub(crate) use dispersion::nudge;
pub use dispersion::{find_extrema, Dispersion, ExtremumKind, ExtremumRecord, Interface, RealFn};
pub use mobius::{named_to_mobius, poschl_teller_to_mobius, Mobius, NamedPotential, TietzDenominator};
pub use sampled::SampledProfile;

use crate::error::{Error, Result};

/// Values of hbar and the particle mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitsConvention {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for UnitsConvention {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 0.5 }
    }
}

impl UnitsConvention {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite() && mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter("hbar and mass must be positive".into()));
        }
        Ok(Self { hbar, mass })
    }

    /// `2m/hbar^2`, the factor converting energies into squared wavenumbers.
    #[inline]
    pub fn k2_factor(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }
}

/// A localized change `δV(x)` of a potential, vanishing outside `support`.
#[derive(Clone)]
pub struct Perturbation {
    pub f: RealFn,
    pub support: (f64, f64),
    pub label: String,
}

impl Perturbation {
    pub fn new<F>(label: impl Into<String>, support: (f64, f64), f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), support, label: label.into() }
    }

    /// `amplitude * exp(-((x - centre)/width)^2)`, truncated at eight widths.
    pub fn gaussian(amplitude: f64, centre: f64, width: f64) -> Self {
        let r = 8.0 * width;
        Self::new("gaussian", (centre - r, centre + r), move |x| {
            if (x - centre).abs() > r {
                0.0
            } else {
                let y = (x - centre) / width;
                amplitude * (-y * y).exp()
            }
        })
    }

    /// A constant `height` on `[a, b]`.
    pub fn boxcar(height: f64, a: f64, b: f64) -> Self {
        Self::new("box", (a, b), move |x| if x >= a && x <= b { height } else { 0.0 })
    }
}

impl std::fmt::Debug for Perturbation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Perturbation").field("label", &self.label).field("support", &self.support).finish()
    }
}

/// Description of a one-dimensional potential.
#[derive(Debug, Clone)]
pub enum PotentialSpec {
    Free {
        v_inf: f64,
    },
    Step {
        v_minus: f64,
        v_plus: f64,
    },
    /// `g = 2m alpha/hbar^2` for `V = alpha delta(x - x0)`.
    Delta {
        g: f64,
        x0: f64,
    },
    /// Two equal deltas at `±d/2`.
    DoubleDelta {
        g: f64,
        d: f64,
    },
    /// Height `v0` on `[0, width]`.
    SquareBarrier {
        v0: f64,
        width: f64,
    },
    /// `v1` for `x < a`, `v2` on `(a, b)`, `v3` for `x > b`.
    AsymSquareWell {
        v1: f64,
        v2: f64,
        v3: f64,
        a: f64,
        b: f64,
    },
    Tanh {
        v_minus: f64,
        v_plus: f64,
        length: f64,
    },
    Sech2 {
        ve: f64,
        length: f64,
    },
    /// `v0 sech^2(x/L) + v_inf tanh(x/L)`.
    PoschlTeller {
        v0: f64,
        v_inf: f64,
        length: f64,
    },
    Mobius(Mobius),
    Named(NamedPotential),
    Sampled(SampledProfile),
    /// `base + eps * dv`.
    Shifted {
        base: Box<PotentialSpec>,
        eps: f64,
        dv: Perturbation,
    },
}

/// Unit-free description of `V(x)` used to build dispersions.
#[derive(Clone)]
pub(crate) struct Profile {
    pub v: RealFn,
    pub v_minus: f64,
    pub v_plus: f64,
    pub joints: Vec<f64>,
    pub interfaces: Vec<Interface>,
    /// Exact support of `V - V(±inf)` when known.
    pub support: Option<(f64, f64)>,
    pub centre: f64,
    pub scale: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter("parameters must be finite".into()))
    }
}

impl PotentialSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::Free { .. } => "free",
            PotentialSpec::Step { .. } => "step",
            PotentialSpec::Delta { .. } => "delta",
            PotentialSpec::DoubleDelta { .. } => "double-delta",
            PotentialSpec::SquareBarrier { .. } => "square-barrier",
            PotentialSpec::AsymSquareWell { .. } => "asym-square-well",
            PotentialSpec::Tanh { .. } => "tanh",
            PotentialSpec::Sech2 { .. } => "sech2",
            PotentialSpec::PoschlTeller { .. } => "poschl-teller",
            PotentialSpec::Mobius(_) => "mobius",
            PotentialSpec::Named(n) => n.name(),
            PotentialSpec::Sampled(_) => "sampled",
            PotentialSpec::Shifted { .. } => "shifted",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Free { v_inf } => finite(&[*v_inf]),
            PotentialSpec::Step { v_minus, v_plus } => finite(&[*v_minus, *v_plus]),
            PotentialSpec::Delta { g, x0 } => finite(&[*g, *x0]),
            PotentialSpec::DoubleDelta { g, d } => {
                finite(&[*g])?;
                positive("separation d", *d)
            }
            PotentialSpec::SquareBarrier { v0, width } => {
                finite(&[*v0])?;
                positive("width", *width)
            }
            PotentialSpec::AsymSquareWell { v1, v2, v3, a, b } => {
                finite(&[*v1, *v2, *v3, *a, *b])?;
                if a < b {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("asymmetric well needs a < b".into()))
                }
            }
            PotentialSpec::Tanh { v_minus, v_plus, length } => {
                finite(&[*v_minus, *v_plus])?;
                positive("length", *length)
            }
            PotentialSpec::Sech2 { ve, length } => {
                finite(&[*ve])?;
                positive("length", *length)
            }
            PotentialSpec::PoschlTeller { v0, v_inf, length } => {
                finite(&[*v0, *v_inf])?;
                positive("length", *length)
            }
            PotentialSpec::Mobius(m) => m.validate(),
            PotentialSpec::Named(n) => {
                positive("length", n.length_scale())?;
                match *n {
                    NamedPotential::Hua { q: 0.0, .. } => Err(Error::ParameterOutOfRange("hua requires q != 0".into())),
                    _ => Ok(()),
                }
            }
            PotentialSpec::Sampled(_) => Ok(()),
            PotentialSpec::Shifted { base, eps, dv } => {
                if matches!(**base, PotentialSpec::Shifted { .. }) {
                    return Err(Error::InvalidParameter("shifted potentials cannot be nested".into()));
                }
                finite(&[*eps, dv.support.0, dv.support.1])?;
                if dv.support.0 > dv.support.1 {
                    return Err(Error::InvalidParameter("perturbation support is reversed".into()));
                }
                base.validate()
            }
        }
    }

    /// `(V(-inf), V(+inf))`.
    pub fn asymptotes(&self) -> Result<(f64, f64)> {
        Ok(match self {
            PotentialSpec::Free { v_inf } => (*v_inf, *v_inf),
            PotentialSpec::Step { v_minus, v_plus } => (*v_minus, *v_plus),
            PotentialSpec::Delta { .. } | PotentialSpec::DoubleDelta { .. } => (0.0, 0.0),
            PotentialSpec::SquareBarrier { .. } => (0.0, 0.0),
            PotentialSpec::AsymSquareWell { v1, v3, .. } => (*v1, *v3),
            PotentialSpec::Tanh { v_minus, v_plus, .. } => (*v_minus, *v_plus),
            PotentialSpec::Sech2 { .. } => (0.0, 0.0),
            PotentialSpec::PoschlTeller { v_inf, .. } => (-*v_inf, *v_inf),
            PotentialSpec::Mobius(m) => m.asymptotes(),
            PotentialSpec::Named(n) => named_to_mobius(n)?.asymptotes(),
            PotentialSpec::Sampled(s) => s.asymptotes(),
            PotentialSpec::Shifted { base, .. } => base.asymptotes()?,
        })
    }

    /// Characteristic length used for grids and finite-difference steps.
    pub fn length_scale(&self) -> f64 {
        match self {
            PotentialSpec::DoubleDelta { d, .. } => *d,
            PotentialSpec::SquareBarrier { width, .. } => *width,
            PotentialSpec::AsymSquareWell { a, b, .. } => b - a,
            PotentialSpec::Tanh { length, .. } => *length,
            PotentialSpec::Sech2 { length, .. } => *length,
            PotentialSpec::PoschlTeller { length, .. } => *length,
            PotentialSpec::Mobius(m) => m.length,
            PotentialSpec::Named(n) => n.length_scale(),
            PotentialSpec::Sampled(s) => {
                let (a, b) = s.range();
                (b - a) / 10.0
            }
            PotentialSpec::Shifted { base, .. } => base.length_scale(),
            _ => 1.0,
        }
    }

    /// `V(x)`; delta functions contribute nothing here.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok((self.profile()?.v)(x))
    }

    pub(crate) fn profile(&self) -> Result<Profile> {
        self.validate()?;
        let p = match self.clone() {
            PotentialSpec::Free { v_inf } => Profile {
                v: Arc::new(move |_| v_inf),
                v_minus: v_inf,
                v_plus: v_inf,
                joints: vec![],
                interfaces: vec![],
                support: Some((0.0, 0.0)),
                centre: 0.0,
                scale: 1.0,
            },
            PotentialSpec::Step { v_minus, v_plus } => Profile {
                v: Arc::new(move |x| if x < 0.0 { v_minus } else { v_plus }),
                v_minus,
                v_plus,
                joints: vec![0.0],
                interfaces: vec![],
                support: Some((0.0, 0.0)),
                centre: 0.0,
                scale: 1.0,
            },
            PotentialSpec::Delta { g, x0 } => Profile {
                v: Arc::new(|_| 0.0),
                v_minus: 0.0,
                v_plus: 0.0,
                joints: vec![],
                interfaces: vec![Interface { x: x0, g }],
                support: Some((x0, x0)),
                centre: x0,
                scale: 1.0,
            },
            PotentialSpec::DoubleDelta { g, d } => Profile {
                v: Arc::new(|_| 0.0),
                v_minus: 0.0,
                v_plus: 0.0,
                joints: vec![],
                interfaces: vec![Interface { x: -0.5 * d, g }, Interface { x: 0.5 * d, g }],
                support: Some((-0.5 * d, 0.5 * d)),
                centre: 0.0,
                scale: d,
            },
            PotentialSpec::SquareBarrier { v0, width } => Profile {
                v: Arc::new(move |x| if x >= 0.0 && x <= width { v0 } else { 0.0 }),
                v_minus: 0.0,
                v_plus: 0.0,
                joints: vec![0.0, width],
                interfaces: vec![],
                support: Some((0.0, width)),
                centre: 0.5 * width,
                scale: width,
            },
            PotentialSpec::AsymSquareWell { v1, v2, v3, a, b } => Profile {
                v: Arc::new(move |x| {
                    if x < a {
                        v1
                    } else if x <= b {
                        v2
                    } else {
                        v3
                    }
                }),
                v_minus: v1,
                v_plus: v3,
                joints: vec![a, b],
                interfaces: vec![],
                support: Some((a, b)),
                centre: 0.5 * (a + b),
                scale: b - a,
            },
            PotentialSpec::Tanh { v_minus, v_plus, length } => smooth(
                move |x| v_minus + (v_plus - v_minus) * 0.5 * (1.0 + (x / length).tanh()),
                (v_minus, v_plus),
                0.0,
                length,
            ),
            PotentialSpec::Sech2 { ve, length } => smooth(
                move |x| {
                    let c = (x / length).cosh();
                    ve / (c * c)
                },
                (0.0, 0.0),
                0.0,
                length,
            ),
            PotentialSpec::PoschlTeller { v0, v_inf, length } => smooth(
                move |x| {
                    let y = x / length;
                    let c = y.cosh();
                    v0 / (c * c) + v_inf * y.tanh()
                },
                (-v_inf, v_inf),
                0.0,
                length,
            ),
            PotentialSpec::Mobius(m) => mobius_profile(m)?,
            PotentialSpec::Named(n) => mobius_profile(named_to_mobius(&n)?)?,
            PotentialSpec::Sampled(s) => {
                let (v_minus, v_plus) = s.asymptotes();
                let (a, b) = s.range();
                Profile {
                    v: Arc::new(move |x| s.eval(x)),
                    v_minus,
                    v_plus,
                    joints: vec![],
                    interfaces: vec![],
                    support: Some((a, b)),
                    centre: 0.5 * (a + b),
                    scale: (b - a) / 10.0,
                }
            }
            PotentialSpec::Shifted { base, eps, dv } => {
                let mut p = base.profile()?;
                let bv = p.v.clone();
                let f = dv.f.clone();
                p.v = Arc::new(move |x| bv(x) + eps * f(x));
                p.joints.push(dv.support.0);
                p.joints.push(dv.support.1);
                p.support = p.support.map(|(a, b)| (a.min(dv.support.0), b.max(dv.support.1)));
                p
            }
        };
        Ok(p)
    }
}

fn smooth<F>(v: F, asym: (f64, f64), centre: f64, scale: f64) -> Profile
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    Profile {
        v: Arc::new(v),
        v_minus: asym.0,
        v_plus: asym.1,
        joints: vec![],
        interfaces: vec![],
        support: None,
        centre,
        scale,
    }
}

fn mobius_profile(m: Mobius) -> Result<Profile> {
    m.validate()?;
    if let Some(x) = m.pole() {
        return Err(Error::UnsupportedFamily(format!("mobius potential is singular at x = {x}")));
    }
    let centre = if m.c != 0.0 && m.d != 0.0 { 0.5 * m.length * (m.d / m.c).abs().ln() } else { 0.0 };
    let (lo, hi) = m.asymptotes();
    Ok(smooth(move |x| m.eval(x), (lo, hi), centre, 0.5 * m.length))
}

/// `(k(-inf), k(+inf))` for energy `energy`.
pub fn asymptotic_wavenumbers(p: &PotentialSpec, energy: f64, units: UnitsConvention) -> Result<(f64, f64)> {
    p.validate()?;
    let (vm, vp) = p.asymptotes()?;
    wavenumbers_from(vm, vp, energy, units)
}

fn wavenumbers_from(vm: f64, vp: f64, energy: f64, units: UnitsConvention) -> Result<(f64, f64)> {
    let top = vm.max(vp);
    if !energy.is_finite() || !(energy > top) {
        return Err(Error::BelowAsymptote { energy, asymptote: top });
    }
    let s = units.k2_factor();
    Ok(((s * (energy - vm)).sqrt(), (s * (energy - vp)).sqrt()))
}

/// Tolerance on `|V - V(±inf)|` that defines where tails are truncated.
pub fn tail_tolerance(energy: f64) -> f64 {
    1e-10 * energy.abs().max(1.0)
}

fn tail_end(v: &RealFn, v_inf: f64, centre: f64, scale: f64, dir: f64, tol: f64) -> Result<f64> {
    let ok = |x: f64| (v(x) - v_inf).abs() < tol;
    let mut dist = scale;
    let mut found = false;
    for _ in 0..80 {
        if (0..=16).all(|i| ok(centre + dir * dist * (1.0 + i as f64 / 16.0))) {
            found = true;
            break;
        }
        dist *= 2.0;
    }
    if !found {
        return Err(Error::NonconvergentTail);
    }
    let n = 400;
    let at = |i: usize| centre + dir * dist * i as f64 / n as f64;
    let mut last_bad = None;
    for i in (0..n).rev() {
        if !ok(at(i)) {
            last_bad = Some(i);
            break;
        }
    }
    let end = match last_bad {
        None => centre,
        Some(i) => {
            let (mut a, mut b) = (at(i), at(i + 1));
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m == a || m == b || (b - a).abs() < 1e-13 * scale {
                    break;
                }
                if ok(m) {
                    b = m;
                } else {
                    a = m;
                }
            }
            b
        }
    };
    Ok(if dir > 0.0 { end.max(centre + scale) } else { end.min(centre - scale) })
}

/// Builds `k^2(x)` for the potential at the given energy.
pub fn build_dispersion(p: &PotentialSpec, energy: f64, units: UnitsConvention) -> Result<Dispersion> {
    let prof = p.profile()?;
    let (k_minus, k_plus) = wavenumbers_from(prof.v_minus, prof.v_plus, energy, units)?;
    if let PotentialSpec::Sampled(s) = p {
        if s.tail_mismatch() > tail_tolerance(energy) {
            return Err(Error::NonconvergentTail);
        }
    }
    let window = match prof.support {
        Some((a, b)) => {
            if b > a {
                (a, b)
            } else {
                (a - prof.scale, b + prof.scale)
            }
        }
        None => {
            let tol = tail_tolerance(energy);
            let lo = tail_end(&prof.v, prof.v_minus, prof.centre, prof.scale, -1.0, tol)?;
            let hi = tail_end(&prof.v, prof.v_plus, prof.centre, prof.scale, 1.0, tol)?;
            (lo, hi)
        }
    };
    let s = units.k2_factor();
    let v = prof.v.clone();
    let k2: RealFn = Arc::new(move |x| s * (energy - v(x)));
    let interfaces = prof.interfaces.iter().map(|i| Interface { x: i.x, g: i.g }).collect();
    Ok(Dispersion::new(k2, k_minus, k_plus, window, prof.joints.clone(), interfaces, prof.scale))
}

/// Rewrites a named or Poschl–Teller potential in Mobius form.
pub fn canonicalize_mobius(p: &PotentialSpec) -> Result<Mobius> {
    p.validate()?;
    match p {
        PotentialSpec::Mobius(m) => Ok(*m),
        PotentialSpec::Named(n) => named_to_mobius(n),
        PotentialSpec::PoschlTeller { v0, v_inf, length } => poschl_teller_to_mobius(*v0, *v_inf, *length),
        other => Err(Error::UnsupportedFamily(format!("{} has no mobius form", other.name()))),
    }
}

/// 101 points spanning ±10 length scales.
pub fn standard_grid(scale: f64) -> Vec<f64> {
    (0..101).map(|i| scale * (-10.0 + 0.2 * i as f64)).collect()
}
