//! Closed-form transmission probabilities, amplitudes and quasinormal modes.
//!
//! Amplitudes use the spatial convention `psi ~ e^{ikx} + r e^{-ikx}` on the
//! left and `t e^{ikx}` on the right (flux-normalised), matching the solver.
//! Under the opposite sign convention all amplitudes are complex conjugated.

use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{asymptotic_wavenumbers, canonicalize_mobius, Mobius, PotentialSpec, UnitsConvention};

/// Flux-normalised transmission and reflection amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactAmplitudes {
    pub t: Complex64,
    pub r: Complex64,
}

impl ExactAmplitudes {
    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }
}

/// A quasinormal mode as a complex wavenumber at `+inf`.
///
/// `k_minus` is the matching wavenumber at `-inf` on the same sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnmFrequency {
    pub k: Complex64,
    pub k_minus: Complex64,
    pub n: i64,
}

/// `sin(sqrt z)/sqrt z`, continued to `sinh(sqrt(-z))/sqrt(-z)` for negative `z`.
pub fn sinc_sqrt(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z / 6.0 + z * z / 120.0
    } else if z > 0.0 {
        let q = z.sqrt();
        q.sin() / q
    } else {
        let q = (-z).sqrt();
        q.sinh() / q
    }
}

/// `cos(sqrt z)`, continued to `cosh(sqrt(-z))`.
pub fn cos_sqrt(z: f64) -> f64 {
    if z >= 0.0 {
        z.sqrt().cos()
    } else {
        (-z).sqrt().cosh()
    }
}

/// `ln sinh x` for `x > 0` without overflow.
fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        x.sinh().ln()
    }
}

/// The Poschl–Teller transmission with `a = pi k_- L`, `b = pi k_+ L` and `c = cos(pi nu)`.
fn pt_transmission(a: f64, b: f64, cos_pi_nu: f64) -> f64 {
    let x = a + b;
    if x < 600.0 {
        2.0 * a.sinh() * b.sinh() / (x.cosh() + cos_pi_nu)
    } else {
        let y = (a - b).abs();
        let e2x = (-2.0 * x).exp();
        let num = 1.0 - (y - x).exp() * (1.0 + (-2.0 * y).exp()) / (1.0 + e2x);
        let den = 1.0 + 2.0 * cos_pi_nu * (-x).exp() / (1.0 + e2x);
        num / den
    }
}

/// `cos(pi nu)` with `nu = sqrt(radicand)`, continued to `cosh` for a negative radicand.
fn cos_pi_sqrt(radicand: f64) -> f64 {
    use std::f64::consts::PI;
    cos_sqrt(PI * PI * radicand)
}

/// A Mobius potential with `c d > 0` is a shifted Poschl–Teller potential plus a constant.
/// Returns `(offset, v0, v_inf, length)`.
fn mobius_as_poschl_teller(m: &Mobius) -> Result<(f64, f64, f64, f64)> {
    if !(m.c * m.d > 0.0) {
        return Err(Error::UnsupportedFamily(
            "only mobius potentials with a smooth denominator have a closed-form transmission".into(),
        ));
    }
    // numerator of V over (1 + u')^2 after rescaling u' = (d/c) u
    let lam = m.c / m.d;
    let (a, b) = (m.a / m.c, m.b * lam / m.c);
    let n0 = m.v0 + m.v1 * a * a;
    let n1 = 2.0 * m.v0 + 2.0 * m.v1 * a * b;
    let n2 = m.v0 + m.v1 * b * b;
    let alpha = 0.5 * (n0 + n2);
    let beta = 0.5 * (n0 - n2);
    let gamma = 0.25 * (n1 - 2.0 * alpha);
    Ok((alpha, gamma, beta, m.length))
}

/// Exact transmission probability for a solvable potential.
pub fn exact_transmission(p: &PotentialSpec, energy: f64, units: UnitsConvention) -> Result<f64> {
    use std::f64::consts::PI;
    let (km, kp) = asymptotic_wavenumbers(p, energy, units)?;
    let s = units.k2_factor();
    let t = match *p {
        PotentialSpec::Free { .. } => 1.0,
        PotentialSpec::Step { .. } => 4.0 * km * kp / ((km + kp) * (km + kp)),
        PotentialSpec::Delta { g, .. } => 1.0 / (1.0 + g * g / (4.0 * km * km)),
        PotentialSpec::DoubleDelta { g, d } => {
            let k = km;
            let k0 = 0.5 * g;
            let w = k * (k * d).cos() + k0 * (k * d).sin();
            let k4 = k * k * k * k;
            k4 / (k4 + 4.0 * k0 * k0 * w * w)
        }
        PotentialSpec::SquareBarrier { v0, width } => {
            let z = s * (energy - v0) * width * width;
            let sc = sinc_sqrt(z);
            let w = s * v0 * width * sc;
            1.0 / (1.0 + w * w / (4.0 * km * km))
        }
        PotentialSpec::AsymSquareWell { v2, a, b, .. } => {
            let lw = b - a;
            let k2 = s * (energy - v2);
            let (k1s, k3s) = (km * km, kp * kp);
            let sc = sinc_sqrt(k2 * lw * lw);
            let extra = lw * lw * sc * sc * (k1s * k3s + k2 * (k2 - k1s - k3s));
            4.0 * km * kp / ((km + kp) * (km + kp) + extra)
        }
        PotentialSpec::Tanh { length, .. } => {
            let l = length;
            let ln_t = ln_sinh(PI * km * l) + ln_sinh(PI * kp * l) - 2.0 * ln_sinh(0.5 * PI * (km + kp) * l);
            if km == kp {
                1.0
            } else {
                ln_t.exp().min(1.0)
            }
        }
        PotentialSpec::Sech2 { ve, length } => {
            let x = PI * km * length;
            // cos^2(pi nu/2) = (1 + cos(pi nu))/2
            let c2 = 0.5 * (1.0 + cos_pi_sqrt(1.0 - 4.0 * s * ve * length * length));
            if x > 350.0 {
                1.0 / (1.0 + c2 * 4.0 * (-2.0 * x).exp())
            } else {
                let sh = x.sinh();
                sh * sh / (sh * sh + c2)
            }
        }
        PotentialSpec::PoschlTeller { v0, length, .. } => {
            let c = cos_pi_sqrt(1.0 - 4.0 * s * v0 * length * length);
            pt_transmission(PI * km * length, PI * kp * length, c)
        }
        PotentialSpec::Mobius(_) | PotentialSpec::Named(_) => {
            let m = canonicalize_mobius(p)?;
            let (_, v0, _, length) = mobius_as_poschl_teller(&m)?;
            let c = cos_pi_sqrt(1.0 - 4.0 * s * v0 * length * length);
            pt_transmission(PI * km * length, PI * kp * length, c)
        }
        PotentialSpec::Sampled(_) | PotentialSpec::Shifted { .. } => {
            return Err(Error::UnsupportedFamily(format!("{} has no closed form", p.name())));
        }
    };
    Ok(t.clamp(0.0, 1.0))
}

/// Exact reflection probability, `1 - T`.
pub fn exact_reflection(p: &PotentialSpec, energy: f64, units: UnitsConvention) -> Result<f64> {
    Ok(1.0 - exact_transmission(p, energy, units)?)
}

/// One constant layer of a piecewise potential.
struct Layer {
    start: f64,
    end: f64,
    k2: f64,
}

/// Propagates `(psi, psi')` backwards through constant layers and point interactions,
/// starting from a pure transmitted wave on the right. The layers must tile the
/// span between the outermost layer edges and deltas.
fn piecewise_amplitudes(layers: &[Layer], deltas: &[(f64, f64)], km: f64, kp: f64) -> ExactAmplitudes {
    let i = Complex64::i();
    let x_r =
        layers.last().map(|l| l.end).unwrap_or(0.0).max(deltas.iter().map(|d| d.0).fold(f64::NEG_INFINITY, f64::max));
    let x_r = if x_r.is_finite() { x_r } else { 0.0 };
    let mut psi = (i * kp * x_r).exp();
    let mut dpsi = i * kp * psi;
    let mut x = x_r;
    let mut events: Vec<(f64, Option<usize>, f64)> = Vec::new();
    for (j, l) in layers.iter().enumerate() {
        events.push((l.end, Some(j), 0.0));
    }
    for &(xd, g) in deltas {
        events.push((xd, None, g));
    }
    // deltas at a layer edge are crossed before entering the layer
    events.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.is_some().cmp(&b.1.is_some())));
    for (xe, layer, g) in events {
        match layer {
            None => {
                debug_assert!(xe <= x);
                x = xe;
                dpsi -= g * psi;
            }
            Some(j) => {
                let l = &layers[j];
                let w = l.end - l.start;
                let z = l.k2 * w * w;
                let c = cos_sqrt(z);
                let sw = w * sinc_sqrt(z);
                let (p0, d0) = (psi, dpsi);
                psi = c * p0 - sw * d0;
                dpsi = l.k2 * sw * p0 + c * d0;
                x = l.start;
            }
        }
    }
    let x_l = x;
    let a = 0.5 * (psi + dpsi / (i * km)) * (-i * km * x_l).exp();
    let b = 0.5 * (psi - dpsi / (i * km)) * (i * km * x_l).exp();
    ExactAmplitudes { t: (kp / km).sqrt() / a, r: b / a }
}

/// Flux-normalised amplitudes for the piecewise-constant and point-interaction families.
pub fn exact_amplitudes(p: &PotentialSpec, energy: f64, units: UnitsConvention) -> Result<ExactAmplitudes> {
    let (km, kp) = asymptotic_wavenumbers(p, energy, units)?;
    let s = units.k2_factor();
    let amps = match *p {
        PotentialSpec::Free { .. } => ExactAmplitudes { t: Complex64::new(1.0, 0.0), r: Complex64::new(0.0, 0.0) },
        PotentialSpec::Step { .. } => piecewise_amplitudes(&[], &[], km, kp),
        PotentialSpec::Delta { g, x0 } => piecewise_amplitudes(&[], &[(x0, g)], km, kp),
        PotentialSpec::DoubleDelta { g, d } => piecewise_amplitudes(
            &[Layer { start: -0.5 * d, end: 0.5 * d, k2: km * km }],
            &[(-0.5 * d, g), (0.5 * d, g)],
            km,
            kp,
        ),
        PotentialSpec::SquareBarrier { v0, width } => {
            piecewise_amplitudes(&[Layer { start: 0.0, end: width, k2: s * (energy - v0) }], &[], km, kp)
        }
        PotentialSpec::AsymSquareWell { v2, a, b, .. } => {
            piecewise_amplitudes(&[Layer { start: a, end: b, k2: s * (energy - v2) }], &[], km, kp)
        }
        _ => {
            return Err(Error::UnsupportedFamily(format!("amplitude phases are not available for {}", p.name())));
        }
    };
    Ok(amps)
}

/// Closed-form quasinormal modes.
///
/// The delta potential has a single pair whatever the range. Tanh modes skip
/// `n = 0`; sech^2 and Poschl–Teller give two branches per `n`. Purely real
/// solutions are dropped.
pub fn qnm(p: &PotentialSpec, n_range: RangeInclusive<i64>, units: UnitsConvention) -> Result<Vec<QnmFrequency>> {
    p.validate()?;
    let s = units.k2_factor();
    let i = Complex64::i();
    let mut out = Vec::new();
    let mut push = |k: Complex64, k_minus: Complex64, n: i64| {
        if k.im.abs() > 1e-14 * k.norm().max(1e-300) && k.is_finite() {
            out.push(QnmFrequency { k, k_minus, n });
        }
    };
    match *p {
        PotentialSpec::Delta { g, .. } => {
            let k = i * (0.5 * g);
            push(k, k, 0);
            push(-k, -k, 0);
        }
        PotentialSpec::Tanh { v_minus, v_plus, length } => {
            let delta = s * (v_plus - v_minus);
            for n in n_range {
                if n == 0 {
                    continue;
                }
                let c = i * (2.0 * n as f64 / length);
                let kp = (c * c - delta) / (2.0 * c);
                push(kp, c - kp, n);
            }
        }
        PotentialSpec::Sech2 { ve, length } => {
            let nu = Complex64::new(1.0 - 4.0 * s * ve * length * length, 0.0).sqrt();
            for n in n_range {
                for sign in [1.0, -1.0] {
                    let k = i * (Complex64::new(2.0 * n as f64 + 1.0, 0.0) + sign * nu) / (2.0 * length);
                    push(k, k, n);
                }
            }
        }
        PotentialSpec::PoschlTeller { v0, v_inf, length } => {
            let nu = Complex64::new(1.0 - 4.0 * s * v0 * length * length, 0.0).sqrt();
            let delta = 2.0 * s * v_inf;
            for n in n_range {
                for sign in [1.0, -1.0] {
                    let c = i * (Complex64::new(2.0 * n as f64 + 1.0, 0.0) + sign * nu) / length;
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let kp = (c * c - delta) / (2.0 * c);
                    push(kp, c - kp, n);
                }
            }
        }
        _ => {
            return Err(Error::UnsupportedFamily(format!("no explicit quasinormal modes for {}", p.name())));
        }
    }
    Ok(out)
}

/// Magnitude of the transmission denominator at a mode, which vanishes at a true mode.
///
/// For families with different asymptotes the dispersion constraint linking
/// `k` and `k_minus` is included.
pub fn qnm_residual(p: &PotentialSpec, q: &QnmFrequency, units: UnitsConvention) -> Result<f64> {
    use std::f64::consts::PI;
    let s = units.k2_factor();
    let (k, km) = (q.k, q.k_minus);
    let r = match *p {
        PotentialSpec::Delta { g, .. } => (1.0 + g * g / (4.0 * k * k)).norm(),
        PotentialSpec::Tanh { v_minus, v_plus, length } => {
            let delta = s * (v_plus - v_minus);
            let d = (0.5 * PI * (km + k) * length).sinh().norm();
            d.max((km * km - k * k - delta).norm())
        }
        PotentialSpec::Sech2 { ve, length } => {
            let nu = Complex64::new(1.0 - 4.0 * s * ve * length * length, 0.0).sqrt();
            let sh = (PI * k * length).sinh();
            let c = (0.5 * PI * nu).cos();
            (sh * sh + c * c).norm()
        }
        PotentialSpec::PoschlTeller { v0, v_inf, length } => {
            let nu = Complex64::new(1.0 - 4.0 * s * v0 * length * length, 0.0).sqrt();
            let d = ((PI * (km + k) * length).cosh() + (PI * nu).cos()).norm();
            d.max((km * km - k * k - 2.0 * s * v_inf).norm())
        }
        _ => {
            return Err(Error::UnsupportedFamily(format!("no explicit quasinormal modes for {}", p.name())));
        }
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn u() -> UnitsConvention {
        UnitsConvention::default()
    }

    #[test]
    fn simple_values() {
        assert_eq!(exact_transmission(&PotentialSpec::Free { v_inf: 0.0 }, 0.3, u()).unwrap(), 1.0);
        let t = exact_transmission(&PotentialSpec::Delta { g: 2.0, x0: 0.0 }, 1.0, u()).unwrap();
        assert_relative_eq!(t, 0.5, epsilon = 1e-15);
        // q L = pi at E = 1 + pi^2
        let e = 1.0 + std::f64::consts::PI.powi(2);
        let t = exact_transmission(&PotentialSpec::SquareBarrier { v0: 1.0, width: 1.0 }, e, u()).unwrap();
        assert_relative_eq!(t, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn tanh_value() {
        use std::f64::consts::PI;
        let t = exact_transmission(&PotentialSpec::Tanh { v_minus: 0.0, v_plus: 3.0, length: 1.0 }, 4.0, u()).unwrap();
        let r = ((0.5 * PI).sinh() / (1.5 * PI).sinh()).powi(2);
        assert_relative_eq!(t, 1.0 - r, epsilon = 1e-14);
        assert_relative_eq!(t, 0.998290, epsilon = 1e-6);
    }

    #[test]
    fn under_barrier_closed_form() {
        let (v0, l, e) = (1.0f64, 1.3f64, 0.4f64);
        let k2 = e;
        let kap2 = v0 - e;
        let sh = (kap2.sqrt() * l).sinh();
        let expect = 4.0 * k2 * kap2 / (4.0 * k2 * kap2 + (k2 + kap2).powi(2) * sh * sh);
        let t = exact_transmission(&PotentialSpec::SquareBarrier { v0, width: l }, e, u()).unwrap();
        assert_relative_eq!(t, expect, max_relative = 1e-13);
        let t_top = exact_transmission(&PotentialSpec::SquareBarrier { v0, width: l }, v0, u()).unwrap();
        assert_relative_eq!(t_top, 1.0 / (1.0 + v0 * l * l / 4.0), max_relative = 1e-13);
    }

    #[test]
    fn delta_amplitudes() {
        let a = exact_amplitudes(&PotentialSpec::Delta { g: 2.0, x0: 0.0 }, 1.0, u()).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!((a.t - one / (one + Complex64::i())).norm() < 1e-15);
        assert!((a.r + Complex64::i() / (one + Complex64::i())).norm() < 1e-15);
        assert!((a.transmission() + a.reflection() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn double_delta_resonance() {
        // repulsive pair: resonances solve tan(kd) = -k/k0
        let (g, d) = (3.0f64, 1.0f64);
        let k0 = 0.5 * g;
        let f = |k: f64| (k * d).tan() + k / k0;
        let (mut a, mut b) = (std::f64::consts::FRAC_PI_2 + 1e-9, std::f64::consts::PI);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let k = 0.5 * (a + b);
        let amp = exact_amplitudes(&PotentialSpec::DoubleDelta { g, d }, k * k, u()).unwrap();
        assert!(amp.r.norm() < 1e-10);
        // attractive pair: tan(kd) = k/|k0|
        let g = -3.0;
        let f = |k: f64| (k * d).tan() - k / 1.5;
        let (mut a, mut b) = (std::f64::consts::PI + 1e-9, 1.5 * std::f64::consts::PI - 1e-9);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let k = 0.5 * (a + b);
        let t = exact_transmission(&PotentialSpec::DoubleDelta { g, d }, k * k, u()).unwrap();
        assert_relative_eq!(t, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn mobius_families_through_poschl_teller() {
        let e = 1.7;
        let rm = PotentialSpec::Named(crate::model::NamedPotential::RosenMorse { b: 0.3, c: 0.8, d: 1.2 });
        let pt = PotentialSpec::PoschlTeller { v0: -0.8, v_inf: 0.3, length: 1.2 };
        assert_relative_eq!(
            exact_transmission(&rm, e, u()).unwrap(),
            exact_transmission(&pt, e, u()).unwrap(),
            max_relative = 1e-12
        );
        let ek = PotentialSpec::Named(crate::model::NamedPotential::Eckart { a_coef: 0.6, b_coef: 1.0, a: 0.9 });
        let pt = PotentialSpec::PoschlTeller { v0: 0.25, v_inf: 0.3, length: 0.9 };
        assert_relative_eq!(
            exact_transmission(&ek, e + 0.3, u()).unwrap(),
            exact_transmission(&pt, e, u()).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn qnm_examples() {
        let d = PotentialSpec::Delta { g: 2.0, x0: 0.0 };
        let q = qnm(&d, 0..=5, u()).unwrap();
        assert_eq!(q.len(), 2);
        assert!((q[0].k - Complex64::i()).norm() < 1e-15);
        for m in &q {
            assert!(qnm_residual(&d, m, u()).unwrap() < 1e-12);
        }
        let t = PotentialSpec::Tanh { v_minus: 0.0, v_plus: 1.0, length: 2.0 };
        let q = qnm(&t, 1000..=1001, u()).unwrap();
        let gap = q[1].k - q[0].k;
        assert!((gap - Complex64::new(0.0, 0.5)).norm() < 1e-6);
        for m in &qnm(&t, -4..=4, u()).unwrap() {
            assert!(qnm_residual(&t, m, u()).unwrap() < 1e-8);
        }
        let pt = PotentialSpec::PoschlTeller { v0: 2.0, v_inf: 0.4, length: 1.1 };
        for m in &qnm(&pt, 0..=4, u()).unwrap() {
            assert!(qnm_residual(&pt, m, u()).unwrap() < 1e-8, "{m:?}");
        }
    }

    #[test]
    fn sech2_narrow_limit_matches_delta() {
        let l = 1e-4;
        let ve = 0.7 / l;
        let q = qnm(&PotentialSpec::Sech2 { ve, length: l }, 0..=0, u()).unwrap();
        let best = q.iter().map(|m| m.k).min_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        assert!((best - Complex64::new(0.0, 0.7)).norm() < 1e-3);
    }

    #[test]
    fn non_solvable_families_are_rejected() {
        let s = crate::model::SampledProfile::new(vec![0.0, 1.0], vec![0.0, 0.0], 0.0, 0.0).unwrap();
        assert!(exact_transmission(&PotentialSpec::Sampled(s), 1.0, u()).unwrap_err().is_unsupported());
        assert!(exact_amplitudes(&PotentialSpec::Sech2 { ve: 1.0, length: 1.0 }, 1.0, u())
            .unwrap_err()
            .is_unsupported());
    }

    proptest! {
        #[test]
        fn amplitudes_match_transmission(v0 in -3.0..3.0f64, w in 0.1..3.0f64, e in 0.01..6.0f64, v1 in -1.0..1.0f64, v3 in -1.0..1.0f64) {
            let sb = PotentialSpec::SquareBarrier { v0, width: w };
            let a = exact_amplitudes(&sb, e, u()).unwrap();
            let t = exact_transmission(&sb, e, u()).unwrap();
            prop_assert!((a.transmission() - t).abs() <= 1e-10 * t.max(1e-300) + 1e-14);
            prop_assert!((a.transmission() + a.reflection() - 1.0).abs() <= 1e-12);
            let e2 = e + v1.max(v3);
            let asw = PotentialSpec::AsymSquareWell { v1, v2: v0, v3, a: -0.3, b: w - 0.3 };
            let a = exact_amplitudes(&asw, e2, u()).unwrap();
            let t = exact_transmission(&asw, e2, u()).unwrap();
            prop_assert!((a.transmission() - t).abs() <= 1e-10 * t.max(1e-300) + 1e-14);
            prop_assert!((a.transmission() + a.reflection() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn double_delta_amplitudes(g in -4.0..4.0f64, d in 0.1..3.0f64, e in 0.01..6.0f64) {
            let p = PotentialSpec::DoubleDelta { g, d };
            let a = exact_amplitudes(&p, e, u()).unwrap();
            let t = exact_transmission(&p, e, u()).unwrap();
            prop_assert!((a.transmission() - t).abs() <= 1e-11);
        }

        #[test]
        fn reciprocity(v1 in -1.0..1.0f64, v2 in -3.0..3.0f64, v3 in -1.0..1.0f64, w in 0.1..3.0f64, e in 0.01..5.0f64, l in 0.1..3.0f64) {
            let e = e + v1.max(v3);
            let a = exact_transmission(&PotentialSpec::AsymSquareWell { v1, v2, v3, a: 0.0, b: w }, e, u()).unwrap();
            let b = exact_transmission(&PotentialSpec::AsymSquareWell { v1: v3, v2, v3: v1, a: 0.0, b: w }, e, u()).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            let a = exact_transmission(&PotentialSpec::Tanh { v_minus: v1, v_plus: v3, length: l }, e, u()).unwrap();
            let b = exact_transmission(&PotentialSpec::Tanh { v_minus: v3, v_plus: v1, length: l }, e, u()).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
        }

        #[test]
        fn sech2_tanh_squared_floor(k in 0.01..4.0f64, l in 0.05..2.0f64, frac in -1.0..0.999f64) {
            // 4 ve L^2 < 1 in default units
            let ve = frac / (4.0 * l * l);
            let t = exact_transmission(&PotentialSpec::Sech2 { ve, length: l }, k * k, u()).unwrap();
            let floor = (std::f64::consts::PI * k * l).tanh().powi(2);
            prop_assert!(t >= floor - 1e-14);
        }

        #[test]
        fn probabilities_in_range(v0 in -3.0..3.0f64, vi in -1.0..1.0f64, l in 0.1..3.0f64, e in 0.01..6.0f64) {
            let e = e + vi.abs();
            for p in [PotentialSpec::PoschlTeller { v0, v_inf: vi, length: l }, PotentialSpec::Sech2 { ve: v0, length: l }] {
                let t = exact_transmission(&p, e, u()).unwrap();
                let r = exact_reflection(&p, e, u()).unwrap();
                prop_assert!((0.0..=1.0).contains(&t));
                prop_assert!((t + r - 1.0).abs() < 1e-15);
            }
        }
    }
}
