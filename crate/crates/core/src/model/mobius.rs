//! The Mobius family `V = V0 + V1 ((A + B u)/(C + D u))^2` with `u = exp(-2x/a)`,
//! and the reduction of the named exponential-type potentials onto it.

use crate::error::{Error, Result};

/// Parameters of a Mobius potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub v0: f64,
    pub v1: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Length parameter `a` in `u = exp(-2x/a)`.
    pub length: f64,
}

/// Which hyperbolic function sits in the Tietz denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TietzDenominator {
    Sinh,
    Cosh,
    Exp,
}

/// Named exponential-type potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedPotential {
    /// `A ξ/(1+ξ) + B ξ/(1+ξ)^2` with `ξ = e^{2x/a}`.
    Eckart { a_coef: f64, b_coef: f64, a: f64 },
    /// `B tanh(x/d) - C sech^2(x/d)`.
    RosenMorse { b: f64, c: f64, d: f64 },
    /// `V0 (1 - e^{-(x-x0)/a})^2`.
    Morse { v0: f64, x0: f64, a: f64 },
    /// `B coth(x/d) - C cosech^2(x/d)`.
    ManningRosen { b: f64, c: f64, d: f64 },
    /// `-V0 e^{-x/a}/(1 - e^{-x/a})`.
    Hulthen { v0: f64, a: f64 },
    /// `V0 (sinh((x-x0)/a)/f(x/a))^2` with `f` one of sinh, cosh, exp.
    Tietz { v0: f64, x0: f64, a: f64, denominator: TietzDenominator },
    /// `V0 ((1 - e^{-2x/a})/(1 - q e^{-2x/a}))^2`.
    Hua { v0: f64, q: f64, a: f64 },
}

impl NamedPotential {
    pub fn name(&self) -> &'static str {
        match self {
            NamedPotential::Eckart { .. } => "eckart",
            NamedPotential::RosenMorse { .. } => "rosen-morse",
            NamedPotential::Morse { .. } => "morse",
            NamedPotential::ManningRosen { .. } => "manning-rosen",
            NamedPotential::Hulthen { .. } => "hulthen",
            NamedPotential::Tietz { .. } => "tietz",
            NamedPotential::Hua { .. } => "hua",
        }
    }

    pub fn length_scale(&self) -> f64 {
        match *self {
            NamedPotential::Eckart { a, .. } => a,
            NamedPotential::RosenMorse { d, .. } => d,
            NamedPotential::Morse { a, .. } => a,
            NamedPotential::ManningRosen { d, .. } => d,
            NamedPotential::Hulthen { a, .. } => a,
            NamedPotential::Tietz { a, .. } => a,
            NamedPotential::Hua { a, .. } => a,
        }
    }

    /// Direct evaluation of the textbook formula.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            NamedPotential::Eckart { a_coef, b_coef, a } => {
                // ξ/(1+ξ) and ξ/(1+ξ)^2 written in terms of e^{-2x/a} to avoid overflow
                let y = x / a;
                let s = 0.5 * (1.0 + y.tanh());
                let c = y.cosh();
                a_coef * s + b_coef / (4.0 * c * c)
            }
            NamedPotential::RosenMorse { b, c, d } => {
                let y = x / d;
                let ch = y.cosh();
                b * y.tanh() - c / (ch * ch)
            }
            NamedPotential::Morse { v0, x0, a } => {
                let e = (-(x - x0) / a).exp();
                v0 * (1.0 - e) * (1.0 - e)
            }
            NamedPotential::ManningRosen { b, c, d } => {
                let y = x / d;
                let sh = y.sinh();
                b / y.tanh() - c / (sh * sh)
            }
            NamedPotential::Hulthen { v0, a } => {
                let e = (-x / a).exp();
                -v0 * e / (1.0 - e)
            }
            NamedPotential::Tietz { v0, x0, a, denominator } => {
                let num = ((x - x0) / a).sinh();
                let den = match denominator {
                    TietzDenominator::Sinh => (x / a).sinh(),
                    TietzDenominator::Cosh => (x / a).cosh(),
                    TietzDenominator::Exp => (x / a).exp(),
                };
                let r = if num.is_infinite() || den.is_infinite() {
                    tietz_ratio_far(x, x0, a, denominator)
                } else {
                    num / den
                };
                v0 * r * r
            }
            NamedPotential::Hua { v0, q, a } => {
                let u = (-2.0 * x / a).exp();
                let r = if u.is_infinite() || u > 1e300 { 1.0 / q } else { (1.0 - u) / (1.0 - q * u) };
                v0 * r * r
            }
        }
    }
}

fn tietz_ratio_far(x: f64, x0: f64, a: f64, den: TietzDenominator) -> f64 {
    let s = x.signum();
    let e = (x0 / a).exp();
    match den {
        TietzDenominator::Sinh | TietzDenominator::Cosh => {
            if s > 0.0 {
                1.0 / e
            } else {
                e
            }
        }
        TietzDenominator::Exp => {
            if s > 0.0 {
                0.5 / e
            } else {
                f64::INFINITY
            }
        }
    }
}

impl Mobius {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.v0, self.v1, self.a, self.b, self.c, self.d, self.length];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("mobius parameters must be finite".into()));
        }
        if self.length <= 0.0 {
            return Err(Error::InvalidParameter("mobius length must be positive".into()));
        }
        if self.c == 0.0 && self.d == 0.0 {
            return Err(Error::InvalidParameter("mobius denominator vanishes identically".into()));
        }
        Ok(())
    }

    /// Location where `C + D u` vanishes, if that happens for real x.
    pub fn pole(&self) -> Option<f64> {
        if self.d == 0.0 {
            return None;
        }
        let u = -self.c / self.d;
        // a removable pole (A + B u also vanishes there) leaves the potential finite
        if u > 0.0 && (self.a + self.b * u).abs() > 1e-14 * (self.a.abs() + (self.b * u).abs()) {
            Some(-0.5 * self.length * u.ln())
        } else {
            None
        }
    }

    fn ratio(&self, x: f64) -> f64 {
        let u = (-2.0 * x / self.length).exp();
        if u <= 1.0 {
            (self.a + self.b * u) / (self.c + self.d * u)
        } else {
            let w = 1.0 / u;
            (self.a * w + self.b) / (self.c * w + self.d)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let r = self.ratio(x);
        self.v0 + self.v1 * r * r
    }

    /// `(V(-inf), V(+inf))`; infinite when the denominator coefficient vanishes.
    pub fn asymptotes(&self) -> (f64, f64) {
        let lim = |num: f64, den: f64| {
            if den != 0.0 {
                let r = num / den;
                self.v0 + self.v1 * r * r
            } else if num == 0.0 {
                // both vanish: the limit involves the other coefficients
                f64::NAN
            } else {
                self.v1.signum() * f64::INFINITY
            }
        };
        let mut minus = lim(self.b, self.d);
        let mut plus = lim(self.a, self.c);
        if minus.is_nan() {
            let r = self.a / self.c;
            minus = self.v0 + self.v1 * r * r;
        }
        if plus.is_nan() {
            let r = self.b / self.d;
            plus = self.v0 + self.v1 * r * r;
        }
        (minus, plus)
    }
}

/// Builds the Mobius form of `N(u)/(c + d u)^2` where `N = n0 + n1 u + n2 u^2`.
fn from_quadratic(n: [f64; 3], c: f64, d: f64, length: f64) -> Result<Mobius> {
    let [n0, n1, n2] = n;
    let den = 4.0 * (n2 * c * c - c * d * n1 + d * d * n0);
    if den == 0.0 {
        // N vanishes at the pole of the denominator; the form reduces to a polynomial in u
        return Err(Error::UnsupportedFamily("degenerate mobius reduction".into()));
    }
    let v0 = (4.0 * n0 * n2 - n1 * n1) / den;
    let q0 = n0 - v0 * c * c;
    let q1 = n1 - 2.0 * v0 * c * d;
    let q2 = n2 - v0 * d * d;
    let scale = q0.abs().max(q1.abs()).max(q2.abs());
    let m = if q2.abs() > 1e-14 * scale {
        Mobius { v0, v1: q2, a: q1 / (2.0 * q2), b: 1.0, c, d, length }
    } else {
        Mobius { v0, v1: q0, a: 1.0, b: 0.0, c, d, length }
    };
    Ok(m)
}

/// Maps a named family onto the Mobius form.
pub fn named_to_mobius(p: &NamedPotential) -> Result<Mobius> {
    match *p {
        NamedPotential::Eckart { a_coef, b_coef, a } => from_quadratic([a_coef, a_coef + b_coef, 0.0], 1.0, 1.0, a),
        NamedPotential::RosenMorse { b, c, d } => from_quadratic([b, -4.0 * c, -b], 1.0, 1.0, d),
        NamedPotential::ManningRosen { b, c, d } => from_quadratic([b, -4.0 * c, -b], 1.0, -1.0, d),
        NamedPotential::Morse { v0, x0, a } => {
            Ok(Mobius { v0: 0.0, v1: v0, a: 1.0, b: -(x0 / a).exp(), c: 1.0, d: 0.0, length: 2.0 * a })
        }
        NamedPotential::Tietz { v0, x0, a, denominator } => {
            let (c, d) = match denominator {
                TietzDenominator::Sinh => (1.0, -1.0),
                TietzDenominator::Cosh => (1.0, 1.0),
                TietzDenominator::Exp => (2.0, 0.0),
            };
            Ok(Mobius { v0: 0.0, v1: v0, a: (-x0 / a).exp(), b: -(x0 / a).exp(), c, d, length: a })
        }
        NamedPotential::Hua { v0, q, a } => {
            if q == 0.0 {
                return Err(Error::ParameterOutOfRange("hua requires q != 0".into()));
            }
            Ok(Mobius { v0: 0.0, v1: v0, a: 1.0, b: -1.0, c: 1.0, d: -q, length: a })
        }
        NamedPotential::Hulthen { .. } => {
            Err(Error::UnsupportedFamily("hulthen has a simple pole and is not a squared mobius ratio".into()))
        }
    }
}

/// Maps a Poschl–Teller potential `V0 sech^2(x/L) + Vinf tanh(x/L)` onto the Mobius form.
pub fn poschl_teller_to_mobius(v0: f64, v_inf: f64, length: f64) -> Result<Mobius> {
    from_quadratic([v_inf, 4.0 * v0, -v_inf], 1.0, 1.0, length)
}
