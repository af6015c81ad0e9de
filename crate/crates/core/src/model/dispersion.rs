use std::sync::Arc;

/// A real function of one variable shared across threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A zero-range interaction: `psi'` jumps by `g psi` at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface {
    pub x: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Peak,
    Valley,
}

/// A local extremum of `k^2(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumRecord {
    pub x: f64,
    pub k2: f64,
    pub kind: ExtremumKind,
}

/// `k^2(x) = (2m/hbar^2)(E - V(x))` together with the data needed to integrate over it.
///
/// `window` is the finite interval outside of which `k^2` equals its asymptotic
/// value to within the tail tolerance. `joints` are points where `k^2` is not
/// smooth; `interfaces` carry delta-function strengths.
#[derive(Clone)]
pub struct Dispersion {
    k2: RealFn,
    pub k_minus: f64,
    pub k_plus: f64,
    pub window: (f64, f64),
    pub joints: Vec<f64>,
    pub interfaces: Vec<Interface>,
    pub forbidden_regions: Vec<(f64, f64)>,
    /// Typical length over which `k^2` varies.
    pub scale: f64,
}

impl std::fmt::Debug for Dispersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dispersion")
            .field("k_minus", &self.k_minus)
            .field("k_plus", &self.k_plus)
            .field("window", &self.window)
            .field("joints", &self.joints)
            .field("interfaces", &self.interfaces)
            .field("forbidden_regions", &self.forbidden_regions)
            .finish()
    }
}

pub(crate) fn nudge(x: f64, dir: f64, scale: f64) -> f64 {
    x + dir * 1e-12 * x.abs().max(scale)
}

impl Dispersion {
    /// Assembles a dispersion from its parts and scans for forbidden regions.
    pub fn new(
        k2: RealFn,
        k_minus: f64,
        k_plus: f64,
        window: (f64, f64),
        mut joints: Vec<f64>,
        mut interfaces: Vec<Interface>,
        scale: f64,
    ) -> Self {
        joints.sort_by(f64::total_cmp);
        joints.dedup();
        interfaces.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut d =
            Dispersion { k2, k_minus, k_plus, window, joints, interfaces, forbidden_regions: Vec::new(), scale };
        d.forbidden_regions = d.regions_below(0.0);
        d
    }

    /// A dispersion built directly from a closure, for parametric problems with no potential.
    pub fn from_fn<F>(k2: F, k_minus: f64, k_plus: f64, window: (f64, f64), joints: Vec<f64>, scale: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(Arc::new(k2), k_minus, k_plus, window, joints, Vec::new(), scale)
    }

    #[inline]
    pub fn k2(&self, x: f64) -> f64 {
        (self.k2)(x)
    }

    pub fn k2_fn(&self) -> RealFn {
        self.k2.clone()
    }

    /// One-sided limit of `k^2` at `x`; `dir` is `-1` for the left, `+1` for the right.
    pub fn k2_side(&self, x: f64, dir: f64) -> f64 {
        self.k2(nudge(x, dir, self.scale))
    }

    pub fn has_forbidden_region(&self) -> bool {
        !self.forbidden_regions.is_empty()
    }

    pub fn is_symmetric_asymptotically(&self) -> bool {
        (self.k_minus - self.k_plus).abs() <= 1e-12 * self.k_minus.max(self.k_plus)
    }

    /// Joints and interfaces inside the open window, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.joints.iter().copied().chain(self.interfaces.iter().map(|i| i.x)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// The smooth piece `(lo, hi)` of `k^2` containing `x`, bounded by joints.
    fn smooth_piece(&self, x: f64, dir: f64) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for &j in &self.joints {
            if j < x || (j == x && dir > 0.0) {
                lo = j;
            } else if j > x || (j == x && dir < 0.0) {
                hi = j;
                break;
            }
        }
        (lo, hi)
    }

    /// `(k^2, d k^2/dx, d^2 k^2/dx^2)` at `x` by finite differences that never straddle a joint.
    /// At a joint `dir` chooses the side.
    pub fn k2_derivs(&self, x: f64, dir: f64) -> (f64, f64, f64) {
        let (lo, hi) = self.smooth_piece(x, dir);
        let mut h = 1e-3 * self.scale;
        if (hi - lo).is_finite() {
            h = h.min((hi - lo) / 8.0);
        }
        let f = |t: f64| self.k2(t);
        let x0 = if x == lo {
            nudge(x, 1.0, self.scale)
        } else if x == hi {
            nudge(x, -1.0, self.scale)
        } else {
            x
        };
        let f0 = f(x0);
        if x0 - 2.0 * h >= lo && x0 + 2.0 * h <= hi {
            let fp = f(x0 + h);
            let fm = f(x0 - h);
            (f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
        } else {
            let s = if x0 - 2.0 * h < lo { 1.0 } else { -1.0 };
            let g = s * h;
            let (f1, f2, f3) = (f(x0 + g), f(x0 + 2.0 * g), f(x0 + 3.0 * g));
            let d1 = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * g);
            let d2 = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h);
            (f0, d1, d2)
        }
    }

    /// Sorted disjoint intervals inside the window where `k^2 < level`.
    pub fn regions_below(&self, level: f64) -> Vec<(f64, f64)> {
        let (a, b) = self.window;
        let mut cuts = vec![a];
        cuts.extend(self.joints.iter().copied().filter(|&j| j > a && j < b));
        cuts.push(b);
        let mut out: Vec<(f64, f64)> = Vec::new();
        let below = |x: f64| self.k2(x) < level;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let n = ((100.0 * (hi - lo) / self.scale).ceil() as usize).clamp(64, 8000);
            let xl = nudge(lo, 1.0, self.scale);
            let xh = nudge(hi, -1.0, self.scale);
            let xs = |i: usize| {
                if i == 0 {
                    xl
                } else if i == n {
                    xh
                } else {
                    lo + (hi - lo) * i as f64 / n as f64
                }
            };
            let mut start = if below(xl) { Some(lo) } else { None };
            let mut prev_x = xl;
            let mut prev_b = start.is_some();
            for i in 1..=n {
                let x = xs(i);
                let bx = below(x);
                if bx != prev_b {
                    let c = bisect_change(&below, prev_x, x, prev_b);
                    if bx {
                        start = Some(c);
                    } else if let Some(s) = start.take() {
                        out.push((s, c));
                    }
                }
                prev_x = x;
                prev_b = bx;
            }
            if let Some(s) = start {
                out.push((s, hi));
            }
        }
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for r in out {
            match merged.last_mut() {
                Some(last) if last.1 == r.0 => last.1 = r.1,
                _ => merged.push(r),
            }
        }
        merged
    }

    /// The same problem reflected through `x = 0`.
    pub fn mirrored(&self) -> Dispersion {
        let k2 = self.k2.clone();
        let mut joints: Vec<f64> = self.joints.iter().map(|j| -j).collect();
        joints.reverse();
        let mut interfaces: Vec<Interface> = self.interfaces.iter().map(|i| Interface { x: -i.x, g: i.g }).collect();
        interfaces.reverse();
        let mut regions: Vec<(f64, f64)> = self.forbidden_regions.iter().map(|r| (-r.1, -r.0)).collect();
        regions.reverse();
        Dispersion {
            k2: Arc::new(move |x| k2(-x)),
            k_minus: self.k_plus,
            k_plus: self.k_minus,
            window: (-self.window.1, -self.window.0),
            joints,
            interfaces,
            forbidden_regions: regions,
            scale: self.scale,
        }
    }
}

fn bisect_change<F: Fn(f64) -> bool>(pred: &F, mut a: f64, mut b: f64, at_a: bool) -> f64 {
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 {
            break;
        }
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if pred(m) == at_a {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Locates local extrema of `k^2` in `window` from an `n_scan` point grid.
///
/// Flat stretches are collapsed and reported at their midpoint. Delta
/// interfaces are ignored.
pub fn find_extrema(d: &Dispersion, window: (f64, f64), n_scan: usize) -> Vec<ExtremumRecord> {
    let n = n_scan.max(3);
    let (lo, hi) = window;
    let width = hi - lo;
    if !(width > 0.0) {
        return Vec::new();
    }
    let xs: Vec<f64> = (0..n).map(|i| lo + width * i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| d.k2(x)).collect();
    let mag = ys.iter().fold(1.0f64, |m, y| m.max(y.abs()));
    let flat = 1e-12 * mag;
    let sign = |i: usize| {
        let dy = ys[i + 1] - ys[i];
        if dy.abs() <= flat {
            0
        } else if dy > 0.0 {
            1
        } else {
            -1
        }
    };
    let tol = 1e-11 * width;
    let mut out = Vec::new();
    let mut prev = 0;
    let mut last = 0usize;
    for i in 0..n - 1 {
        let s = sign(i);
        if s == 0 {
            continue;
        }
        if prev != 0 && s != prev {
            let kind = if prev > 0 { ExtremumKind::Peak } else { ExtremumKind::Valley };
            let level = ys[last + 1];
            let near = |x: f64| (d.k2(x) - level).abs() <= flat;
            let plateau = i > last + 1 && near(0.5 * (xs[last + 1] + xs[i]));
            let rec = if plateau {
                let left = bisect_change(&near, xs[last + 1], xs[last], true);
                let right = bisect_change(&near, xs[i], xs[i + 1], true);
                let x = 0.5 * (left + right);
                ExtremumRecord { x, k2: d.k2(x), kind }
            } else {
                let x = refine_turning(d, xs[last], xs[i + 1], prev as f64, tol);
                ExtremumRecord { x, k2: d.k2(x), kind }
            };
            out.push(rec);
        }
        prev = s;
        last = i;
    }
    out
}

/// Bisection on the sign of the slope; `rising` is the sign of the slope at `a`.
fn refine_turning(d: &Dispersion, mut a: f64, mut b: f64, rising: f64, tol: f64) -> f64 {
    let h = 1e-3 * d.scale;
    let f = |x: f64| d.k2(x);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        // fourth-order central difference; only its sign matters
        let slope = 8.0 * (f(m + h) - f(m - h)) - (f(m + 2.0 * h) - f(m - 2.0 * h));
        if slope * rising > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
