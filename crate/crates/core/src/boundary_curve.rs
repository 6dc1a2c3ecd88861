//! Arclength-parametrized boundaries of convex disks.
//!
//! A [`BoundaryCurve`] is built from a [`CurvatureProfile`]: the tangent angle
//! is the exact integral of the curvature, and positions come from a table of
//! knot positions refined by Gauss–Legendre quadrature inside each grid cell.
//! The curve starts with tangent angle `π`, so the point of arclength zero has
//! outer normal `(0, 1)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{lift_from, wrap_period, Vec2};
use crate::profile::CurvatureProfile;
use crate::quadrature::gauss8;

/// Grid size used by [`BoundaryCurve::reconstruct`].
pub const DEFAULT_KNOTS: usize = 4096;

/// Tangent angle at arclength zero.
pub const START_ANGLE: f64 = PI;

/// Cells spanned before position and sweep queries switch to the knot tables.
const DIRECT_CELLS: f64 = 48.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub point: Vec2,
    /// Continuous lift of the tangent angle.
    pub phi: f64,
    pub kappa: f64,
}

/// Closure residuals measured when the curve was built.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Closure {
    pub position: f64,
    pub angle: f64,
}

#[derive(Debug)]
struct CurveData {
    profile: CurvatureProfile,
    knots: usize,
    step: f64,
    /// Knot positions relative to the starting point; `knots + 1` entries.
    pos: Vec<Vec2>,
    /// `∫₀^{k h} |pos, pos'|` at each knot.
    sweep: Vec<f64>,
    circle: Option<f64>,
    closure: Closure,
}

/// A closed convex curve `Θ : [0, L) → ℝ²`, counterclockwise, unit speed.
///
/// Cloning is cheap; the tables are shared.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    data: Arc<CurveData>,
    origin: Vec2,
}

impl BoundaryCurve {
    /// Reconstruct the curve with the default grid.
    pub fn reconstruct(profile: CurvatureProfile) -> Result<Self> {
        Self::with_knots(profile, DEFAULT_KNOTS)
    }

    pub fn with_knots(profile: CurvatureProfile, knots: usize) -> Result<Self> {
        let knots = knots.max(16);
        let length = profile.length();
        let step = length / knots as f64;
        let circle = profile.is_constant().map(|k| 1.0 / k);
        let mut data = CurveData {
            profile,
            knots,
            step,
            pos: Vec::new(),
            sweep: Vec::new(),
            circle,
            closure: Closure::default(),
        };
        let angle_residual = (data.profile.total_turning() - TAU).abs();
        if circle.is_none() {
            let mut pos = Vec::with_capacity(knots + 1);
            let mut sweep = Vec::with_capacity(knots + 1);
            let (mut px, mut py, mut w) = (Compensated::default(), Compensated::default(), Compensated::default());
            pos.push(Vec2::ZERO);
            sweep.push(0.0);
            for i in 0..knots {
                let lo = i as f64 * step;
                let hi = if i + 1 == knots { length } else { (i + 1) as f64 * step };
                let (d, rel) = data.direct_moments(lo, hi);
                let p = Vec2::new(px.value(), py.value());
                w.add(p.cross(d));
                w.add(rel);
                px.add(d.x);
                py.add(d.y);
                pos.push(Vec2::new(px.value(), py.value()));
                sweep.push(w.value());
            }
            data.closure = Closure { position: pos[knots].norm(), angle: angle_residual };
            data.pos = pos;
            data.sweep = sweep;
        } else {
            data.closure = Closure { position: 0.0, angle: angle_residual };
        }
        let (pos_limit, angle_limit) = (1e-9 * length, 1e-9);
        if data.closure.position > pos_limit || data.closure.angle > angle_limit {
            return Err(Error::NotClosed {
                position: data.closure.position,
                position_limit: pos_limit,
                angle: data.closure.angle,
                angle_limit,
            });
        }
        let mut curve = BoundaryCurve { data: Arc::new(data), origin: Vec2::ZERO };
        if curve.data.profile.is_half_period_symmetric(1e-9) {
            let centre = curve.rel_pos(0.5 * length) * 0.5;
            curve.origin = -centre;
        }
        Ok(curve)
    }

    /// The same curve moved by `v`.
    pub fn translated(&self, v: Vec2) -> Self {
        BoundaryCurve { data: self.data.clone(), origin: self.origin + v }
    }

    /// The same curve with `Θ(0)` placed at `p`.
    pub fn starting_at(&self, p: Vec2) -> Self {
        BoundaryCurve { data: self.data.clone(), origin: p }
    }

    pub fn shares_tables(&self, other: &BoundaryCurve) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.data.profile.length()
    }

    pub fn knots(&self) -> usize {
        self.data.knots
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.data.profile
    }

    pub fn closure(&self) -> Closure {
        self.data.closure
    }

    pub fn circle_radius(&self) -> Option<f64> {
        self.data.circle
    }

    #[inline]
    pub fn tangent_angle(&self, s: f64) -> f64 {
        START_ANGLE + self.data.profile.cumulative(s)
    }

    #[inline]
    pub fn curvature(&self, s: f64) -> f64 {
        self.data.profile.kappa(s)
    }

    #[inline]
    pub fn tangent(&self, s: f64) -> Vec2 {
        Vec2::from_angle(self.tangent_angle(s))
    }

    #[inline]
    pub fn point(&self, s: f64) -> Vec2 {
        self.origin + self.rel_pos(s)
    }

    pub fn eval(&self, s: f64) -> CurvePoint {
        CurvePoint { point: self.point(s), phi: self.tangent_angle(s), kappa: self.curvature(s) }
    }

    /// `Θ(b) − Θ(a)`.
    pub fn displacement(&self, a: f64, b: f64) -> Vec2 {
        if b < a {
            return -self.displacement(b, a);
        }
        if let Some(r) = self.data.circle {
            let beta = (b - a) / r;
            let mid = START_ANGLE + 0.5 * (a + b) / r;
            return Vec2::from_angle(mid) * (2.0 * r * (0.5 * beta).sin());
        }
        if b - a <= DIRECT_CELLS * self.data.step {
            self.data.direct_moments(a, b).0
        } else {
            self.rel_pos(b) - self.rel_pos(a)
        }
    }

    /// `∫ₐᵇ |Θ(u) − Θ(a), Θ'(u)| du` for `a ≤ b`: twice the area between the
    /// arc and its chord when the arc turns by at most `2π`.
    pub fn chord_sweep(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        if let Some(r) = self.data.circle {
            return r * r * beta_minus_sin((b - a) / r);
        }
        if b - a <= DIRECT_CELLS * self.data.step {
            self.data.direct_moments(a, b).1
        } else {
            let (pa, wa) = self.prefix(a);
            let (pb, wb) = self.prefix(b);
            (wb - wa) - pa.cross(pb - pa)
        }
    }

    /// Area between the counterclockwise arc `[a, b]` and its chord.
    pub fn cap_area(&self, a: f64, b: f64) -> f64 {
        0.5 * self.chord_sweep(a, b)
    }

    /// `∫ₐᵇ |Θ(u), Θ'(u)| du`, signed when `b < a`.
    pub fn sweep_integral(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.sweep_integral(b, a);
        }
        let d = self.displacement(a, b);
        self.chord_sweep(a, b) + self.point(a).cross(d)
    }

    /// Enclosed area.
    pub fn area(&self) -> f64 {
        if let Some(r) = self.data.circle {
            return PI * r * r;
        }
        0.5 * self.data.sweep[self.data.knots]
    }

    /// `‖Θ(b) − Θ(a)‖ − (b − a)` for `a ≤ b`, evaluated without cancellation.
    pub fn chord_excess(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let len = b - a;
        let prof = &self.data.profile;
        let mid = 0.5 * (a + b);
        let phi_mid = prof.cumulative(mid);
        let mut re = 0.0;
        let mut im = 0.0;
        self.data.for_each_span(a, b, |lo, hi| {
            for (u, w) in gauss8(lo, hi) {
                let psi = prof.cumulative(u) - phi_mid;
                let half = (0.5 * psi).sin();
                re += w * (-2.0 * half * half);
                im += w * psi.sin();
            }
        });
        let chord = ((len + re) * (len + re) + im * im).sqrt();
        (2.0 * len * re + re * re + im * im) / (chord + len)
    }

    /// Arclength in `[0, L)` at which the tangent angle equals `phi` mod 2π.
    pub fn param_at_angle(&self, phi: f64) -> f64 {
        let rel = lift_from(phi, START_ANGLE) - START_ANGLE;
        if let Some(r) = self.data.circle {
            return wrap_period(rel * r, self.length());
        }
        self.data.profile.inverse_cumulative(rel)
    }

    /// Arclength in `[0, L)` of the point with outer normal angle `u`.
    pub fn param_at_normal(&self, u: f64) -> f64 {
        self.param_at_angle(u + FRAC_PI_2)
    }

    /// Increase of the tangent angle along the counterclockwise arc from
    /// `s1` to `s2`, in `[0, 2π]`.
    pub fn turning_angle(&self, s1: f64, s2: f64) -> f64 {
        let l = self.length();
        let a = wrap_period(s1, l);
        let mut b = wrap_period(s2, l);
        if b < a {
            b += l;
        }
        self.data.profile.integral(a, b).clamp(0.0, TAU)
    }

    /// Support function `h(u) = max ⟨Θ, (cos u, sin u)⟩`.
    pub fn support(&self, u: f64) -> f64 {
        self.point(self.param_at_normal(u)).dot(Vec2::from_angle(u))
    }

    /// Position relative to `Θ(0)` for any real `s`.
    fn rel_pos(&self, s: f64) -> Vec2 {
        if let Some(r) = self.data.circle {
            let phi = self.tangent_angle(s);
            let n0 = Vec2::new(START_ANGLE.sin(), -START_ANGLE.cos());
            return (Vec2::new(phi.sin(), -phi.cos()) - n0) * r;
        }
        self.prefix(s).0
    }

    /// Relative position and `∫₀ˢ |pos, pos'|` through the knot tables.
    fn prefix(&self, s: f64) -> (Vec2, f64) {
        let d = &*self.data;
        let l = d.profile.length();
        let mut turns = (s / l).floor();
        let mut r = s - turns * l;
        if r >= l {
            r = 0.0;
            turns += 1.0;
        }
        let r = r.max(0.0);
        let i = ((r / d.step) as usize).min(d.knots - 1);
        let lo = i as f64 * d.step;
        let (disp, rel) = d.direct_moments(lo, r);
        let p = d.pos[i] + disp;
        let w = d.sweep[i] + d.pos[i].cross(disp) + rel + turns * d.sweep[d.knots];
        (p, w)
    }
}

impl CurveData {
    fn for_each_span<F: FnMut(f64, f64)>(&self, a: f64, b: f64, mut f: F) {
        let step = self.step;
        self.profile.for_each_smooth_span(a, b, |lo, hi| {
            let mut x = lo;
            while x < hi {
                let mut k = (x / step).floor() + 1.0;
                while k * step <= x {
                    k += 1.0;
                }
                let y = (k * step).min(hi);
                f(x, y);
                x = y;
            }
        });
    }

    /// `(∫ₐᵇ Θ', ∫ₐᵇ |Θ(u) − Θ(a), Θ'(u)| du)` by nested quadrature.
    fn direct_moments(&self, a: f64, b: f64) -> (Vec2, f64) {
        let mut disp = Vec2::ZERO;
        let mut rel = 0.0;
        self.for_each_span(a, b, |lo, hi| {
            let (d, r) = self.span_moments(lo, hi);
            rel += disp.cross(d) + r;
            disp += d;
        });
        (disp, rel)
    }

    fn span_moments(&self, lo: f64, hi: f64) -> (Vec2, f64) {
        let tangent = |u: f64| Vec2::from_angle(START_ANGLE + self.profile.cumulative(u));
        let mut disp = Vec2::ZERO;
        let mut rel = 0.0;
        for (u, w) in gauss8(lo, hi) {
            let t = tangent(u);
            let mut inner = Vec2::ZERO;
            for (v, wv) in gauss8(lo, u) {
                inner += tangent(v) * wv;
            }
            rel += w * inner.cross(t);
            disp += t * w;
        }
        (disp, rel)
    }
}

/// Neumaier summation.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `β − sin β` without cancellation for small `β`.
pub fn beta_minus_sin(beta: f64) -> f64 {
    if beta.abs() < 0.1 {
        let b2 = beta * beta;
        beta * b2
            * (1.0 / 6.0
                - b2 * (1.0 / 120.0 - b2 * (1.0 / 5040.0 - b2 * (1.0 / 362_880.0 - b2 / 39_916_800.0))))
    } else {
        beta - beta.sin()
    }
}

/// An origin-symmetric convex disk with smooth, strictly convex boundary.
#[derive(Clone, Debug)]
pub struct SymmetricDisk {
    curve: BoundaryCurve,
    /// Lifted polar angle of the knots, for the radial function.
    polar: Arc<Vec<f64>>,
}

/// Parameters `s < t` on the boundary of a disk with `Θ(t) − Θ(s)` equal to a
/// prescribed chord vector, taken on the arc that turns by at most `π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordParams {
    pub s: f64,
    pub t: f64,
}

const POLAR_SAMPLES: usize = 1024;

impl SymmetricDisk {
    pub fn new(curve: BoundaryCurve) -> Result<Self> {
        let l = curve.length();
        let half = 0.5 * l;
        let mut residual: f64 = 0.0;
        for k in 0..1024 {
            let s = (k as f64 + 0.25) * l / 1024.0;
            residual = residual.max((curve.point(s + half) + curve.point(s)).norm());
        }
        if residual > 1e-8 * l {
            return Err(Error::NotSymmetric { residual });
        }
        let h = l / POLAR_SAMPLES as f64;
        let mut polar = Vec::with_capacity(POLAR_SAMPLES + 1);
        let mut prev = curve.point(0.0).angle();
        polar.push(prev);
        for k in 1..=POLAR_SAMPLES {
            let a = curve.point(k as f64 * h).angle();
            prev = lift_from(a, prev);
            polar.push(prev);
        }
        Ok(SymmetricDisk { curve, polar: Arc::new(polar) })
    }

    pub fn from_profile(profile: CurvatureProfile) -> Result<Self> {
        Self::new(BoundaryCurve::reconstruct(profile)?)
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::from_profile(CurvatureProfile::circle(radius)?)
    }

    pub fn unit_circle() -> Self {
        Self::circle(1.0).expect("unit circle")
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.curve.length()
    }

    pub fn same_disk(&self, other: &SymmetricDisk) -> bool {
        self.curve.shares_tables(&other.curve)
    }

    /// Arclength of the boundary point in polar direction `psi`.
    pub fn param_at_polar(&self, psi: f64) -> f64 {
        let l = self.length();
        if let Some(r) = self.curve.circle_radius() {
            // the point at polar angle ψ has tangent ψ + π/2
            let _ = r;
            return self.curve.param_at_angle(psi + FRAC_PI_2);
        }
        let target = lift_from(psi, self.polar[0]);
        let k = self.polar.partition_point(|&a| a <= target).clamp(1, POLAR_SAMPLES) - 1;
        let h = l / POLAR_SAMPLES as f64;
        let (mut lo, mut hi) = (k as f64 * h, (k + 1) as f64 * h);
        let mut s = lo + h * (target - self.polar[k]) / (self.polar[k + 1] - self.polar[k]);
        for _ in 0..60 {
            let p = self.curve.point(s);
            let ang = lift_from(p.angle(), self.polar[k] - PI);
            let f = ang - target;
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let deriv = p.cross(self.curve.tangent(s)) / p.norm_sq();
            let mut next = s - f / deriv;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - s).abs() < 1e-15 * l;
            s = next;
            if done {
                break;
            }
        }
        wrap_period(s, l)
    }

    /// Radial function: distance from the centre to the boundary in direction `psi`.
    pub fn radius_in_direction(&self, psi: f64) -> f64 {
        if let Some(r) = self.curve.circle_radius() {
            return r;
        }
        self.curve.point(self.param_at_polar(psi)).norm()
    }

    /// `‖z‖_C`, the gauge of `z` with respect to the disk.
    pub fn gauge(&self, z: Vec2) -> f64 {
        let n = z.norm();
        if n == 0.0 {
            return 0.0;
        }
        n / self.radius_in_direction(z.angle())
    }

    pub fn contains(&self, z: Vec2) -> bool {
        self.gauge(z) <= 1.0
    }

    pub fn support(&self, u: f64) -> f64 {
        self.curve.support(u)
    }

    /// Radius of curvature at the boundary point with outer normal `u`.
    pub fn curvature_radius_at_normal(&self, u: f64) -> f64 {
        1.0 / self.curve.curvature(self.curve.param_at_normal(u))
    }

    pub fn cap_area(&self, chord: ChordParams) -> f64 {
        self.curve.cap_area(chord.s, chord.t)
    }

    /// Solve `Θ(t) − Θ(s) = d` on the arc turning by at most `π`.
    pub fn chord_params(&self, d: Vec2) -> Result<ChordParams> {
        self.chord_params_seeded(d, None)
    }

    /// As [`chord_params`](Self::chord_params), starting Newton's method from
    /// `seed` when given.
    pub fn chord_params_seeded(&self, d: Vec2, seed: Option<ChordParams>) -> Result<ChordParams> {
        let c = d.norm();
        if c == 0.0 {
            return Err(Error::Precondition("chord of coincident points".into()));
        }
        let l = self.length();
        let u = d.angle();
        let limit = 2.0 * self.radius_in_direction(u);
        if c > limit * (1.0 + 1e-12) {
            return Err(Error::WholePlane { length: c, limit });
        }
        if c >= limit * (1.0 - 1e-12) {
            let t = self.param_at_polar(u);
            let s = wrap_period(t - 0.5 * l, l);
            return Ok(ChordParams { s, t: s + 0.5 * l });
        }
        let mid = self.curve.param_at_angle(u);
        if let Some(r) = self.curve.circle_radius() {
            let half = r * (0.5 * c / r).asin();
            let s = wrap_period(mid - half, l);
            return Ok(ChordParams { s, t: s + 2.0 * half });
        }
        let start = match seed {
            Some(sd) => {
                let s = mid + wrap_pi_period(sd.s - mid, l);
                ChordParams { s, t: s + (sd.t - sd.s) }
            }
            None => {
                let r = 1.0 / self.curve.curvature(mid);
                let half = r * (0.5 * c / r).min(1.0).asin();
                ChordParams { s: mid - half, t: mid + half }
            }
        };
        let sol = match self.newton_chord(d, start, mid) {
            Some(sol) => sol,
            None => {
                let rough = self.bisect_chord(d, mid);
                self.newton_chord(d, rough, mid).unwrap_or(rough)
            }
        };
        let s = wrap_period(sol.s, l);
        Ok(ChordParams { s, t: s + (sol.t - sol.s) })
    }

    fn newton_chord(&self, d: Vec2, start: ChordParams, mid: f64) -> Option<ChordParams> {
        let l = self.length();
        let scale = d.norm().max(1e-3 * l);
        let residual = |p: &ChordParams| (self.curve.displacement(p.s, p.t) - d).norm();
        let mut cur = start;
        let mut res = residual(&cur);
        for _ in 0..50 {
            if res <= 1e-14 * scale {
                return Some(cur);
            }
            let f = self.curve.displacement(cur.s, cur.t) - d;
            let ts = self.curve.tangent(cur.s);
            let tt = self.curve.tangent(cur.t);
            // columns -T(s), T(t)
            let det = (-ts).cross(tt);
            if det.abs() < 1e-300 {
                return None;
            }
            let ds = -(f.cross(tt)) / det;
            let dt = -((-ts).cross(f)) / det;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial = ChordParams { s: cur.s + lambda * ds, t: cur.t + lambda * dt };
                let ok = trial.s <= mid && trial.t >= mid && trial.t - trial.s <= 0.5 * l;
                if ok {
                    let r = residual(&trial);
                    if r < res || r <= 1e-14 * scale {
                        cur = trial;
                        res = r;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                return (res <= 1e-12 * scale).then_some(cur);
            }
        }
        (res <= 1e-12 * scale).then_some(cur)
    }

    /// Chord of direction `d` at the level where its length matches, found by
    /// nested bisection. Slow and robust.
    fn bisect_chord(&self, d: Vec2, mid: f64) -> ChordParams {
        let l = self.length();
        let dir = d / d.norm();
        let level = |s: f64| dir.cross(self.curve.point(s));
        let partner = |s: f64| {
            let target = level(s);
            let (mut lo, mut hi) = (mid, mid + 0.5 * l);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if level(m) < target {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            0.5 * (lo + hi)
        };
        let (mut lo, mut hi) = (mid - 0.5 * l, mid);
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            let t = partner(m);
            if self.curve.displacement(m, t).norm() > d.norm() {
                lo = m;
            } else {
                hi = m;
            }
        }
        let s = 0.5 * (lo + hi);
        ChordParams { s, t: partner(s) }
    }
}

/// Representative of `x` modulo `period` in `[-period/2, period/2)`.
fn wrap_pi_period(x: f64, period: f64) -> f64 {
    wrap_period(x + 0.5 * period, period) - 0.5 * period
}
