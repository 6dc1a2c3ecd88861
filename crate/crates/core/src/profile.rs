//! Periodic curvature functions of arclength.
//!
//! A profile is stored as a periodic piecewise polynomial of degree at most
//! four. Sampled data is turned into a periodic cubic spline; analytic
//! profiles (constants, parabolic caps, polynomial corrections) are stored
//! exactly.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Polynomial `c[0] + c[1] t + ... + c[4] t^4` in a local variable `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Poly(pub [f64; 5]);

impl Poly {
    pub const fn constant(c: f64) -> Self {
        Poly([c, 0.0, 0.0, 0.0, 0.0])
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let c = &self.0;
        (((c[4] * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0]
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        let c = &self.0;
        ((4.0 * c[4] * t + 3.0 * c[3]) * t + 2.0 * c[2]) * t + c[1]
    }

    /// `∫₀ᵗ p`.
    #[inline]
    pub fn integral(&self, t: f64) -> f64 {
        let c = &self.0;
        ((((c[4] / 5.0 * t + c[3] / 4.0) * t + c[2] / 3.0) * t + c[1] / 2.0) * t + c[0]) * t
    }

    /// The polynomial `t ↦ p(t + d)`.
    pub fn shifted(&self, d: f64) -> Poly {
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut out = [0.0; 5];
        for (k, &ck) in self.0.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate().take(k + 1) {
                *o += ck * BINOM[k][j] * d.powi((k - j) as i32);
            }
        }
        Poly(out)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        Poly(c)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly(self.0.map(|c| c * k))
    }

    /// Product of two polynomials, which must fit in degree four.
    pub fn mul(&self, o: &Poly) -> Poly {
        let mut c = [0.0; 5];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in o.0.iter().enumerate() {
                if a == 0.0 || b == 0.0 {
                    continue;
                }
                assert!(i + j < 5, "polynomial degree overflow");
                c[i + j] += a * b;
            }
        }
        Poly(c)
    }

    fn is_constant(&self) -> bool {
        self.0[1..].iter().all(|&c| c == 0.0)
    }
}

/// Periodic curvature `κ(s)` on `[0, L)`.
#[derive(Clone, Debug)]
pub struct CurvatureProfile {
    length: f64,
    starts: Vec<f64>,
    polys: Vec<Poly>,
    /// `cum[i] = ∫₀^{starts[i]} κ`, with one trailing entry for the whole period.
    cum: Vec<f64>,
}

impl CurvatureProfile {
    /// Pieces `(start, poly)` sorted by start, first start 0, each poly in the
    /// local variable `s - start`.
    pub fn from_pieces(length: f64, pieces: Vec<(f64, Poly)>) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidProfile(format!("length {length} is not positive")));
        }
        if pieces.is_empty() || pieces[0].0 != 0.0 {
            return Err(Error::InvalidProfile("first piece must start at 0".into()));
        }
        for w in pieces.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidProfile("piece starts must increase".into()));
            }
        }
        if pieces.last().unwrap().0 >= length {
            return Err(Error::InvalidProfile("piece starts beyond the period".into()));
        }
        let (starts, polys): (Vec<f64>, Vec<Poly>) = pieces.into_iter().unzip();
        let mut cum = Vec::with_capacity(starts.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 0..starts.len() {
            let end = starts.get(i + 1).copied().unwrap_or(length);
            acc += polys[i].integral(end - starts[i]);
            cum.push(acc);
        }
        let profile = CurvatureProfile { length, starts, polys, cum };
        profile.validate()?;
        Ok(profile)
    }

    pub fn constant(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidProfile(format!("curvature {kappa} is not positive")));
        }
        Self::from_pieces(TAU / kappa, vec![(0.0, Poly::constant(kappa))])
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::constant(1.0 / radius)
    }

    /// Periodic cubic spline through curvature samples on the uniform grid
    /// `s_k = k L / n`.
    pub fn from_samples(length: f64, kappa: &[f64]) -> Result<Self> {
        let n = kappa.len();
        if n < 3 {
            return Err(Error::InvalidProfile(format!("need at least 3 samples, got {n}")));
        }
        if let Some(k) = kappa.iter().position(|&k| !(k > 0.0)) {
            return Err(Error::InvalidProfile(format!("sample {k} has curvature {}", kappa[k])));
        }
        let h = length / n as f64;
        let rhs: Vec<f64> = (0..n)
            .map(|i| 6.0 * (kappa[(i + 1) % n] - 2.0 * kappa[i] + kappa[(i + n - 1) % n]) / (h * h))
            .collect();
        let m = solve_cyclic_141(&rhs);
        let pieces = (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                let c0 = kappa[i];
                let c1 = (kappa[j] - kappa[i]) / h - h * (2.0 * m[i] + m[j]) / 6.0;
                let c2 = 0.5 * m[i];
                let c3 = (m[j] - m[i]) / (6.0 * h);
                (i as f64 * h, Poly([c0, c1, c2, c3, 0.0]))
            })
            .collect();
        Self::from_pieces(length, pieces)
    }

    /// Curvature profile of the smooth disk whose radius of curvature at outer
    /// normal `u` is `radius(u)`, sampled at `n` points. Arclength zero sits at
    /// outer normal `π/2`.
    pub fn from_curvature_radius<F: Fn(f64) -> f64>(radius: F, n: usize) -> Result<Self> {
        use std::f64::consts::FRAC_PI_2;
        let panels = 512;
        let length = gauss_legendre(&radius, 0.0, TAU, panels);
        let h = length / n as f64;
        let mut u = FRAC_PI_2;
        let mut s_at_u = 0.0;
        let mut kappa = Vec::with_capacity(n);
        for k in 0..n {
            let target = k as f64 * h;
            // Newton on s(u) = target, carrying the integral forward.
            for _ in 0..50 {
                let r = radius(u);
                let step = (target - s_at_u) / r;
                if step.abs() < 1e-15 {
                    break;
                }
                let next = u + step;
                s_at_u += gauss_legendre(&radius, u, next, 1);
                u = next;
            }
            kappa.push(1.0 / radius(u));
        }
        Self::from_samples(length, &kappa)
    }

    fn validate(&self) -> Result<()> {
        for (i, p) in self.polys.iter().enumerate() {
            let w = self.piece_end(i) - self.starts[i];
            let steps = if p.is_constant() { 1 } else { 16 };
            for k in 0..=steps {
                let v = p.eval(w * k as f64 / steps as f64);
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::InvalidProfile(format!(
                        "curvature {v:.6e} at s = {:.9} is not positive",
                        self.starts[i] + w * k as f64 / steps as f64
                    )));
                }
            }
        }
        let total = self.total_turning();
        if (total - TAU).abs() > 1e-9 {
            return Err(Error::InvalidProfile(format!(
                "total curvature {total:.12} differs from 2π by {:.3e}",
                total - TAU
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn piece_count(&self) -> usize {
        self.polys.len()
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, &Poly)> + '_ {
        (0..self.polys.len()).map(move |i| (self.starts[i], self.piece_end(i), &self.polys[i]))
    }

    /// `∫₀ᴸ κ`.
    #[inline]
    pub fn total_turning(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn is_constant(&self) -> Option<f64> {
        (self.polys.len() == 1 && self.polys[0].is_constant()).then(|| self.polys[0].0[0])
    }

    #[inline]
    fn piece_end(&self, i: usize) -> f64 {
        self.starts.get(i + 1).copied().unwrap_or(self.length)
    }

    #[inline]
    fn wrap(&self, s: f64) -> f64 {
        crate::geom::wrap_period(s, self.length)
    }

    /// Index of the piece containing `s ∈ [0, L)`.
    #[inline]
    pub fn piece_index(&self, s: f64) -> usize {
        self.starts.partition_point(|&b| b <= s).saturating_sub(1)
    }

    #[inline]
    pub fn kappa(&self, s: f64) -> f64 {
        let s = self.wrap(s);
        let i = self.piece_index(s);
        self.polys[i].eval(s - self.starts[i])
    }

    pub fn kappa_derivative(&self, s: f64) -> f64 {
        let s = self.wrap(s);
        let i = self.piece_index(s);
        self.polys[i].derivative(s - self.starts[i])
    }

    /// `∫₀ˢ κ` for any real `s`, continued periodically.
    #[inline]
    pub fn cumulative(&self, s: f64) -> f64 {
        let mut turns = (s / self.length).floor();
        let mut r = s - turns * self.length;
        if r >= self.length {
            r = 0.0;
            turns += 1.0;
        }
        let r = r.max(0.0);
        let i = self.piece_index(r);
        turns * self.total_turning() + self.cum[i] + self.polys[i].integral(r - self.starts[i])
    }

    /// `∫ₐᵇ κ` for real `a ≤ b` or `a > b` (signed).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.cumulative(b) - self.cumulative(a)
    }

    /// The arclength in `[0, L)` at which `∫₀ˢ κ` equals `value` modulo the
    /// total turning.
    pub fn inverse_cumulative(&self, value: f64) -> f64 {
        let total = self.total_turning();
        let v = value.rem_euclid(total);
        let i = (self.cum.partition_point(|&c| c <= v)).saturating_sub(1).min(self.polys.len() - 1);
        let p = &self.polys[i];
        let target = v - self.cum[i];
        let w = self.piece_end(i) - self.starts[i];
        if p.is_constant() {
            return self.wrap(self.starts[i] + (target / p.0[0]).clamp(0.0, w));
        }
        let (mut lo, mut hi) = (0.0, w);
        let mut t = (target / p.eval(0.0)).clamp(lo, hi);
        for _ in 0..100 {
            let f = p.integral(t) - target;
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = p.eval(t);
            let mut next = t - f / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - t).abs() <= 1e-16 * w.max(1.0);
            t = next;
            if done {
                break;
            }
        }
        self.wrap(self.starts[i] + t)
    }

    /// Calls `f(lo, hi)` on consecutive subintervals of `[a, b]` (with
    /// `a ≤ b`, any real values) that each lie inside one polynomial piece of
    /// the periodic extension.
    pub fn for_each_smooth_span<F: FnMut(f64, f64)>(&self, a: f64, b: f64, mut f: F) {
        if b <= a {
            return;
        }
        let period = self.length;
        let mut turns = (a / period).floor();
        let mut lo = a;
        let mut i = self.piece_index((a - turns * period).clamp(0.0, period));
        loop {
            let end = turns * period + self.piece_end(i);
            let hi = end.min(b);
            if hi > lo {
                f(lo, hi);
            }
            if end >= b {
                break;
            }
            lo = end;
            i += 1;
            if i == self.polys.len() {
                i = 0;
                turns += 1.0;
            }
        }
    }

    /// True when `κ(s + L/2) = κ(s)` up to `rel_tol` on a dense sample.
    pub fn is_half_period_symmetric(&self, rel_tol: f64) -> bool {
        let n = 4096;
        let half = 0.5 * self.length;
        (0..n).all(|k| {
            let s = (k as f64 + 0.37) * half / n as f64;
            let (a, b) = (self.kappa(s), self.kappa(s + half));
            (a - b).abs() <= rel_tol * a.abs().max(b.abs())
        })
    }

    /// `n` uniform samples `(s, κ(s))`.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        let h = self.length / n as f64;
        (0..n)
            .map(|k| {
                let s = k as f64 * h;
                (s, self.kappa(s))
            })
            .collect()
    }

    /// A copy with `[a, b] ⊆ [0, L]` replaced by `poly` (local variable `s - a`).
    pub fn spliced(&self, a: f64, b: f64, poly: Poly) -> Result<Self> {
        self.spliced_many(&[(a, b, poly)])
    }

    /// Replace several disjoint windows `[a, b] ⊆ [0, L]` at once, each by a
    /// polynomial in `s − a`. The result is validated only as a whole.
    pub fn spliced_many(&self, windows: &[(f64, f64, Poly)]) -> Result<Self> {
        let mut w: Vec<(f64, f64, Poly)> = windows.to_vec();
        w.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (k, &(a, b, _)) in w.iter().enumerate() {
            let next_ok = w.get(k + 1).is_none_or(|n| n.0 >= b);
            if !(0.0 <= a && a < b && b <= self.length) || !next_ok {
                return Err(Error::InvalidProfile(format!("splice window [{a}, {b}] is invalid")));
            }
        }
        let mut pieces: Vec<(f64, Poly)> = w.iter().map(|&(a, _, p)| (a, p)).collect();
        for i in 0..self.polys.len() {
            let (s0, s1) = (self.starts[i], self.piece_end(i));
            // uncovered parts of [s0, s1)
            let mut cur = s0;
            for &(a, b, _) in &w {
                if b <= cur || a >= s1 {
                    continue;
                }
                if a > cur {
                    pieces.push((cur, self.polys[i].shifted(cur - s0)));
                }
                cur = cur.max(b);
            }
            if cur < s1 {
                pieces.push((cur, self.polys[i].shifted(cur - s0)));
            }
        }
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
        Self::from_pieces(self.length, pieces)
    }
}

/// Solves the periodic system `m[i-1] + 4 m[i] + m[i+1] = r[i]`.
fn solve_cyclic_141(r: &[f64]) -> Vec<f64> {
    let n = r.len();
    // Sherman–Morrison with corner entries equal to 1.
    let gamma = -4.0;
    let mut diag = vec![4.0; n];
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    let thomas = |rhs: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = 1.0 / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..n {
            let m = diag[i] - c[i - 1];
            c[i] = 1.0 / m;
            d[i] = (rhs[i] - d[i - 1]) / m;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    };
    let x = thomas(r);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = 1.0;
    let z = thomas(&u);
    let fact = (x[0] + x[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
    x.iter().zip(z.iter()).map(|(a, b)| a - fact * b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclic_solver_matches_dense_product() {
        let r: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).sin()).collect();
        let m = solve_cyclic_141(&r);
        let n = r.len();
        for i in 0..n {
            let lhs = m[(i + n - 1) % n] + 4.0 * m[i] + m[(i + 1) % n];
            assert!((lhs - r[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn circle_profile() {
        let p = CurvatureProfile::circle(2.0).unwrap();
        assert!((p.length() - 4.0 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(p.kappa(1.3), 0.5);
        assert!((p.cumulative(p.length() * 2.5) - 5.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_and_wrong_total() {
        assert!(CurvatureProfile::constant(0.0).is_err());
        assert!(CurvatureProfile::from_pieces(6.0, vec![(0.0, Poly::constant(1.0))]).is_err());
        let bad = CurvatureProfile::from_pieces(
            TAU,
            vec![(0.0, Poly::constant(1.0)), (1.0, Poly([1.0, -2.0, 0.0, 0.0, 0.0]))],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn spline_reproduces_smooth_profile() {
        let kappa = |s: f64| 1.0 + 0.2 * s.cos();
        let n = 512;
        let samples: Vec<f64> = (0..n).map(|k| kappa(TAU * k as f64 / n as f64)).collect();
        let p = CurvatureProfile::from_samples(TAU, &samples).unwrap();
        for k in 0..1000 {
            let s = 0.0063 * k as f64;
            assert!((p.kappa(s) - kappa(s)).abs() < 1e-9, "s = {s}");
        }
    }

    #[test]
    fn curvature_radius_profile_turns_once() {
        let p = CurvatureProfile::from_curvature_radius(|u| 1.0 + 0.3 * (2.0 * u).cos(), 1024).unwrap();
        assert!((p.length() - TAU).abs() < 1e-12);
        // arclength zero sits at normal π/2, where R = 0.7
        assert!((p.kappa(0.0) - 1.0 / 0.7).abs() < 1e-10);
        assert!(p.is_half_period_symmetric(1e-9));
    }

    #[test]
    fn splice_replaces_window() {
        let base = CurvatureProfile::constant(1.0).unwrap();
        let bump = Poly([1.0, 0.0, 0.0, 0.0, 0.0]);
        let p = base.spliced(0.5, 1.0, bump).unwrap();
        assert_eq!(p.piece_count(), 3);
        let p = base.spliced(0.0, 1.0, bump).unwrap();
        assert_eq!(p.piece_count(), 2);
        let p = base.spliced(5.0, TAU, bump).unwrap();
        assert_eq!(p.piece_count(), 2);
        assert_eq!(p.kappa(5.5), 1.0);
    }

    #[test]
    fn smooth_spans_cover_interval() {
        let base = CurvatureProfile::constant(1.0).unwrap();
        let p = base.spliced(1.0, 2.0, Poly::constant(1.0)).unwrap();
        let mut spans = Vec::new();
        p.for_each_smooth_span(-1.0, 8.0, |a, b| spans.push((a, b)));
        let total: f64 = spans.iter().map(|(a, b)| b - a).sum();
        assert!((total - 9.0).abs() < 1e-12);
        assert!(spans.windows(2).all(|w| w[0].1 == w[1].0));
        assert_eq!(spans.len(), 6);
    }

    proptest! {
        #[test]
        fn shift_matches_evaluation(c in prop::array::uniform5(-3.0f64..3.0), d in -2.0f64..2.0, t in -2.0f64..2.0) {
            let p = Poly(c);
            let q = p.shifted(d);
            prop_assert!((q.eval(t) - p.eval(t + d)).abs() < 1e-9 * (1.0 + p.eval(t + d).abs()));
        }

        #[test]
        fn inverse_cumulative_roundtrip(frac in 0.0f64..1.0) {
            let p = CurvatureProfile::from_curvature_radius(|u| 1.0 + 0.3 * (2.0 * u).cos(), 256).unwrap();
            let s = frac * p.length();
            let back = p.inverse_cumulative(p.cumulative(s));
            let gap = (back - s).abs().min(p.length() - (back - s).abs());
            prop_assert!(gap < 1e-11);
        }
    }
}
