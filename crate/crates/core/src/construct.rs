//! Disks whose curvature is locally parabolic, `κ(s) = κ₀ − λs²`, and the
//! four-point violations they produce once `λ > 9κ₀³/2`.
//!
//! The parabola sits on `[−s₀, s₀]` around the apex `Θ(0)`. On `[s₀, δ]` and
//! `[−δ, −s₀]` a quartic correction restores the tangent angle and position of
//! the base curve at `±δ`, so outside the window the disk is unchanged. The
//! same pieces are placed at the antipode, keeping the disk o-symmetric.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::boundary_curve::{BoundaryCurve, SymmetricDisk};
use crate::dowker_lab::{quadrangle_check, QuadrangleCase};
use crate::error::{Error, Result};
use crate::profile::{CurvatureProfile, Poly};
use crate::quadrature::gauss8;
use crate::spindle_geom::{intersect_translates, CPolygon};
use crate::variation::{angle_frame, mixed_partial_a, AngleFrame};

/// Parameters of the construction.
#[derive(Clone, Debug)]
pub struct CounterexampleSpec {
    pub kappa0: f64,
    pub lambda: f64,
    /// Half-width of the parabolic piece.
    pub s0: f64,
    /// Half-width of the whole modified window.
    pub delta: f64,
    /// Budget for `sup |κ − κ_base|`.
    pub epsilon: f64,
    pub base: SymmetricDisk,
    /// Accept `λ ≤ 9κ₀³/2`, for runs that should not violate.
    pub control: bool,
}

impl CounterexampleSpec {
    /// `κ₀ = 1`, `λ = 5`, `s₀ = 0.05`, `δ = 0.2`, `ε = 0.05` over the unit disk.
    pub fn standard() -> Self {
        CounterexampleSpec {
            kappa0: 1.0,
            lambda: 5.0,
            s0: 0.05,
            delta: 0.2,
            epsilon: 0.05,
            base: SymmetricDisk::unit_circle(),
            control: false,
        }
    }

    pub fn threshold(&self) -> f64 {
        4.5 * self.kappa0.powi(3)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        if !(self.kappa0 > 0.0) {
            return bad(format!("κ₀ = {} must be positive", self.kappa0));
        }
        if !(self.lambda >= 0.0) {
            return bad(format!("λ = {} must be nonnegative", self.lambda));
        }
        if !self.control && self.lambda <= self.threshold() {
            return bad(format!("λ = {} does not exceed 9κ₀³/2 = {}; set control to build anyway", self.lambda, self.threshold()));
        }
        let apex_edge = self.kappa0 - self.lambda * self.s0 * self.s0;
        if !(apex_edge > 0.0) {
            return bad(format!("κ₀ − λs₀² = {apex_edge} is not positive"));
        }
        if !(0.0 < self.s0 && self.s0 < self.delta && self.delta < 0.25 * self.base.length()) {
            return bad(format!("need 0 < s₀ < δ < L/4, got s₀ = {}, δ = {}", self.s0, self.delta));
        }
        let base = self.base.curve().profile();
        let k0 = base.kappa(0.0);
        let h = 1e-3 * self.delta;
        let slope = base.kappa_derivative(0.0);
        if slope.abs() > 1e-9 * k0.max(1.0) || base.kappa(h) > k0 + 1e-12 || base.kappa(-h) > k0 + 1e-12 {
            return bad("base curvature has no local maximum at s = 0".into());
        }
        if !(self.epsilon > 0.0) {
            return bad("ε must be positive".into());
        }
        Ok(())
    }
}

/// Outcome of the three-moment solve on one side of the apex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SideSolve {
    pub coefficients: [f64; 3],
    /// `[Δ∫κ, Δ∫cos φ, Δ∫sin φ]` at the junction.
    pub residuals: [f64; 3],
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildReport {
    pub right: SideSolve,
    pub left: SideSolve,
    /// `sup_s |κ(s) − κ_base(s)|`.
    pub max_deviation: f64,
    /// Position and tangent mismatch of the built curve against the base at
    /// `±δ`.
    pub junction_position: f64,
    pub junction_angle: f64,
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub disk: SymmetricDisk,
    pub report: BuildReport,
}

/// The three basis bumps on `[0, w]`, as polynomials in `x`:
/// `u(1 − u)u^{j}` with `u = x / w`.
fn bumps(w: f64) -> [Poly; 3] {
    let scale = |c: [f64; 5]| {
        let mut out = c;
        for (k, o) in out.iter_mut().enumerate() {
            *o /= w.powi(k as i32);
        }
        Poly(out)
    };
    [
        scale([0.0, 1.0, -1.0, 0.0, 0.0]),
        scale([0.0, 0.0, 1.0, -1.0, 0.0]),
        scale([0.0, 0.0, 0.0, 1.0, -1.0]),
    ]
}

/// Gauss–Legendre nodes and weights over `[a, b]` split into `panels`.
fn nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    (0..panels).flat_map(|i| gauss8(a + i as f64 * h, a + (i + 1) as f64 * h)).collect()
}

/// Solve for the correction on one side. In the side's outward coordinate
/// `t ∈ [0, δ]` the curvature is `κ₀ − λt²` up to `s₀`, then
/// `lin + Σ aⱼ bumpⱼ`. The base is described by its curvature `kb(t)` and
/// turning `phib(t) = ∫₀ᵗ kb`.
fn solve_side<K: Fn(f64) -> f64, F: Fn(f64) -> f64>(spec: &CounterexampleSpec, kb: K, phib: F) -> Result<(SideSolve, Poly)> {
    let (s0, delta) = (spec.s0, spec.delta);
    let w = delta - s0;
    let parab = Poly([spec.kappa0, 0.0, -spec.lambda, 0.0, 0.0]);
    let k_start = parab.eval(s0);
    let lin = Poly([k_start, (kb(delta) - k_start) / w, 0.0, 0.0, 0.0]);
    let b = bumps(w);

    // base targets
    let mut target = [phib(delta), 0.0, 0.0];
    for (t, wt) in nodes(0.0, delta, 64) {
        let p = phib(t);
        target[1] += wt * p.cos();
        target[2] += wt * p.sin();
    }
    // fixed parabolic part
    let phi_s0 = parab.integral(s0);
    let mut fixed = [0.0, 0.0];
    for (t, wt) in nodes(0.0, s0, 16) {
        let p = parab.integral(t);
        fixed[0] += wt * p.cos();
        fixed[1] += wt * p.sin();
    }
    let corr = nodes(0.0, w, 48);

    let eval = |a: &[f64; 3]| -> ([f64; 3], [[f64; 3]; 3]) {
        let phi = |x: f64| phi_s0 + lin.integral(x) + a[0] * b[0].integral(x) + a[1] * b[1].integral(x) + a[2] * b[2].integral(x);
        let mut f = [phi(w) - target[0], fixed[0] - target[1], fixed[1] - target[2]];
        let mut j = [[0.0; 3]; 3];
        for k in 0..3 {
            j[0][k] = b[k].integral(w);
        }
        for &(x, wt) in &corr {
            let (sn, cs) = phi(x).sin_cos();
            f[1] += wt * cs;
            f[2] += wt * sn;
            for k in 0..3 {
                let bk = b[k].integral(x);
                j[1][k] -= wt * sn * bk;
                j[2][k] += wt * cs * bk;
            }
        }
        (f, j)
    };

    let norm = |f: &[f64; 3]| f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut a = [0.0; 3];
    let (mut f, mut j) = eval(&a);
    let mut trace = vec![norm(&f)];
    let mut iterations = 0;
    while norm(&f) > 1e-15 && iterations < 50 {
        iterations += 1;
        let step = solve3(&j, &f).ok_or(Error::Singular(0.0))?;
        let mut damp = 1.0;
        loop {
            let cand = [a[0] - damp * step[0], a[1] - damp * step[1], a[2] - damp * step[2]];
            let (fc, jc) = eval(&cand);
            if norm(&fc) < norm(&f) || damp < 1e-6 {
                a = cand;
                f = fc;
                j = jc;
                break;
            }
            damp *= 0.5;
        }
        trace.push(norm(&f));
        if trace.len() > 3 && trace[trace.len() - 1] >= trace[trace.len() - 2] {
            break;
        }
    }
    if norm(&f) > 1e-12 {
        return Err(Error::NoConvergence { what: "junction moment solve", iterations, residual: norm(&f), trace });
    }
    let poly = lin.add(&b[0].scale(a[0])).add(&b[1].scale(a[1])).add(&b[2].scale(a[2]));
    Ok((SideSolve { coefficients: a, residuals: f, iterations }, poly))
}

fn solve3(j: &[[f64; 3]; 3], f: &[f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(j);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut m = *j;
        for r in 0..3 {
            m[r][c] = f[r];
        }
        *o = det(&m) / d;
    }
    Some(out)
}

/// `p(−z)`.
fn reflected(p: &Poly) -> Poly {
    let c = p.0;
    Poly([c[0], -c[1], c[2], -c[3], c[4]])
}

pub fn build_counterexample_disk(spec: &CounterexampleSpec) -> Result<Counterexample> {
    spec.validate()?;
    let base = spec.base.curve().profile();
    let l = base.length();
    let (s0, delta) = (spec.s0, spec.delta);
    let w = delta - s0;

    let (right, right_poly) = solve_side(spec, |t| base.kappa(t), |t| base.cumulative(t))?;
    let (left, left_out) = solve_side(spec, |t| base.kappa(-t), |t| -base.cumulative(-t))?;
    // on [−δ, −s₀] in the local coordinate y = s + δ, the outward coordinate is w − y
    let left_poly = reflected(&left_out).shifted(-w);
    let parab = Poly([spec.kappa0, 0.0, -spec.lambda, 0.0, 0.0]);
    let parab_left = parab.shifted(-s0);

    let mut windows = Vec::with_capacity(8);
    for centre in [0.0, 0.5 * l] {
        windows.push((centre, centre + s0, parab));
        windows.push((centre + s0, centre + delta, right_poly));
        let c2 = if centre == 0.0 { l } else { centre };
        windows.push((c2 - delta, c2 - s0, left_poly));
        windows.push((c2 - s0, c2, parab_left));
    }
    let profile = base.spliced_many(&windows).map_err(|e| match e {
        Error::InvalidProfile(m) => Error::Construction(format!("modified profile rejected: {m}")),
        e => e,
    })?;

    let mut max_deviation: f64 = 0.0;
    let samples = 4000;
    for k in 0..=samples {
        let t = -delta + 2.0 * delta * k as f64 / samples as f64;
        max_deviation = max_deviation.max((profile.kappa(t) - base.kappa(t)).abs());
    }
    if max_deviation > spec.epsilon {
        return Err(Error::Construction(format!(
            "curvature deviation {max_deviation:.6e} exceeds the budget ε = {}",
            spec.epsilon
        )));
    }

    let curve = BoundaryCurve::with_knots(profile, spec.base.curve().knots())?;
    let disk = SymmetricDisk::new(curve)?;
    let (c, b) = (disk.curve(), spec.base.curve());
    let mut junction_position: f64 = 0.0;
    let mut junction_angle: f64 = 0.0;
    for t in [delta, -delta, 0.5 * l + delta, 0.5 * l - delta] {
        // compare shapes, not placements: positions relative to the apex
        let rel = |cv: &BoundaryCurve| cv.point(t) - cv.point(0.0);
        junction_position = junction_position.max((rel(c) - rel(b)).norm());
        junction_angle = junction_angle.max((c.tangent_angle(t) - b.tangent_angle(t)).abs());
    }
    Ok(Counterexample { disk, report: BuildReport { right, left, max_deviation, junction_position, junction_angle } })
}

/// `2s̄ − (κ₀²/3)s̄³ + κ₀(8λ + κ₀³)s̄⁵/60`, the chord `‖Θ(s̄) − Θ(−s̄)‖`.
pub fn chord_length_expansion(kappa0: f64, lambda: f64, s_bar: f64) -> f64 {
    2.0 * s_bar + chord_deficit_expansion(kappa0, lambda, s_bar)
}

/// The same expansion minus `2s̄`.
pub fn chord_deficit_expansion(kappa0: f64, lambda: f64, s_bar: f64) -> f64 {
    -kappa0 * kappa0 / 3.0 * s_bar.powi(3) + kappa0 * (8.0 * lambda + kappa0.powi(3)) / 60.0 * s_bar.powi(5)
}

/// `4κ₀(9κ₀³ − 2λ)/3`.
pub fn asymptotic_coefficient(kappa0: f64, lambda: f64) -> f64 {
    4.0 * kappa0 * (9.0 * kappa0.powi(3) - 2.0 * lambda) / 3.0
}

/// The C-2-gon through `p = Θ(−s̄)` and `q = Θ(s̄)` with tangent angles
/// `γ_p = π/2 + κ₀s̄` and `γ_q = 3π/2 − κ₀s̄`, and the parameters of `p`, `q`.
pub fn witness_body(disk: &SymmetricDisk, kappa0: f64, s_bar: f64) -> Result<(CPolygon, f64, f64)> {
    let c = disk.curve();
    let (p, q) = (c.point(-s_bar), c.point(s_bar));
    let (gp, gq) = (FRAC_PI_2 + kappa0 * s_bar, 1.5 * PI - kappa0 * s_bar);
    let (up, uq) = (c.param_at_angle(gp), c.param_at_angle(gq));
    let (x1, x2) = (p - c.point(up), q - c.point(uq));
    let k = intersect_translates(disk, &[x1, x2])
        .map_err(|e| Error::Construction(format!("two-translate body for s̄ = {s_bar}: {e}")))?;
    let locate = |x: crate::geom::Vec2, u: f64, target: crate::geom::Vec2| -> Result<f64> {
        let i = k
            .arcs()
            .iter()
            .position(|a| (a.translate - x).norm() < 1e-12)
            .ok_or_else(|| Error::Construction(format!("translate {x:?} contributes no arc")))?;
        let s = k.param_on_arc(i, u);
        let hit = crate::body::Boundary::point(&k, s);
        if (hit - target).norm() > 1e-10 {
            return Err(Error::Construction(format!("prescribed point misses the body by {:.3e}", (hit - target).norm())));
        }
        Ok(s)
    };
    let sp = locate(x1, up, p)?;
    let sq = locate(x2, uq, q)?;
    Ok((k, sp, sq))
}

/// Half-width of the witness quadruple around `p` and `q`, relative to `s̄`.
/// The four-point sum is `≈ 4h²` times the mixed partial only while `h ≪ s̄`;
/// at `h = s̄/4` the sum is already positive.
pub const WITNESS_SPREAD: f64 = 0.01;

/// Results for one `s̄`.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationRow {
    pub s_bar: f64,
    pub frame: AngleFrame,
    /// `∂_s∂_tĀ` at `(s_p, s_q)`.
    pub analytic: f64,
    /// `analytic / s̄⁴`.
    pub ratio: f64,
    /// `sin³(θ_q − θ_p) · analytic / s̄⁴`.
    pub normalized_ratio: f64,
    /// `π − κ₀s̄ + λs̄³/3`.
    pub theta_p_predicted: f64,
    pub witness: QuadrangleCase,
    /// Witness margin recomputed at doubled curve resolution.
    pub fine_margin: f64,
    /// `|fine − coarse| / |coarse|`.
    pub margin_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationReport {
    pub kappa0: f64,
    pub lambda: f64,
    pub predicted: f64,
    pub rows: Vec<ViolationRow>,
    /// Some witness fails the four-point inequality.
    pub violation_found: bool,
}

pub fn verify_violation(disk: &SymmetricDisk, spec: &CounterexampleSpec, s_grid: &[f64]) -> Result<ViolationReport> {
    let fine_curve = BoundaryCurve::with_knots(disk.curve().profile().clone(), 2 * disk.curve().knots())?;
    let fine = SymmetricDisk::new(fine_curve)?;
    let mut rows = Vec::with_capacity(s_grid.len());
    for &s_bar in s_grid {
        if !(s_bar > 0.0 && s_bar <= spec.s0) {
            return Err(Error::Precondition(format!("s̄ = {s_bar} must lie in (0, s₀]")));
        }
        let (k, sp, sq) = witness_body(disk, spec.kappa0, s_bar)?;
        let frame = angle_frame(disk, &k, sp, sq)?;
        let analytic = mixed_partial_a(&frame)?;
        let s4 = s_bar.powi(4);
        let h = WITNESS_SPREAD * s_bar;
        let params = [sp - h, sp + h, sq - h, sq + h];
        let witness = quadrangle_check(&k, disk, params)?;
        let (kf, spf, sqf) = witness_body(&fine, spec.kappa0, s_bar)?;
        let fine_case = quadrangle_check(&kf, &fine, [spf - h, spf + h, sqf - h, sqf + h])?;
        let (m, mf) = (witness.margin(), fine_case.margin());
        rows.push(ViolationRow {
            s_bar,
            frame,
            analytic,
            ratio: analytic / s4,
            normalized_ratio: analytic * (frame.theta_q - frame.theta_p).sin().powi(3) / s4,
            theta_p_predicted: PI - spec.kappa0 * s_bar + spec.lambda * s_bar.powi(3) / 3.0,
            witness,
            fine_margin: mf,
            margin_drift: (mf - m).abs() / m.abs(),
        });
    }
    let violation_found = rows.iter().any(|r| !r.witness.holds);
    Ok(ViolationReport {
        kappa0: spec.kappa0,
        lambda: spec.lambda,
        predicted: asymptotic_coefficient(spec.kappa0, spec.lambda),
        rows,
        violation_found,
    })
}

/// The profile of a built disk against its base, for plots.
pub fn curvature_overlay(built: &SymmetricDisk, base: &SymmetricDisk, n: usize) -> Vec<(f64, f64, f64)> {
    let (p, q): (&CurvatureProfile, &CurvatureProfile) = (built.curve().profile(), base.curve().profile());
    (0..n)
        .map(|k| {
            let s = p.length() * k as f64 / n as f64;
            (s, p.kappa(s), q.kappa(s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::pm_distance_smooth;
    use std::sync::OnceLock;

    fn standard() -> &'static Counterexample {
        static C: OnceLock<Counterexample> = OnceLock::new();
        C.get_or_init(|| build_counterexample_disk(&CounterexampleSpec::standard()).unwrap())
    }

    #[test]
    fn coefficient_values() {
        assert!((asymptotic_coefficient(1.0, 5.0) + 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(asymptotic_coefficient(1.0, 4.5), 0.0);
        assert_eq!(asymptotic_coefficient(1.0, 0.0), 12.0);
    }

    #[test]
    fn circle_expansion_is_sine_series() {
        for s in [1e-3, 1e-2, 0.1f64] {
            let series = 2.0 * (s - s.powi(3) / 6.0 + s.powi(5) / 120.0);
            assert!((chord_length_expansion(1.0, 0.0, s) - series).abs() < 1e-15);
        }
    }

    #[test]
    fn standard_build_meets_its_constraints() {
        let c = standard();
        let r = &c.report;
        for v in r.right.residuals.iter().chain(r.left.residuals.iter()) {
            assert!(v.abs() <= 1e-9);
        }
        assert!(r.junction_position <= 1e-9 && r.junction_angle <= 1e-9, "{r:?}");
        assert!(r.max_deviation <= 0.05);
        let pm = pm_distance_smooth(&c.disk, &SymmetricDisk::unit_circle()).value.finite().unwrap();
        assert!(pm <= 0.05, "{pm}");
        let prof = c.disk.curve().profile();
        assert!((prof.kappa(0.03) - (1.0 - 5.0 * 0.0009)).abs() < 1e-14);
        assert!((prof.kappa(-0.03) - (1.0 - 5.0 * 0.0009)).abs() < 1e-14);
        assert!((prof.kappa(0.5 * prof.length() + 0.03) - (1.0 - 5.0 * 0.0009)).abs() < 1e-14);
    }

    #[test]
    fn zero_lambda_control_is_the_base_circle() {
        let spec = CounterexampleSpec { lambda: 0.0, control: true, ..CounterexampleSpec::standard() };
        let c = build_counterexample_disk(&spec).unwrap();
        assert_eq!(c.report.right.coefficients, [0.0; 3]);
        assert_eq!(c.report.max_deviation, 0.0);
        let prof = c.disk.curve().profile();
        for k in 0..100 {
            assert_eq!(prof.kappa(0.063 * k as f64), 1.0);
        }
    }

    #[test]
    fn spec_validation() {
        let s = CounterexampleSpec { lambda: 4.0, ..CounterexampleSpec::standard() };
        assert!(matches!(build_counterexample_disk(&s), Err(Error::Precondition(_))));
        let s = CounterexampleSpec { lambda: 500.0, ..CounterexampleSpec::standard() };
        assert!(build_counterexample_disk(&s).is_err());
        let s = CounterexampleSpec { epsilon: 1e-4, ..CounterexampleSpec::standard() };
        assert!(matches!(build_counterexample_disk(&s), Err(Error::Construction(_))));
    }

    #[test]
    fn built_disk_is_symmetric() {
        let c = standard().disk.curve();
        let l = c.length();
        for k in 0..50 {
            let s = l * k as f64 / 50.0;
            assert!((c.point(s + 0.5 * l) + c.point(s)).norm() <= 1e-8 * l);
        }
    }

    #[test]
    fn chord_matches_expansion() {
        let c = standard().disk.curve();
        for k in 0..=10 {
            let s = 1e-3 * 10f64.powf(k as f64 / 10.0);
            let numeric = c.chord_excess(-s, s);
            let predicted = chord_deficit_expansion(1.0, 5.0, s);
            assert!((numeric - predicted).abs() <= 10.0 * s.powi(7), "s = {s}: {numeric} vs {predicted}");
        }
        // dropping the λ term leaves an s̄⁵ error
        let s: f64 = 1e-2;
        let wrong = chord_deficit_expansion(1.0, 0.0, s);
        assert!((c.chord_excess(-s, s) - wrong).abs() > 100.0 * s.powi(7));
    }

    #[test]
    fn apex_frame_matches_prediction() {
        let spec = CounterexampleSpec::standard();
        let rep = verify_violation(&standard().disk, &spec, &[0.01]).unwrap();
        let row = &rep.rows[0];
        assert!(row.frame.alpha.abs() < 1e-9);
        assert!((row.frame.theta_p - row.theta_p_predicted).abs() < 1e-12, "{} vs {}", row.frame.theta_p, row.theta_p_predicted);
        assert!((row.frame.gamma_p - (FRAC_PI_2 + 0.01)).abs() < 1e-9);
        assert!(row.analytic < 0.0);
        assert!(!row.witness.holds);
        assert!(row.margin_drift < 0.05);
        let h = WITNESS_SPREAD * 0.01;
        assert!((row.witness.margin() / (4.0 * h * h) - row.analytic).abs() < 0.02 * row.analytic.abs());
        assert!((row.normalized_ratio - rep.predicted).abs() < 0.1 * rep.predicted.abs());
    }
}
