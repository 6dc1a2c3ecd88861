//! Derivatives of the cap-area function `A(s, t) = area(r_K(Γ(s), Γ(t)))`.
//!
//! For a chord `p = Γ(s̄)`, `q = Γ(t̄)` of `K`, the parameters `S̄`, `T̄` on
//! `bd(C)` solve `Θ(T̄) − Θ(S̄) = q − p`. The closed forms below are written in
//! terms of the angles of [`AngleFrame`].
//!
//! Sign convention: [`mixed_partial_a`] returns the mixed partial of the
//! complementary area `Ā = area(K) − A`. This is the quantity that is
//! nonnegative exactly when the four-point inequality holds locally.

use serde::Serialize;

use crate::body::Boundary;
use crate::boundary_curve::{ChordParams, SymmetricDisk};
use crate::error::{Error, Result};
use crate::geom::{lift_from, wrap_period, Vec2};
use crate::spindle_geom::region_area;

/// Slack allowed in the cyclic angle order before it is reported violated.
pub const ORDER_TOL: f64 = 1e-9;

/// Guard on `|sin(θ_q − θ_p)|`.
pub const SINGULAR_TOL: f64 = 1e-12;

/// The contact parameters of the C-arc joining `Γ(s)` to `Γ(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StSolution {
    pub s: f64,
    pub t: f64,
    #[serde(rename = "S")]
    pub big_s: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    /// Translate carrying the arc: `x = Γ(s) − Θ(S) = Γ(t) − Θ(T)`.
    pub x: Vec2,
    pub residual: f64,
}

impl StSolution {
    fn chord(&self) -> ChordParams {
        ChordParams { s: self.big_s, t: self.big_t }
    }
}

pub fn solve_st<B: Boundary + ?Sized>(disk: &SymmetricDisk, body: &B, s: f64, t: f64) -> Result<StSolution> {
    solve_st_seeded(disk, body, s, t, None)
}

/// As [`solve_st`], with Newton's method started from a nearby solution.
pub fn solve_st_seeded<B: Boundary + ?Sized>(
    disk: &SymmetricDisk,
    body: &B,
    s: f64,
    t: f64,
    seed: Option<&StSolution>,
) -> Result<StSolution> {
    let (p, q) = (body.point(s), body.point(t));
    let d = q - p;
    let ch = disk.chord_params_seeded(d, seed.map(|z| z.chord()))?;
    let c = disk.curve();
    let (ts, tt) = (c.point(ch.s), c.point(ch.t));
    let residual = (tt - ts - d).norm();
    let x = p - ts;
    let x_alt = q - tt;
    let residual = residual.max((x - x_alt).norm());
    if residual > 1e-12 * (1.0 + d.norm()) {
        return Err(Error::NoConvergence { what: "solve_st", iterations: 0, residual, trace: vec![residual] });
    }
    Ok(StSolution { s, t, big_s: ch.s, big_t: ch.t, x, residual })
}

/// Angles and curvatures feeding every closed-form derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleFrame {
    /// Direction of `p − q`.
    pub alpha: f64,
    pub theta_p: f64,
    pub theta_q: f64,
    pub gamma_p: f64,
    pub gamma_q: f64,
    pub kappa_p: f64,
    pub kappa_q: f64,
    pub chord: f64,
}

impl AngleFrame {
    /// Lift raw angles into the cyclic order
    /// `α, θ_q − π, γ_p, θ_p, α + π, θ_q, γ_q, θ_p + π, α + 2π`
    /// and validate it.
    pub fn from_raw(
        alpha: f64,
        theta_p: f64,
        theta_q: f64,
        gamma_p: f64,
        gamma_q: f64,
        kappa_p: f64,
        kappa_q: f64,
        chord: f64,
    ) -> Result<Self> {
        use std::f64::consts::PI;
        let tol = ORDER_TOL;
        let alpha = crate::geom::wrap_pi(alpha);
        let lo = alpha - tol;
        let theta_q = lift_from(theta_q - PI, lo) + PI;
        let gamma_p = lift_from(gamma_p, theta_q - PI - tol);
        let theta_p = lift_from(theta_p, gamma_p - tol);
        let gamma_q = lift_from(gamma_q, theta_q - tol);
        let f = AngleFrame { alpha, theta_p, theta_q, gamma_p, gamma_q, kappa_p, kappa_q, chord };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<()> {
        use std::f64::consts::PI;
        let tol = ORDER_TOL;
        let seq = [
            ("α", self.alpha),
            ("θ_q − π", self.theta_q - PI),
            ("γ_p", self.gamma_p),
            ("θ_p", self.theta_p),
            ("α + π", self.alpha + PI),
            ("θ_q", self.theta_q),
            ("γ_q", self.gamma_q),
            ("θ_p + π", self.theta_p + PI),
            ("α + 2π", self.alpha + 2.0 * PI),
        ];
        for w in seq.windows(2) {
            if w[1].1 < w[0].1 - tol {
                return Err(Error::Ordering(format!(
                    "{} = {:.12} precedes {} = {:.12}",
                    w[1].0, w[1].1, w[0].0, w[0].1
                )));
            }
        }
        // −Γ'(t̄) sits between −Θ'(T̄) and Γ'(s̄); −Γ'(s̄) between Γ'(t̄) and −Θ'(S̄)
        let back_q = self.gamma_q - PI;
        if back_q < self.theta_q - PI - tol || back_q > self.gamma_p + tol {
            return Err(Error::Ordering(format!("γ_q − π = {back_q:.12} outside [θ_q − π, γ_p]")));
        }
        let back_p = self.gamma_p + PI;
        if back_p < self.gamma_q - tol || back_p > self.theta_p + PI + tol {
            return Err(Error::Ordering(format!("γ_p + π = {back_p:.12} outside [γ_q, θ_p + π]")));
        }
        if !(self.kappa_p > 0.0 && self.kappa_q > 0.0 && self.chord > 0.0) {
            return Err(Error::Precondition("frame needs positive curvatures and chord".into()));
        }
        Ok(())
    }

    fn sin_qp(&self) -> Result<f64> {
        let d = (self.theta_q - self.theta_p).sin();
        if d.abs() < SINGULAR_TOL {
            return Err(Error::Singular(d));
        }
        Ok(d)
    }
}

pub fn angle_frame<B: Boundary + ?Sized>(disk: &SymmetricDisk, body: &B, s: f64, t: f64) -> Result<AngleFrame> {
    let sol = solve_st(disk, body, s, t)?;
    frame_from_solution(disk, body, &sol)
}

pub fn frame_from_solution<B: Boundary + ?Sized>(disk: &SymmetricDisk, body: &B, sol: &StSolution) -> Result<AngleFrame> {
    let c = disk.curve();
    let d = body.point(sol.s) - body.point(sol.t);
    AngleFrame::from_raw(
        d.angle(),
        c.tangent_angle(sol.big_s),
        c.tangent_angle(sol.big_t),
        body.tangent_angle(sol.s),
        body.tangent_angle(sol.t),
        c.curvature(sol.big_s),
        c.curvature(sol.big_t),
        d.norm(),
    )
}

/// First partials of `S(s, t)` and `T(s, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StPartials {
    pub ds_s: f64,
    pub dt_s: f64,
    pub ds_t: f64,
    pub dt_t: f64,
}

pub fn partials_st(f: &AngleFrame) -> Result<StPartials> {
    let den = f.sin_qp()?;
    Ok(StPartials {
        ds_s: (f.theta_q - f.gamma_p).sin() / den,
        dt_s: (f.gamma_q - f.theta_q).sin() / den,
        ds_t: (f.theta_p - f.gamma_p).sin() / den,
        dt_t: (f.gamma_q - f.theta_p).sin() / den,
    })
}

/// `∂_s ∂_t S`.
pub fn mixed_partial_s(f: &AngleFrame) -> Result<f64> {
    let den = f.sin_qp()?;
    let num = f.kappa_p * (f.gamma_q - f.theta_q).sin() * (f.theta_q - f.theta_p).cos() * (f.theta_q - f.gamma_p).sin()
        - f.kappa_q * (f.theta_p - f.gamma_p).sin() * (f.gamma_q - f.theta_p).sin();
    Ok(num / den.powi(3))
}

/// `|p − q, ∂_s ∂_t x| / ‖p − q‖`, positive for admissible frames.
pub fn translate_term(f: &AngleFrame) -> Result<f64> {
    let den = f.sin_qp()?;
    let num = f.kappa_p * (f.alpha - f.theta_q).sin() * (f.theta_q - f.gamma_p).sin() * (f.gamma_q - f.theta_q).sin()
        + f.kappa_q * (f.theta_p - f.alpha).sin() * (f.theta_p - f.gamma_p).sin() * (f.gamma_q - f.theta_p).sin();
    Ok(num / den.powi(3))
}

/// `∂_s ∂_t A(R_p)`; the `R_q` term is its negative.
pub fn swept_term(f: &AngleFrame) -> Result<f64> {
    let den = f.sin_qp()?;
    Ok((f.gamma_q - f.theta_q).sin() * (f.theta_p - f.gamma_p).sin() / (2.0 * den))
}

/// `∂_s ∂_t Ā` at the frame's chord.
pub fn mixed_partial_a(f: &AngleFrame) -> Result<f64> {
    Ok(-2.0 * swept_term(f)? + f.chord * translate_term(f)?)
}

/// The same quantity with the `1 / sin³(θ_q − θ_p)` denominator cleared.
pub fn mixed_partial_a_numerator(f: &AngleFrame) -> Result<f64> {
    let den = f.sin_qp()?;
    Ok(mixed_partial_a(f)? * den.powi(3))
}

fn euclidean_domain(theta: f64, gamma_p: f64, gamma_q: f64) -> Result<()> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let ok = theta > 0.0
        && theta < FRAC_PI_2
        && gamma_p > theta
        && gamma_p < PI - theta
        && gamma_q > PI + theta
        && gamma_q < gamma_p + PI;
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "need 0 < θ < π/2, θ < γ_p < π − θ, π + θ < γ_q < γ_p + π; got θ = {theta}, γ_p = {gamma_p}, γ_q = {gamma_q}"
        )))
    }
}

/// Mixed partial of `Ā` for a Euclidean disk `C` and the symmetric frame
/// `θ_p = π − θ`, `θ_q = π + θ`.
pub fn euclidean_mixed_partial(theta: f64, gamma_p: f64, gamma_q: f64) -> Result<f64> {
    euclidean_domain(theta, gamma_p, gamma_q)?;
    let s2 = (2.0 * theta).sin();
    let first = 2.0
        * theta.sin().powi(2)
        * ((gamma_p - theta).sin() * (theta - gamma_q).sin() - (theta + gamma_p).sin() * (gamma_q + theta).sin())
        / s2.powi(3);
    Ok(first - (theta - gamma_q).sin() * (theta + gamma_p).sin() / s2)
}

/// The rearranged form
/// `[−sin²θ cos(γ_p+γ_q) − cos(γ_p−γ_q) + cos²θ cos(2θ+γ_p−γ_q)] / (2cos²θ sin2θ)`.
///
/// The bracket is evaluated as the equal product
/// `−2cosγ_p cosγ_q + 2cos²θ cos(γ_p+θ) cos(γ_q−θ)`, which avoids cancellation.
pub fn euclidean_rearranged(theta: f64, gamma_p: f64, gamma_q: f64) -> Result<f64> {
    euclidean_domain(theta, gamma_p, gamma_q)?;
    Ok(euclidean_bracket(theta, gamma_p, gamma_q) / (2.0 * theta.cos().powi(2) * (2.0 * theta).sin()))
}

/// `2cos²θ sin2θ · ∂_s∂_tĀ` as a function of the angles.
pub fn euclidean_bracket(theta: f64, gamma_p: f64, gamma_q: f64) -> f64 {
    let c2 = theta.cos().powi(2);
    -2.0 * gamma_p.cos() * gamma_q.cos() + 2.0 * c2 * (gamma_p + theta).cos() * (gamma_q - theta).cos()
}

/// The bracket as literally written, three cosines.
pub fn euclidean_bracket_literal(theta: f64, gamma_p: f64, gamma_q: f64) -> f64 {
    -theta.sin().powi(2) * (gamma_p + gamma_q).cos() - (gamma_p - gamma_q).cos()
        + theta.cos().powi(2) * (2.0 * theta + gamma_p - gamma_q).cos()
}

/// Lower bound on the bracket reached at `γ_p + γ_q = 2π`, factorized with
/// `γ = γ_p − π/2`: `2cos(γ+θ)(cos(γ−θ) − cos²θ cos(γ+θ))`.
pub fn euclidean_lower_bound(theta: f64, gamma: f64) -> f64 {
    2.0 * (gamma + theta).cos() * ((gamma - theta).cos() - theta.cos().powi(2) * (gamma + theta).cos())
}

/// Components of `Ā(s, t) − Ā(s̄, t̄)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AreaDecomposition {
    /// From two region-area evaluations.
    pub direct: f64,
    /// `A(R) − A(R_p) + A(R_q)`.
    pub decomposed: f64,
    pub a_r: f64,
    pub a_rp: f64,
    pub a_rq: f64,
}

fn signed_sweep<B: Boundary + ?Sized>(b: &B, from: f64, to: f64) -> f64 {
    if to >= from {
        b.chord_sweep(from, to)
    } else {
        -b.chord_sweep(to, from)
    }
}

pub fn area_difference_decomposition<B: Boundary + ?Sized>(
    disk: &SymmetricDisk,
    body: &B,
    s_bar: f64,
    t_bar: f64,
    s: f64,
    t: f64,
) -> Result<AreaDecomposition> {
    let c = disk.curve();
    let l = disk.length();
    let base = solve_st(disk, body, s_bar, t_bar)?;
    let moved = solve_st_seeded(disk, body, s, t, Some(&base))?;
    let near = |v: f64, r: f64| r + wrap_period(v - r + 0.5 * l, l) - 0.5 * l;
    let big_s = near(moved.big_s, base.big_s);
    let big_t = near(moved.big_t, base.big_t);
    let (p, q) = (body.point(s_bar), body.point(t_bar));
    let x = moved.x;

    let a_r = (p - q).cross(x - base.x);
    // closed curve: p → x + p, along x + Θ to Γ(s), back along Γ to p
    let arc_p = (x + c.point(base.big_s) - p).cross(c.point(big_s) - c.point(base.big_s)) + signed_sweep(c, base.big_s, big_s);
    let a_rp = 0.5 * (arc_p + signed_sweep(body, s, s_bar));
    let arc_q = (x + c.point(base.big_t) - q).cross(c.point(big_t) - c.point(base.big_t)) + signed_sweep(c, base.big_t, big_t);
    let a_rq = 0.5 * (arc_q + signed_sweep(body, t, t_bar));

    let direct = region_area(body, disk, s_bar, t_bar)? - region_area(body, disk, s, t)?;
    Ok(AreaDecomposition { direct, decomposed: a_r - a_rp + a_rq, a_r, a_rp, a_rq })
}

/// Central finite differences of `S` and `T`, with step `h`.
pub fn fd_partials_st<B: Boundary + ?Sized>(disk: &SymmetricDisk, body: &B, s: f64, t: f64, h: f64) -> Result<StPartials> {
    let l = disk.length();
    let base = solve_st(disk, body, s, t)?;
    let rel = |v: f64, r: f64| wrap_period(v - r + 0.5 * l, l) - 0.5 * l;
    let at = |a: f64, b: f64| -> Result<(f64, f64)> {
        let z = solve_st_seeded(disk, body, a, b, Some(&base))?;
        Ok((rel(z.big_s, base.big_s), rel(z.big_t, base.big_t)))
    };
    let (sp, sm) = (at(s + h, t)?, at(s - h, t)?);
    let (tp, tm) = (at(s, t + h)?, at(s, t - h)?);
    Ok(StPartials {
        ds_s: (sp.0 - sm.0) / (2.0 * h),
        ds_t: (sp.1 - sm.1) / (2.0 * h),
        dt_s: (tp.0 - tm.0) / (2.0 * h),
        dt_t: (tp.1 - tm.1) / (2.0 * h),
    })
}

/// Mixed central difference of `g` on the four corners `(s ± h, t ± h)`.
fn mixed_difference<F: FnMut(f64, f64) -> Result<f64>>(mut g: F, s: f64, t: f64, h: f64) -> Result<f64> {
    Ok((g(s + h, t + h)? - g(s + h, t - h)? - g(s - h, t + h)? + g(s - h, t - h)?) / (4.0 * h * h))
}

/// Richardson-extrapolated mixed difference, combining steps `h` and `h/2`.
fn richardson<F: FnMut(f64, f64) -> Result<f64>>(mut g: F, s: f64, t: f64, h: f64) -> Result<f64> {
    let coarse = mixed_difference(&mut g, s, t, h)?;
    let fine = mixed_difference(&mut g, s, t, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Finite-difference `∂_s ∂_t S`.
pub fn fd_mixed_s<B: Boundary + ?Sized>(disk: &SymmetricDisk, body: &B, s: f64, t: f64, h: f64) -> Result<f64> {
    let l = disk.length();
    let base = solve_st(disk, body, s, t)?;
    richardson(
        |a, b| {
            let z = solve_st_seeded(disk, body, a, b, Some(&base))?;
            Ok(wrap_period(z.big_s - base.big_s + 0.5 * l, l) - 0.5 * l)
        },
        s,
        t,
        h,
    )
}

/// Finite-difference `∂_s ∂_t Ā` from region areas.
pub fn fd_mixed_a<B: Boundary + ?Sized>(disk: &SymmetricDisk, body: &B, s: f64, t: f64, h: f64) -> Result<f64> {
    let a0 = region_area(body, disk, s, t)?;
    richardson(|a, b| Ok(a0 - region_area(body, disk, a, b)?), s, t, h)
}

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
