//! Spindles, hulls and polygons built from translates of a generator disk.
//!
//! Throughout, `C` is a [`SymmetricDisk`] with boundary `Θ`. A C-arc from `p`
//! to `q` is the arc `x + Θ([s, t])` of a translate of `C`, turning by at most
//! `π`, with `x + Θ(s) = p` and `x + Θ(t) = q`.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::body::Boundary;
use crate::boundary_curve::SymmetricDisk;
use crate::error::{Error, Result};
use crate::geom::{lift_from, wrap_period, wrap_tau, Vec2};

/// A counterclockwise arc of the translate `translate + C`, covering the
/// boundary parameters `[start, end]` of `C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpindleArc {
    pub translate: Vec2,
    pub start: f64,
    pub end: f64,
}

impl SpindleArc {
    /// The C-arc running counterclockwise from `p` to `q`.
    pub fn between(disk: &SymmetricDisk, p: Vec2, q: Vec2) -> Result<Self> {
        let ch = disk.chord_params(q - p)?;
        Ok(SpindleArc { translate: p - disk.curve().point(ch.s), start: ch.s, end: ch.t })
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn point_at(&self, disk: &SymmetricDisk, c: f64) -> Vec2 {
        self.translate + disk.curve().point(c)
    }

    pub fn start_point(&self, disk: &SymmetricDisk) -> Vec2 {
        self.point_at(disk, self.start)
    }

    pub fn end_point(&self, disk: &SymmetricDisk) -> Vec2 {
        self.point_at(disk, self.end)
    }

    pub fn turning(&self, disk: &SymmetricDisk) -> f64 {
        disk.curve().profile().integral(self.start, self.end)
    }

    /// Area between the arc and its chord.
    pub fn cap_area(&self, disk: &SymmetricDisk) -> f64 {
        disk.curve().cap_area(self.start, self.end)
    }
}

/// The intersection of all translates of `C` containing two points.
#[derive(Clone, Debug, PartialEq)]
pub enum Spindle {
    /// No translate contains both points.
    WholePlane,
    Point(Vec2),
    Lens { forward: SpindleArc, backward: SpindleArc },
}

impl Spindle {
    pub fn area(&self, disk: &SymmetricDisk) -> f64 {
        match self {
            Spindle::WholePlane => f64::INFINITY,
            Spindle::Point(_) => 0.0,
            Spindle::Lens { forward, backward } => forward.cap_area(disk) + backward.cap_area(disk),
        }
    }
}

pub fn spindle(disk: &SymmetricDisk, p: Vec2, q: Vec2) -> Spindle {
    if p == q {
        return Spindle::Point(p);
    }
    match (SpindleArc::between(disk, p, q), SpindleArc::between(disk, q, p)) {
        (Ok(forward), Ok(backward)) => Spindle::Lens { forward, backward },
        _ => Spindle::WholePlane,
    }
}

/// A C-polygon: the region bounded by C-arcs joining cyclically ordered
/// vertices. Parametrized by arclength from its first vertex.
#[derive(Clone, Debug)]
pub struct CPolygon {
    disk: SymmetricDisk,
    vertices: Vec<Vec2>,
    arcs: Vec<SpindleArc>,
    offsets: Vec<f64>,
    /// Multiple of 2π added to the tangent angle of `C` along each arc.
    lifts: Vec<f64>,
}

impl CPolygon {
    fn assemble(disk: SymmetricDisk, vertices: Vec<Vec2>, arcs: Vec<SpindleArc>) -> Self {
        let mut offsets = Vec::with_capacity(arcs.len() + 1);
        let mut lifts = Vec::with_capacity(arcs.len());
        let mut acc = 0.0;
        offsets.push(acc);
        let mut prev_end: Option<f64> = None;
        for a in &arcs {
            acc += a.length();
            offsets.push(acc);
            let phi = disk.curve().tangent_angle(a.start);
            let lift = match prev_end {
                None => 0.0,
                Some(pe) => lift_from(phi, pe) - phi,
            };
            lifts.push(lift);
            prev_end = Some(disk.curve().tangent_angle(a.end) + lift);
        }
        CPolygon { disk, vertices, arcs, offsets, lifts }
    }

    /// The degenerate polygon consisting of one point.
    pub fn point(disk: &SymmetricDisk, p: Vec2) -> Self {
        Self::assemble(disk.clone(), vec![p], Vec::new())
    }

    /// The translate `x + C` as a one-gon.
    pub fn translate_of(disk: &SymmetricDisk, x: Vec2) -> Self {
        let arc = SpindleArc { translate: x, start: 0.0, end: disk.length() };
        Self::assemble(disk.clone(), vec![x + disk.curve().point(0.0)], vec![arc])
    }

    /// The C-polygon with the given counterclockwise vertices, each pair of
    /// consecutive vertices joined by a C-arc.
    pub fn from_vertices(disk: &SymmetricDisk, vertices: Vec<Vec2>) -> Result<Self> {
        match vertices.len() {
            0 => Err(Error::Precondition("polygon without vertices".into())),
            1 => Ok(Self::point(disk, vertices[0])),
            n => {
                let mut arcs = Vec::with_capacity(n);
                for i in 0..n {
                    arcs.push(SpindleArc::between(disk, vertices[i], vertices[(i + 1) % n])?);
                }
                let poly = Self::assemble(disk.clone(), vertices, arcs);
                if n >= 3 && crate::geom::shoelace(&poly.vertices) <= 0.0 {
                    return Err(Error::Precondition("vertices are not in counterclockwise order".into()));
                }
                Ok(poly)
            }
        }
    }

    pub fn disk(&self) -> &SymmetricDisk {
        &self.disk
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[SpindleArc] {
        &self.arcs
    }

    /// Boundary parameter of vertex `i`.
    pub fn vertex_param(&self, i: usize) -> f64 {
        self.offsets[i]
    }

    /// Boundary parameter of the point `arcs[i].translate + Θ(c)`.
    pub fn param_on_arc(&self, i: usize, c: f64) -> f64 {
        let a = &self.arcs[i];
        let c = a.start + wrap_period(c - a.start, self.disk.length());
        self.offsets[i] + (c - a.start)
    }

    /// Green's-theorem area: shoelace of the vertices plus the arc caps.
    pub fn area(&self) -> f64 {
        match self.arcs.len() {
            0 => 0.0,
            1 => self.disk.curve().area(),
            n => {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += 0.5 * self.vertices[i].cross(self.vertices[(i + 1) % n]);
                    acc += self.arcs[i].cap_area(&self.disk);
                }
                acc
            }
        }
    }

    /// Walk the arcs covering the boundary parameters `[a, b]`, calling
    /// `f(arc, c0, c1)` with the covered parameters of `C`.
    fn for_each_portion<F: FnMut(&SpindleArc, f64, f64)>(&self, a: f64, b: f64, mut f: F) {
        let p = self.perimeter();
        if b <= a || p == 0.0 {
            return;
        }
        let mut turns = (a / p).floor();
        let r = (a - turns * p).clamp(0.0, p);
        let mut i = self.offsets.partition_point(|&o| o <= r).saturating_sub(1).min(self.arcs.len() - 1);
        let mut lo = a;
        loop {
            let base = turns * p + self.offsets[i];
            let end = turns * p + self.offsets[i + 1];
            let hi = end.min(b);
            if hi > lo {
                let arc = &self.arcs[i];
                f(arc, arc.start + (lo - base), arc.start + (hi - base));
            }
            if end >= b {
                break;
            }
            lo = end;
            i += 1;
            if i == self.arcs.len() {
                i = 0;
                turns += 1.0;
            }
        }
    }

    fn locate(&self, s: f64, left: bool) -> (usize, f64, f64) {
        let p = self.perimeter();
        let mut turns = (s / p).floor();
        let mut r = s - turns * p;
        if r >= p {
            r = 0.0;
            turns += 1.0;
        }
        let r = r.max(0.0);
        let n = self.arcs.len();
        let i = if left {
            if r == 0.0 {
                turns -= 1.0;
                return (n - 1, self.arcs[n - 1].end, turns);
            }
            self.offsets.partition_point(|&o| o < r).saturating_sub(1).min(n - 1)
        } else {
            self.offsets.partition_point(|&o| o <= r).saturating_sub(1).min(n - 1)
        };
        (i, self.arcs[i].start + (r - self.offsets[i]), turns)
    }
}

impl Boundary for CPolygon {
    fn perimeter(&self) -> f64 {
        *self.offsets.last().unwrap()
    }

    fn point(&self, s: f64) -> Vec2 {
        if self.arcs.is_empty() {
            return self.vertices[0];
        }
        let (i, c, _) = self.locate(s, false);
        self.arcs[i].point_at(&self.disk, c)
    }

    fn tangent_angle(&self, s: f64) -> f64 {
        let (i, c, turns) = self.locate(s, false);
        self.disk.curve().tangent_angle(c) + self.lifts[i] + TAU * turns
    }

    fn tangent_angle_before(&self, s: f64) -> f64 {
        let (i, c, turns) = self.locate(s, true);
        self.disk.curve().tangent_angle(c) + self.lifts[i] + TAU * turns
    }

    fn curvature(&self, s: f64) -> f64 {
        let (_, c, _) = self.locate(s, false);
        self.disk.curve().curvature(c)
    }

    fn displacement(&self, a: f64, b: f64) -> Vec2 {
        let mut d = Vec2::ZERO;
        self.for_each_portion(a, b, |_, c0, c1| d += self.disk.curve().displacement(c0, c1));
        d
    }

    fn chord_sweep(&self, a: f64, b: f64) -> f64 {
        let mut d = Vec2::ZERO;
        let mut acc = 0.0;
        self.for_each_portion(a, b, |_, c0, c1| {
            let step = self.disk.curve().displacement(c0, c1);
            acc += d.cross(step) + self.disk.curve().chord_sweep(c0, c1);
            d += step;
        });
        acc
    }

    fn area(&self) -> f64 {
        CPolygon::area(self)
    }

    fn support(&self, u: f64) -> f64 {
        let dir = Vec2::from_angle(u);
        let mut best = self.vertices.iter().map(|v| v.dot(dir)).fold(f64::NEG_INFINITY, f64::max);
        let l = self.disk.length();
        let c = self.disk.curve().param_at_normal(u);
        for a in &self.arcs {
            let c = a.start + wrap_period(c - a.start, l);
            if c <= a.end {
                best = best.max(a.point_at(&self.disk, c).dot(dir));
            }
        }
        best
    }

    fn corners(&self) -> Vec<f64> {
        let n = self.arcs.len();
        if n < 2 {
            return Vec::new();
        }
        (0..n)
            .filter(|&i| {
                let s = self.offsets[i];
                self.tangent_angle(s) - self.tangent_angle_before(s) > 1e-12
            })
            .map(|i| self.offsets[i])
            .collect()
    }
}

/// The intersection of the translates `centers[i] + C`.
pub fn intersect_translates(disk: &SymmetricDisk, centers: &[Vec2]) -> Result<CPolygon> {
    let l = disk.length();
    let mut uniq: Vec<Vec2> = Vec::with_capacity(centers.len());
    for &c in centers {
        if !uniq.iter().any(|u| (*u - c).norm() <= 1e-14 * l) {
            uniq.push(c);
        }
    }
    if uniq.is_empty() {
        return Err(Error::Precondition("no translates to intersect".into()));
    }
    if uniq.len() == 1 {
        return Ok(CPolygon::translate_of(disk, uniq[0]));
    }
    let mut arcs: Vec<SpindleArc> = Vec::new();
    for (i, &ci) in uniq.iter().enumerate() {
        let mut range: Option<(f64, f64)> = None;
        let mut empty = false;
        for (j, &cj) in uniq.iter().enumerate() {
            if i == j {
                continue;
            }
            let ch = match disk.chord_params(cj - ci) {
                Ok(ch) => ch,
                Err(Error::WholePlane { .. }) => return Err(Error::EmptyIntersection),
                Err(e) => return Err(e),
            };
            // part of bd(ci + C) inside cj + C
            let (a, b) = (ch.t, ch.s + 0.5 * l);
            range = match range {
                None => Some((a, b)),
                Some((lo, hi)) => {
                    let a2 = lo - 0.5 * l + wrap_period(a - (lo - 0.5 * l), l);
                    let b2 = a2 + (b - a);
                    let (nlo, nhi) = (lo.max(a2), hi.min(b2));
                    if nhi <= nlo {
                        empty = true;
                        break;
                    }
                    Some((nlo, nhi))
                }
            };
        }
        if empty {
            continue;
        }
        let (lo, hi) = range.expect("at least two translates");
        if hi - lo > 1e-12 * l {
            arcs.push(SpindleArc { translate: ci, start: lo, end: hi });
        }
    }
    if arcs.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let curve = disk.curve();
    arcs.sort_by(|a, b| {
        let ka = wrap_tau(curve.tangent_angle(a.start));
        let kb = wrap_tau(curve.tangent_angle(b.start));
        ka.total_cmp(&kb)
    });
    let n = arcs.len();
    let tol = 1e-8 * l;
    for k in 0..n {
        let e = arcs[k].end_point(disk);
        let s = arcs[(k + 1) % n].start_point(disk);
        if (e - s).norm() > tol {
            return Err(Error::EmptyIntersection);
        }
    }
    if n == 1 {
        // a single surviving arc must close up on itself
        return Err(Error::EmptyIntersection);
    }
    let vertices = arcs.iter().map(|a| a.start_point(disk)).collect();
    Ok(CPolygon::assemble(disk.clone(), vertices, arcs))
}

/// The intersection of all translates of `C` containing `points`.
pub fn c_hull(disk: &SymmetricDisk, points: &[Vec2]) -> Result<CPolygon> {
    let l = disk.length();
    let mut uniq: Vec<Vec2> = Vec::with_capacity(points.len());
    for &p in points {
        if !uniq.iter().any(|u| (*u - p).norm() <= 1e-14 * l) {
            uniq.push(p);
        }
    }
    match uniq.len() {
        0 => return Err(Error::Precondition("hull of an empty set".into())),
        1 => return Ok(CPolygon::point(disk, uniq[0])),
        _ => {}
    }
    // Translates x + C containing every point are exactly those with x in the
    // intersection of the p + C, by symmetry of C.
    let centres = match intersect_translates(disk, &uniq) {
        Ok(p) => p,
        Err(Error::EmptyIntersection) => {
            let diam = uniq
                .iter()
                .flat_map(|a| uniq.iter().map(move |b| (*a - *b).norm()))
                .fold(0.0, f64::max);
            return Err(Error::WholePlane { length: diam, limit: f64::NAN });
        }
        Err(e) => return Err(e),
    };
    let hull = intersect_translates(disk, centres.vertices())?;
    let snap_tol = 1e-6 * l;
    let mut vertices = Vec::with_capacity(hull.vertices().len());
    for v in hull.vertices() {
        let (best, dist) = uniq
            .iter()
            .map(|p| (*p, (*p - *v).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if dist > snap_tol {
            return Err(Error::Precondition(format!("hull vertex {v:?} is {dist:.3e} from every input point")));
        }
        if vertices.last() != Some(&best) {
            vertices.push(best);
        }
    }
    if vertices.len() > 1 && vertices.first() == vertices.last() {
        vertices.pop();
    }
    CPolygon::from_vertices(disk, vertices)
}

/// Area of the region between the counterclockwise boundary arc of `K` from
/// `Γ(s1)` to `Γ(s2)` and the C-arc joining the same two points.
pub fn region_area<B: Boundary + ?Sized>(body: &B, disk: &SymmetricDisk, s1: f64, s2: f64) -> Result<f64> {
    let per = body.perimeter();
    let a = s1;
    let b = a + wrap_period(s2 - s1, per);
    if b == a {
        return Ok(0.0);
    }
    let d = body.displacement(a, b);
    if d.norm() == 0.0 {
        return Ok(0.0);
    }
    let ch = disk.chord_params(d)?;
    Ok(0.5 * body.chord_sweep(a, b) - disk.cap_area(ch))
}

/// Result of comparing the curvature of `K` with that of `C` at equal normals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub convex: bool,
    /// Largest `κ_C − κ_K` seen; nonpositive when `K` is strictly C-convex.
    pub max_violation: f64,
    pub worst_param: f64,
}

/// Samples the boundary of `K` away from its corners and compares its
/// curvature with that of `C` at the point with the same outer normal.
pub fn is_c_convex<B: Boundary + ?Sized>(body: &B, disk: &SymmetricDisk) -> ConvexityReport {
    let per = body.perimeter();
    let samples = 8192;
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for k in 0..samples {
        let s = (k as f64 + 0.5) * per / samples as f64;
        let c = disk.curve().param_at_angle(body.tangent_angle(s));
        let v = disk.curve().curvature(c) - body.curvature(s);
        if v > worst.0 {
            worst = (v, s);
        }
    }
    ConvexityReport { convex: worst.0 <= 1e-8, max_violation: worst.0, worst_param: worst.1 }
}

/// Half-open parameter windows `[s, s + w)` of a body's boundary that stay at
/// least `margin` away from every corner.
pub fn away_from_corners<B: Boundary + ?Sized>(body: &B, s: f64, margin: f64) -> bool {
    let per = body.perimeter();
    body.corners().iter().all(|&c| {
        let d = wrap_period(s - c, per);
        d.min(per - d) >= margin
    })
}

/// Direction of the outer normal of `C` at boundary parameter `c`.
pub fn outer_normal(disk: &SymmetricDisk, c: f64) -> f64 {
    disk.curve().tangent_angle(c) - FRAC_PI_2
}
