//! Surface area measures, the perimeter-measure distance and Hausdorff
//! distance.
//!
//! The surface area measure `A_K(σ)` of a set of outer normal directions is
//! the length of the part of `bd(K)` with outer normals in `σ`. It splits into
//! atoms (edges) and a density, the curvature radius `R_K(u)`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::boundary_curve::{BoundaryCurve, SymmetricDisk};
use crate::error::{Error, Result};
use crate::geom::{wrap_period, wrap_tau, Vec2};

/// Directions scanned by the grid-based distances.
pub const DIRECTION_GRID: usize = 4096;

/// Atom directions and masses closer than this are identified.
pub const ATOM_TOL: f64 = 1e-12;

/// Finite union of closed arcs of directions; an arc with `start == end` is
/// a single atom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcSet {
    arcs: Vec<(f64, f64)>,
}

impl ArcSet {
    /// Arcs given as `(start, end)` with `end ≥ start`, counterclockwise.
    pub fn new(arcs: Vec<(f64, f64)>) -> Result<Self> {
        let mut norm: Vec<(f64, f64)> = Vec::with_capacity(arcs.len());
        for (a, b) in arcs {
            if !(b >= a) || b - a > TAU {
                return Err(Error::Precondition(format!("arc ({a}, {b}) must have 0 ≤ length ≤ 2π")));
            }
            let s = wrap_tau(a);
            norm.push((s, s + (b - a)));
        }
        norm.sort_by(|x, y| x.0.total_cmp(&y.0));
        for i in 0..norm.len() {
            for j in (i + 1)..norm.len() {
                let (a, b) = (norm[i], norm[j]);
                let overlap = b.0 <= a.1 || b.1 - TAU >= a.0;
                if overlap {
                    return Err(Error::Precondition(format!("arcs {a:?} and {b:?} overlap")));
                }
            }
        }
        Ok(ArcSet { arcs: norm })
    }

    pub fn arc(start: f64, end: f64) -> Result<Self> {
        Self::new(vec![(start, end)])
    }

    pub fn atom(u: f64) -> Self {
        let s = wrap_tau(u);
        ArcSet { arcs: vec![(s, s)] }
    }

    pub fn full() -> Self {
        ArcSet { arcs: vec![(0.0, TAU)] }
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    /// `H(σ)`, total angular length.
    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|a| a.1 - a.0).sum()
    }

    pub fn contains(&self, u: f64) -> bool {
        self.arcs.iter().any(|&(a, b)| {
            let d = wrap_period(u - a, TAU);
            d <= b - a + ATOM_TOL || TAU - d <= ATOM_TOL
        })
    }
}

/// Convex polygon given by counterclockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexPolygonBody {
    vertices: Vec<Vec2>,
    symmetric: bool,
}

impl ConvexPolygonBody {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Precondition("a polygon needs three vertices".into()));
        }
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if (b - a).cross(c - b) <= 0.0 {
                return Err(Error::Precondition(format!("vertex {} is not a strictly convex counterclockwise turn", (i + 1) % n)));
            }
        }
        let symmetric = vertices.iter().all(|v| vertices.iter().any(|w| (*v + *w).norm() <= ATOM_TOL));
        Ok(ConvexPolygonBody { vertices, symmetric })
    }

    /// Axis-parallel square of the given side centred at the origin.
    pub fn square(side: f64) -> Self {
        let h = 0.5 * side;
        Self::new(vec![Vec2::new(-h, -h), Vec2::new(h, -h), Vec2::new(h, h), Vec2::new(-h, h)]).expect("square")
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn translated(&self, v: Vec2) -> Self {
        ConvexPolygonBody { vertices: self.vertices.iter().map(|p| *p + v).collect(), symmetric: self.symmetric && v == Vec2::ZERO }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let vertices = self.vertices.iter().map(|p| Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y)).collect();
        ConvexPolygonBody { vertices, symmetric: self.symmetric }
    }

    pub fn scaled(&self, f: f64) -> Self {
        ConvexPolygonBody { vertices: self.vertices.iter().map(|p| *p * f).collect(), symmetric: self.symmetric }
    }

    /// `(outer normal direction in [0, 2π), edge length)` per edge.
    pub fn edges(&self) -> Vec<(f64, f64)> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let e = self.vertices[(i + 1) % n] - self.vertices[i];
                (wrap_tau(e.angle() - 0.5 * PI), e.norm())
            })
            .collect()
    }

    pub fn support(&self, u: f64) -> f64 {
        let d = Vec2::from_angle(u);
        self.vertices.iter().map(|v| v.dot(d)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `D_n = conv(B² ∪ {±p_n})` with `p_n = (1 + 1/n, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CappedDisk {
    pub n: u32,
}

impl CappedDisk {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("n must be positive".into()));
        }
        Ok(CappedDisk { n })
    }

    pub fn apex(&self) -> f64 {
        1.0 + 1.0 / self.n as f64
    }

    /// Normal angle `β` of the tangent segments, `cos β = 1 / apex`.
    pub fn beta(&self) -> f64 {
        (1.0 / self.apex()).acos()
    }

    pub fn segment_length(&self) -> f64 {
        (self.apex().powi(2) - 1.0).sqrt()
    }

    pub fn support(&self, u: f64) -> f64 {
        (self.apex() * u.cos().abs()).max(1.0)
    }
}

/// A body whose surface area measure and support function we can evaluate.
#[derive(Clone, Debug)]
pub enum MeasuredBody {
    Smooth(BoundaryCurve),
    Polygon(ConvexPolygonBody),
    Capped(CappedDisk),
}

impl From<&SymmetricDisk> for MeasuredBody {
    fn from(d: &SymmetricDisk) -> Self {
        MeasuredBody::Smooth(d.curve().clone())
    }
}

impl From<BoundaryCurve> for MeasuredBody {
    fn from(c: BoundaryCurve) -> Self {
        MeasuredBody::Smooth(c)
    }
}

impl From<ConvexPolygonBody> for MeasuredBody {
    fn from(p: ConvexPolygonBody) -> Self {
        MeasuredBody::Polygon(p)
    }
}

impl From<CappedDisk> for MeasuredBody {
    fn from(d: CappedDisk) -> Self {
        MeasuredBody::Capped(d)
    }
}

/// Arclength from normal `u1` to normal `u2 ≥ u1` on a smooth curve.
fn smooth_arc(c: &BoundaryCurve, u1: f64, u2: f64) -> f64 {
    if u2 - u1 >= TAU {
        return c.length();
    }
    let a = c.param_at_normal(u1);
    let b = c.param_at_normal(u2);
    wrap_period(b - a, c.length()).min(c.length())
}

impl MeasuredBody {
    /// Point masses `(normal, mass)`.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            MeasuredBody::Smooth(_) => Vec::new(),
            MeasuredBody::Polygon(p) => p.edges(),
            MeasuredBody::Capped(d) => {
                let (b, m) = (d.beta(), d.segment_length());
                [b, PI - b, PI + b, TAU - b].iter().map(|&u| (u, m)).collect()
            }
        }
    }

    /// Density of the absolutely continuous part at normal `u`.
    pub fn density(&self, u: f64) -> f64 {
        match self {
            MeasuredBody::Smooth(c) => 1.0 / c.curvature(c.param_at_normal(u)),
            MeasuredBody::Polygon(_) => 0.0,
            MeasuredBody::Capped(d) => {
                let b = d.beta();
                let w = wrap_tau(u);
                let on_circle = (w > b && w < PI - b) || (w > PI + b && w < TAU - b);
                if on_circle {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `A_K(σ)`.
    pub fn surface_area_measure(&self, sigma: &ArcSet) -> f64 {
        let atoms: f64 = self.atoms().iter().filter(|a| sigma.contains(a.0)).map(|a| a.1).sum();
        let continuous: f64 = match self {
            MeasuredBody::Smooth(c) => sigma.arcs().iter().map(|&(a, b)| smooth_arc(c, a, b)).sum(),
            MeasuredBody::Polygon(_) => 0.0,
            MeasuredBody::Capped(d) => {
                let b = d.beta();
                let pieces = [(b, PI - b), (PI + b, TAU - b)];
                sigma
                    .arcs()
                    .iter()
                    .map(|&(s, e)| {
                        pieces
                            .iter()
                            .map(|&(p, q)| {
                                // overlap of [s, e] with [p, q] on the circle
                                [-TAU, 0.0, TAU]
                                    .iter()
                                    .map(|&k| ((e).min(q + k) - s.max(p + k)).max(0.0))
                                    .sum::<f64>()
                            })
                            .sum::<f64>()
                    })
                    .sum()
            }
        };
        atoms + continuous
    }

    pub fn support(&self, u: f64) -> f64 {
        match self {
            MeasuredBody::Smooth(c) => c.support(u),
            MeasuredBody::Polygon(p) => p.support(u),
            MeasuredBody::Capped(d) => d.support(u),
        }
    }
}

/// `d_PM`, the least `τ` with `|A_C(σ) − A_D(σ)| ≤ τ·H(σ)` for all `σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PmValue {
    Finite(f64),
    Infinite,
}

impl PmValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, PmValue::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            PmValue::Finite(v) => Some(*v),
            PmValue::Infinite => None,
        }
    }
}

impl fmt::Display for PmValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmValue::Finite(v) => write!(f, "{v}"),
            PmValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for PmValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PmValue::Finite(v) => s.serialize_f64(*v),
            PmValue::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Where the distance is attained or certified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PmWitness {
    /// Direction of the largest density difference.
    Direction { u: f64 },
    /// An atom of one measure unmatched in the other.
    Atom { u: f64, mass_a: f64, mass_b: f64 },
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PmDistance {
    pub value: PmValue,
    pub witness: PmWitness,
}

fn atom_mismatch(a: &[(f64, f64)], b: &[(f64, f64)]) -> Option<PmWitness> {
    let find = |set: &[(f64, f64)], u: f64| -> f64 {
        set.iter()
            .filter(|x| {
                let d = wrap_period(x.0 - u, TAU);
                d.min(TAU - d) <= ATOM_TOL
            })
            .map(|x| x.1)
            .sum()
    };
    for &(u, _) in a.iter().chain(b.iter()) {
        let (ma, mb) = (find(a, u), find(b, u));
        if (ma - mb).abs() > ATOM_TOL {
            return Some(PmWitness::Atom { u, mass_a: ma, mass_b: mb });
        }
    }
    None
}

fn density_sup(a: &MeasuredBody, b: &MeasuredBody) -> (f64, f64) {
    let n = DIRECTION_GRID;
    let diff = |u: f64| (a.density(u) - b.density(u)).abs();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..n {
        let u = TAU * k as f64 / n as f64;
        let v = diff(u);
        if v > best.0 {
            best = (v, u);
        }
    }
    // polish around the best grid direction
    let h = TAU / n as f64;
    let (mut lo, mut hi) = (best.1 - h, best.1 + h);
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if diff(m1) >= diff(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let u = 0.5 * (lo + hi);
    let v = diff(u);
    if v > best.0 {
        (v, wrap_tau(u))
    } else {
        best
    }
}

/// General form: infinite on any atom mismatch, otherwise the sup of the
/// density difference.
pub fn pm_distance(a: &MeasuredBody, b: &MeasuredBody) -> PmDistance {
    if let Some(w) = atom_mismatch(&a.atoms(), &b.atoms()) {
        return PmDistance { value: PmValue::Infinite, witness: w };
    }
    let (v, u) = density_sup(a, b);
    let witness = if v > 0.0 { PmWitness::Direction { u } } else { PmWitness::None };
    PmDistance { value: PmValue::Finite(v.max(0.0)), witness }
}

/// `sup_u |R_C(u) − R_D(u)|` for smooth disks.
pub fn pm_distance_smooth(c: &SymmetricDisk, d: &SymmetricDisk) -> PmDistance {
    pm_distance(&c.into(), &d.into())
}

/// Lower bounds `max |ΔA(σ)| / H(σ)` over dyadic arcs of levels `0..=depth`,
/// as a running maximum.
pub fn pm_distance_dyadic(c: &SymmetricDisk, d: &SymmetricDisk, depth: u32) -> Vec<f64> {
    let (a, b): (MeasuredBody, MeasuredBody) = (c.into(), d.into());
    let mut out = Vec::with_capacity(depth as usize + 1);
    let mut running: f64 = 0.0;
    for level in 0..=depth {
        let k = 1usize << level;
        let w = TAU / k as f64;
        for i in 0..k {
            let sigma = ArcSet { arcs: vec![(w * i as f64, w * (i + 1) as f64)] };
            let v = (a.surface_area_measure(&sigma) - b.surface_area_measure(&sigma)).abs() / w;
            running = running.max(v);
        }
        out.push(running);
    }
    out
}

/// Polygons: zero for translates, infinite otherwise.
pub fn pm_distance_polygon(p: &ConvexPolygonBody, q: &ConvexPolygonBody) -> PmDistance {
    pm_distance(&p.clone().into(), &q.clone().into())
}

/// `max_u |h_A(u) − h_B(u)|` over the direction grid.
pub fn hausdorff_distance(a: &MeasuredBody, b: &MeasuredBody) -> f64 {
    (0..DIRECTION_GRID)
        .map(|k| {
            let u = TAU * k as f64 / DIRECTION_GRID as f64;
            (a.support(u) - b.support(u)).abs()
        })
        .fold(0.0, f64::max)
}

/// One row of the refinement demonstration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RefinementRow {
    pub n: u32,
    pub hausdorff: f64,
    pub pm: PmDistance,
}

/// `D_n` against `B²` for `n = 2..=n_max`: the Hausdorff distance tends to
/// zero while the PM-distance stays infinite.
pub fn refinement_demo(n_max: u32) -> Result<Vec<RefinementRow>> {
    if n_max < 2 {
        return Err(Error::Precondition("n_max must be at least 2".into()));
    }
    (2..=n_max).map(refinement_row).collect()
}

pub fn refinement_row(n: u32) -> Result<RefinementRow> {
    let disk: MeasuredBody = (&SymmetricDisk::unit_circle()).into();
    let dn: MeasuredBody = CappedDisk::new(n)?.into();
    Ok(RefinementRow { n, hausdorff: hausdorff_distance(&dn, &disk), pm: pm_distance(&dn, &disk) })
}

/// Signed surface-area difference on an arc, for witnesses.
pub fn measure_difference(a: &MeasuredBody, b: &MeasuredBody, sigma: &ArcSet) -> f64 {
    a.surface_area_measure(sigma) - b.surface_area_measure(sigma)
}
