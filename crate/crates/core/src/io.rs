//! Text serialization of profiles, curves and C-polygons, and SVG figures.

use std::fmt::Write as _;

use crate::body::Boundary;
use crate::boundary_curve::{BoundaryCurve, SymmetricDisk};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::profile::CurvatureProfile;
use crate::spindle_geom::{CPolygon, SpindleArc};

/// Fixed decimal notation with 12 significant digits.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// `s,kappa` rows at `s = kL/n` for `k = 0..=n`; the last row closes the
/// period and carries the length.
pub fn profile_csv(profile: &CurvatureProfile, n: usize) -> String {
    let mut out = String::from("s,kappa\n");
    let l = profile.length();
    for k in 0..=n {
        let s = if k == n { l } else { l * k as f64 / n as f64 };
        let _ = writeln!(out, "{},{}", fmt_num(s), fmt_num(profile.kappa(s)));
    }
    out
}

/// Inverse of [`profile_csv`]: a periodic spline through the rows before the
/// closing one, which must sit on a uniform grid starting at `0`.
pub fn read_profile_csv(text: &str) -> Result<CurvatureProfile> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "s,kappa" => {}
        Some((i, h)) => return Err(Error::Parse(format!("line {}: expected header `s,kappa`, found `{h}`", i + 1))),
        None => return Err(Error::Parse("empty profile file".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let mut it = line.split(',');
        let mut field = |name: &str| -> Result<f64> {
            it.next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing {name}", i + 1)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {name}: {e}", i + 1)))
        };
        let s = field("s")?;
        let k = field("kappa")?;
        if it.next().is_some() {
            return Err(Error::Parse(format!("line {}: too many fields", i + 1)));
        }
        rows.push((i + 1, s, k));
    }
    if rows.len() < 4 {
        return Err(Error::Parse(format!("need at least 4 rows, got {}", rows.len())));
    }
    let n = rows.len() - 1;
    let l = rows[n].1;
    if rows[0].1 != 0.0 || !(l > 0.0) {
        return Err(Error::Parse("grid must start at s = 0 and end at s = L > 0".into()));
    }
    let h = l / n as f64;
    for &(line, s, _) in &rows {
        let k = (s / h).round();
        if (s - k * h).abs() > 1e-9 * l {
            return Err(Error::Parse(format!("line {line}: s = {s} is off the uniform grid of step {h}")));
        }
    }
    let kappa: Vec<f64> = rows[..n].iter().map(|r| r.2).collect();
    CurvatureProfile::from_samples(l, &kappa)
}

/// `s,x,y,phi,kappa` rows at `n` uniform parameters.
pub fn curve_csv(curve: &BoundaryCurve, n: usize) -> String {
    let mut out = String::from("s,x,y,phi,kappa\n");
    for k in 0..n {
        let s = curve.length() * k as f64 / n as f64;
        let p = curve.point(s);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(s),
            fmt_num(p.x),
            fmt_num(p.y),
            fmt_num(curve.tangent_angle(s)),
            fmt_num(curve.curvature(s))
        );
    }
    out
}

/// ```text
/// cpolygon <n>
/// vertex <x> <y>        (n lines)
/// arc <x> <y> <S> <T>   (one per arc: translate and parameter range on C)
/// ```
pub fn cpolygon_text(k: &CPolygon) -> String {
    let mut out = format!("cpolygon {}\n", k.vertices().len());
    for v in k.vertices() {
        let _ = writeln!(out, "vertex {} {}", fmt_num(v.x), fmt_num(v.y));
    }
    for a in k.arcs() {
        let _ = writeln!(out, "arc {} {} {} {}", fmt_num(a.translate.x), fmt_num(a.translate.y), fmt_num(a.start), fmt_num(a.end));
    }
    out
}

/// Rebuilds the polygon from its vertices and checks any listed arcs against
/// the rebuilt ones.
pub fn read_cpolygon_text(disk: &SymmetricDisk, text: &str) -> Result<CPolygon> {
    let mut declared = None;
    let mut vertices = Vec::new();
    let mut arcs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        let num = |j: usize| -> Result<f64> {
            f.get(j)
                .ok_or_else(|| Error::Parse(format!("line {}: missing field {j}", i + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))
        };
        match (f[0], f.len()) {
            ("cpolygon", 2) => {
                declared = Some(f[1].parse::<usize>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?);
            }
            ("vertex", 3) => vertices.push(Vec2::new(num(1)?, num(2)?)),
            ("arc", 5) => arcs.push((i + 1, SpindleArc { translate: Vec2::new(num(1)?, num(2)?), start: num(3)?, end: num(4)? })),
            _ => return Err(Error::Parse(format!("line {}: unrecognized record `{line}`", i + 1))),
        }
    }
    let n = declared.ok_or_else(|| Error::Parse("missing `cpolygon <n>` header".into()))?;
    if vertices.len() != n {
        return Err(Error::Parse(format!("header declares {n} vertices, found {}", vertices.len())));
    }
    let k = CPolygon::from_vertices(disk, vertices)?;
    let tol = 1e-9 * disk.length();
    for (j, (line, a)) in arcs.iter().enumerate() {
        let b = k.arcs().get(j).ok_or_else(|| Error::Parse(format!("line {line}: more arcs than vertices")))?;
        let shift = disk.length() * ((a.start - b.start) / disk.length()).round();
        if (a.translate - b.translate).norm() > tol || (a.start - b.start - shift).abs() > tol || (a.end - b.end - shift).abs() > tol {
            return Err(Error::Parse(format!("line {line}: arc disagrees with the arc rebuilt from the vertices")));
        }
    }
    Ok(k)
}

/// Minimal SVG canvas in model coordinates, `y` pointing up.
#[derive(Clone, Debug, Default)]
pub struct Svg {
    body: String,
    lo: Option<(f64, f64)>,
    hi: Option<(f64, f64)>,
}

impl Svg {
    pub fn new() -> Self {
        Self::default()
    }

    fn grow(&mut self, pts: &[Vec2]) {
        for p in pts {
            let lo = self.lo.get_or_insert((p.x, p.y));
            lo.0 = lo.0.min(p.x);
            lo.1 = lo.1.min(p.y);
            let hi = self.hi.get_or_insert((p.x, p.y));
            hi.0 = hi.0.max(p.x);
            hi.1 = hi.1.max(p.y);
        }
    }

    fn path(&mut self, pts: &[Vec2], closed: bool, style: &str) {
        if pts.is_empty() {
            return;
        }
        self.grow(pts);
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.6} {:.6} ", if i == 0 { 'M' } else { 'L' }, p.x, -p.y);
        }
        if closed {
            d.push('Z');
        }
        let _ = writeln!(self.body, r#"<path d="{}" {style} vector-effect="non-scaling-stroke"/>"#, d.trim_end());
    }

    pub fn polyline(&mut self, pts: &[Vec2], stroke: &str, width: f64) {
        self.path(pts, false, &format!(r#"fill="none" stroke="{stroke}" stroke-width="{width}""#));
    }

    pub fn dashed(&mut self, pts: &[Vec2], stroke: &str, width: f64) {
        self.path(pts, true, &format!(r#"fill="none" stroke="{stroke}" stroke-width="{width}" stroke-dasharray="4 3""#));
    }

    pub fn outline(&mut self, pts: &[Vec2], stroke: &str, width: f64) {
        self.path(pts, true, &format!(r#"fill="none" stroke="{stroke}" stroke-width="{width}""#));
    }

    pub fn filled(&mut self, pts: &[Vec2], fill: &str, opacity: f64) {
        self.path(pts, true, &format!(r#"fill="{fill}" fill-opacity="{opacity}" stroke="none""#));
    }

    pub fn dot(&mut self, p: Vec2, r: f64, fill: &str) {
        self.grow(&[p]);
        let _ = writeln!(self.body, r#"<circle cx="{:.6}" cy="{:.6}" r="{r}" fill="{fill}"/>"#, p.x, -p.y);
    }

    pub fn finish(&self, pixels: u32) -> String {
        let (lo, hi) = (self.lo.unwrap_or((-1.0, -1.0)), self.hi.unwrap_or((1.0, 1.0)));
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-12);
        let pad = 0.05 * span;
        let (x0, y0) = (lo.0 - pad, -hi.1 - pad);
        let (w, h) = (hi.0 - lo.0 + 2.0 * pad, hi.1 - lo.1 + 2.0 * pad);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{pixels}\" height=\"{}\" viewBox=\"{x0:.6} {y0:.6} {w:.6} {h:.6}\">\n{}</svg>\n",
            (pixels as f64 * h / w).round() as u32,
            self.body
        )
    }
}

pub fn sample_boundary<B: Boundary + ?Sized>(body: &B, a: f64, b: f64, n: usize) -> Vec<Vec2> {
    (0..=n).map(|k| body.point(a + (b - a) * k as f64 / n as f64)).collect()
}

fn sample_arc(disk: &SymmetricDisk, arc: &SpindleArc, n: usize) -> Vec<Vec2> {
    (0..=n).map(|k| arc.point_at(disk, arc.start + arc.length() * k as f64 / n as f64)).collect()
}

/// Outline of `r_K(Γ(s1), Γ(s2))`: the arc of `K`, then the C-arc back.
pub fn region_outline<B: Boundary + ?Sized>(body: &B, disk: &SymmetricDisk, s1: f64, s2: f64, n: usize) -> Result<Vec<Vec2>> {
    let b = s1 + crate::geom::wrap_period(s2 - s1, body.perimeter());
    let mut pts = sample_boundary(body, s1, b, n);
    let arc = SpindleArc::between(disk, body.point(s1), body.point(b))?;
    let mut back = sample_arc(disk, &arc, n);
    back.reverse();
    pts.extend(back.into_iter().skip(1));
    Ok(pts)
}

/// `K` in black, the full translates carrying its arcs dashed, and each
/// listed region `r_K(Γ(s1), Γ(s2))` shaded.
pub fn render_cpolygon(k: &CPolygon, regions: &[(f64, f64)]) -> Result<String> {
    let disk = k.disk();
    let mut svg = Svg::new();
    for r in regions {
        svg.filled(&region_outline(k, disk, r.0, r.1, 128)?, "#4a90d9", 0.35);
    }
    for a in k.arcs() {
        let full = SpindleArc { translate: a.translate, start: 0.0, end: disk.length() };
        svg.dashed(&sample_arc(disk, &full, 256), "#999999", 0.8);
    }
    svg.outline(&sample_boundary(k, 0.0, k.perimeter(), 1024), "#000000", 1.5);
    for v in k.vertices() {
        svg.dot(*v, 0.005 * disk.length(), "#000000");
    }
    Ok(svg.finish(600))
}

/// Inscribed polygons drawn over their body.
pub fn render_inscribed<B: Boundary + ?Sized>(body: &B, polygons: &[Vec<Vec2>]) -> String {
    let mut svg = Svg::new();
    svg.outline(&sample_boundary(body, 0.0, body.perimeter(), 1024), "#000000", 1.5);
    let palette = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for (i, p) in polygons.iter().enumerate() {
        svg.outline(p, palette[i % palette.len()], 1.0);
    }
    svg.finish(600)
}

/// The base disk and a modification of it, with the radial difference at
/// equal arclength scaled by `exaggeration`.
pub fn render_overlay(base: &SymmetricDisk, built: &SymmetricDisk, exaggeration: f64) -> String {
    let n = 2048;
    let (b, c) = (base.curve(), built.curve());
    let shift = c.point(0.0) - b.point(0.0);
    let base_pts: Vec<Vec2> = (0..n).map(|k| b.point(b.length() * k as f64 / n as f64)).collect();
    let built_pts: Vec<Vec2> = (0..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            let p = b.point(b.length() * t);
            let q = c.point(c.length() * t) - shift;
            p + (q - p) * exaggeration
        })
        .collect();
    let mut svg = Svg::new();
    svg.outline(&base_pts, "#999999", 1.0);
    svg.outline(&built_pts, "#d62728", 1.5);
    svg.finish(600)
}
