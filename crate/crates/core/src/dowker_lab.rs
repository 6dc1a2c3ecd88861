//! Maximum-area inscribed C-n-gons and the four-point area inequality.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::body::Boundary;
use crate::boundary_curve::SymmetricDisk;
use crate::error::{Error, Result};
use crate::geom::{wrap_period, Vec2};
use crate::spindle_geom::{region_area, CPolygon};

/// Turning of an admissible arc must stay below `π − TURNING_MARGIN`.
pub const TURNING_MARGIN: f64 = 1e-6;

/// Grids up to this size use every point as a DP root.
pub const ALL_ROOTS_LIMIT: usize = 256;

const MAX_SWEEPS: usize = 200;

/// Area contributed by the C-arc edge from `a` to `b`: the triangle with the
/// origin plus the cap.
pub fn edge_weight(disk: &SymmetricDisk, a: Vec2, b: Vec2) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let ch = disk.chord_params(b - a)?;
    Ok(0.5 * a.cross(b) + disk.cap_area(ch))
}

/// Edge weights of a grid, stored transposed: `w[j * m + i]` is the weight
/// of the edge from point `i` to point `j`.
pub struct WeightTable {
    pub points: Vec<Vec2>,
    pub params: Vec<f64>,
    w: Vec<f64>,
}

impl WeightTable {
    pub fn new<B: Boundary + ?Sized + Sync>(body: &B, disk: &SymmetricDisk, m: usize) -> Result<Self> {
        let l = body.perimeter();
        let params: Vec<f64> = (0..m).map(|i| l * i as f64 / m as f64).collect();
        let points: Vec<Vec2> = params.iter().map(|&s| body.point(s)).collect();
        let rows: Vec<Result<Vec<f64>>> = (0..m)
            .into_par_iter()
            .map(|j| (0..m).map(|i| edge_weight(disk, points[i], points[j])).collect())
            .collect();
        let mut w = Vec::with_capacity(m * m);
        for r in rows {
            w.extend(r.map_err(|e| match e {
                Error::WholePlane { .. } => Error::Precondition(format!("body is not C-convex: {e}")),
                e => e,
            })?);
        }
        Ok(WeightTable { points, params, w })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[j * self.points.len() + i]
    }

    /// Area of the C-polygon on grid indices `chain`, summed left to right
    /// starting from the smallest index.
    pub fn chain_area(&self, chain: &[usize]) -> f64 {
        let mut c = chain.to_vec();
        c.sort_unstable();
        let n = c.len();
        let mut acc = 0.0;
        for k in 0..n {
            acc += self.weight(c[k], c[(k + 1) % n]);
        }
        acc
    }

    /// Best chain of `n` vertices whose first vertex is `root`. With
    /// `no_wrap`, the remaining vertices all have larger indices.
    fn best_from_root(&self, root: usize, n: usize, no_wrap: bool) -> Option<(f64, Vec<usize>)> {
        let m = self.len();
        let span = if no_wrap { m - root } else { m };
        if span < n {
            return None;
        }
        let idx = |o: usize| (root + o) % m;
        // value[o]: best sum over chains root → … → offset o with k edges
        let mut value = vec![f64::NEG_INFINITY; span];
        let mut back = vec![vec![0u32; span]; n];
        for (o, v) in value.iter_mut().enumerate().skip(1) {
            *v = self.weight(root, idx(o));
        }
        for k in 2..n {
            let mut next = vec![f64::NEG_INFINITY; span];
            for o in k..span {
                let col = &self.w[idx(o) * m..(idx(o) + 1) * m];
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for i in (k - 1)..o {
                    let v = value[i] + col[idx(i)];
                    if v > best {
                        best = v;
                        arg = i;
                    }
                }
                next[o] = best;
                back[k][o] = arg as u32;
            }
            value = next;
        }
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for o in (n - 1)..span {
            let v = value[o] + self.weight(idx(o), root);
            if v > best {
                best = v;
                arg = o;
            }
        }
        let mut chain = vec![0usize; n];
        let mut o = arg;
        for k in (1..n).rev() {
            chain[k] = idx(o);
            if k > 1 {
                o = back[k][o] as usize;
            }
        }
        chain[0] = root;
        Some((best, chain))
    }

    /// Maximum over grid C-n-gons. Every root is tried when the grid has at
    /// most [`ALL_ROOTS_LIMIT`] points, otherwise every `⌈m/n⌉`-th.
    pub fn best_chain(&self, n: usize) -> Result<(f64, Vec<usize>)> {
        let m = self.len();
        if n < 2 || n > m {
            return Err(Error::Precondition(format!("need 2 ≤ n ≤ M, got n = {n}, M = {m}")));
        }
        let all = m <= ALL_ROOTS_LIMIT;
        let stride = if all { 1 } else { m.div_ceil(n) };
        let roots: Vec<usize> = (0..m).step_by(stride).collect();
        let found: Vec<Option<(f64, Vec<usize>)>> =
            roots.par_iter().map(|&r| self.best_from_root(r, n, all)).collect();
        let mut best: Option<(f64, Vec<usize>)> = None;
        for (v, chain) in found.into_iter().flatten() {
            let mut sorted = chain.clone();
            sorted.sort_unstable();
            let better = match &best {
                None => true,
                Some((bv, bc)) => v > *bv || (v == *bv && sorted < *bc),
            };
            if better {
                best = Some((v, sorted));
            }
        }
        let (_, chain) = best.expect("at least one root");
        Ok((self.chain_area(&chain), chain))
    }
}

/// Exhaustive maximum over all `n`-subsets of the grid; for small grids.
pub fn exhaustive_best(table: &WeightTable, n: usize) -> (f64, Vec<usize>) {
    let m = table.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut best = (f64::NEG_INFINITY, idx.clone());
    loop {
        let v = table.chain_area(&idx);
        if v > best.0 {
            best = (v, idx.clone());
        }
        let mut k = n;
        while k > 0 && idx[k - 1] == m - n + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return best;
        }
        idx[k - 1] += 1;
        for r in k..n {
            idx[r] = idx[r - 1] + 1;
        }
    }
}

/// A maximum-area inscribed C-n-gon.
#[derive(Clone, Debug, Serialize)]
pub struct Inscribed {
    pub n: usize,
    pub area: f64,
    /// Best area on the grid, before continuous refinement.
    pub grid_area: f64,
    pub grid: usize,
    pub sweeps: usize,
    /// Boundary parameters of the vertices, increasing.
    pub params: Vec<f64>,
    #[serde(skip)]
    pub polygon: CPolygon,
}

fn polygon_area_at<B: Boundary + ?Sized>(body: &B, disk: &SymmetricDisk, params: &[f64]) -> Result<f64> {
    let n = params.len();
    let pts: Vec<Vec2> = params.iter().map(|&s| body.point(s)).collect();
    let mut acc = 0.0;
    for k in 0..n {
        acc += edge_weight(disk, pts[k], pts[(k + 1) % n])?;
    }
    Ok(acc)
}

fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Cyclic coordinate ascent on the vertex parameters, one golden-section
/// search per vertex, until a sweep gains less than `1e-12 · area(K)`.
pub fn refine<B: Boundary + ?Sized>(
    body: &B,
    disk: &SymmetricDisk,
    params: &mut [f64],
    window: f64,
) -> Result<(f64, usize)> {
    let n = params.len();
    let l = body.perimeter();
    let target = 1e-12 * body.area();
    let mut area = polygon_area_at(body, disk, params)?;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let before = area;
        for k in 0..n {
            let prev = params[(k + n - 1) % n];
            let next = params[(k + 1) % n];
            let cur = params[k];
            // lift neighbours around the current vertex
            let lo_n = cur - wrap_period(cur - prev, l);
            let hi_n = cur + wrap_period(next - cur, l);
            let (lo_n, hi_n) = if n == 2 { (cur - 0.5 * l, cur + 0.5 * l) } else { (lo_n, hi_n) };
            let gap = 1e-9 * l;
            let a = (cur - window).max(lo_n + gap);
            let b = (cur + window).min(hi_n - gap);
            if b <= a {
                continue;
            }
            let pp = body.point(prev);
            let pn = body.point(next);
            let local = |s: f64| -> f64 {
                let x = body.point(s);
                match (edge_weight(disk, pp, x), edge_weight(disk, x, pn)) {
                    (Ok(u), Ok(v)) => u + v,
                    _ => f64::NEG_INFINITY,
                }
            };
            let now = local(cur);
            let (x, fx) = golden_max(local, a, b, 1e-14 * l);
            if fx > now {
                params[k] = x;
            }
        }
        area = polygon_area_at(body, disk, params)?;
        if area - before < target {
            break;
        }
    }
    Ok((area, sweeps))
}

/// `â_n`: the maximum area of a C-n-gon with vertices on `bd(K)`.
pub fn max_inscribed_area<B: Boundary + ?Sized + Sync>(body: &B, disk: &SymmetricDisk, n: usize, m: usize) -> Result<Inscribed> {
    let table = WeightTable::new(body, disk, m)?;
    max_inscribed_with(body, disk, &table, n)
}

/// As [`max_inscribed_area`], reusing a precomputed weight table.
pub fn max_inscribed_with<B: Boundary + ?Sized>(body: &B, disk: &SymmetricDisk, table: &WeightTable, n: usize) -> Result<Inscribed> {
    let m = table.len();
    if n < 2 {
        return Err(Error::Precondition(format!("n = {n} < 2")));
    }
    if n > m {
        return Err(Error::Precondition(format!("n = {n} exceeds the grid size {m}")));
    }
    if m < 8 * n {
        return Err(Error::Precondition(format!("grid size {m} below 8n = {}", 8 * n)));
    }
    let (grid_area, chain) = table.best_chain(n)?;
    let mut params: Vec<f64> = chain.iter().map(|&i| table.params[i]).collect();
    let step = body.perimeter() / m as f64;
    let (area, sweeps) = refine(body, disk, &mut params, 2.0 * step)?;
    let (area, params) = if area >= grid_area {
        (area, params)
    } else {
        (grid_area, chain.iter().map(|&i| table.params[i]).collect())
    };
    let mut params = params;
    let l = body.perimeter();
    for p in params.iter_mut() {
        *p = wrap_period(*p, l);
    }
    params.sort_by(f64::total_cmp);
    let vertices: Vec<Vec2> = params.iter().map(|&s| body.point(s)).collect();
    let polygon = CPolygon::from_vertices(disk, vertices)?;
    Ok(Inscribed { n, area, grid_area, grid: m, sweeps, params, polygon })
}

/// `â_n` for a range of `n` with its second differences.
#[derive(Clone, Debug, Serialize)]
pub struct DowkerReport {
    pub entries: Vec<Inscribed>,
    /// `(n, â_{n−1} + â_{n+1} − 2â_n)` for interior `n`.
    pub second_differences: Vec<(usize, f64)>,
    pub body_area: f64,
}

impl DowkerReport {
    pub fn max_second_difference(&self) -> f64 {
        self.second_differences.iter().map(|d| d.1).fold(f64::NEG_INFINITY, f64::max)
    }

    /// All second differences at most `rel · area(K)`.
    pub fn is_concave(&self, rel: f64) -> bool {
        self.second_differences.iter().all(|d| d.1 <= rel * self.body_area)
    }

    /// `â_n ≤ â_{n+1} + rel · area(K)` throughout.
    pub fn is_monotone(&self, rel: f64) -> bool {
        self.entries.windows(2).all(|w| w[0].area <= w[1].area + rel * self.body_area)
    }
}

pub fn dowker_report<B: Boundary + ?Sized + Sync>(
    body: &B,
    disk: &SymmetricDisk,
    n_min: usize,
    n_max: usize,
    m: usize,
) -> Result<DowkerReport> {
    if n_min < 3 || n_max < n_min + 2 {
        return Err(Error::Precondition(format!("need n_min ≥ 3 and n_max ≥ n_min + 2, got [{n_min}, {n_max}]")));
    }
    let table = WeightTable::new(body, disk, m)?;
    let entries = (n_min..=n_max)
        .map(|n| max_inscribed_with(body, disk, &table, n))
        .collect::<Result<Vec<_>>>()?;
    let second_differences = entries
        .windows(3)
        .map(|w| (w[1].n, w[0].area + w[2].area - 2.0 * w[1].area))
        .collect();
    Ok(DowkerReport { entries, second_differences, body_area: body.area() })
}

/// One instance of the four-point inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadrangleCase {
    pub params: [f64; 4],
    /// `area(r(x1, x4)) + area(r(x2, x3))`.
    pub lhs: f64,
    /// `area(r(x1, x3)) + area(r(x2, x4))`.
    pub rhs: f64,
    pub holds: bool,
    /// Turning of the arc from `x1` to `x4`.
    pub turning: f64,
}

impl QuadrangleCase {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Lift `s` so the four parameters increase from `s[0]`; `None` unless they
/// are in counterclockwise order within one turn.
fn ordered(params: [f64; 4], l: f64) -> Option<[f64; 4]> {
    let mut out = params;
    for k in 1..4 {
        out[k] = params[0] + wrap_period(params[k] - params[0], l);
    }
    (out[0] <= out[1] && out[1] <= out[2] && out[2] <= out[3]).then_some(out)
}

pub fn quadrangle_check<B: Boundary + ?Sized>(body: &B, disk: &SymmetricDisk, params: [f64; 4]) -> Result<QuadrangleCase> {
    let l = body.perimeter();
    let s = ordered(params, l).ok_or_else(|| Error::Precondition(format!("parameters {params:?} are not in counterclockwise order")))?;
    let turning = if s[3] == s[0] { 0.0 } else { body.turning_angle(s[0], s[3]) };
    if turning > std::f64::consts::PI - TURNING_MARGIN {
        return Err(Error::Precondition(format!("turning angle {turning:.9} of the outer arc is not below π")));
    }
    let a = |i: usize, j: usize| region_area(body, disk, s[i], s[j]);
    let lhs = a(0, 3)? + a(1, 2)?;
    let rhs = a(0, 2)? + a(1, 3)?;
    let holds = lhs >= rhs - 1e-10 * body.area();
    Ok(QuadrangleCase { params: s, lhs, rhs, holds, turning })
}

/// Random admissible quadruples. Each draw picks an outer arc `[s1, s4]`
/// with turning below `π` and then inner points at log-uniform relative
/// distances from its ends, so both wide and local quadruples occur.
pub fn quadrangle_sweep<B: Boundary + ?Sized + Sync>(
    body: &B,
    disk: &SymmetricDisk,
    samples: usize,
    seed: u64,
) -> Result<Vec<QuadrangleCase>> {
    let mut rng = crate::rng::stream(seed, "quadrangle-sweep");
    let l = body.perimeter();
    let max_turn = std::f64::consts::PI - TURNING_MARGIN;
    let mut draws = Vec::with_capacity(samples);
    let mut attempts = 0usize;
    while draws.len() < samples {
        attempts += 1;
        if attempts > 1000 * samples.max(1) {
            return Err(Error::Precondition("could not draw admissible quadruples".into()));
        }
        let s1 = rng.gen_range(0.0..l);
        let span = rng.gen_range(0.0..0.5) * l;
        let s4 = s1 + span;
        if span <= 0.0 || body.turning_angle(s1, s4) > max_turn {
            continue;
        }
        let f2 = 10f64.powf(rng.gen_range(-3.0..-0.31));
        let f3 = 10f64.powf(rng.gen_range(-3.0..-0.31));
        draws.push([s1, s1 + f2 * span, s4 - f3 * span, s4]);
    }
    let cases: Vec<Result<QuadrangleCase>> = draws.par_iter().map(|&q| quadrangle_check(body, disk, q)).collect();
    let mut out = Vec::new();
    for c in cases {
        let c = c?;
        if !c.holds {
            out.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spindle_geom::intersect_translates;
    use std::f64::consts::PI;

    fn unit() -> SymmetricDisk {
        SymmetricDisk::unit_circle()
    }

    fn lens() -> CPolygon {
        intersect_translates(&unit(), &[Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0)]).unwrap()
    }

    #[test]
    fn generator_two_gon_is_the_disk() {
        let d = unit();
        let r = max_inscribed_area(d.curve(), &d, 2, 64).unwrap();
        assert!((r.area - PI).abs() < 1e-9, "{}", r.area);
        assert!((r.polygon.area() - PI).abs() < 1e-9);
    }

    #[test]
    fn lens_two_gon_is_the_lens() {
        let d = unit();
        let k = lens();
        let r = max_inscribed_area(&k, &d, 2, 64).unwrap();
        assert!((r.area - k.area()).abs() < 1e-12, "{} vs {}", r.area, k.area());
    }

    #[test]
    fn dp_matches_exhaustive_enumeration() {
        let d = unit();
        let k = lens();
        let t = WeightTable::new(&k, &d, 60).unwrap();
        let (dp, chain) = t.best_chain(3).unwrap();
        let (ex, ex_chain) = exhaustive_best(&t, 3);
        assert_eq!(dp, ex);
        assert_eq!(t.chain_area(&chain), t.chain_area(&ex_chain));
        let tri = intersect_translates(&d, &[Vec2::new(0.0, 0.3), Vec2::new(0.26, -0.15), Vec2::new(-0.26, -0.15)]).unwrap();
        for m in [16, 24, 32, 40] {
            let t = WeightTable::new(&tri, &d, m).unwrap();
            for n in 2..=4 {
                assert_eq!(t.best_chain(n).unwrap().0, exhaustive_best(&t, n).0, "m = {m}, n = {n}");
            }
        }
    }

    #[test]
    fn generator_sequence_is_flat() {
        let d = unit();
        let rep = dowker_report(d.curve(), &d, 3, 6, 96).unwrap();
        for e in &rep.entries {
            assert!((e.area - PI).abs() < 1e-9);
        }
        for (_, v) in &rep.second_differences {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn three_disk_body_is_concave_and_monotone() {
        let d = unit();
        let h = 0.8 / 3f64.sqrt();
        let centres: Vec<Vec2> = (0..3).map(|k| Vec2::from_angle(PI / 2.0 + 2.0 * PI * k as f64 / 3.0) * h).collect();
        let k = intersect_translates(&d, &centres).unwrap();
        let rep = dowker_report(&k, &d, 3, 7, 512).unwrap();
        assert!(rep.is_concave(1e-6), "{:?}", rep.second_differences);
        assert!(rep.is_monotone(1e-12));
        for e in &rep.entries {
            assert!(e.area <= k.area() + 1e-12);
            assert!(e.area >= e.grid_area);
        }
    }

    #[test]
    fn degenerate_quadruple_is_equality() {
        let d = unit();
        let k = lens();
        let c = quadrangle_check(&k, &d, [0.2, 0.2, 0.5, 0.9]).unwrap();
        assert_eq!(c.lhs, c.rhs);
        assert!(c.holds);
    }

    #[test]
    fn lens_satisfies_quadrangle_inequality() {
        let d = unit();
        let k = lens();
        assert!(quadrangle_sweep(&k, &d, 100, 4).unwrap().is_empty());
        assert!(quadrangle_sweep(d.curve(), &d, 100, 4).unwrap().is_empty());
    }

    #[test]
    fn wide_quadruple_is_rejected() {
        let d = unit();
        let c = d.curve();
        assert!(matches!(quadrangle_check(c, &d, [0.0, 1.0, 2.0, 3.5]), Err(Error::Precondition(_))));
        assert!(matches!(quadrangle_check(c, &d, [0.0, 2.0, 1.0, 2.5]), Err(Error::Precondition(_))));
    }

    #[test]
    fn bad_sizes_are_rejected() {
        let d = unit();
        assert!(max_inscribed_area(d.curve(), &d, 5, 20).is_err());
        assert!(dowker_report(d.curve(), &d, 2, 5, 64).is_err());
    }
}
