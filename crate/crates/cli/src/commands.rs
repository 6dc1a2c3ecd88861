//! The seven experiments. Each returns its CSV table, a JSON result and an
//! optional SVG figure; writing them out is left to the caller.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde_json::{json, Value};

use dowker_core::construct::{build_counterexample_disk, verify_violation, CounterexampleSpec};
use dowker_core::dowker_lab::{dowker_report, quadrangle_sweep};
use dowker_core::geom::wrap_period;
use dowker_core::io::{self, fmt_num};
use dowker_core::metrics::{hausdorff_distance, pm_distance_dyadic, pm_distance_smooth, refinement_demo, MeasuredBody};
use dowker_core::spindle_geom::intersect_translates;
use dowker_core::variation::{angle_frame, fd_mixed_a, mixed_partial_a, relative_error};
use dowker_core::{Body, Boundary, BoundaryCurve, CurvatureProfile, Error, Result, SymmetricDisk, Vec2};

use crate::config::{BodyKind, Config, DiskKind, DiskSpec};

/// Denominator floor for relative errors, so exact zeros compare absolutely.
const REL_FLOOR: f64 = 1e-3;
/// Second differences and monotonicity are judged relative to `area(K)`.
const DOWKER_TOL: f64 = 1e-6;

pub struct Output {
    pub csv: String,
    pub result: Value,
    pub svg: Option<String>,
}

pub const COMMANDS: [&str; 7] =
    ["reconstruct", "dowker", "quadrangle", "derivative-check", "pm-distance", "refinement-demo", "counterexample"];

pub fn run(command: &str, cfg: &Config, svg: bool) -> Result<Output> {
    match command {
        "reconstruct" => reconstruct(cfg, svg),
        "dowker" => dowker(cfg, svg),
        "quadrangle" => quadrangle(cfg, svg),
        "derivative-check" => derivative_check(cfg, svg),
        "pm-distance" => pm_distance(cfg, svg),
        "refinement-demo" => refinement(cfg),
        "counterexample" => counterexample(cfg, svg),
        other => Err(Error::Precondition(format!("unknown command {other}"))),
    }
}

fn counterexample_spec(cfg: &Config, base: SymmetricDisk) -> CounterexampleSpec {
    let c = &cfg.counterexample;
    CounterexampleSpec {
        kappa0: c.kappa0,
        lambda: c.lambda,
        s0: c.s0,
        delta: c.delta,
        epsilon: c.epsilon,
        base,
        control: c.control,
    }
}

fn build_disk(spec: &DiskSpec, cfg: &Config) -> Result<SymmetricDisk> {
    match spec.kind {
        DiskKind::Circle => SymmetricDisk::circle(spec.radius),
        DiskKind::Profile => {
            let path = spec.path.as_ref().ok_or_else(|| Error::Precondition("profile disk without a path".into()))?;
            let text = std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
            SymmetricDisk::from_profile(io::read_profile_csv(&text)?)
        }
        DiskKind::Counterexample => {
            Ok(build_counterexample_disk(&counterexample_spec(cfg, SymmetricDisk::unit_circle()))?.disk)
        }
    }
}

fn build_body(cfg: &Config, disk: &SymmetricDisk) -> Result<Body> {
    let b = &cfg.body;
    Ok(match b.kind {
        BodyKind::Translates => {
            let centers: Vec<Vec2> = b.translates.iter().map(|c| Vec2::new(c[0], c[1])).collect();
            intersect_translates(disk, &centers)?.into()
        }
        BodyKind::Circle => BoundaryCurve::reconstruct(CurvatureProfile::circle(b.radius)?)?.into(),
        BodyKind::Disk => disk.curve().clone().into(),
    })
}

fn outline_svg(body: &Body) -> String {
    io::render_inscribed(body, &[])
}

fn reconstruct(cfg: &Config, svg: bool) -> Result<Output> {
    let disk = build_disk(&cfg.disk, cfg)?;
    let curve = disk.curve();
    let closure = curve.closure();
    let result = json!({
        "length": curve.length(),
        "area": curve.area(),
        "total_turning": curve.profile().total_turning(),
        "closure_position": closure.position,
        "closure_angle": closure.angle,
        "circle_radius": curve.circle_radius(),
        "samples": cfg.reconstruct.samples,
    });
    Ok(Output {
        csv: io::curve_csv(curve, cfg.reconstruct.samples),
        result,
        svg: svg.then(|| io::render_inscribed(curve, &[])),
    })
}

fn dowker(cfg: &Config, svg: bool) -> Result<Output> {
    let disk = build_disk(&cfg.disk, cfg)?;
    let body = build_body(cfg, &disk)?;
    let d = &cfg.dowker;
    let report = dowker_report(&body, &disk, d.n_min, d.n_max, d.grid)?;
    let mut csv = String::from("n,a_n,second_diff\n");
    for e in &report.entries {
        let diff = report.second_differences.iter().find(|x| x.0 == e.n).map(|x| fmt_num(x.1)).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{}", e.n, fmt_num(e.area), diff);
    }
    let figure = svg.then(|| {
        let polys: Vec<Vec<Vec2>> =
            report.entries.iter().map(|e| io::sample_boundary(&e.polygon, 0.0, e.polygon.perimeter(), 512)).collect();
        io::render_inscribed(&body, &polys)
    });
    let result = json!({
        "body_area": report.body_area,
        "entries": report.entries,
        "second_differences": report.second_differences,
        "max_second_difference": report.max_second_difference(),
        "tolerance": DOWKER_TOL * report.body_area,
        "concave": report.is_concave(DOWKER_TOL),
        "monotone": report.is_monotone(DOWKER_TOL),
    });
    Ok(Output { csv, result, svg: figure })
}

fn quadrangle(cfg: &Config, svg: bool) -> Result<Output> {
    let disk = build_disk(&cfg.disk, cfg)?;
    let body = build_body(cfg, &disk)?;
    let seed = cfg.seed.expect("validated");
    let samples = cfg.quadrangle.samples;
    let violations = quadrangle_sweep(&body, &disk, samples, seed)?;
    let mut csv = String::from("s1,s2,s3,s4,lhs,rhs,margin\n");
    for v in &violations {
        let p = v.params;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt_num(p[0]),
            fmt_num(p[1]),
            fmt_num(p[2]),
            fmt_num(p[3]),
            fmt_num(v.lhs),
            fmt_num(v.rhs),
            fmt_num(v.margin())
        );
    }
    let figure = if svg {
        Some(match &body {
            Body::Polygon(k) => {
                let regions: Vec<(f64, f64)> =
                    violations.first().map(|v| vec![(v.params[0], v.params[3]), (v.params[1], v.params[2])]).unwrap_or_default();
                io::render_cpolygon(k, &regions)?
            }
            Body::Curve(_) => outline_svg(&body),
        })
    } else {
        None
    };
    let result = json!({
        "samples": samples,
        "violations": violations.len(),
        "holds": violations.is_empty(),
        "cases": violations,
    });
    Ok(Output { csv, result, svg: figure })
}

/// `s < t` with turning in `[0.2, π − 0.2]`, both clear of corners by 2% of
/// the perimeter.
fn admissible_pair<R: Rng>(body: &Body, rng: &mut R) -> Result<(f64, f64)> {
    let l = body.perimeter();
    let corners = body.corners();
    let clear = |x: f64| {
        corners.iter().all(|&c| {
            let d = wrap_period(x - c, l);
            d.min(l - d) > 0.02 * l
        })
    };
    for _ in 0..100_000 {
        let s = rng.gen_range(0.0..l);
        let t = s + rng.gen_range(0.05..0.45) * l;
        let turn = body.turning_angle(s, t);
        if turn > 0.2 && turn < PI - 0.2 && clear(s) && clear(t) {
            return Ok((s, t));
        }
    }
    Err(Error::Precondition("could not draw an admissible pair away from corners".into()))
}

fn derivative_check(cfg: &Config, svg: bool) -> Result<Output> {
    let disk = build_disk(&cfg.disk, cfg)?;
    let body = build_body(cfg, &disk)?;
    let seed = cfg.seed.expect("validated");
    let d = &cfg.derivative_check;
    let h = d.step * body.perimeter();
    let mut rng = dowker_core::rng::stream(seed, "derivative-check");
    let mut csv = String::from("s,t,analytic,finite_diff,rel_err\n");
    let mut worst: f64 = 0.0;
    let mut pairs = Vec::with_capacity(d.samples);
    for _ in 0..d.samples {
        let (s, t) = admissible_pair(&body, &mut rng)?;
        let analytic = mixed_partial_a(&angle_frame(&disk, &body, s, t)?)?;
        let fd = fd_mixed_a(&disk, &body, s, t, h)?;
        let err = relative_error(analytic, fd, REL_FLOOR);
        worst = worst.max(err);
        let _ = writeln!(csv, "{},{},{},{},{}", fmt_num(s), fmt_num(t), fmt_num(analytic), fmt_num(fd), fmt_num(err));
        pairs.push((s, t));
    }
    let figure = svg.then(|| {
        let chords: Vec<Vec<Vec2>> = pairs.iter().map(|&(s, t)| vec![body.point(s), body.point(t)]).collect();
        io::render_inscribed(&body, &chords)
    });
    let result = json!({
        "samples": d.samples,
        "step": h,
        "relative_error_floor": REL_FLOOR,
        "max_relative_error": worst,
    });
    Ok(Output { csv, result, svg: figure })
}

fn pm_distance(cfg: &Config, svg: bool) -> Result<Output> {
    let c = build_disk(&cfg.disk, cfg)?;
    let d = build_disk(&cfg.other, cfg)?;
    let smooth = pm_distance_smooth(&c, &d);
    let (mc, md): (MeasuredBody, MeasuredBody) = ((&c).into(), (&d).into());
    let hausdorff = hausdorff_distance(&mc, &md);
    let dyadic = pm_distance_dyadic(&c, &d, cfg.pm_distance.depth);
    let mut csv = String::from("n,d_H,d_PM\n");
    for (level, v) in dyadic.iter().enumerate() {
        let _ = writeln!(csv, "{},{},{}", level, fmt_num(hausdorff), fmt_num(*v));
    }
    let gap = smooth.value.finite().zip(dyadic.last()).map(|(s, b)| s - b);
    let result = json!({
        "pm_distance": smooth,
        "hausdorff": hausdorff,
        "dyadic_lower_bounds": dyadic,
        "dyadic_gap": gap,
    });
    Ok(Output { csv, result, svg: svg.then(|| io::render_overlay(&c, &d, 1.0)) })
}

fn refinement(cfg: &Config) -> Result<Output> {
    let rows = refinement_demo(cfg.refinement_demo.n_max)?;
    let mut csv = String::from("n,d_H,d_PM\n");
    for r in &rows {
        let pm = r.pm.value.finite().map(fmt_num).unwrap_or_else(|| "inf".into());
        let _ = writeln!(csv, "{},{},{}", r.n, fmt_num(r.hausdorff), pm);
    }
    Ok(Output { csv, result: json!({ "rows": rows }), svg: None })
}

fn counterexample(cfg: &Config, svg: bool) -> Result<Output> {
    let base = build_disk(&cfg.disk, cfg)?;
    let spec = counterexample_spec(cfg, base.clone());
    let built = build_counterexample_disk(&spec)?;
    let report = verify_violation(&built.disk, &spec, &cfg.counterexample.s_bar)?;
    let mut csv = String::from("s_bar,analytic,ratio,predicted\n");
    for r in &report.rows {
        let _ = writeln!(csv, "{},{},{},{}", fmt_num(r.s_bar), fmt_num(r.analytic), fmt_num(r.ratio), fmt_num(report.predicted));
    }
    let pm = pm_distance_smooth(&built.disk, &base);
    let result = json!({
        "threshold": spec.threshold(),
        "build": built.report,
        "pm_distance_to_base": pm,
        "violation": report,
    });
    Ok(Output {
        csv,
        result,
        svg: svg.then(|| io::render_overlay(&base, &built.disk, cfg.counterexample.exaggeration)),
    })
}
