//! Bodies and samplers shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use dowker_core::body::Boundary;
use dowker_core::boundary_curve::SymmetricDisk;
use dowker_core::geom::{wrap_period, Vec2};
use dowker_core::profile::CurvatureProfile;
use dowker_core::spindle_geom::{intersect_translates, CPolygon};
use rand::Rng;

pub fn unit() -> SymmetricDisk {
    SymmetricDisk::unit_circle()
}

pub fn lens() -> CPolygon {
    intersect_translates(&unit(), &[Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0)]).unwrap()
}

pub fn three_disk() -> CPolygon {
    let h = 0.8 / 3f64.sqrt();
    let centres: Vec<Vec2> = (0..3).map(|k| Vec2::from_angle(PI / 2.0 + 2.0 * PI * k as f64 / 3.0) * h).collect();
    intersect_translates(&unit(), &centres).unwrap()
}

/// Radius of curvature `1 + 0.3 cos 2u`.
pub fn oval() -> SymmetricDisk {
    let p = CurvatureProfile::from_curvature_radius(|u| 1.0 + 0.3 * (2.0 * u).cos(), 64).unwrap();
    SymmetricDisk::from_profile(p).unwrap()
}

pub fn oval_three_gon(c: &SymmetricDisk) -> CPolygon {
    intersect_translates(c, &[Vec2::new(0.25, 0.05), Vec2::new(-0.2, 0.2), Vec2::new(-0.05, -0.25)]).unwrap()
}

/// Intersection of `k` unit disks centred in the disk of radius `0.6`.
pub fn random_body<R: Rng>(rng: &mut R, k: usize) -> CPolygon {
    let centres: Vec<Vec2> = (0..k)
        .map(|_| {
            let r = 0.6 * rng.gen_range(0.0f64..1.0).sqrt();
            Vec2::from_angle(rng.gen_range(0.0..2.0 * PI)) * r
        })
        .collect();
    intersect_translates(&unit(), &centres).unwrap()
}

/// `s < t` with turning angle in `[0.2, π − 0.2]`, both at least `2%` of
/// the perimeter from every listed corner.
pub fn admissible_pair<B: Boundary + ?Sized, R: Rng>(body: &B, rng: &mut R) -> (f64, f64) {
    let l = body.perimeter();
    let corners = body.corners();
    loop {
        let s = rng.gen_range(0.0..l);
        let t = s + rng.gen_range(0.05..0.45) * l;
        let turn = body.turning_angle(s, t);
        let clear = |x: f64| {
            corners.iter().all(|&c| {
                let d = wrap_period(x - c, l);
                d.min(l - d) > 0.02 * l
            })
        };
        if turn > 0.2 && turn < PI - 0.2 && clear(s) && clear(t) {
            return (s, t);
        }
    }
}
