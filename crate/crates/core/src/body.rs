//! Arclength-parametrized convex bodies, smooth or with corners.

use crate::boundary_curve::BoundaryCurve;
use crate::geom::{wrap_period, Vec2};
use crate::spindle_geom::CPolygon;

/// The counterclockwise boundary `Γ` of a convex disk, parametrized by
/// arclength and extended periodically to all real parameters.
pub trait Boundary {
    fn perimeter(&self) -> f64;

    fn point(&self, s: f64) -> Vec2;

    /// Lifted tangent angle, right-continuous at corners.
    fn tangent_angle(&self, s: f64) -> f64;

    /// Lifted tangent angle, left-continuous at corners.
    fn tangent_angle_before(&self, s: f64) -> f64 {
        self.tangent_angle(s)
    }

    fn curvature(&self, s: f64) -> f64;

    /// `Γ(b) − Γ(a)` for `a ≤ b`.
    fn displacement(&self, a: f64, b: f64) -> Vec2;

    /// `∫ₐᵇ |Γ(u) − Γ(a), Γ'(u)| du` for `a ≤ b`.
    fn chord_sweep(&self, a: f64, b: f64) -> f64;

    fn area(&self) -> f64;

    fn support(&self, u: f64) -> f64;

    /// Parameters in `[0, L)` where the tangent jumps.
    fn corners(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Tangent increase along the counterclockwise arc from `s1` to `s2`,
    /// corners inside the arc included.
    fn turning_angle(&self, s1: f64, s2: f64) -> f64 {
        let l = self.perimeter();
        let a = wrap_period(s1, l);
        let mut b = wrap_period(s2, l);
        if b < a {
            b += l;
        }
        if b == a {
            return 0.0;
        }
        (self.tangent_angle_before(b) - self.tangent_angle(a)).max(0.0)
    }
}

impl Boundary for BoundaryCurve {
    fn perimeter(&self) -> f64 {
        self.length()
    }

    fn point(&self, s: f64) -> Vec2 {
        BoundaryCurve::point(self, s)
    }

    fn tangent_angle(&self, s: f64) -> f64 {
        BoundaryCurve::tangent_angle(self, s)
    }

    fn curvature(&self, s: f64) -> f64 {
        BoundaryCurve::curvature(self, s)
    }

    fn displacement(&self, a: f64, b: f64) -> Vec2 {
        BoundaryCurve::displacement(self, a, b)
    }

    fn chord_sweep(&self, a: f64, b: f64) -> f64 {
        BoundaryCurve::chord_sweep(self, a, b)
    }

    fn area(&self) -> f64 {
        BoundaryCurve::area(self)
    }

    fn support(&self, u: f64) -> f64 {
        BoundaryCurve::support(self, u)
    }

    fn turning_angle(&self, s1: f64, s2: f64) -> f64 {
        BoundaryCurve::turning_angle(self, s1, s2)
    }
}

/// A convex disk used as the body `K`.
#[derive(Clone, Debug)]
pub enum Body {
    Curve(BoundaryCurve),
    Polygon(CPolygon),
}

impl From<BoundaryCurve> for Body {
    fn from(c: BoundaryCurve) -> Self {
        Body::Curve(c)
    }
}

impl From<CPolygon> for Body {
    fn from(p: CPolygon) -> Self {
        Body::Polygon(p)
    }
}

macro_rules! delegate {
    ($self:ident, $b:ident => $e:expr) => {
        match $self {
            Body::Curve($b) => $e,
            Body::Polygon($b) => $e,
        }
    };
}

impl Boundary for Body {
    fn perimeter(&self) -> f64 {
        delegate!(self, b => b.perimeter())
    }

    fn point(&self, s: f64) -> Vec2 {
        delegate!(self, b => Boundary::point(b, s))
    }

    fn tangent_angle(&self, s: f64) -> f64 {
        delegate!(self, b => Boundary::tangent_angle(b, s))
    }

    fn tangent_angle_before(&self, s: f64) -> f64 {
        delegate!(self, b => b.tangent_angle_before(s))
    }

    fn curvature(&self, s: f64) -> f64 {
        delegate!(self, b => Boundary::curvature(b, s))
    }

    fn displacement(&self, a: f64, b_: f64) -> Vec2 {
        delegate!(self, b => Boundary::displacement(b, a, b_))
    }

    fn chord_sweep(&self, a: f64, b_: f64) -> f64 {
        delegate!(self, b => Boundary::chord_sweep(b, a, b_))
    }

    fn area(&self) -> f64 {
        delegate!(self, b => Boundary::area(b))
    }

    fn support(&self, u: f64) -> f64 {
        delegate!(self, b => Boundary::support(b, u))
    }

    fn corners(&self) -> Vec<f64> {
        delegate!(self, b => b.corners())
    }

    fn turning_angle(&self, s1: f64, s2: f64) -> f64 {
        delegate!(self, b => Boundary::turning_angle(b, s1, s2))
    }
}
