//! Spindle convexity with respect to an origin-symmetric generator disk `C`.
//!
//! The crate is organised around a handful of modules:
//!
//! - [`profile`] and [`boundary_curve`]: arclength-parametrized boundaries
//!   rebuilt from curvature data.
//! - [`spindle_geom`]: C-spindles, C-hulls, C-n-gons and the cap regions
//!   `r_K(p, q)`.
//! - [`dowker_lab`]: maximum-area inscribed C-n-gons and the four-point
//!   area inequality.
//! - [`variation`]: closed-form mixed partial derivatives of the cap area.
//! - [`metrics`]: surface area measures, the perimeter-measure distance and
//!   Hausdorff distance.
//! - [`construct`]: disks with locally parabolic curvature that break the
//!   four-point inequality.
//! - [`io`]: CSV and text formats, SVG figures.

pub mod body;
pub mod boundary_curve;
pub mod construct;
pub mod dowker_lab;
pub mod error;
pub mod geom;
pub mod io;
pub mod metrics;
pub mod profile;
pub mod quadrature;
pub mod rng;
pub mod spindle_geom;
pub mod variation;

pub use body::{Body, Boundary};
pub use boundary_curve::{BoundaryCurve, SymmetricDisk};
pub use error::{Error, Result};
pub use geom::Vec2;
pub use profile::CurvatureProfile;
pub use spindle_geom::{CPolygon, Spindle, SpindleArc};

/// Library version string, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
