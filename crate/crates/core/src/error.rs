use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curvature profile: {0}")]
    InvalidProfile(String),

    #[error(
        "profile does not close: position residual {position:.3e} (limit {position_limit:.3e}), \
         turning residual {angle:.3e} (limit {angle_limit:.3e})"
    )]
    NotClosed {
        position: f64,
        position_limit: f64,
        angle: f64,
        angle_limit: f64,
    },

    #[error("boundary is not origin-symmetric: max |Θ(s + L/2) + Θ(s)| = {residual:.3e}")]
    NotSymmetric { residual: f64 },

    #[error("no translate of C contains both points: chord {length:.6e} exceeds {limit:.6e}")]
    WholePlane { length: f64, limit: f64 },

    #[error("intersection of translates is empty or degenerate")]
    EmptyIntersection,

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular configuration: |sin(θq − θp)| = {0:.3e}")]
    Singular(f64),

    #[error("angle ordering violated: {0}")]
    Ordering(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
