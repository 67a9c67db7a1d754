//! Solver and verification toolkit for the Hardy-weighted mean field equation
//!
//!     -Δu - u/(1-|x|²)² = λ eᵘ   on the unit disc,  u = 0 on the boundary,
//!
//! restricted to radial solutions with finite relative Hardy energy. The crate
//! provides:
//!
//! * hyperbolic geometry primitives on the Poincaré disc ([`geometry`]),
//! * the Green's function of -Δ - 1/(1-|x|²)² with a quadrature path and a
//!   fast elliptic-integral path ([`greens`]),
//! * a shooting solver in logarithmic radius with a Frobenius boundary frame
//!   ([`radial`]) and branch continuation in the center value ([`continuation`]),
//! * an independent verification suite: Pohozaev identities, blow-up profile,
//!   outer Green limit, decay envelope, energy criticality ([`analysis`]),
//! * bit-stable JSON/CSV serialization and run configuration ([`io`], [`config`]).

pub mod analysis;
pub mod config;
pub mod continuation;
pub mod geometry;
pub mod greens;
pub mod io;
pub mod ode;
pub mod quad;
pub mod radial;
pub mod tolerances;

pub use analysis::VerificationReport;
pub use config::RunConfig;
pub use continuation::{Branch, BranchPoint};
pub use geometry::DiscPoint;
pub use quad::QuadratureSpec;
pub use radial::{BoundaryFrame, RadialSolution};

/// Error type shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point ({0}, {1}) lies outside the open unit disc")]
    OutsideDisc(f64, f64),

    #[error("Green's function is singular at coincident points")]
    CoincidentPoints,

    #[error("{0}")]
    Domain(String),

    #[error("quadrature tolerance not met after {subdivisions} subdivisions (error estimate {estimate:.3e})")]
    ToleranceNotMet { subdivisions: u32, estimate: f64 },

    #[error("integration step size underflow at t = {t:.6e} (state leaves the representable range)")]
    StepUnderflow { t: f64 },

    #[error("overflow guard: lambda*exp(c) = {0:.3e} exceeds 1e300")]
    OverflowGuard(f64),

    #[error("boundary defect has no sign change on the bracket [{0:.6e}, {1:.6e}]")]
    NoSignChange(f64, f64),

    #[error("no admissible solution in the configured windows")]
    NoSolution,

    #[error("branch tracing failed at {failed} of {total} points")]
    BranchFailures { failed: usize, total: usize },

    #[error("fit needs at least {need} tail points, found {have}")]
    InsufficientPoints { need: usize, have: usize },

    #[error("invalid solution data: {0}")]
    InvalidSolution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
