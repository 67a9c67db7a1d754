//! Numeric tolerances and control constants, collected in one place.
//!
//! Each constant documents why its value was chosen. Anything that is a
//! run-time knob lives in [`crate::config::RunConfig`] and merely defaults to
//! the values here; anything that is a structural property of an algorithm
//! (stencil widths, damping exponents) is referenced directly from the code.

use std::f64::consts::PI;

/// Default mixed (absolute = relative) tolerance for the adaptive
/// Runge-Kutta integrator. 1e-10 keeps the accumulated solution error two
/// orders below the 1e-6 exact-identity budget over the longest traced span
/// (about 20 units of log-radius at the deepest center values).
pub const INTEGRATOR_TOL: f64 = 1e-10;

/// Accepted shooting roots must satisfy |beta| <= DEFECT_REL_TOL * |alpha|:
/// the log-branch coefficient is measured against the regular-branch
/// coefficient, which is O(1)..O(10) on the traced branch. The root finder
/// terminates on relative bracket width LAMBDA_ROOT_RTOL; with the observed
/// defect slope d(beta)/d(ln lambda) of order one, that leaves |beta|/|alpha|
/// near 1e-11, an order inside this acceptance bound.
pub const DEFECT_REL_TOL: f64 = 1e-9;

/// Relative bracket width in lambda at which root refinement stops. Must be
/// relative: traced lambdas span 1e-4 down to 1e-14, so any absolute width
/// would either stall shallow roots or under-resolve deep ones.
pub const LAMBDA_ROOT_RTOL: f64 = 1e-10;

/// Absolute tolerance in c at which root refinement in the center value
/// stops (fixed-lambda solves). c is O(10) on the admissible window, so an
/// absolute width is appropriate; 1e-10 leaves duplicate detection at
/// C_DEDUP_TOL three orders of headroom.
pub const C_ROOT_ATOL: f64 = 1e-10;

/// Two refined center-value roots closer than this are reported as one
/// solution.
pub const C_DEDUP_TOL: f64 = 1e-8;

/// Step cap (in log-radius) applied to the final accepted solve only. The
/// stored mesh feeds finite-difference residual verification, whose
/// truncation error scales like the cube of the spacing; 2.5e-3 puts that
/// truncation below the residual budget over the checkable region. Root
/// finding iterates run uncapped: they only need the endpoint state.
pub const FINAL_STEP_CAP_TAU: f64 = 2.5e-3;

/// Pointwise ODE residual bound, relative to the natural forcing scale
/// lambda*exp(c) of the solution: |u'' + u'/r + u/(1-r²)² + λeᵘ| at interior
/// mesh points must not exceed ODE_RESIDUAL_FACTOR * lambda*exp(c).
pub const ODE_RESIDUAL_FACTOR: f64 = 1e-6;

/// Finite-difference checks are only meaningful where the stencil resolves
/// the boundary layer: at distance s = 1-r below this cut the stored spacing
/// is no longer small against s and the mesh is validated against the
/// boundary frame instead.
pub const FD_BOUNDARY_CUT: f64 = 0.02;

/// Default matching offset delta: the boundary frame is fitted at
/// r = 1 - MATCH_DELTA. Balances frame truncation (relative error O(delta))
/// against integrator cost approaching the singular point.
pub const MATCH_DELTA: f64 = 1e-3;

/// Matching offsets outside [1e-5, 0.05] are rejected: below, the integrator
/// fights the singularity for no accuracy gain; above, the truncated frame
/// series is no longer trustworthy.
pub const MATCH_DELTA_RANGE: (f64, f64) = (1e-5, 0.05);

/// Start radius factor: integration starts at r0 = 1e-3 * min(1, r_scale)
/// where r_scale = 2*sqrt(2)/sqrt(lambda*exp(c)) is the core width. The
/// quartic Taylor truncation error at that radius is far below integrator
/// tolerance.
pub const START_RADIUS_FACTOR: f64 = 1e-3;

/// Reject parameter pairs with lambda*exp(c) above this guard: the forcing
/// term overflows binary64 shortly above it.
pub const OVERFLOW_GUARD: f64 = 1e300;

/// AGM iteration for the complete elliptic integral stops when
/// |a_n - b_n| <= AGM_RTOL * a_n; quadratic convergence reaches this in at
/// most six iterations for the moduli that arise here.
pub const AGM_RTOL: f64 = 1e-15;

/// The quadrature Green's function and the elliptic-integral path must agree
/// to this relative tolerance (cross-validation of two independent
/// evaluation routes).
pub const GREEN_CROSS_RTOL: f64 = 1e-10;

/// Default quadrature tolerances for the phi integral and the radial
/// integrals of the verification suite.
pub const QUAD_ABS_TOL: f64 = 1e-13;
pub const QUAD_REL_TOL: f64 = 1e-13;

/// Total panel-split budget for adaptive quadrature. The hardest integrand
/// in the suite (the phi integrand at u = 1e-10) resolves in well under a
/// thousand panels; hitting this budget indicates a misuse.
pub const QUAD_MAX_SUBDIVISIONS: u32 = 4000;

/// Mass window (C1, C2) for admissible solutions: brackets the concentration
/// limit 8*pi with a factor-safe margin and excludes small linear-response
/// solutions.
pub const MASS_WINDOW: (f64, f64) = (4.0 * PI, 12.0 * PI);

/// Default center-value search window for fixed-lambda solves.
pub const C_WINDOW: (f64, f64) = (5.0, 60.0);

/// Default number of scan points when bracketing defect sign changes over
/// the center-value window.
pub const N_SCAN: usize = 96;

/// Tail threshold for the asymptote fit: points with c >= 35 (lambda below
/// about 1e-8) have their finite-size corrections visibly below the fit
/// residual.
pub const C_TAIL_THRESHOLD: f64 = 35.0;

/// Branch points whose warm-started root find needs more defect evaluations
/// than this indicate a regression in the continuation logic.
pub const WARM_START_EVAL_BUDGET: usize = 30;

/// Fraction of branch points allowed to fail (skip-and-record) before the
/// trace as a whole errors out.
pub const BRANCH_FAILURE_FRACTION: f64 = 0.10;

/// Exact integral identities (Pohozaev, energy criticality) must close to
/// this relative tolerance on every accepted solution; they hold exactly in
/// real arithmetic, so the budget is pure quadrature/integration error.
pub const EXACT_IDENTITY_RTOL: f64 = 1e-6;

/// The weak-form energy and the direct improper-integral route must agree to
/// this relative tolerance. The direct route neglects frame-truncation
/// cross terms of relative size near 1e-6, so its budget is looser than the
/// exact identities'.
pub const ENERGY_CROSS_RTOL: f64 = 1e-5;

/// Closed-form identities evaluated with exact derivatives (linearized
/// kernel, bubble residual) must close to this absolute tolerance.
pub const CLOSED_FORM_ATOL: f64 = 1e-12;

/// Property-test point sampling stays inside radius 0.99: the geometry
/// formulas remain exact up to the boundary, but tolerances of 1e-12..1e-13
/// are only meaningful while 1-|x|² carries significant bits.
pub const SAMPLE_RADIUS_CAP: f64 = 0.99;
