//! Radial shooting solver for u″ + u′/r + u/(1−r²)² + λeᵘ = 0 on (0, 1)
//! with u′(0) = 0 and finite relative Hardy energy at the boundary.
//!
//! The integration runs in τ = ln r, where the transformed equation
//! d²u/dτ² = −e^{2τ}[u/(1−e^{2τ})² + λeᵘ] equidistributes resolution across
//! the concentration core (width ~ e^{−c/2}) and the outer region. Three
//! analytic frames close the two ends:
//!
//! * a center Taylor expansion u = c + a₂r² + a₄r⁴ seeding the start point,
//! * a boundary frame at s = 1−r built from the two Frobenius solutions
//!   w₁ ~ √s and w₂ ~ √s·ln s of u″ + u/(4s²) = 0 plus a particular response
//!   to the −λ forcing; the coefficient β of the log branch is the shooting
//!   defect, since that branch carries infinite relative Hardy energy,
//! * dense Hermite reconstruction between accepted steps, which makes every
//!   stored solution re-evaluable (and re-checkable) from its mesh alone.

use serde::{Deserialize, Serialize};

use crate::ode::{self, IntegrationOptions};
use crate::quad;
use crate::tolerances;
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Core radius 2√2·(λe^c)^{−1/2}: the scale on which a solution with center
/// value c concentrates. Infinite when λ = 0.
pub fn r_lambda(lambda: f64, c: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * (-0.5 * (lambda.ln() + c)).exp()
}

fn check_center_arguments(c: f64, lambda: f64) -> Result<f64> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::Domain(format!("center value must be positive, got c = {c}")));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Domain(format!("lambda must be nonnegative, got {lambda}")));
    }
    if lambda > 0.0 && c + lambda.ln() > 690.0 {
        return Err(Error::OverflowGuard((c + lambda.ln()).exp()));
    }
    Ok(lambda * c.exp())
}

/// Start radius for the shooting integration: 1e−3·min(1, r_core), small
/// enough that the quartic Taylor truncation sits below integrator tolerance.
pub fn start_radius(c: f64, lambda: f64) -> Result<f64> {
    check_center_arguments(c, lambda)?;
    let scale = if lambda == 0.0 { 1.0 } else { r_lambda(lambda, c).min(1.0) };
    Ok(tolerances::START_RADIUS_FACTOR * scale)
}

/// Center Taylor expansion u = c + a₂r² + a₄r⁴ with
/// a₂ = −(c + λe^c)/4 and a₄ = −(a₂(1 + λe^c) + 2c)/16.
#[derive(Debug, Clone, Copy)]
pub struct CenterExpansion {
    pub c: f64,
    pub lambda: f64,
    pub a2: f64,
    pub a4: f64,
    pub r0: f64,
}

impl CenterExpansion {
    pub fn new(c: f64, lambda: f64) -> Result<Self> {
        let le = check_center_arguments(c, lambda)?;
        let a2 = -(c + le) / 4.0;
        let a4 = -(a2 * (1.0 + le) + 2.0 * c) / 16.0;
        let r0 = start_radius(c, lambda)?;
        Ok(Self { c, lambda, a2, a4, r0 })
    }

    pub fn u(&self, r: f64) -> f64 {
        let r2 = r * r;
        self.c + self.a2 * r2 + self.a4 * r2 * r2
    }

    /// du/dr.
    pub fn du(&self, r: f64) -> f64 {
        let r2 = r * r;
        2.0 * self.a2 * r + 4.0 * self.a4 * r2 * r
    }

    /// du/dτ = r·du/dr.
    fn v(&self, r: f64) -> f64 {
        let r2 = r * r;
        2.0 * self.a2 * r2 + 4.0 * self.a4 * r2 * r2
    }

    /// ∫₀^{r_hi} f(r, u, du/dr) dr over the Taylor region, r_hi ≤ r0.
    fn integral<F: Fn(f64, f64, f64) -> f64>(&self, r_hi: f64, f: F) -> f64 {
        let (nodes, weights) = quad::cached_nodes(16);
        let half = 0.5 * r_hi;
        let mut acc = 0.0;
        for (&x, &w) in nodes.iter().zip(weights) {
            let r = half * (x + 1.0);
            acc += w * f(r, self.u(r), self.du(r));
        }
        acc * half
    }
}

/// Series start for the integration: (u(r0), du/dr(r0)) from the center
/// expansion. r0 must satisfy 0 < r0 ≤ 1e−3·min(1, 2√2(λe^c)^{−1/2}).
pub fn taylor_start(c: f64, lambda: f64, r0: f64) -> Result<(f64, f64)> {
    let expansion = CenterExpansion::new(c, lambda)?;
    if !(r0 > 0.0) || r0 > expansion.r0 * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "start radius {r0} outside (0, {:.3e}]",
            expansion.r0
        )));
    }
    Ok((expansion.u(r0), expansion.du(r0)))
}

/// Boundary frame coefficients at s = 1−r = delta: u ≈ α·w₁(s) + β·w₂(s) +
/// u_p(s) with w₁ ~ √s, w₂ ~ √s·ln s. β = 0 characterizes the admissible
/// (finite relative Hardy energy) solution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryFrame {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

struct FrameBasis {
    w1: f64,
    w2: f64,
    dw1: f64,
    dw2: f64,
    up: f64,
    dup: f64,
}

/// The two Frobenius solutions of u″ + u/(4s²) = −λ·(higher order), carried
/// to cubic order in s, with the particular response to the constant −λ
/// forcing. Derivatives are with respect to s.
fn frame_basis(s: f64, lambda: f64) -> FrameBasis {
    let sq = s.sqrt();
    let ls = s.ln();
    let w1 = sq * (1.0 + s * (0.25 + s * (5.0 / 32.0 + s * (15.0 / 128.0))));
    let w2 = w1 * ls + sq * s * (0.5 + s * (5.0 / 16.0 + s * (11.0 / 48.0)));
    let dw1 = (1.0 + s * (0.75 + s * (25.0 / 32.0 + s * (105.0 / 128.0)))) / (2.0 * sq);
    let dw2 = dw1 * ls + w1 / s + sq * (0.75 + s * (25.0 / 32.0 + s * (77.0 / 96.0)));
    let up = -lambda * s * s * (4.0 / 9.0 + s * (28.0 / 225.0 + s * (1033.0 / 11025.0)));
    let dup = -lambda * s * (8.0 / 9.0 + s * (84.0 / 225.0 + s * (4132.0 / 11025.0)));
    FrameBasis { w1, w2, dw1, dw2, up, dup }
}

/// Fit the boundary frame to (u, du/dr) sampled at r = 1−delta.
pub fn frame_fit(u_end: f64, du_end: f64, delta: f64, lambda: f64) -> BoundaryFrame {
    assert!(
        delta > 0.0 && delta <= tolerances::MATCH_DELTA_RANGE.1,
        "matching offset {delta} outside (0, {}]",
        tolerances::MATCH_DELTA_RANGE.1
    );
    let fb = frame_basis(delta, lambda);
    let ubar = u_end - fb.up;
    let ubar_s = -du_end - fb.dup;
    let det = fb.w1 * fb.dw2 - fb.w2 * fb.dw1;
    assert!(det.is_finite() && det.abs() > 0.5, "frame matrix degenerate at delta = {delta}");
    BoundaryFrame {
        alpha: (ubar * fb.dw2 - ubar_s * fb.w2) / det,
        beta: (ubar_s * fb.w1 - ubar * fb.dw1) / det,
        delta,
    }
}

impl BoundaryFrame {
    /// u(s) continued from the frame towards the boundary, s ∈ [0, delta].
    pub fn tail_u(&self, s: f64, lambda: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let fb = frame_basis(s, lambda);
        self.alpha * fb.w1 + self.beta * fb.w2 + fb.up
    }

    /// du/ds on the tail; diverges like s^{−1/2} as s → 0.
    pub fn tail_du_ds(&self, s: f64, lambda: f64) -> f64 {
        let fb = frame_basis(s, lambda);
        self.alpha * fb.dw1 + self.beta * fb.dw2 + fb.dup
    }

    /// ∫₀^{delta} g(s, u, du/ds) ds with the substitution s = t² that removes
    /// the √s endpoint behavior; any area factor belongs to g.
    pub fn tail_integral<G: Fn(f64, f64, f64) -> f64>(&self, lambda: f64, g: G) -> f64 {
        let (nodes, weights) = quad::cached_nodes(32);
        let half = 0.5 * self.delta.sqrt();
        let mut acc = 0.0;
        for (&x, &w) in nodes.iter().zip(weights) {
            let t = half * (x + 1.0);
            let s = t * t;
            acc += w * g(s, self.tail_u(s, lambda), self.tail_du_ds(s, lambda)) * 2.0 * t;
        }
        acc * half
    }
}

fn radial_rhs(lambda: f64) -> impl Fn(f64, &[f64], &mut [f64]) {
    move |tau: f64, y: &[f64], dy: &mut [f64]| {
        let r2 = (2.0 * tau).exp();
        let weight = 1.0 - r2;
        dy[0] = y[1];
        let mut force = y[0] / (weight * weight);
        if lambda > 0.0 {
            force += lambda * y[0].exp();
        }
        dy[1] = -r2 * force;
    }
}

fn shoot(
    center: &CenterExpansion,
    r_end: f64,
    tol: f64,
    cap: Option<f64>,
) -> Result<Vec<ode::Step>> {
    let r0 = center.r0;
    if r_end <= r0 {
        return Err(Error::Domain(format!(
            "integration endpoint {r_end} does not exceed the start radius {r0:.3e}"
        )));
    }
    let y0 = [center.u(r0), center.v(r0)];
    let opts = IntegrationOptions {
        rtol: tol,
        atol: tol,
        max_step: cap,
        ..Default::default()
    };
    ode::integrate(radial_rhs(center.lambda), r0.ln(), r_end.ln(), &y0, &opts)
}

/// One point of an integrated path in the physical radial variable.
#[derive(Debug, Clone, Copy)]
pub struct PathPoint {
    pub r: f64,
    pub u: f64,
    pub du: f64,
}

/// Integrate the radial equation from the Taylor start out to `r_end`,
/// returning every accepted step as (r, u, du/dr).
pub fn integrate(c: f64, lambda: f64, r_end: f64, tol: f64) -> Result<Vec<PathPoint>> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !(r_end <= 1.0 - 1e-6) {
        return Err(Error::Domain(format!("endpoint {r_end} exceeds 1 − 1e−6")));
    }
    let center = CenterExpansion::new(c, lambda)?;
    let steps = shoot(&center, r_end, tol, None)?;
    Ok(steps
        .iter()
        .map(|s| {
            let r = s.t.exp();
            PathPoint { r, u: s.y[0], du: s.y[1] / r }
        })
        .collect())
}

/// Shoot to r = 1−delta and fit the boundary frame there. The β component
/// is the defect a root finder drives to zero.
pub fn boundary_defect(c: f64, lambda: f64, delta: f64, tol: f64) -> Result<BoundaryFrame> {
    let (lo, hi) = tolerances::MATCH_DELTA_RANGE;
    if !(delta >= lo && delta <= hi) {
        return Err(Error::Domain(format!(
            "matching offset {delta} outside [{lo:.0e}, {hi}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let center = CenterExpansion::new(c, lambda)?;
    let steps = shoot(&center, 1.0 - delta, tol, None)?;
    let end = steps.last().expect("integration returns at least the start point");
    let r = end.t.exp();
    Ok(frame_fit(end.y[0], end.y[1] / r, delta, lambda))
}

/// Solver knobs shared by the root-finding entry points.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverSettings {
    pub tol: f64,
    pub match_delta: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol: tolerances::INTEGRATOR_TOL, match_delta: tolerances::MATCH_DELTA }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1e-2) {
            return Err(Error::Domain(format!("integrator tolerance {} outside (0, 1e-2)", self.tol)));
        }
        let (lo, hi) = tolerances::MATCH_DELTA_RANGE;
        if !(self.match_delta >= lo && self.match_delta <= hi) {
            return Err(Error::Domain(format!(
                "matching offset {} outside [{lo:.0e}, {hi}]",
                self.match_delta
            )));
        }
        Ok(())
    }
}

/// Counted access to the shooting defect at fixed c, so continuation can
/// enforce its per-point evaluation budget.
pub(crate) struct DefectEvaluator {
    c: f64,
    settings: SolverSettings,
    pub(crate) evals: usize,
    budget: usize,
}

impl DefectEvaluator {
    pub(crate) fn new(c: f64, settings: SolverSettings, budget: usize) -> Self {
        Self { c, settings, evals: 0, budget }
    }

    pub(crate) fn beta(&mut self, lambda: f64) -> Result<f64> {
        if self.evals >= self.budget {
            return Err(Error::Domain(format!(
                "defect evaluation budget ({}) exhausted at c = {}",
                self.budget, self.c
            )));
        }
        self.evals += 1;
        Ok(boundary_defect(self.c, lambda, self.settings.match_delta, self.settings.tol)?.beta)
    }
}

/// Brent's method on a bracketing pair; `tol_at` supplies the x-space
/// convergence radius around the current iterate.
fn brent_root<F, T>(f: &mut F, a0: f64, b0: f64, fa0: f64, fb0: f64, tol_at: T) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
    T: Fn(f64) -> f64,
{
    if fa0 == 0.0 {
        return Ok(a0);
    }
    if fb0 == 0.0 {
        return Ok(b0);
    }
    if fa0.signum() == fb0.signum() {
        return Err(Error::NoSignChange(a0, b0));
    }
    let (mut a, mut b, mut c) = (a0, b0, b0);
    let (mut fa, mut fb, mut fc) = (fa0, fb0, fb0);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol_at(b);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Err(Error::Domain("bracketed root refinement did not converge".into()))
}

/// Default λ bracket for a cold start at center value c, one decade each way
/// around the asymptotic law λ ≈ e^{(A−c)/2}.
pub fn default_lambda_bracket(c: f64) -> (f64, f64) {
    let guess = (0.5 * (crate::greens::asymptote_intercept() - c)).exp();
    (guess / 10.0, guess * 10.0)
}

/// Root-find λ with β(c, λ) = 0 on the given bracket (relative width 1e−10)
/// and package the admissible solution.
pub fn solve_given_c(c: f64, lambda_bracket: (f64, f64), tol: f64) -> Result<RadialSolution> {
    let settings = SolverSettings { tol, ..Default::default() };
    solve_given_c_with(c, lambda_bracket, &settings)
}

pub fn solve_given_c_with(
    c: f64,
    lambda_bracket: (f64, f64),
    settings: &SolverSettings,
) -> Result<RadialSolution> {
    settings.validate()?;
    let mut evaluator = DefectEvaluator::new(c, *settings, usize::MAX);
    let (lo, hi) = lambda_bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain(format!("invalid lambda bracket ({lo}, {hi})")));
    }
    let flo = evaluator.beta(lo)?;
    let fhi = evaluator.beta(hi)?;
    let lambda = lambda_root(&mut evaluator, lo, hi, flo, fhi)?;
    package_solution(c, lambda, settings)
}

pub(crate) fn lambda_root(
    evaluator: &mut DefectEvaluator,
    lo: f64,
    hi: f64,
    flo: f64,
    fhi: f64,
) -> Result<f64> {
    let mut f = |lam: f64| evaluator.beta(lam);
    brent_root(&mut f, lo, hi, flo, fhi, |x| x.abs() * tolerances::LAMBDA_ROOT_RTOL)
}

/// Scan β(·, λ) over c_window on an n_scan grid, refine every sign change,
/// and return the admissible solutions inside mass_window sorted by c. An
/// empty result is a valid outcome, not an error.
pub fn solve_given_lambda(
    lambda: f64,
    c_window: (f64, f64),
    mass_window: (f64, f64),
    n_scan: usize,
) -> Result<Vec<RadialSolution>> {
    solve_given_lambda_with(lambda, c_window, mass_window, n_scan, &SolverSettings::default())
}

pub fn solve_given_lambda_with(
    lambda: f64,
    c_window: (f64, f64),
    mass_window: (f64, f64),
    n_scan: usize,
    settings: &SolverSettings,
) -> Result<Vec<RadialSolution>> {
    settings.validate()?;
    let (c_lo, c_hi) = c_window;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(c_lo > 0.0 && c_hi > c_lo) {
        return Err(Error::Domain(format!("invalid c window ({c_lo}, {c_hi})")));
    }
    if lambda.ln() + c_hi > 690.0 {
        return Err(Error::Domain(format!(
            "c window reaches the overflow guard: lambda*exp({c_hi}) > 1e300"
        )));
    }
    if !(mass_window.0 >= 0.0 && mass_window.1 > mass_window.0) {
        return Err(Error::Domain(format!(
            "invalid mass window ({}, {})",
            mass_window.0, mass_window.1
        )));
    }
    if n_scan < 2 {
        return Err(Error::Domain(format!("scan grid needs at least 2 points, got {n_scan}")));
    }

    let step = (c_hi - c_lo) / (n_scan - 1) as f64;
    let betas: Vec<Option<(f64, f64)>> = (0..n_scan)
        .map(|j| {
            let c = c_lo + step * j as f64;
            boundary_defect(c, lambda, settings.match_delta, settings.tol)
                .ok()
                .map(|frame| (c, frame.beta))
        })
        .collect();

    let mut roots: Vec<f64> = Vec::new();
    for pair in betas.windows(2) {
        let (Some((ca, fa)), Some((cb, fb))) = (pair[0], pair[1]) else { continue };
        if fa == 0.0 {
            roots.push(ca);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        let mut f = |c: f64| {
            boundary_defect(c, lambda, settings.match_delta, settings.tol).map(|fr| fr.beta)
        };
        if let Ok(c_root) = brent_root(&mut f, ca, cb, fa, fb, |_| tolerances::C_ROOT_ATOL) {
            roots.push(c_root);
        }
    }
    if let Some(Some((c_last, f_last))) = betas.last() {
        if *f_last == 0.0 {
            roots.push(*c_last);
        }
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < tolerances::C_DEDUP_TOL);

    let mut solutions = Vec::new();
    for c_root in roots {
        let sol = package_solution(c_root, lambda, settings)?;
        if sol.mass > mass_window.0 && sol.mass < mass_window.1 {
            solutions.push(sol);
        }
    }
    Ok(solutions)
}

/// A computed admissible solution: the accepted integration mesh with u and
/// du/dr, the frame defect at acceptance, and the mass λ∫eᵘ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialSolution {
    pub lambda: f64,
    pub c: f64,
    pub match_delta: f64,
    pub defect: f64,
    pub mass: f64,
    pub mesh: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

impl RadialSolution {
    /// Structural validity: finite fields, consistent array lengths, a
    /// strictly increasing mesh inside (0, 1). Physical checks (positivity,
    /// residuals) belong to the verification suite.
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::InvalidSolution(format!("lambda = {}", self.lambda)));
        }
        if !self.c.is_finite() {
            return Err(Error::InvalidSolution(format!("c = {}", self.c)));
        }
        let (dlo, dhi) = tolerances::MATCH_DELTA_RANGE;
        if !(self.match_delta >= dlo && self.match_delta <= dhi) {
            return Err(Error::InvalidSolution(format!("match_delta = {}", self.match_delta)));
        }
        if self.mesh.len() < 8 {
            return Err(Error::InvalidSolution(format!("mesh has {} points", self.mesh.len())));
        }
        if self.mesh.len() != self.u.len() || self.mesh.len() != self.du.len() {
            return Err(Error::InvalidSolution(format!(
                "array lengths disagree: mesh {}, u {}, du {}",
                self.mesh.len(),
                self.u.len(),
                self.du.len()
            )));
        }
        let interior = self.mesh.iter().all(|&r| r > 0.0 && r < 1.0 && r.is_finite());
        if !interior {
            return Err(Error::InvalidSolution("mesh leaves (0, 1)".into()));
        }
        if self.mesh.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSolution("mesh is not strictly increasing".into()));
        }
        if !self.u.iter().chain(self.du.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidSolution("non-finite sample values".into()));
        }
        Ok(())
    }

    pub fn r_lambda(&self) -> f64 {
        r_lambda(self.lambda, self.c)
    }

    /// Dense re-evaluation of the stored path over the whole disc.
    pub fn dense(&self) -> Result<DensePath> {
        DensePath::from_solution(self)
    }
}

pub(crate) fn package_solution(
    c: f64,
    lambda: f64,
    settings: &SolverSettings,
) -> Result<RadialSolution> {
    let center = CenterExpansion::new(c, lambda)?;
    let delta = settings.match_delta;
    let steps = shoot(&center, 1.0 - delta, settings.tol, Some(tolerances::FINAL_STEP_CAP_TAU))?;

    let mut mesh = Vec::with_capacity(steps.len());
    let mut u = Vec::with_capacity(steps.len());
    let mut du = Vec::with_capacity(steps.len());
    for step in &steps {
        let r = step.t.exp();
        mesh.push(r);
        u.push(step.y[0]);
        du.push(step.y[1] / r);
    }
    let frame = frame_fit(*u.last().unwrap(), *du.last().unwrap(), delta, lambda);

    let mut solution = RadialSolution {
        lambda,
        c,
        match_delta: delta,
        defect: frame.beta,
        mass: 0.0,
        mesh,
        u,
        du,
    };
    solution.mass = solution.dense()?.mass();
    Ok(solution)
}

/// Dense reconstruction of a stored solution: Taylor expansion inside the
/// first mesh point, quintic Hermite (u) and cubic Hermite (du/dτ) between
/// mesh points in τ = ln r, and the boundary frame beyond the last point.
/// Everything derives from (mesh, u, du, λ, c), so a reloaded file carries
/// its full evaluation structure.
pub struct DensePath {
    lambda: f64,
    tau: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    f: Vec<f64>,
    center: CenterExpansion,
    frame: BoundaryFrame,
    r_first: f64,
    r_last: f64,
}

impl DensePath {
    pub fn from_solution(sol: &RadialSolution) -> Result<Self> {
        sol.validate()?;
        let rhs = radial_rhs(sol.lambda);
        let n = sol.mesh.len();
        let mut tau = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut f = Vec::with_capacity(n);
        let mut dy = [0.0, 0.0];
        for i in 0..n {
            let t = sol.mesh[i].ln();
            let vi = sol.du[i] * sol.mesh[i];
            rhs(t, &[sol.u[i], vi], &mut dy);
            tau.push(t);
            v.push(vi);
            f.push(dy[1]);
        }
        let r_last = sol.mesh[n - 1];
        let frame = frame_fit(sol.u[n - 1], sol.du[n - 1], 1.0 - r_last, sol.lambda);
        Ok(Self {
            lambda: sol.lambda,
            tau,
            u: sol.u.clone(),
            v,
            f,
            center: CenterExpansion::new(sol.c, sol.lambda)?,
            frame,
            r_first: sol.mesh[0],
            r_last,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn center(&self) -> &CenterExpansion {
        &self.center
    }

    pub fn frame(&self) -> &BoundaryFrame {
        &self.frame
    }

    pub fn r_first(&self) -> f64 {
        self.r_first
    }

    pub fn r_last(&self) -> f64 {
        self.r_last
    }

    fn segment_of(&self, t: f64) -> usize {
        let n = self.tau.len();
        let idx = self.tau.partition_point(|&ti| ti <= t);
        idx.clamp(1, n - 1) - 1
    }

    /// (u, v) on segment i at local coordinate θ ∈ [0, 1]; quintic Hermite
    /// for u (matching u, v, and the ODE curvature at both ends), cubic for v.
    fn hermite(&self, i: usize, theta: f64) -> (f64, f64) {
        let h = self.tau[i + 1] - self.tau[i];
        let (u0, u1) = (self.u[i], self.u[i + 1]);
        let (v0, v1) = (self.v[i], self.v[i + 1]);
        let (f0, f1) = (self.f[i], self.f[i + 1]);
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let t4 = t3 * theta;
        let t5 = t4 * theta;

        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = theta - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 0.5 * (t3 - 2.0 * t4 + t5);
        let u = u0 * h0 + h * v0 * h1 + h * h * f0 * h2 + u1 * h3 + h * v1 * h4 + h * h * f1 * h5;

        let g0 = 1.0 - 3.0 * t2 + 2.0 * t3;
        let g1 = theta - 2.0 * t2 + t3;
        let g2 = 3.0 * t2 - 2.0 * t3;
        let g3 = t3 - t2;
        let v = v0 * g0 + h * f0 * g1 + v1 * g2 + h * f1 * g3;
        (u, v)
    }

    fn eval_tau(&self, t: f64) -> (f64, f64) {
        let i = self.segment_of(t);
        let h = self.tau[i + 1] - self.tau[i];
        self.hermite(i, (t - self.tau[i]) / h)
    }

    /// u(r) anywhere on [0, 1); beyond the last mesh point the boundary
    /// frame continues the solution to the boundary.
    pub fn eval_u(&self, r: f64) -> f64 {
        assert!((0.0..1.0).contains(&r), "radius {r} outside [0, 1)");
        if r < self.r_first {
            self.center.u(r)
        } else if r <= self.r_last {
            self.eval_tau(r.ln()).0
        } else {
            self.frame.tail_u(1.0 - r, self.lambda)
        }
    }

    /// du/dr(r) anywhere on (0, 1).
    pub fn eval_du(&self, r: f64) -> f64 {
        assert!(r > 0.0 && r < 1.0, "radius {r} outside (0, 1)");
        if r < self.r_first {
            self.center.du(r)
        } else if r <= self.r_last {
            self.eval_tau(r.ln()).1 / r
        } else {
            -self.frame.tail_du_ds(1.0 - r, self.lambda)
        }
    }

    /// ∫₀^{r_hi} f(r, u, du/dr) dr for r_hi ≤ last mesh point: Taylor region
    /// by direct quadrature, mesh region panel by panel in τ.
    pub fn integral_to<F: Fn(f64, f64, f64) -> f64>(&self, r_hi: f64, f: F) -> f64 {
        self.integral_to_rule(r_hi, 4, f)
    }

    pub(crate) fn integral_to_rule<F: Fn(f64, f64, f64) -> f64>(
        &self,
        r_hi: f64,
        rule: usize,
        f: F,
    ) -> f64 {
        assert!(
            r_hi > 0.0 && r_hi <= self.r_last * (1.0 + 1e-12),
            "integration endpoint {r_hi} outside the stored path"
        );
        let (nodes, weights) = quad::cached_nodes(rule);
        let mut acc = self.center.integral(r_hi.min(self.r_first), |r, u, du| f(r, u, du));
        if r_hi <= self.r_first {
            return acc;
        }
        let t_hi = r_hi.ln().min(self.tau[self.tau.len() - 1]);
        for i in 0..self.tau.len() - 1 {
            let a = self.tau[i];
            if a >= t_hi {
                break;
            }
            let b = self.tau[i + 1].min(t_hi);
            let h = self.tau[i + 1] - self.tau[i];
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let mut panel = 0.0;
            for (&x, &w) in nodes.iter().zip(weights) {
                let t = mid + half * x;
                let (u, v) = self.hermite(i, (t - self.tau[i]) / h);
                let r = t.exp();
                panel += w * f(r, u, v / r) * r;
            }
            acc += panel * half;
        }
        acc
    }

    /// Full-disc integral: the inner part ∫₀^{r_last} f(r, u, du/dr) dr plus
    /// the frame tail ∫₀^{1−r_last} g(s, u, du/ds) ds.
    pub fn full_integral<F, G>(&self, f: F, g: G) -> f64
    where
        F: Fn(f64, f64, f64) -> f64,
        G: Fn(f64, f64, f64) -> f64,
    {
        self.integral_to(self.r_last, f) + self.frame.tail_integral(self.lambda, g)
    }

    /// Mass λ∫_{B₁} eᵘ dx = 2πλ∫₀¹ eᵘ r dr, assembled from the three regions.
    pub fn mass(&self) -> f64 {
        self.mass_with_rule(4)
    }

    pub(crate) fn mass_with_rule(&self, rule: usize) -> f64 {
        if self.lambda == 0.0 {
            return 0.0;
        }
        let inner = self.integral_to_rule(self.r_last, rule, |r, u, _| u.exp() * r);
        let tail = self.frame.tail_integral(self.lambda, |s, u, _| u.exp() * (1.0 - s));
        TWO_PI * self.lambda * (inner + tail)
    }
}
