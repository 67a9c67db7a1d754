//! Hyperbolic geometry primitives on the Poincaré disc.
//!
//! Everything here is elementary plane arithmetic on points of the open unit
//! disc: the Möbius translation `T_a`, the hyperbolic distance, the stable
//! half-distance identity, and reflection about a geodesic through `a`.

use crate::{Error, Result};

/// A point of the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscPoint {
    pub x: f64,
    pub y: f64,
}

impl DiscPoint {
    pub const ORIGIN: DiscPoint = DiscPoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        DiscPoint { x, y }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// 1 - |p|², evaluated directly from the coordinates. Callers near the
    /// boundary depend on this form: squaring a precomputed norm first wastes
    /// half the significant bits of the small residual.
    pub fn one_minus_norm_sq(self) -> f64 {
        1.0 - self.x * self.x - self.y * self.y
    }

    fn in_open_disc(self) -> bool {
        self.norm_sq() < 1.0 && self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Sub for DiscPoint {
    type Output = DiscPoint;
    fn sub(self, rhs: DiscPoint) -> DiscPoint {
        DiscPoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

fn check_in_disc(p: DiscPoint) -> Result<()> {
    if p.in_open_disc() {
        Ok(())
    } else {
        Err(Error::OutsideDisc(p.x, p.y))
    }
}

/// Möbius translation of the disc:
///
///   T_a(x) = (|x-a|² a - (1-|a|²)(x-a)) / (1 - 2 x·a + |x|²|a|²).
///
/// T_a maps a to 0, 0 to a, is an involution, and is a hyperbolic isometry.
/// At a = 0 the formula degenerates to the antipodal map T_0(x) = -x; that
/// sign convention is kept as-is (all uses here are invariant under it).
pub fn mobius(a: DiscPoint, x: DiscPoint) -> Result<DiscPoint> {
    check_in_disc(a)?;
    check_in_disc(x)?;
    let d = x - a;
    let d2 = d.norm_sq();
    let one_minus_a2 = a.one_minus_norm_sq();
    let denom = 1.0 - 2.0 * (x.x * a.x + x.y * a.y) + x.norm_sq() * a.norm_sq();
    Ok(DiscPoint::new(
        (d2 * a.x - one_minus_a2 * d.x) / denom,
        (d2 * a.y - one_minus_a2 * d.y) / denom,
    ))
}

/// Hyperbolic (geodesic) distance between two disc points:
/// rho(x, y) = log((1 + t)/(1 - t)) with t = |T_x(y)|.
pub fn geodesic_distance(x: DiscPoint, y: DiscPoint) -> Result<f64> {
    let t = mobius(x, y)?.norm();
    Ok(2.0 * t.atanh())
}

/// sinh(rho(x,y)/2) through the cancellation-free identity
///
///   sinh(rho/2) = |x - y| / sqrt((1-|x|²)(1-|y|²)).
///
/// Preferred over computing rho first whenever the half-distance itself is
/// what is needed (Green's function arguments): it stays fully accurate for
/// nearly coincident points and near the boundary.
pub fn sinh_half_distance(x: DiscPoint, y: DiscPoint) -> Result<f64> {
    check_in_disc(x)?;
    check_in_disc(y)?;
    let num = (x - y).norm();
    Ok(num / (x.one_minus_norm_sq() * y.one_minus_norm_sq()).sqrt())
}

/// Reflection of `x` about the geodesic through `a` obtained by conjugating
/// the Euclidean reflection I(x₁, x₂) = (x₁, -x₂) with the translation T_a:
///
///   reflect(a, x) = T_a(I(T_a(x))).
///
/// An involution that fixes the geodesic pointwise and preserves geodesic
/// distance.
pub fn reflect(a: DiscPoint, x: DiscPoint) -> Result<DiscPoint> {
    let t = mobius(a, x)?;
    mobius(a, DiscPoint::new(t.x, -t.y))
}
