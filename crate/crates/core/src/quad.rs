//! Gauss-Legendre quadrature: node generation, fixed-order panels, and an
//! adaptive scheme driven by a worst-panel-first refinement queue. Also hosts
//! the finite-difference stencil weights used by the mesh verification
//! checks, since they share the "small dense numerics" character.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::tolerances;
use crate::{Error, Result};

/// Tolerance and budget settings for adaptive quadrature.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: tolerances::QUAD_ABS_TOL,
            rel_tol: tolerances::QUAD_REL_TOL,
            max_subdivisions: tolerances::QUAD_MAX_SUBDIVISIONS,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Domain(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Domain(
                "quadrature needs at least one subdivision".into(),
            ));
        }
        Ok(())
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], by
/// Newton iteration on the Legendre polynomial evaluated through its
/// three-term recurrence. Nodes come out in increasing order.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        // Tricomi-style initial guess, accurate enough for Newton from any n.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d2) = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = w;
        nodes[k] = -x;
        weights[k] = w;
    }
    if n % 2 == 1 {
        let mid = n / 2;
        nodes[mid] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[mid] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub(crate) fn cached_nodes(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static GL4: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL8: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL15: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL31: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL32: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL64: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let cell = match n {
        4 => &GL4,
        8 => &GL8,
        15 => &GL15,
        16 => &GL16,
        31 => &GL31,
        32 => &GL32,
        64 => &GL64,
        _ => panic!("no cached Gauss-Legendre rule of order {n}"),
    };
    cell.get_or_init(|| gauss_legendre_nodes(n))
}

/// Fixed n-point Gauss-Legendre approximation of the integral of f on [a, b].
pub fn fixed_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = cached_nodes(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

struct Panel {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn evaluate_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let coarse = fixed_gl(&mut *f, a, b, 15);
    let fine = fixed_gl(&mut *f, a, b, 31);
    Panel {
        err: (fine - coarse).abs(),
        a,
        b,
        value: fine,
    }
}

/// Adaptive Gauss-Legendre integration of f over [a, b]: panels are refined
/// worst-error-first until the summed error estimate meets the tolerance or
/// the split budget is exhausted (then [`Error::ToleranceNotMet`]).
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    heap.push(evaluate_panel(&mut f, a, b));
    let mut splits = 0u32;
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        if splits >= spec.max_subdivisions {
            return Err(Error::ToleranceNotMet {
                subdivisions: splits,
                estimate: err,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; keep its estimate.
            let mut stuck = worst;
            stuck.err = 0.0;
            heap.push(stuck);
            continue;
        }
        heap.push(evaluate_panel(&mut f, worst.a, mid));
        heap.push(evaluate_panel(&mut f, mid, worst.b));
        splits += 1;
    }
}

/// Finite-difference weights on an arbitrary stencil (Fornberg's recursion):
/// returns `w[k][j]` such that the k-th derivative at `z` is approximated by
/// `sum_j w[k][j] * f(x[j])`, for k = 0..=max_order.
pub fn fd_weights(z: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    assert!(n > max_order, "stencil too small for requested derivative");
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn five_point_rule_matches_tabulated_values() {
        let (nodes, weights) = gauss_legendre_nodes(5);
        let expected_nodes = [
            -0.906179845938664,
            -0.538469310105683,
            0.0,
            0.538469310105683,
            0.906179845938664,
        ];
        let expected_weights = [
            0.236926885056189,
            0.478628670499366,
            0.568888888888889,
            0.478628670499366,
            0.236926885056189,
        ];
        for i in 0..5 {
            assert_abs_diff_eq!(nodes[i], expected_nodes[i], epsilon = 1e-14);
            assert_abs_diff_eq!(weights[i], expected_weights[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 3, 7, 16, 31, 64] {
            let (_, w) = gauss_legendre_nodes(n);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn fixed_rule_is_exact_on_polynomials() {
        // GL4 integrates degree <= 7 exactly: x²/1.5 + 2.5x⁴ + x⁷ over [-1,1].
        let got = fixed_gl(|x| x * x / 1.5 + 2.5 * x.powi(4) + x.powi(7), -1.0, 1.0, 4);
        assert_abs_diff_eq!(got, 4.0 / 9.0 + 1.0, epsilon = 1e-15);
    }

    #[test]
    fn adaptive_integrates_sine() {
        let spec = QuadratureSpec::default();
        let v = adaptive(|x| x.sin(), 0.0, std::f64::consts::PI, &spec).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn adaptive_resolves_a_sharp_boundary_layer() {
        let spec = QuadratureSpec::default();
        let eps = 1e-8f64;
        let v = adaptive(|x| 1.0 / (x + eps).sqrt(), 0.0, 1.0, &spec).unwrap();
        let exact = 2.0 * ((1.0 + eps).sqrt() - eps.sqrt());
        assert_abs_diff_eq!(v / exact, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exhausted_budget_reports_tolerance_not_met() {
        let spec = QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-16,
            max_subdivisions: 3,
        };
        let err = adaptive(|x| 1.0 / (x + 1e-12).sqrt(), 0.0, 1.0, &spec).unwrap_err();
        match err {
            Error::ToleranceNotMet { subdivisions, estimate } => {
                assert_eq!(subdivisions, 3);
                assert!(estimate > 0.0);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn fd_weights_reproduce_uniform_stencils() {
        let h = 0.1;
        let x: Vec<f64> = (-2..=2).map(|i| i as f64 * h).collect();
        let w = fd_weights(0.0, &x, 2);
        let first = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let second = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for j in 0..5 {
            assert_abs_diff_eq!(w[1][j], first[j] / h, epsilon = 1e-12);
            assert_abs_diff_eq!(w[2][j], second[j] / (h * h), epsilon = 1e-11);
        }
    }

    #[test]
    fn fd_weights_differentiate_a_quartic_on_a_scrambled_stencil() {
        let x = [0.0, 0.013, 0.031, 0.044, 0.07];
        let z = 0.031;
        let f = |t: f64| 1.0 + t - 2.0 * t * t + 0.5 * t.powi(3) + 3.0 * t.powi(4);
        let df = |t: f64| 1.0 - 4.0 * t + 1.5 * t * t + 12.0 * t.powi(3);
        let d2f = |t: f64| -4.0 + 3.0 * t + 36.0 * t * t;
        let w = fd_weights(z, &x, 2);
        let d1: f64 = (0..5).map(|j| w[1][j] * f(x[j])).sum();
        let d2: f64 = (0..5).map(|j| w[2][j] * f(x[j])).sum();
        assert_abs_diff_eq!(d1, df(z), epsilon = 1e-9);
        assert_abs_diff_eq!(d2, d2f(z), epsilon = 1e-6);
    }
}
