//! Explicit Dormand-Prince 5(4) integrator with PI step-size control.
//!
//! The shooting solver drives this on the two-state radial system in the
//! variable τ = ln r, where the problem is smooth all the way to the
//! boundary layer. Every accepted step is recorded together with the state
//! derivative there (free under FSAL), which is exactly the data the dense
//! quintic reconstruction and the mesh verifier need later.

use crate::{Error, Result};

/// One accepted mesh point: time, state, and f(t, y).
#[derive(Debug, Clone)]
pub struct Step {
    pub t: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

/// Integration controls. `rtol`/`atol` enter the mixed error norm
/// sk = atol + rtol·max(|y_i|) per component; `max_step` caps the accepted
/// step length when set; `max_steps` bounds the accepted+rejected step count.
#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: Option<f64>,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            rtol: crate::tolerances::INTEGRATOR_TOL,
            atol: crate::tolerances::INTEGRATOR_TOL,
            max_step: None,
            max_steps: 400_000,
            initial_step: None,
        }
    }
}

// Dormand-Prince coefficients. The last stage row equals the fifth-order
// weights B, so the final stage of an accepted step is the first stage of
// the next (FSAL).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Difference between the fifth- and the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;

fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..err.len() {
        let sk = atol + rtol * y0[i].abs().max(y1[i].abs());
        let r = err[i] / sk;
        acc += r * r;
    }
    (acc / err.len() as f64).sqrt()
}

fn initial_step_guess<F>(
    f: &mut F,
    t0: f64,
    y0: &[f64],
    dy0: &[f64],
    posneg: f64,
    span: f64,
    rtol: f64,
    atol: f64,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..n {
        let sk = atol + rtol * y0[i].abs();
        d0 += (y0[i] / sk).powi(2);
        d1 += (dy0[i] / sk).powi(2);
    }
    d0 = (d0 / n as f64).sqrt();
    d1 = (d1 / n as f64).sqrt();

    let mut h = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(span);

    // One explicit Euler probe to estimate the second derivative scale.
    let y1: Vec<f64> = (0..n).map(|i| y0[i] + posneg * h * dy0[i]).collect();
    let mut dy1 = vec![0.0; n];
    f(t0 + posneg * h, &y1, &mut dy1);
    let mut d2: f64 = 0.0;
    for i in 0..n {
        let sk = atol + rtol * y0[i].abs();
        d2 += ((dy1[i] - dy0[i]) / sk).powi(2);
    }
    d2 = (d2 / n as f64).sqrt() / h;

    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    (100.0 * h).min(h1).min(span)
}

/// Integrate y' = f(t, y) from `t0` to `t_end`, returning every accepted
/// step (the initial point included). `f` writes the derivative into its
/// third argument.
pub fn integrate<F>(
    mut f: F,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    opts: &IntegrationOptions,
) -> Result<Vec<Step>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    if n == 0 {
        return Err(Error::Domain("empty state vector".into()));
    }
    if !(t_end - t0).is_finite() || t_end == t0 {
        return Err(Error::Domain(format!(
            "degenerate integration interval [{t0}, {t_end}]"
        )));
    }
    let posneg = (t_end - t0).signum();
    let span = (t_end - t0).abs();

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    f(t, &y, &mut k[0]);
    if !k[0].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain(format!(
            "derivative is not finite at the initial point t = {t0}"
        )));
    }

    let mut h = match opts.initial_step {
        Some(h0) => h0.abs(),
        None => initial_step_guess(&mut f, t0, &y, &k[0], posneg, span, opts.rtol, opts.atol),
    };
    if let Some(cap) = opts.max_step {
        h = h.min(cap);
    }

    let mut out = Vec::with_capacity(1024);
    out.push(Step { t, y: y.clone(), dy: k[0].clone() });

    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut y_stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err_vec = vec![0.0; n];

    for _ in 0..opts.max_steps {
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }
        let mut last = false;
        if (t + posneg * h - t_end) * posneg >= 0.0 {
            h = (t_end - t).abs();
            last = true;
        }

        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                y_stage[i] = y[i] + posneg * h * acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            f(t + posneg * h * C[s], &y_stage, &mut tail[0]);
        }

        for i in 0..n {
            let mut acc = 0.0;
            let mut eacc = 0.0;
            for s in 0..7 {
                acc += B[s] * k[s][i];
                eacc += E[s] * k[s][i];
            }
            y_new[i] = y[i] + posneg * h * acc;
            err_vec[i] = h * eacc;
        }

        let finite = y_new.iter().chain(err_vec.iter()).all(|v| v.is_finite());
        let err = if finite {
            error_norm(&err_vec, &y, &y_new, opts.rtol, opts.atol)
        } else {
            f64::INFINITY
        };

        if err <= 1.0 {
            facold = err.max(1e-4);
            t = if last { t_end } else { t + posneg * h };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            // k[0] now holds f at the new point (FSAL); the stale slot gets
            // overwritten at the next stage sweep.
            out.push(Step { t, y: y.clone(), dy: k[0].clone() });
            if last {
                return Ok(out);
            }

            let fac11 = err.powf(EXPO1);
            let mut fac = fac11 / facold.powf(BETA);
            fac = (fac / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            if let Some(cap) = opts.max_step {
                h_new = h_new.min(cap);
            }
            h = h_new;
            last_rejected = false;
        } else {
            let fac11 = if err.is_finite() { err.powf(EXPO1) } else { 1.0 / FAC_MIN };
            h /= (fac11 / SAFE).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }

    Err(Error::Domain(format!(
        "integrator exceeded {} steps before reaching t = {t_end} (stalled near t = {t})",
        opts.max_steps
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn tol(rtol: f64) -> IntegrationOptions {
        IntegrationOptions { rtol, atol: rtol, ..Default::default() }
    }

    #[test]
    fn exponential_growth_is_accurate() {
        let steps = integrate(|_, y, dy| dy[0] = y[0], 0.0, 1.0, &[1.0], &tol(1e-10)).unwrap();
        let last = steps.last().unwrap();
        assert_abs_diff_eq!(last.t, 1.0, epsilon = 0.0);
        assert_relative_eq!(last.y[0], std::f64::consts::E, max_relative = 1e-9);
    }

    #[test]
    fn global_error_tracks_the_tolerance() {
        // y' = y², y(0) = 1, y(t) = 1/(1-t); stiffening but smooth on [0, 0.9].
        let exact = 10.0;
        let mut previous_error = f64::INFINITY;
        for rtol in [1e-5, 1e-8, 1e-11] {
            let steps =
                integrate(|_, y, dy| dy[0] = y[0] * y[0], 0.0, 0.9, &[1.0], &tol(rtol)).unwrap();
            let err = (steps.last().unwrap().y[0] - exact).abs() / exact;
            assert!(err <= 3e3 * rtol, "rtol {rtol} gave relative error {err}");
            assert!(err < previous_error);
            previous_error = err;
        }
    }

    #[test]
    fn oscillator_returns_to_the_initial_state() {
        let steps = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            2.0 * std::f64::consts::PI,
            &[1.0, 0.0],
            &tol(1e-12),
        )
        .unwrap();
        let last = steps.last().unwrap();
        assert_abs_diff_eq!(last.y[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(last.y[1], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn recorded_derivatives_match_the_right_hand_side() {
        let steps = integrate(
            |t, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0] + 0.1 * t;
            },
            0.0,
            3.0,
            &[0.5, -0.2],
            &tol(1e-9),
        )
        .unwrap();
        assert!(steps.len() > 5);
        for step in &steps {
            assert_abs_diff_eq!(step.dy[0], step.y[1], epsilon = 0.0);
            assert_abs_diff_eq!(step.dy[1], -step.y[0] + 0.1 * step.t, epsilon = 0.0);
        }
    }

    #[test]
    fn max_step_caps_every_accepted_interval() {
        let cap = 1e-2;
        let opts = IntegrationOptions { max_step: Some(cap), ..tol(1e-6) };
        let steps = integrate(|_, y, dy| dy[0] = -y[0], 0.0, 1.0, &[1.0], &opts).unwrap();
        assert!(steps.len() >= 100);
        for w in steps.windows(2) {
            assert!(w[1].t - w[0].t <= cap * (1.0 + 1e-12));
        }
    }

    #[test]
    fn blow_up_reports_step_underflow() {
        // y = 1/(1-t) leaves f64 range before t = 2.
        let result = integrate(|_, y, dy| dy[0] = y[0] * y[0], 0.0, 2.0, &[1.0], &tol(1e-8));
        assert!(matches!(result, Err(Error::StepUnderflow { .. })));
    }

    #[test]
    fn step_budget_is_enforced() {
        let opts = IntegrationOptions { max_steps: 10, ..tol(1e-12) };
        let result = integrate(
            |t, y, dy| {
                dy[0] = y[1];
                dy[1] = -100.0 * y[0] + t.sin();
            },
            0.0,
            50.0,
            &[1.0, 0.0],
            &opts,
        );
        assert!(matches!(result, Err(Error::Domain(_))));
    }

    #[test]
    fn backward_integration_works() {
        let steps = integrate(|_, y, dy| dy[0] = y[0], 1.0, 0.0, &[std::f64::consts::E], &tol(1e-10))
            .unwrap();
        assert_relative_eq!(steps.last().unwrap().y[0], 1.0, max_relative = 1e-9);
    }
}
