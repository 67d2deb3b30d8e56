//! Adaptive Dormand–Prince 5(4) integrator for small first-order systems.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            h_init: 1e-3,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSummary {
    pub t: f64,
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    /// Sum over accepted steps of the max-norm local error estimate.
    pub error_estimate: f64,
    /// True if the observer asked to stop before `t_end`.
    pub stopped_early: bool,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
#[rustfmt::skip]
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights are the last row of A; E = b5 − b4
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates y′ = f(t, y) from t0 towards t_end (either direction).
///
/// `observe` sees every accepted step and may break to end the integration.
pub fn dormand_prince<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<OdeSummary>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    O: FnMut(f64, &[f64]) -> ControlFlow<()>,
{
    let n = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut h = opts.h_init.abs().min(opts.h_max).min((t_end - t0).abs()) * dir;
    let mut summary = OdeSummary {
        t,
        y: y.clone(),
        accepted: 0,
        rejected: 0,
        error_estimate: 0.0,
        stopped_early: false,
    };
    if t0 == t_end {
        return Ok(summary);
    }
    f(t, &y, &mut k[0])?;
    let mut steps = 0;
    while (t_end - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Solver {
                func: "dormand_prince",
                detail: format!("step budget {} exhausted at t = {t}", opts.max_steps),
            });
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                tmp[i] = acc;
            }
            f(t + C[s] * h, &tmp, &mut k[s])?;
        }
        // stage 7 was evaluated at the fifth-order solution
        y_new.copy_from_slice(&tmp);
        let mut err: f64 = 0.0;
        let mut abs_err: f64 = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (s, ks) in k.iter().enumerate() {
                e += E[s] * ks[i];
            }
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((h * e).abs() / scale);
            abs_err = abs_err.max((h * e).abs());
        }
        if !err.is_finite() {
            return Err(Error::Solver {
                func: "dormand_prince",
                detail: format!("non-finite error estimate at t = {t}"),
            });
        }
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            summary.accepted += 1;
            summary.error_estimate += abs_err;
            if observe(t, &y).is_break() {
                summary.stopped_early = true;
                break;
            }
        } else {
            summary.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h.abs() * factor).min(opts.h_max) * dir;
        if h.abs() < opts.h_min {
            return Err(Error::Solver {
                func: "dormand_prince",
                detail: format!("step size underflow (h = {:e}) at t = {t}; problem may be stiff", h.abs()),
            });
        }
    }
    summary.t = t;
    summary.y = y;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_oscillator() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let s = dormand_prince(
            |_, y, dy| {
                dy[0] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            5.0,
            &opts,
            |_, _| ControlFlow::Continue(()),
        )
        .unwrap();
        assert!((s.y[0] - (-5f64).exp()).abs() < 1e-12);

        let s = dormand_prince(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            0.0,
            &[0.0, 1.0],
            10.0,
            &opts,
            |_, _| ControlFlow::Continue(()),
        )
        .unwrap();
        assert!((s.y[0] - 10f64.sin()).abs() < 1e-10);
        assert!((s.y[1] - 10f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn backwards_and_early_stop() {
        let opts = OdeOptions::default();
        let s = dormand_prince(
            |t, _, dy| {
                dy[0] = t;
                Ok(())
            },
            2.0,
            &[2.0],
            0.0,
            &opts,
            |t, _| if t < 1.0 { ControlFlow::Break(()) } else { ControlFlow::Continue(()) },
        )
        .unwrap();
        assert!(s.stopped_early);
        assert!((s.y[0] - 0.5 * s.t * s.t - 0.0).abs() < 1e-10);
    }

    #[test]
    fn underflow_is_reported() {
        let opts = OdeOptions { h_min: 1e-6, ..Default::default() };
        let r = dormand_prince(
            |t, _, dy| {
                dy[0] = 1.0 / (1.0 - t);
                Ok(())
            },
            0.0,
            &[0.0],
            2.0,
            &opts,
            |_, _| ControlFlow::Continue(()),
        );
        assert!(matches!(r, Err(Error::Solver { .. })));
    }
}
