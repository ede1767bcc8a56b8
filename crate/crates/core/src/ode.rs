//! Adaptive Dormand-Prince 5(4) integrator over complex state vectors.
//!
//! Used for explicit time evolution of the master equation. States are
//! `DVector<C64>`; real systems embed trivially. Step size is controlled by
//! the embedded 4th-order error estimate with a mixed absolute/relative
//! tolerance, and sample times are hit exactly by clamping the step.

use nalgebra::DVector;

use crate::error::Error;
use crate::{Result, C64};

#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step size; estimated from the first derivative if `None`.
    pub h_initial: Option<f64>,
    pub h_max: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_initial: None,
            h_max: None,
        }
    }
}

// Dormand-Prince coefficients (FSAL pair).
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights (equal to the last A row plus a zero for the FSAL stage)
// and the embedded 4th-order weights used for the error estimate.
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn error_norm(err: &DVector<C64>, y: &DVector<C64>, y_new: &DVector<C64>, opts: &OdeOptions) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..err.len() {
        let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
        let e = err[i].norm() / scale;
        if !e.is_finite() {
            return f64::INFINITY;
        }
        worst = worst.max(e);
    }
    worst
}

/// Integrate dy/dt = f(t, y) from `times[0]`, returning the state at every
/// entry of `times` (the first returned state is `y0` itself). `times` must
/// be strictly increasing.
pub fn integrate_path<F>(
    f: F,
    y0: DVector<C64>,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<DVector<C64>>>
where
    F: Fn(f64, &DVector<C64>) -> DVector<C64>,
{
    if times.is_empty() {
        return Err(Error::validation("integrate_path: empty sample-time list"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation(
            "integrate_path: sample times must be strictly increasing",
        ));
    }

    let mut out = Vec::with_capacity(times.len());
    out.push(y0.clone());

    let mut t = times[0];
    let mut y = y0;
    let mut k1 = f(t, &y);
    let span = times[times.len() - 1] - t;
    let h_max = opts.h_max.unwrap_or(span);
    let mut h = opts.h_initial.unwrap_or_else(|| {
        // Conservative first step from the initial slope.
        let rate = k1.norm() / (1.0 + y.norm());
        (1e-3 / rate.max(1e-3)).min(span / 10.0)
    });

    for &t_target in &times[1..] {
        while t < t_target {
            let h_step = h.min(h_max).min(t_target - t);
            if h_step < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t, step: h_step });
            }

            let mut k = vec![k1.clone()];
            for stage in 1..7 {
                let mut y_stage = y.clone();
                for (j, kj) in k.iter().enumerate() {
                    let a = A[stage][j];
                    if a != 0.0 {
                        y_stage += kj * C64::new(a * h_step, 0.0);
                    }
                }
                k.push(f(t + C[stage] * h_step, &y_stage));
            }
            let mut y_new = y.clone();
            let mut err = DVector::from_element(y.len(), C64::new(0.0, 0.0));
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    y_new += kj * C64::new(B5[j] * h_step, 0.0);
                }
                let d = B5[j] - B4[j];
                if d != 0.0 {
                    err += kj * C64::new(d * h_step, 0.0);
                }
            }

            let norm = error_norm(&err, &y, &y_new, opts);
            if norm.is_finite() && norm <= 1.0 {
                t += h_step;
                y = y_new;
                k1 = k.pop().expect("seven stages"); // FSAL reuse
                let factor = if norm == 0.0 {
                    5.0
                } else {
                    (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = h_step * factor;
            } else {
                let factor = if norm.is_finite() {
                    (0.9 * norm.powf(-0.2)).clamp(0.1, 0.5)
                } else {
                    0.1
                };
                h = h_step * factor;
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
