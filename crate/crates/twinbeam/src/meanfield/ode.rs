//! Embedded Dormand-Prince 5(4) integrator for complex-valued ODE systems.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at z = {z:.6e} (error ratio {err:.3e})")]
    StepSizeFailure { z: f64, err: f64 },
    #[error("step budget of {max_steps} exhausted at z = {z:.6e}")]
    TooManySteps { z: f64, max_steps: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-8, max_steps: 1_000_000 }
    }
}

// Dormand-Prince RK5(4)7M tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// 5th-order weights equal the last A row; E is (b5 - b4) for the error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate dy/dz = f(z, y) from z0 to z1 with adaptive step control.
pub fn integrate<F>(
    mut f: F,
    z0: f64,
    z1: f64,
    y0: &[Complex64],
    opts: &OdeOptions,
) -> Result<Vec<Complex64>, OdeError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let span = z1 - z0;
    if span == 0.0 {
        return Ok(y0.to_vec());
    }
    let mut y = y0.to_vec();
    let mut z = z0;
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut ytmp = vec![Complex64::new(0.0, 0.0); n];
    f(z, &y, &mut k[0]);

    let mut h = span / 100.0;
    let mut steps = 0usize;
    while (z - z1).abs() > 1e-14 * span.abs() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(OdeError::TooManySteps { z, max_steps: opts.max_steps });
        }
        if (z + h - z1) * span.signum() > 0.0 {
            h = z1 - z;
        }
        for stage in 0..6 {
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    acc += A[stage][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            let (head, tail) = k.split_at_mut(stage + 1);
            let _ = head;
            f(z + C[stage] * h, &ytmp, &mut tail[0]);
        }
        // 5th-order solution is stage 6's ytmp (FSAL); error from E weights
        let ynew = ytmp.clone();
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(ynew[i].norm());
            let r = (h * e).norm() / scale;
            err = err.max(r);
        }
        if err <= 1.0 {
            z += h;
            y = ynew;
            k[0] = k[6].clone();
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        if h.abs() < 1e-14 * span.abs() {
            return Err(OdeError::StepSizeFailure { z, err });
        }
    }
    Ok(y)
}
