//! Adaptive Dormand-Prince 5(4) for complex first-order systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-13, max_steps: 20_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus the embedded fourth-order ones
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates y' = f(t, y) from `times[0]` and returns y at every entry of
/// `times` (increasing). `f(t, y, dy)` writes the derivative into `dy`.
pub fn dp45<F>(f: F, y0: &[Complex64], times: &[f64], opts: OdeOptions) -> Result<(Vec<Vec<Complex64>>, OdeStats)>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("output times must be strictly increasing"));
    }
    let n = y0.len();
    let mut out = Vec::with_capacity(times.len());
    let mut stats = OdeStats::default();
    if times.is_empty() {
        return Ok((out, stats));
    }
    let mut y = y0.to_vec();
    let mut t = times[0];
    out.push(y.clone());
    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut ynew = vec![Complex64::new(0.0, 0.0); n];
    f(t, &y, &mut k[0]);

    // initial step from the derivative scale
    let fnorm = k[0].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let ynorm = y.iter().map(|v| v.norm()).fold(0.0, f64::max).max(opts.atol);
    let span = times[times.len() - 1] - times[0];
    let mut h = if fnorm > 0.0 { 0.01 * ynorm / fnorm } else { span };
    h = h.min(span).max(1e-12 * span.max(1e-300));

    for &target in &times[1..] {
        while t < target {
            let last = h >= target - t;
            let step = if last { target - t } else { h };
            if step <= 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::Stiff { time: t });
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        if A[s][j] != 0.0 {
                            acc += kj[i] * (step * A[s][j]);
                        }
                    }
                    tmp[i] = acc;
                }
                f(t + C[s] * step, &tmp, &mut k[s]);
            }
            // the seventh stage is evaluated at the fifth-order solution
            ynew.copy_from_slice(&tmp);
            let mut err = 0.0;
            for i in 0..n {
                let mut e = Complex64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate() {
                    if E[j] != 0.0 {
                        e += kj[i] * E[j];
                    }
                }
                let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
                err += (step * e.norm() / sc).powi(2);
            }
            let err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Stiff { time: t });
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y.copy_from_slice(&ynew);
                let (first, rest) = k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
                stats.accepted += 1;
                if !last || fac < 1.0 {
                    h = step * fac;
                }
            } else {
                stats.rejected += 1;
                h = step * fac.min(1.0);
            }
            if stats.accepted + stats.rejected > opts.max_steps {
                return Err(Error::Stiff { time: t });
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}
