//! Dormand–Prince 5(4) integrator for complex state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest permitted step.
    pub h_max: f64,
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: f64::INFINITY,
            h_init: None,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Error coefficients: 5th-order minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, k) in terms {
            acc += k[i] * c;
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1` in place.
pub fn integrate<F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y: &mut [Complex64],
    opts: &OdeOptions,
) -> Result<OdeStats>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len();
    let mut stats = OdeStats::default();
    if t1 == t0 || n == 0 {
        return Ok(stats);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let zero = Complex64::new(0.0, 0.0);
    let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![zero; n]).collect();
    let mut tmp = vec![zero; n];
    let mut ynew = vec![zero; n];

    let mut t = t0;
    f(t, y, &mut k[0]);
    stats.evaluations += 1;
    let mut h = opts
        .h_init
        .unwrap_or_else(|| (span / 100.0).min(opts.h_max))
        .min(opts.h_max)
        .min(span);

    while (t1 - t) * dir > 0.0 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { time: t });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h < 1e-14 * t.abs().max(span) {
            return Err(Error::StepSizeUnderflow { time: t });
        }
        let hs = h * dir;
        {
            let (k0, rest) = k.split_at_mut(1);
            combine(&mut tmp, y, hs, &[(A21, &k0[0])]);
            f(t + C2 * hs, &tmp, &mut rest[0]);
        }
        {
            let (a, b) = k.split_at_mut(2);
            combine(&mut tmp, y, hs, &[(A31, &a[0]), (A32, &a[1])]);
            f(t + C3 * hs, &tmp, &mut b[0]);
        }
        {
            let (a, b) = k.split_at_mut(3);
            combine(&mut tmp, y, hs, &[(A41, &a[0]), (A42, &a[1]), (A43, &a[2])]);
            f(t + C4 * hs, &tmp, &mut b[0]);
        }
        {
            let (a, b) = k.split_at_mut(4);
            combine(
                &mut tmp,
                y,
                hs,
                &[(A51, &a[0]), (A52, &a[1]), (A53, &a[2]), (A54, &a[3])],
            );
            f(t + C5 * hs, &tmp, &mut b[0]);
        }
        {
            let (a, b) = k.split_at_mut(5);
            combine(
                &mut tmp,
                y,
                hs,
                &[
                    (A61, &a[0]),
                    (A62, &a[1]),
                    (A63, &a[2]),
                    (A64, &a[3]),
                    (A65, &a[4]),
                ],
            );
            f(t + hs, &tmp, &mut b[0]);
        }
        {
            let (a, b) = k.split_at_mut(6);
            combine(
                &mut ynew,
                y,
                hs,
                &[
                    (A71, &a[0]),
                    (A73, &a[2]),
                    (A74, &a[3]),
                    (A75, &a[4]),
                    (A76, &a[5]),
                ],
            );
            f(t + hs, &ynew, &mut b[0]);
        }
        stats.evaluations += 6;

        let mut err = 0.0;
        for i in 0..n {
            let e = (k[0][i] * E1
                + k[2][i] * E3
                + k[3][i] * E4
                + k[4][i] * E5
                + k[5][i] * E6
                + k[6][i] * E7)
                * hs;
            let scale = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
            err += (e.norm() / scale).powi(2);
        }
        let err = (err / n as f64).sqrt();

        if err <= 1.0 {
            stats.accepted += 1;
            t = if last { t1 } else { t + hs };
            y.copy_from_slice(&ynew);
            k.swap(0, 6);
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).min(opts.h_max);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok(stats)
}
