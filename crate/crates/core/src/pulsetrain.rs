//! Pulse-train construction: timings, polarization angles and effective strengths.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the integration window of a Gaussian pulse, in units of σ.
pub const GAUSSIAN_WINDOW_SIGMAS: f64 = 5.0;

const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
const EPSILON_0: f64 = 8.854_187_812_8e-12;
const HBAR: f64 = 1.054_571_817e-34;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    /// Intensity envelope `exp(−(t − t₀)²/σ²)`.
    Gaussian,
    /// Instantaneous kick; `sigma` is metadata only.
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// ps
    pub center_time: f64,
    /// Polarization direction in the XY plane, radians from X.
    pub polarization_angle: f64,
    /// Effective strength `P` (angular momentum in units of ħ).
    pub strength: f64,
    /// ps
    pub sigma: f64,
    pub shape: PulseShape,
}

impl PulseSpec {
    pub fn delta(center_time: f64, polarization_angle: f64, strength: f64) -> Self {
        PulseSpec {
            center_time,
            polarization_angle,
            strength,
            sigma: 0.0,
            shape: PulseShape::Delta,
        }
    }

    /// Coupling rate `Δα ℰ²(t)/(4ħ)` in rad/ps; integrates to `strength`.
    pub fn rate(&self, t: f64) -> f64 {
        let x = (t - self.center_time) / self.sigma;
        self.strength * (-x * x).exp() / (self.sigma * PI.sqrt())
    }

    /// `[t₀ − 5σ, t₀ + 5σ]`.
    pub fn window(&self) -> (f64, f64) {
        let half = GAUSSIAN_WINDOW_SIGMAS * self.sigma;
        (self.center_time - half, self.center_time + half)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSpec {
    pub pulses: Vec<PulseSpec>,
    /// Pulse-to-pulse delay, ps.
    pub tau: f64,
    /// Pulse-to-pulse polarization step, radians.
    pub delta: f64,
    pub total_p: f64,
}

impl TrainSpec {
    pub fn empty() -> Self {
        TrainSpec {
            pulses: Vec::new(),
            tau: 0.0,
            delta: 0.0,
            total_p: 0.0,
        }
    }

    /// Rotation period of the polarization, `2πτ/δ`; `None` for `δ = 0`.
    pub fn rotation_period(&self) -> Option<f64> {
        (self.delta != 0.0).then(|| 2.0 * PI * self.tau / self.delta)
    }

    pub fn with_shape(mut self, shape: PulseShape) -> Self {
        for p in &mut self.pulses {
            p.shape = shape;
        }
        self
    }

    /// Same strengths and timings, every polarization angle shifted by `chi`.
    pub fn rotated(mut self, chi: f64) -> Self {
        for p in &mut self.pulses {
            p.polarization_angle += chi;
        }
        self
    }

    pub fn strength_sum(&self) -> f64 {
        self.pulses.iter().map(|p| p.strength).sum()
    }

    pub fn max_strength(&self) -> f64 {
        self.pulses.iter().map(|p| p.strength).fold(0.0, f64::max)
    }

    fn pulse(n: i32, tau: f64, delta: f64, strength: f64, sigma: f64) -> PulseSpec {
        let shape = if sigma > 0.0 {
            PulseShape::Gaussian
        } else {
            PulseShape::Delta
        };
        PulseSpec {
            center_time: f64::from(n) * tau,
            polarization_angle: f64::from(n) * delta,
            strength,
            sigma,
            shape,
        }
    }
}

fn check_common(tau: f64, total_p: f64, sigma: f64) -> Result<()> {
    if !(total_p >= 0.0) || !total_p.is_finite() {
        return Err(Error::InvalidParameter(format!("total strength {total_p}")));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("pulse delay {tau} ps")));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("pulse width {sigma} ps")));
    }
    Ok(())
}

/// `count` equally strong pulses at `t = nτ`, angles `nδ`, `n = 0..count`.
/// `sigma = 0` yields delta pulses.
pub fn equal_train(
    count: usize,
    tau: f64,
    delta: f64,
    total_p: f64,
    sigma: f64,
) -> Result<TrainSpec> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "pulse train needs at least one pulse".into(),
        ));
    }
    check_common(tau, total_p, sigma)?;
    let p = total_p / count as f64;
    let pulses = (0..count as i32)
        .map(|n| TrainSpec::pulse(n, tau, delta, p, sigma))
        .collect();
    Ok(TrainSpec {
        pulses,
        tau,
        delta,
        total_p,
    })
}

/// Default half-range of the Bessel train index, `max(10, ⌈2A⌉ + 5)`.
pub fn default_bessel_range(a: f64) -> i32 {
    10.max((2.0 * a.abs()).ceil() as i32 + 5)
}

/// Pulses `n = −n_range..=n_range` with strengths `P_tot·Jₙ²(A)`.
pub fn bessel_train(
    a: f64,
    tau: f64,
    delta: f64,
    total_p: f64,
    sigma: f64,
    n_range: Option<i32>,
) -> Result<TrainSpec> {
    check_common(tau, total_p, sigma)?;
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("Bessel parameter A = {a}")));
    }
    let range = n_range.unwrap_or_else(|| default_bessel_range(a));
    if range < 0 {
        return Err(Error::InvalidParameter(format!(
            "negative Bessel range {range}"
        )));
    }
    let values = bessel_j_all(range as usize, a);
    let weight = |n: i32| values[n.unsigned_abs() as usize].powi(2);
    let captured: f64 = (-range..=range).map(weight).sum();
    let tail = (1.0 - captured).max(0.0);
    if tail > 1e-6 {
        return Err(Error::TailTooLarge {
            what: format!("Bessel train A = {a} truncated at |n| <= {range}"),
            tail_mass: tail,
            limit: 1e-6,
        });
    }
    let pulses = (-range..=range)
        .map(|n| TrainSpec::pulse(n, tau, delta, total_p * weight(n), sigma))
        .collect();
    Ok(TrainSpec {
        pulses,
        tau,
        delta,
        total_p,
    })
}

/// `Jₙ(x)` for `n = 0..=n_max` by Miller's backward recurrence, normalized
/// with `J₀ + 2ΣJ₂ₖ = 1`.
pub fn bessel_j_all(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let mut start = n_max.max(ax.ceil() as usize) + 30 + (ax.sqrt() * 10.0) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    let mut k = start;
    loop {
        if k <= n_max {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    for (n, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `Jₙ(x)` for any integer order.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let v = bessel_j_all(n.unsigned_abs() as usize, x)[n.unsigned_abs() as usize];
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

/// `P = Δα I σ √π / (2 c ε₀ ħ)`; `delta_alpha` in C·m²/V, `i_peak` in W/cm², `sigma` in ps.
pub fn strength_from_intensity(delta_alpha: f64, i_peak: f64, sigma: f64) -> f64 {
    let intensity = i_peak * 1e4;
    let sigma_s = sigma * 1e-12;
    delta_alpha * intensity * sigma_s * PI.sqrt() / (2.0 * SPEED_OF_LIGHT * EPSILON_0 * HBAR)
}

/// Inverse of [`strength_from_intensity`], W/cm².
pub fn intensity_from_strength(delta_alpha: f64, strength: f64, sigma: f64) -> f64 {
    strength / strength_from_intensity(delta_alpha, 1.0, sigma)
}
