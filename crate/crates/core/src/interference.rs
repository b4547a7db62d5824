//! First-order interference model of a pulse train.
//!
//! To first order in the per-pulse strength `P`, pulse `n` contributes the
//! amplitude `iP⟨f|cos²β₀|i⟩ e^{in(ΔE·τ − ΔM·δ)}`, so the transition
//! probability is `P²|⟨f|cos²β₀|i⟩|²·Φ_N(φ)` with `φ = ΔE·τ − ΔM·δ` and
//! `Φ_N(φ) = Σ_{n,n'} cos[φ(n − n')] = sin²(Nφ/2)/sin²(φ/2)`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::angmom::{cos2beta_matrix_caseb, cos2beta_matrix_linear};
use crate::basis::{Coupling, StateLabel};
use crate::error::{Error, Result};
use crate::molecule::{excitation_period, excitation_period_spinfree, MoleculeSpec};

const SINGULAR: f64 = 1e-6;

/// Signed amplitude `sin(Nφ/2)/sin(φ/2)`; `Φ_N = amplitude²`.
pub fn phi_amplitude(n: usize, phi: f64) -> f64 {
    let nf = n as f64;
    let half = 0.5 * phi;
    let s = half.sin();
    if s.abs() < SINGULAR {
        // φ = 2πk + e:  (−1)^{k(N−1)} N [1 − (N² − 1) e²/24]
        let k = (phi / (2.0 * PI)).round();
        let e = phi - 2.0 * PI * k;
        let sign = if (k as i64 * (n as i64 - 1)).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        return sign * nf * (1.0 - (nf * nf - 1.0) * e * e / 24.0);
    }
    (nf * half).sin() / s
}

/// `Φ_N(φ)` in closed form.
pub fn phi_sum(n: usize, phi: f64) -> f64 {
    let a = phi_amplitude(n, phi);
    a * a
}

/// `Φ_N(φ)` as the literal double sum.
pub fn phi_sum_literal(n: usize, phi: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (phi * (i as f64 - k as f64)).cos();
        }
    }
    acc
}

/// `Φ_N` at detuning `x` from a line, with `x` in units of `t_exc`.
pub fn phi_detuning(n: usize, x_over_texc: f64) -> f64 {
    phi_sum(n, 2.0 * PI * x_over_texc)
}

/// Full width at half maximum of the main peak of `Φ_N`, in units of `t_exc`.
pub fn main_peak_fwhm(n: usize) -> f64 {
    if n <= 1 {
        return f64::INFINITY;
    }
    let half = 0.5 * (n * n) as f64;
    // Φ decreases monotonically from x = 0 to the first zero at 1/N.
    let (mut lo, mut hi) = (0.0, 1.0 / n as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi_detuning(n, mid) > half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + hi
}

/// Locus `τ(δ) = t_exc·(m + ΔM·δ/2π)` of constructive interference for the
/// transition into level `j_to` from `j_to − 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceLine {
    pub j_to: i32,
    pub delta_m: i32,
    pub m: i32,
    /// ps
    pub t_exc: f64,
}

impl ResonanceLine {
    pub fn tau_at(&self, delta: f64) -> f64 {
        self.t_exc * (f64::from(self.m) + f64::from(self.delta_m) * delta / (2.0 * PI))
    }

    /// `dτ/dδ`.
    pub fn slope(&self) -> f64 {
        self.t_exc * f64::from(self.delta_m) / (2.0 * PI)
    }

    /// `δ` where the line crosses `tau` (`None` for horizontal lines).
    pub fn delta_at(&self, tau: f64) -> Option<f64> {
        (self.delta_m != 0)
            .then(|| (tau / self.t_exc - f64::from(self.m)) * 2.0 * PI / f64::from(self.delta_m))
    }
}

fn period(molecule: &MoleculeSpec, j_to: i32) -> Result<f64> {
    match molecule.coupling() {
        Coupling::Linear => excitation_period(molecule, j_to),
        Coupling::CaseB => excitation_period_spinfree(molecule, j_to),
    }
}

pub fn resonance_lines(
    molecule: &MoleculeSpec,
    j_to: i32,
    delta_m: i32,
    m_range: RangeInclusive<i32>,
) -> Result<Vec<ResonanceLine>> {
    if ![-2, 0, 2].contains(&delta_m) {
        return Err(Error::InvalidQuantumNumbers(format!(
            "ΔM = {delta_m} (expected 0 or ±2)"
        )));
    }
    let t_exc = period(molecule, j_to)?;
    Ok(m_range
        .map(|m| ResonanceLine {
            j_to,
            delta_m,
            m,
            t_exc,
        })
        .collect())
}

/// Every line of levels `levels` that crosses the window `τ ∈ [tau_lo, tau_hi]`
/// for some `δ ∈ [delta_lo, delta_hi]`.
pub fn lines_in_window(
    molecule: &MoleculeSpec,
    levels: &[i32],
    tau: (f64, f64),
    delta: (f64, f64),
) -> Result<Vec<ResonanceLine>> {
    let mut out = Vec::new();
    for &j in levels {
        let t_exc = period(molecule, j)?;
        for dm in [-2, 0, 2] {
            let probe = ResonanceLine {
                j_to: j,
                delta_m: dm,
                m: 0,
                t_exc,
            };
            let (a, b) = (probe.tau_at(delta.0), probe.tau_at(delta.1));
            let (lo, hi) = (a.min(b), a.max(b));
            // τ = t_exc·m + offset with offset ∈ [lo, hi]
            let m_min = ((tau.0 - hi) / t_exc).ceil() as i32;
            let m_max = ((tau.1 - lo) / t_exc).floor() as i32;
            for m in m_min..=m_max {
                out.push(ResonanceLine { m, ..probe });
            }
        }
    }
    Ok(out)
}

/// `|⟨to|cos²β₀|from⟩|²`.
pub fn coupling_strength_sq(
    molecule: &MoleculeSpec,
    from: &StateLabel,
    to: &StateLabel,
) -> Result<f64> {
    let basis = [*from, *to];
    let basis: &[StateLabel] = if from == to { &basis[..1] } else { &basis };
    let mat = match molecule.coupling() {
        Coupling::Linear => cos2beta_matrix_linear(basis, 0.0)?,
        Coupling::CaseB => cos2beta_matrix_caseb(basis, 0.0)?,
    };
    Ok(mat.element(to, from).map_or(0.0, |v| v.norm_sqr()))
}

/// Interference phase `φ = ΔE·τ − ΔM·δ` of a `from → to` transition.
pub fn transition_phase(
    molecule: &MoleculeSpec,
    from: &StateLabel,
    to: &StateLabel,
    tau: f64,
    delta: f64,
) -> f64 {
    let de = molecule.energy(to) - molecule.energy(from);
    de * tau - f64::from(to.m - from.m) * delta
}

/// First-order probability of `from → to` after `n` pulses of strength `p`
/// each. Only meaningful for `n·p ≲ 1`.
#[allow(clippy::too_many_arguments)]
pub fn first_order_transition_prob(
    p: f64,
    from: &StateLabel,
    to: &StateLabel,
    n: usize,
    tau: f64,
    delta: f64,
    molecule: &MoleculeSpec,
) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let v2 = coupling_strength_sq(molecule, from, to)?;
    Ok(p * p * v2 * phi_sum(n, transition_phase(molecule, from, to, tau, delta)))
}
