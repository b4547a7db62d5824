//! Molecular constants, rotational energies and thermal ensembles.
//!
//! Internal units: `ħ = 1`, time in ps, energies as angular frequencies in
//! rad/ps. Spectroscopic constants in cm⁻¹ are converted at construction.
//!
//! The rotational constants of the nitrogen presets are fixed by their revival
//! times (8.38 ps for ¹⁴N₂, 8.98 ps for ¹⁵N₂). Centrifugal distortion,
//! polarizability anisotropies and all oxygen constants are literature
//! defaults and can be overridden through configuration.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::basis::{Coupling, StateLabel};
use crate::error::{Error, Result};

/// rad/ps per cm⁻¹ (2πc).
pub const CM_TO_RAD_PER_PS: f64 = 2.0 * PI * 2.997_924_58e10 * 1e-12;
/// rad/ps per kelvin (k_B/ħ).
pub const KELVIN_TO_RAD_PER_PS: f64 = 1.380_649e-23 / 1.054_571_817e-34 * 1e-12;
/// SI polarizability (C·m²/V) per Å³ of polarizability volume (4πε₀·10⁻³⁰).
pub const ANGSTROM3_TO_SI: f64 = 4.0 * PI * 8.854_187_812_8e-12 * 1e-30;

pub fn cm_to_rad_per_ps(x: f64) -> f64 {
    x * CM_TO_RAD_PER_PS
}

pub fn rad_per_ps_to_cm(x: f64) -> f64 {
    x / CM_TO_RAD_PER_PS
}

/// Which rotational levels exist (nuclear exchange symmetry).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotParity {
    Even,
    Odd,
    Both,
}

impl RotParity {
    pub fn allows(self, level: i32) -> bool {
        match self {
            RotParity::Even => level % 2 == 0,
            RotParity::Odd => level % 2 != 0,
            RotParity::Both => true,
        }
    }
}

/// Nuclear-spin statistical weights of even and odd rotational levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinWeights {
    pub even: f64,
    pub odd: f64,
}

impl SpinWeights {
    pub fn of(&self, level: i32) -> f64 {
        if level % 2 == 0 {
            self.even
        } else {
            self.odd
        }
    }
}

/// Spin-spin (`lambda`) and spin-rotation (`gamma`) constants, rad/ps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FineStructure {
    pub lambda: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoleculeSpec {
    pub name: String,
    /// Rotational constant, rad/ps.
    pub b: f64,
    /// Centrifugal distortion, rad/ps.
    pub d: f64,
    /// Polarizability anisotropy, C·m²/V.
    pub delta_alpha: f64,
    pub spin_weights: SpinWeights,
    pub allowed_rot_parity: RotParity,
    /// Present exactly for Hund's case (b) species.
    pub fine_structure: Option<FineStructure>,
}

impl MoleculeSpec {
    /// ¹⁴N₂: `t_rev = 8.38 ps`, even:odd = 2:1.
    pub fn n2_14() -> Self {
        MoleculeSpec {
            name: "14N2".into(),
            b: PI / 8.38,
            d: cm_to_rad_per_ps(5.76e-6),
            delta_alpha: 0.93 * ANGSTROM3_TO_SI,
            spin_weights: SpinWeights {
                even: 6.0,
                odd: 3.0,
            },
            allowed_rot_parity: RotParity::Both,
            fine_structure: None,
        }
    }

    /// ¹⁵N₂: `t_rev = 8.98 ps`, even:odd = 1:3.
    pub fn n2_15() -> Self {
        MoleculeSpec {
            name: "15N2".into(),
            b: PI / 8.98,
            d: cm_to_rad_per_ps(5.02e-6),
            delta_alpha: 0.93 * ANGSTROM3_TO_SI,
            spin_weights: SpinWeights {
                even: 1.0,
                odd: 3.0,
            },
            allowed_rot_parity: RotParity::Both,
            fine_structure: None,
        }
    }

    /// ¹⁶O₂ in X³Σg⁻, Hund's case (b), only odd `N`.
    pub fn o2_16() -> Self {
        MoleculeSpec {
            name: "16O2".into(),
            b: cm_to_rad_per_ps(1.437_77),
            d: cm_to_rad_per_ps(4.84e-6),
            delta_alpha: 1.14 * ANGSTROM3_TO_SI,
            spin_weights: SpinWeights {
                even: 0.0,
                odd: 1.0,
            },
            allowed_rot_parity: RotParity::Odd,
            fine_structure: Some(FineStructure {
                lambda: cm_to_rad_per_ps(1.984_75),
                gamma: cm_to_rad_per_ps(-0.008_425),
            }),
        }
    }

    /// Looks up a built-in preset. Besides the three species, `15N2-ortho`
    /// and `15N2-para` restrict ¹⁵N₂ to its odd or even levels.
    pub fn preset(name: &str) -> Result<Self> {
        let spec = match name {
            "14N2" | "n2_14" | "N2" => Self::n2_14(),
            "15N2" | "n2_15" => Self::n2_15(),
            "15N2-ortho" => Self::n2_15().restricted(RotParity::Odd),
            "15N2-para" => Self::n2_15().restricted(RotParity::Even),
            "14N2-ortho" => Self::n2_14().restricted(RotParity::Even),
            "14N2-para" => Self::n2_14().restricted(RotParity::Odd),
            "16O2" | "o2_16" | "O2" => Self::o2_16(),
            other => return Err(Error::Config(format!("unknown molecule preset '{other}'"))),
        };
        Ok(spec)
    }

    /// Same species with only the levels of one parity (a single spin isomer).
    pub fn restricted(mut self, parity: RotParity) -> Self {
        let suffix = match parity {
            RotParity::Even => "even",
            RotParity::Odd => "odd",
            RotParity::Both => "all",
        };
        self.name = format!("{}[{suffix}]", self.name);
        self.allowed_rot_parity = parity;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{}: B must be positive",
                self.name
            )));
        }
        if !(self.d >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{}: D must be non-negative",
                self.name
            )));
        }
        if self.spin_weights.even < 0.0 || self.spin_weights.odd < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{}: negative spin weight",
                self.name
            )));
        }
        if self.fine_structure.is_some() && self.allowed_rot_parity == RotParity::Even {
            return Err(Error::InvalidParameter(format!(
                "{}: case (b) species must allow odd N",
                self.name
            )));
        }
        Ok(())
    }

    pub fn coupling(&self) -> Coupling {
        if self.fine_structure.is_some() {
            Coupling::CaseB
        } else {
            Coupling::Linear
        }
    }

    /// Statistical weight of a rotational level (zero if forbidden).
    pub fn level_weight(&self, level: i32) -> f64 {
        if self.allowed_rot_parity.allows(level) {
            self.spin_weights.of(level)
        } else {
            0.0
        }
    }

    /// Energy of any basis state of this molecule.
    pub fn energy(&self, label: &StateLabel) -> f64 {
        match self.fine_structure {
            None => self.rotor_energy(label.j),
            Some(fs) => caseb_energy_unchecked(self.b, self.d, fs, label.j, label.n),
        }
    }

    fn rotor_energy(&self, j: i32) -> f64 {
        let x = f64::from(j) * f64::from(j + 1);
        self.b * x - self.d * x * x
    }
}

/// `E_J = B·J(J+1) − D·J²(J+1)²`.
pub fn energy_linear(spec: &MoleculeSpec, j: i32) -> Result<f64> {
    if j < 0 {
        return Err(Error::InvalidQuantumNumbers(format!("negative J = {j}")));
    }
    Ok(spec.rotor_energy(j))
}

fn caseb_energy_unchecked(b: f64, d: f64, fs: FineStructure, j: i32, n: i32) -> f64 {
    let nf = f64::from(n);
    let x = nf * (nf + 1.0);
    // ⟨N·S⟩ = [J(J+1) − N(N+1) − S(S+1)]/2
    let n_dot_s = (f64::from(j) * f64::from(j + 1) - x - 2.0) / 2.0;
    // Diagonal case (b) spin-spin term (2/3)λ(3S_z² − S²).
    let spin_spin = match j - n {
        0 => 2.0 / 3.0,
        -1 => -2.0 * (nf + 1.0) / (3.0 * (2.0 * nf - 1.0)),
        1 => -2.0 * nf / (3.0 * (2.0 * nf + 3.0)),
        _ => unreachable!("J outside N-1..=N+1"),
    };
    b * x - d * x * x + fs.gamma * n_dot_s + fs.lambda * spin_spin
}

/// Case (b) level energy from the diagonal effective Hamiltonian
/// `B·N(N+1) − D·N²(N+1)² + γ N·S + (2/3)λ(3S_z² − S²)`.
pub fn energy_caseb(spec: &MoleculeSpec, j: i32, n: i32) -> Result<f64> {
    let fs = spec.fine_structure.ok_or_else(|| Error::Unsupported {
        molecule: spec.name.clone(),
        what: "case (b) energies".into(),
    })?;
    if n < 1 || n % 2 == 0 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "N = {n} must be odd and positive"
        )));
    }
    if j < 0 || (j - n).abs() > 1 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "J = {j} not in N-1..=N+1 for N = {n}"
        )));
    }
    Ok(caseb_energy_unchecked(spec.b, spec.d, fs, j, n))
}

/// `t_rev = π/B` (ps).
pub fn revival_time(spec: &MoleculeSpec) -> Result<f64> {
    if spec.fine_structure.is_some() {
        return Err(Error::Unsupported {
            molecule: spec.name.clone(),
            what: "revival time (spin-split levels do not rephase)".into(),
        });
    }
    Ok(PI / spec.b)
}

/// `t_exc(J) = 2π/(E_J − E_{J−2})`, the beat period of the `J−2 → J` transition.
pub fn excitation_period(spec: &MoleculeSpec, j: i32) -> Result<f64> {
    if spec.fine_structure.is_some() {
        return Err(Error::Unsupported {
            molecule: spec.name.clone(),
            what: "excitation period".into(),
        });
    }
    if j < 2 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "excitation period needs J >= 2, got {j}"
        )));
    }
    Ok(2.0 * PI / (spec.rotor_energy(j) - spec.rotor_energy(j - 2)))
}

/// `t_exc(N)` of a case (b) species from the spin-free rotational ladder.
pub fn excitation_period_spinfree(spec: &MoleculeSpec, level: i32) -> Result<f64> {
    if level < 2 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "excitation period needs level >= 2, got {level}"
        )));
    }
    Ok(2.0 * PI / (spec.rotor_energy(level) - spec.rotor_energy(level - 2)))
}

/// Rotational level energies, one entry per `J` (rigid rotor) or `(J, N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub entries: Vec<(StateLabel, f64)>,
}

/// All levels with rotational quantum number up to `level_max`; labels carry `M = 0`.
pub fn level_scheme(spec: &MoleculeSpec, level_max: i32) -> LevelScheme {
    let mut entries = Vec::new();
    for level in 0..=level_max {
        if !spec.allowed_rot_parity.allows(level) {
            continue;
        }
        match spec.coupling() {
            Coupling::Linear => {
                let l = StateLabel::rotor(level, 0);
                entries.push((l, spec.energy(&l)));
            }
            Coupling::CaseB => {
                for j in (level - 1).max(0)..=(level + 1) {
                    let l = StateLabel::case_b(j, level, 0);
                    entries.push((l, spec.energy(&l)));
                }
            }
        }
    }
    LevelScheme { entries }
}

/// Normalized Boltzmann weights of the initial states `|J₀,M₀⟩` (or
/// `|J₀,N₀,M₀⟩`), each sublevel `M₀` sharing its level's weight equally.
///
/// Levels above `cutoff` are dropped; fails if their share of the partition
/// function exceeds `1e-6`. `T = 0` puts all weight on the lowest allowed level.
pub fn thermal_weights(
    spec: &MoleculeSpec,
    temperature: f64,
    cutoff: i32,
) -> Result<Vec<(StateLabel, f64)>> {
    thermal_weights_with_tolerance(spec, temperature, cutoff, 1e-6)
}

pub fn thermal_weights_with_tolerance(
    spec: &MoleculeSpec,
    temperature: f64,
    cutoff: i32,
    tail_limit: f64,
) -> Result<Vec<(StateLabel, f64)>> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "temperature {temperature} K"
        )));
    }
    spec.validate()?;
    // (label, level weight g, energy)
    let multiplets = |level_max: i32| -> Vec<(StateLabel, f64, f64)> {
        level_scheme(spec, level_max)
            .entries
            .into_iter()
            .map(|(l, e)| (l, spec.level_weight(l.level()), e))
            .filter(|(_, g, _)| *g > 0.0)
            .collect()
    };
    let candidates = multiplets(cutoff.max(0) + 60);
    let e_min = candidates
        .iter()
        .map(|&(_, _, e)| e)
        .fold(f64::INFINITY, f64::min);
    if !e_min.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{}: no allowed levels",
            spec.name
        )));
    }

    let kt = temperature * KELVIN_TO_RAD_PER_PS;
    let boltzmann = |e: f64| -> f64 {
        if kt == 0.0 {
            if (e - e_min).abs() <= 1e-12 * e_min.abs().max(1.0) {
                1.0
            } else {
                0.0
            }
        } else {
            (-(e - e_min) / kt).exp()
        }
    };

    let mut kept = Vec::new();
    let mut total = 0.0;
    let mut tail = 0.0;
    for (label, g, e) in candidates {
        let w = g * boltzmann(e) * f64::from(2 * label.j + 1);
        total += w;
        if label.level() <= cutoff {
            kept.push((label, w));
        } else {
            tail += w;
        }
    }
    if tail > tail_limit * total {
        return Err(Error::TailTooLarge {
            what: format!("thermal population of {} above level {cutoff}", spec.name),
            tail_mass: tail / total,
            limit: tail_limit,
        });
    }
    let kept_total: f64 = kept.iter().map(|&(_, w)| w).sum();
    let mut out = Vec::new();
    for (label, w) in kept {
        if w == 0.0 {
            continue;
        }
        let per_m = w / kept_total / f64::from(2 * label.j + 1);
        for m in -label.j..=label.j {
            out.push((StateLabel { m, ..label }, per_m));
        }
    }
    Ok(out)
}

/// Smallest level cutoff whose thermal tail is below `tail_limit`.
pub fn thermal_cutoff(spec: &MoleculeSpec, temperature: f64, tail_limit: f64) -> Result<i32> {
    for cutoff in 0..200 {
        match thermal_weights_with_tolerance(spec, temperature, cutoff, tail_limit) {
            Ok(_) => return Ok(cutoff),
            Err(Error::TailTooLarge { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidParameter(format!(
        "temperature {temperature} K too high"
    )))
}
