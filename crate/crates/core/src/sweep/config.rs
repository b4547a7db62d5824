//! Run configuration: a TOML file with CLI overrides, echoed in full into the
//! run manifest.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::Coupling;
use crate::error::{Error, Result};
use crate::molecule::{
    cm_to_rad_per_ps, revival_time, FineStructure, MoleculeSpec, RotParity, SpinWeights,
    ANGSTROM3_TO_SI,
};
use crate::propagator::Engine;
use crate::pulsetrain::{bessel_train, equal_train, TrainSpec};

/// Molecule given by preset name or by explicit constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MoleculeConfig {
    Preset(String),
    Inline(InlineMolecule),
}

/// Constants in spectroscopic units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineMolecule {
    pub name: String,
    /// cm⁻¹
    pub b: f64,
    /// cm⁻¹
    #[serde(default)]
    pub d: f64,
    /// Å³
    pub delta_alpha: f64,
    pub spin_even: f64,
    pub spin_odd: f64,
    #[serde(default = "default_parity")]
    pub parity: RotParity,
    /// Spin–spin constant λ in cm⁻¹; present for Hund's case (b) species.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Spin–rotation constant γ in cm⁻¹.
    #[serde(default)]
    pub gamma: Option<f64>,
}

fn default_parity() -> RotParity {
    RotParity::Both
}

impl MoleculeConfig {
    pub fn resolve(&self) -> Result<MoleculeSpec> {
        let spec = match self {
            MoleculeConfig::Preset(name) => MoleculeSpec::preset(name)?,
            MoleculeConfig::Inline(m) => {
                let fine_structure = match (m.lambda, m.gamma) {
                    (None, None) => None,
                    (l, g) => Some(FineStructure {
                        lambda: cm_to_rad_per_ps(l.unwrap_or(0.0)),
                        gamma: cm_to_rad_per_ps(g.unwrap_or(0.0)),
                    }),
                };
                MoleculeSpec {
                    name: m.name.clone(),
                    b: cm_to_rad_per_ps(m.b),
                    d: cm_to_rad_per_ps(m.d),
                    delta_alpha: m.delta_alpha * ANGSTROM3_TO_SI,
                    spin_weights: SpinWeights {
                        even: m.spin_even,
                        odd: m.spin_odd,
                    },
                    allowed_rot_parity: m.parity,
                    fine_structure,
                }
            }
        };
        spec.validate()
            .map_err(|e| Error::Config(format!("molecule: {e}")))?;
        Ok(spec)
    }
}

/// `t_rev`, or the spin-free `π/B` where fine structure spoils exact revivals.
pub fn reference_revival(molecule: &MoleculeSpec) -> f64 {
    revival_time(molecule).unwrap_or(PI / molecule.b)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainKind {
    /// `pulses` equal pulses of strength `total_p / pulses`.
    #[default]
    Equal,
    /// Strengths `total_p·Jₙ²(amplitude)`.
    Bessel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    #[serde(default)]
    pub kind: TrainKind,
    /// Pulse count of an equal train.
    #[serde(default)]
    pub pulses: Option<usize>,
    /// Bessel parameter `A`.
    #[serde(default)]
    pub amplitude: Option<f64>,
    /// Half-range of the Bessel pulse index.
    #[serde(default)]
    pub bessel_range: Option<i32>,
    pub total_p: f64,
    /// Gaussian rms width in ps; 0 means delta pulses.
    #[serde(default)]
    pub sigma: f64,
}

impl TrainConfig {
    pub fn build(&self, tau: f64, delta: f64) -> Result<TrainSpec> {
        match self.kind {
            TrainKind::Equal => {
                let n = self
                    .pulses
                    .ok_or_else(|| Error::Config("equal train needs `pulses`".into()))?;
                equal_train(n, tau, delta, self.total_p, self.sigma)
            }
            TrainKind::Bessel => {
                let a = self
                    .amplitude
                    .ok_or_else(|| Error::Config("Bessel train needs `amplitude`".into()))?;
                bessel_train(a, tau, delta, self.total_p, self.sigma, self.bessel_range)
            }
        }
    }
}

/// Unit of an axis' `start`/`stop`/`step`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisUnit {
    /// ps for τ, rad for δ.
    #[default]
    Native,
    /// Multiples of the revival time of the first species.
    TRev,
    /// Multiples of π.
    Pi,
}

/// Inclusive range by `step` or by `count` points; a bare number is a single point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisConfig {
    Value(f64),
    Range(AxisRange),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub unit: AxisUnit,
}

impl AxisConfig {
    /// Grid points; `default_step` (native units) applies when neither
    /// `step` nor `count` is given.
    pub fn values(&self, t_rev: f64, default_step: f64, name: &str) -> Result<Vec<f64>> {
        let range = match self {
            AxisConfig::Value(v) => {
                if !v.is_finite() {
                    return Err(Error::Config(format!("{name}: non-finite value")));
                }
                return Ok(vec![*v]);
            }
            AxisConfig::Range(r) => r,
        };
        let scale = match range.unit {
            AxisUnit::Native => 1.0,
            AxisUnit::TRev => t_rev,
            AxisUnit::Pi => PI,
        };
        let (start, stop) = (range.start * scale, range.stop * scale);
        if !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(Error::Config(format!(
                "{name}: empty or invalid range [{start}, {stop}]"
            )));
        }
        match (range.step, range.count) {
            (Some(_), Some(_)) => Err(Error::Config(format!(
                "{name}: give either `step` or `count`"
            ))),
            (None, Some(0)) => Ok(Vec::new()),
            (None, Some(1)) => Ok(vec![start]),
            (None, Some(n)) => {
                let h = (stop - start) / (n - 1) as f64;
                Ok((0..n)
                    .map(|k| {
                        if k + 1 == n {
                            stop
                        } else {
                            start + h * k as f64
                        }
                    })
                    .collect())
            }
            (step, None) => {
                let h = step.map_or(default_step, |s| s * scale);
                if !(h > 0.0) || !h.is_finite() {
                    return Err(Error::Config(format!("{name}: step must be positive")));
                }
                let n = ((stop - start) / h * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
                Ok((0..n).map(|k| start + h * k as f64).collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageFormat {
    #[default]
    Png,
    Pgm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "Q")]
    Population,
    #[serde(rename = "epsilon")]
    Directionality,
    #[serde(rename = "Jz")]
    Jz,
    #[serde(rename = "E_abs")]
    Energy,
}

impl Observable {
    pub fn key(self) -> &'static str {
        match self {
            Observable::Population => "Q",
            Observable::Directionality => "epsilon",
            Observable::Jz => "Jz",
            Observable::Energy => "E_abs",
        }
    }

    pub fn per_level(self) -> bool {
        matches!(self, Observable::Population | Observable::Directionality)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Observables drawn as heatmaps (2-D grids only).
    #[serde(default = "default_heatmaps")]
    pub heatmaps: Vec<Observable>,
    #[serde(default)]
    pub image_format: ImageFormat,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_heatmaps() -> Vec<Observable> {
    vec![Observable::Population, Observable::Directionality]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_dir(),
            heatmaps: default_heatmaps(),
            image_format: ImageFormat::Png,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Single species; ignored when `species` is non-empty.
    #[serde(default)]
    pub molecule: Option<MoleculeConfig>,
    /// Species compared side by side on the same grid.
    #[serde(default)]
    pub species: Vec<MoleculeConfig>,
    pub train: TrainConfig,
    #[serde(default)]
    pub engine: Engine,
    /// K
    pub temperature: f64,
    pub tau: AxisConfig,
    #[serde(default = "default_delta")]
    pub delta: AxisConfig,
    /// Levels (J, or N for case (b)) written to CSV and heatmaps; all when empty.
    #[serde(default)]
    pub levels: Vec<i32>,
    #[serde(default)]
    pub output: OutputConfig,
    /// 0 = one per available core.
    #[serde(default)]
    pub workers: usize,
    /// Basis truncation; defaults to the rule based on `total_p` and temperature.
    #[serde(default)]
    pub level_max: Option<i32>,
    /// Outer-shell population above which a cell fails.
    #[serde(default)]
    pub truncation_limit: Option<f64>,
}

fn default_delta() -> AxisConfig {
    AxisConfig::Value(0.0)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a TOML config, or the config echoed in a JSON run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            #[derive(Deserialize)]
            struct Echo {
                config: RunConfig,
            }
            let echo: Echo =
                serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            echo.config.validate()?;
            return Ok(echo.config);
        }
        Self::from_toml(text.as_str())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn molecules(&self) -> Result<Vec<MoleculeSpec>> {
        let list: Vec<&MoleculeConfig> = if self.species.is_empty() {
            self.molecule.iter().collect()
        } else {
            self.species.iter().collect()
        };
        if list.is_empty() {
            return Err(Error::Config("no molecule or species given".into()));
        }
        list.into_iter().map(MoleculeConfig::resolve).collect()
    }

    /// Revival time of the first species, the unit of `t_rev` axes.
    pub fn reference_revival(&self) -> Result<f64> {
        Ok(reference_revival(&self.molecules()?[0]))
    }

    /// τ grid in ps; default step `t_rev/400`.
    pub fn taus(&self) -> Result<Vec<f64>> {
        let t_rev = self.reference_revival()?;
        self.tau.values(t_rev, t_rev / 400.0, "tau")
    }

    /// δ grid in rad; default step `π/100`.
    pub fn deltas(&self) -> Result<Vec<f64>> {
        let t_rev = self.reference_revival()?;
        self.delta.values(t_rev, PI / 100.0, "delta")
    }

    pub fn validate(&self) -> Result<()> {
        let mols = self.molecules()?;
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::Config(format!("temperature {} K", self.temperature)));
        }
        let t = &self.train;
        if !(t.total_p >= 0.0)
            || !t.total_p.is_finite()
            || !(t.sigma >= 0.0)
            || !t.sigma.is_finite()
        {
            return Err(Error::Config(
                "train: total_p and sigma must be finite and non-negative".into(),
            ));
        }
        match t.kind {
            TrainKind::Equal if !matches!(t.pulses, Some(n) if n > 0) => {
                return Err(Error::Config("equal train needs `pulses` >= 1".into()));
            }
            TrainKind::Bessel if t.amplitude.is_none() => {
                return Err(Error::Config("Bessel train needs `amplitude`".into()));
            }
            _ => {}
        }
        if self.engine == Engine::Ode {
            if let Some(m) = mols.iter().find(|m| m.coupling() == Coupling::CaseB) {
                return Err(Error::Config(format!(
                    "engine = ode is not available for {}",
                    m.name
                )));
            }
            if t.sigma <= 0.0 {
                return Err(Error::Config("engine = ode needs sigma > 0".into()));
            }
        }
        if let Some(l) = self.level_max {
            if l < 2 {
                return Err(Error::Config(format!("level_max = {l}")));
            }
        }
        if let Some(x) = self.truncation_limit {
            if !(x > 0.0) {
                return Err(Error::Config(format!("truncation_limit = {x}")));
            }
        }
        if self.levels.iter().any(|&l| l < 0) {
            return Err(Error::Config("levels must be non-negative".into()));
        }
        self.taus()?;
        self.deltas()?;
        // a train must be constructible for the first grid point
        t.build(1.0, 0.0)
            .map_err(|e| Error::Config(format!("train: {e}")))?;
        Ok(())
    }
}
