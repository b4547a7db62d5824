//! Named run configurations for the standard maps and scans. The same recipes
//! ship as TOML files under `configs/`.

use super::config::{
    AxisConfig, AxisRange, AxisUnit, MoleculeConfig, OutputConfig, RunConfig, TrainConfig,
    TrainKind,
};
use crate::error::{Error, Result};
use crate::propagator::Engine;

pub const NAMES: [&str; 6] = ["fig4", "fig6", "fig7", "fig8", "fig9", "fig10"];

pub fn by_name(name: &str) -> Result<RunConfig> {
    match name {
        "fig4" | "fig5" => Ok(fig4()),
        "fig6" => Ok(fig6()),
        "fig7" => Ok(fig7()),
        "fig8" => Ok(fig8()),
        "fig9" => Ok(fig9()),
        "fig10" | "fig11" => Ok(fig10()),
        other => Err(Error::Config(format!(
            "unknown recipe '{other}' (known: {})",
            NAMES.join(", ")
        ))),
    }
}

fn range(start: f64, stop: f64, unit: AxisUnit) -> AxisConfig {
    AxisConfig::Range(AxisRange {
        start,
        stop,
        step: None,
        count: None,
        unit,
    })
}

fn values(start: f64, stop: f64, count: usize, unit: AxisUnit) -> AxisConfig {
    AxisConfig::Range(AxisRange {
        start,
        stop,
        step: None,
        count: Some(count),
        unit,
    })
}

fn preset(name: &str) -> MoleculeConfig {
    MoleculeConfig::Preset(name.into())
}

fn nitrogen_train(pulses: usize) -> TrainConfig {
    TrainConfig {
        kind: TrainKind::Equal,
        pulses: Some(pulses),
        amplitude: None,
        bessel_range: None,
        total_p: 5.0,
        sigma: 0.03,
    }
}

fn base(molecule: &str, train: TrainConfig) -> RunConfig {
    RunConfig {
        molecule: Some(preset(molecule)),
        species: Vec::new(),
        train,
        engine: Engine::Sudden,
        temperature: 8.0,
        tau: range(0.5, 9.0, AxisUnit::Native),
        delta: range(0.0, 1.0, AxisUnit::Pi),
        levels: Vec::new(),
        output: OutputConfig::default(),
        workers: 0,
        level_max: None,
        truncation_limit: None,
    }
}

/// ¹⁴N₂ Q(J) and ε(J) maps, J = 2..5, eight equal pulses.
pub fn fig4() -> RunConfig {
    RunConfig {
        levels: vec![2, 3, 4, 5],
        output: out("out/fig4"),
        ..base("14N2", nitrogen_train(8))
    }
}

/// ¹⁵N₂ level populations around τ = t_rev/4 at δ = 0.
pub fn fig6() -> RunConfig {
    RunConfig {
        tau: range(0.2, 0.3, AxisUnit::TRev),
        delta: AxisConfig::Value(0.0),
        levels: (0..=7).collect(),
        output: out("out/fig6"),
        ..base("15N2", nitrogen_train(8))
    }
}

/// ¹⁵N₂ ortho vs para: energy at δ = 0 and ⟨J_z⟩ at δ = π/4.
pub fn fig7() -> RunConfig {
    RunConfig {
        molecule: None,
        species: vec![preset("15N2-ortho"), preset("15N2-para")],
        tau: range(0.5, 9.5, AxisUnit::Native),
        delta: values(0.0, 0.25, 2, AxisUnit::Pi),
        levels: (0..=6).collect(),
        output: out("out/fig7"),
        ..base("15N2", nitrogen_train(8))
    }
}

/// ¹⁴N₂ vs ¹⁵N₂: energy at δ = 0 and ⟨J_z⟩ at δ = π/4.
pub fn fig8() -> RunConfig {
    RunConfig {
        molecule: None,
        species: vec![preset("14N2"), preset("15N2")],
        output: out("out/fig8"),
        ..fig7()
    }
}

/// The fig4 setup with sixteen pulses of half the strength, J = 2, 3.
pub fn fig9() -> RunConfig {
    RunConfig {
        levels: vec![2, 3],
        output: out("out/fig9"),
        ..base("14N2", nitrogen_train(16))
    }
}

/// ¹⁶O₂ Q(N) and ε(N) maps, N = 3, 5, Bessel train A = 2, delta pulses.
pub fn fig10() -> RunConfig {
    let train = TrainConfig {
        kind: TrainKind::Bessel,
        pulses: None,
        amplitude: Some(2.0),
        bessel_range: None,
        total_p: 7.5,
        sigma: 0.0,
    };
    RunConfig {
        tau: range(0.5, 12.0, AxisUnit::Native),
        levels: vec![3, 5],
        output: out("out/fig10"),
        ..base("16O2", train)
    }
}

fn out(dir: &str) -> OutputConfig {
    OutputConfig {
        dir: dir.into(),
        ..OutputConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recipes_validate() {
        for name in NAMES {
            by_name(name).unwrap().validate().unwrap();
        }
        assert!(by_name("fig99").unwrap_err().is_config());
    }

    #[test]
    fn shipped_configs_match() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        for name in NAMES {
            let cfg = RunConfig::load(&dir.join(format!("{name}.toml"))).unwrap();
            assert_eq!(cfg, by_name(name).unwrap(), "{name}");
        }
    }
}
