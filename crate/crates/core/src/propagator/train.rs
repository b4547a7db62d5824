use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::state::State;
use super::sudden::{taylor_rows, Scratch};
use crate::basis::Coupling;
use crate::error::{Error, Result};
use crate::pulsetrain::{PulseShape, PulseSpec, TrainSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Every pulse is an instantaneous kick.
    #[default]
    Sudden,
    /// Gaussian pulses are integrated in time (rigid rotor only).
    Ode,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Sudden => "sudden",
            Engine::Ode => "ode",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sudden" | "delta" => Ok(Engine::Sudden),
            "ode" => Ok(Engine::Ode),
            other => Err(Error::Config(format!(
                "unknown engine '{other}' (sudden|ode)"
            ))),
        }
    }
}

fn check_order(pulses: &[PulseSpec]) -> Result<()> {
    for w in pulses.windows(2) {
        if !(w[1].center_time >= w[0].center_time) {
            return Err(Error::InvalidParameter(
                "pulses must be ordered in time".into(),
            ));
        }
    }
    Ok(())
}

/// Propagates every packet of `state` through `train`.
///
/// Free evolution to the first pulse starts from `state.time()` (backwards if
/// the train begins earlier). The returned state sits at the last pulse
/// (sudden) or at the end of the last integration window (ODE).
pub fn run_train(mut state: State, train: &TrainSpec, engine: Engine) -> Result<State> {
    if train.pulses.is_empty() {
        return Ok(state);
    }
    check_order(&train.pulses)?;
    match engine {
        Engine::Sudden => {
            run_sudden(&mut state, &train.pulses)?;
        }
        Engine::Ode => {
            if state.plan().coupling() == Coupling::CaseB {
                return Err(Error::Unsupported {
                    molecule: "case (b) basis".into(),
                    what: "ODE engine (delta pulses only)".into(),
                });
            }
            run_ode(&mut state, &train.pulses)?;
        }
    }
    Ok(state)
}

/// Sudden kicks with free evolution and frame rotations fused into one
/// diagonal per pulse: the vector is kept in the frame of the current pulse.
fn run_sudden(state: &mut State, pulses: &[PulseSpec]) -> Result<()> {
    let plan = std::sync::Arc::clone(state.plan());
    let start = state.time();
    let (mut clock, mut frame) = (start, 0.0);
    let mut scratch = Scratch::default();
    state.with_rows(|x, cols| {
        for p in pulses {
            let dt = p.center_time - clock;
            let chi = p.polarization_angle;
            // u ← e^{−iEΔt} e^{iM(χ − χ_prev)} u
            let phases = plan.phases(dt, frame - chi);
            for (row, ph) in x.chunks_exact_mut(cols).zip(&phases) {
                for v in row {
                    *v *= ph;
                }
            }
            clock = p.center_time;
            frame = chi;
            if p.strength != 0.0 {
                taylor_rows(&plan, p.strength, x, cols, &mut scratch);
                // the outer-shell population is frame independent
                plan.check_outer(plan.outer_population_rows(x, cols))?;
            }
        }
        Ok::<(), crate::error::Error>(())
    })?;
    state.advance_clock(clock - start);
    state.rotate(frame);
    Ok(())
}

/// Groups pulses whose integration windows overlap.
fn clusters(pulses: &[PulseSpec]) -> Vec<&[PulseSpec]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=pulses.len() {
        let split = i == pulses.len() || {
            let end = pulses[start..i]
                .iter()
                .map(|p| p.window().1)
                .fold(f64::NEG_INFINITY, f64::max);
            pulses[i].window().0 >= end
        };
        if split {
            out.push(&pulses[start..i]);
            start = i;
        }
    }
    out
}

fn run_ode(state: &mut State, pulses: &[PulseSpec]) -> Result<()> {
    let gaussian = pulses
        .iter()
        .filter(|p| p.shape == PulseShape::Gaussian && p.sigma > 0.0)
        .count();
    if gaussian != 0 && gaussian != pulses.len() {
        return Err(Error::InvalidParameter(
            "mixed delta and Gaussian pulses".into(),
        ));
    }
    if gaussian == 0 {
        return run_sudden(state, pulses);
    }
    for group in clusters(pulses) {
        state.kick_ode_cluster(group)?;
    }
    Ok(())
}
