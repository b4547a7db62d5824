//! Thermal ensembles and the observables reported per rotational level.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{BasisClass, Coupling, StateLabel};
use crate::error::{Error, Result};
use crate::molecule::{thermal_weights, MoleculeSpec};
use crate::propagator::{default_level_max, run_train, BasisPlan, Engine, State, TRUNCATION_LIMIT};
use crate::pulsetrain::TrainSpec;

/// Populations below this leave the directionality undefined.
pub const EPSILON_FLOOR: f64 = 1e-6;

/// Final packets of one basis class with the classical weight of each column.
#[derive(Clone, Debug)]
pub struct WeightedStates {
    pub state: State,
    pub weights: Vec<f64>,
    /// Starting basis state of each column.
    pub initial: Vec<StateLabel>,
}

/// Per-level populations and directionalities plus ensemble-wide `⟨J_z⟩` and
/// absorbed energy. Levels are `J` for the rigid rotor and `N` for case (b).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    /// Population `Q` per level, index = level.
    pub population: Vec<f64>,
    /// `ε` per level; `None` where `Q < EPSILON_FLOOR`.
    pub directionality: Vec<Option<f64>>,
    /// `⟨J_z⟩` in units of ħ.
    pub jz: f64,
    /// Rotational energy gained relative to the initial ensemble, rad/ps.
    pub energy_absorbed: f64,
}

impl LevelReport {
    pub fn level_max(&self) -> i32 {
        self.population.len() as i32 - 1
    }

    pub fn q(&self, level: i32) -> f64 {
        usize::try_from(level)
            .ok()
            .and_then(|l| self.population.get(l))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn epsilon(&self, level: i32) -> Option<f64> {
        usize::try_from(level)
            .ok()
            .and_then(|l| self.directionality.get(l))
            .copied()
            .flatten()
    }

    pub fn total_population(&self) -> f64 {
        self.population.iter().sum()
    }

    /// Reduces weighted final states; `baseline` is the initial mean energy.
    pub fn from_states(results: &[WeightedStates], baseline: f64) -> Self {
        let mut sums = LevelSums::default();
        for r in results {
            sums.add(&LevelSums::from_states(r));
        }
        sums.finish(baseline)
    }
}

/// Additive per-level sums of a partial ensemble. Partial sums of disjoint
/// batches combine with [`add`](Self::add); a fixed combination order gives
/// bit-identical reports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelSums {
    /// Population in `M > 0` per level, plus half of `M = 0`.
    pub left: Vec<f64>,
    /// Population in `M < 0` per level, plus half of `M = 0`.
    pub right: Vec<f64>,
    pub jz: f64,
    /// Weighted mean energy (absolute).
    pub energy: f64,
}

impl LevelSums {
    pub fn from_states(r: &WeightedStates) -> Self {
        let plan = r.state.plan();
        let size = plan
            .labels()
            .iter()
            .map(StateLabel::level)
            .max()
            .unwrap_or(0)
            .max(0) as usize
            + 1;
        let mut out = LevelSums {
            left: vec![0.0; size],
            right: vec![0.0; size],
            jz: 0.0,
            energy: 0.0,
        };
        for (c, &w) in r.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for ((label, amp), e) in plan
                .labels()
                .iter()
                .zip(r.state.column(c))
                .zip(plan.energies())
            {
                let p = w * amp.norm_sqr();
                if p == 0.0 {
                    continue;
                }
                let l = label.level() as usize;
                match label.m.signum() {
                    1 => out.left[l] += p,
                    -1 => out.right[l] += p,
                    _ => {
                        out.left[l] += 0.5 * p;
                        out.right[l] += 0.5 * p;
                    }
                }
                out.jz += p * f64::from(label.m);
                out.energy += p * e;
            }
        }
        out
    }

    pub fn add(&mut self, other: &LevelSums) {
        if other.left.len() > self.left.len() {
            self.left.resize(other.left.len(), 0.0);
            self.right.resize(other.right.len(), 0.0);
        }
        for (a, b) in self.left.iter_mut().zip(&other.left) {
            *a += b;
        }
        for (a, b) in self.right.iter_mut().zip(&other.right) {
            *a += b;
        }
        self.jz += other.jz;
        self.energy += other.energy;
    }

    pub fn finish(&self, baseline: f64) -> LevelReport {
        let population: Vec<f64> = self
            .left
            .iter()
            .zip(&self.right)
            .map(|(l, r)| l + r)
            .collect();
        let directionality = self
            .left
            .iter()
            .zip(&self.right)
            .zip(&population)
            .map(|((l, r), q)| (*q >= EPSILON_FLOOR).then(|| (l - r) / q))
            .collect();
        LevelReport {
            population,
            directionality,
            jz: self.jz,
            energy_absorbed: self.energy - baseline,
        }
    }
}

/// `Q` per level.
pub fn population(results: &[WeightedStates]) -> Vec<f64> {
    LevelReport::from_states(results, 0.0).population
}

/// `ε` per level.
pub fn directionality(results: &[WeightedStates]) -> Vec<Option<f64>> {
    LevelReport::from_states(results, 0.0).directionality
}

pub fn jz_expect(results: &[WeightedStates]) -> f64 {
    LevelReport::from_states(results, 0.0).jz
}

/// Mean energy minus `baseline`.
pub fn absorbed_energy(results: &[WeightedStates], baseline: f64) -> f64 {
    LevelReport::from_states(results, baseline).energy_absorbed
}

#[derive(Clone, Debug)]
struct ClassBatch {
    plan: Arc<BasisPlan>,
    labels: Vec<StateLabel>,
    weights: Vec<f64>,
}

/// Classical mixture of initial basis states, grouped into basis classes that
/// propagate together.
#[derive(Clone, Debug)]
pub struct Ensemble {
    molecule: MoleculeSpec,
    batches: Vec<ClassBatch>,
    level_max: i32,
    baseline: f64,
}

impl Ensemble {
    /// Boltzmann ensemble at `temperature` K with truncation `level_max`, or
    /// the default truncation for a train of total strength `total_p`.
    pub fn thermal(
        molecule: &MoleculeSpec,
        temperature: f64,
        total_p: f64,
        level_max: Option<i32>,
    ) -> Result<Self> {
        let cutoff = crate::molecule::thermal_cutoff(molecule, temperature, 1e-6)?;
        let weights = thermal_weights(molecule, temperature, cutoff)?;
        let thermal_level = weights.iter().map(|(l, _)| l.level()).max().unwrap_or(0);
        let level_max = level_max.unwrap_or_else(|| default_level_max(total_p, thermal_level));
        Self::with_weights(molecule, &weights, level_max)
    }

    /// Arbitrary mixture; weights are normalized here.
    pub fn with_weights(
        molecule: &MoleculeSpec,
        weights: &[(StateLabel, f64)],
        level_max: i32,
    ) -> Result<Self> {
        Self::build(molecule, weights, level_max, TRUNCATION_LIMIT)
    }

    /// Same ensemble with a different outer-shell population limit.
    pub fn with_truncation_limit(&self, limit: f64) -> Result<Self> {
        Self::build(
            &self.molecule,
            &self.initial_states(),
            self.level_max,
            limit,
        )
    }

    fn build(
        molecule: &MoleculeSpec,
        weights: &[(StateLabel, f64)],
        level_max: i32,
        limit: f64,
    ) -> Result<Self> {
        molecule.validate()?;
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        if weights.is_empty() || !(total > 0.0) || weights.iter().any(|(_, w)| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "ensemble weights must be non-negative with positive sum".into(),
            ));
        }
        let coupling = molecule.coupling();
        let level_max = match coupling {
            Coupling::CaseB if level_max % 2 == 0 => level_max + 1,
            _ => level_max,
        };
        let mut groups: BTreeMap<BasisClass, (Vec<StateLabel>, Vec<f64>)> = BTreeMap::new();
        let mut baseline = 0.0;
        for (label, w) in weights {
            if *w == 0.0 {
                continue;
            }
            if label.level() > level_max {
                return Err(Error::InvalidParameter(format!(
                    "initial state {label} above truncation level {level_max}"
                )));
            }
            let g = groups.entry(BasisClass::of(coupling, label)).or_default();
            g.0.push(*label);
            g.1.push(w / total);
            baseline += w / total * molecule.energy(label);
        }
        let batches = groups
            .into_iter()
            .map(|(class, (labels, weights))| {
                Ok(ClassBatch {
                    plan: BasisPlan::with_truncation_limit(molecule, class, level_max, limit)?,
                    labels,
                    weights,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Ensemble {
            molecule: molecule.clone(),
            batches,
            level_max,
            baseline,
        })
    }

    pub fn molecule(&self) -> &MoleculeSpec {
        &self.molecule
    }

    pub fn level_max(&self) -> i32 {
        self.level_max
    }

    /// Mean energy of the initial mixture.
    pub fn baseline_energy(&self) -> f64 {
        self.baseline
    }

    pub fn initial_states(&self) -> Vec<(StateLabel, f64)> {
        self.batches
            .iter()
            .flat_map(|b| b.labels.iter().copied().zip(b.weights.iter().copied()))
            .collect()
    }

    /// Number of independent propagation batches.
    pub fn batch_count(&self) -> usize {
        self.batches.len()
    }

    /// Final states of every batch.
    pub fn propagate(&self, train: &TrainSpec, engine: Engine) -> Result<Vec<WeightedStates>> {
        (0..self.batches.len())
            .map(|i| self.propagate_batch(i, train, engine))
            .collect()
    }

    pub fn propagate_batch(
        &self,
        index: usize,
        train: &TrainSpec,
        engine: Engine,
    ) -> Result<WeightedStates> {
        let b = &self.batches[index];
        let initial = State::basis_states(Arc::clone(&b.plan), &b.labels)?;
        let state = run_train(initial, train, engine)?;
        Ok(WeightedStates {
            state,
            weights: b.weights.clone(),
            initial: b.labels.clone(),
        })
    }

    pub fn run(&self, train: &TrainSpec, engine: Engine) -> Result<LevelReport> {
        Ok(self.report(&self.propagate(train, engine)?))
    }

    pub fn report(&self, results: &[WeightedStates]) -> LevelReport {
        LevelReport::from_states(results, self.baseline)
    }
}
