use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{reference_revival, RunConfig};
use crate::error::{Error, Result};
use crate::molecule::MoleculeSpec;
use crate::observables::{Ensemble, LevelReport, LevelSums};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// (τ, δ) maps.
    Sweep,
    /// 1-D τ scans, usually comparing several species.
    Scan,
    /// One (τ, δ) point.
    Single,
}

/// Observables of one grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    /// Index into [`SweepResult::species`].
    pub species: usize,
    pub tau: f64,
    pub delta: f64,
    pub report: LevelReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeciesInfo {
    pub name: String,
    pub molecule: MoleculeSpec,
    /// Basis truncation actually used.
    pub level_max: i32,
    /// ps; spin-free value `π/B` for case (b).
    pub revival_time: f64,
    pub initial_states: usize,
    pub batches: usize,
}

#[derive(Debug)]
pub struct SweepResult {
    pub config: RunConfig,
    pub mode: Mode,
    pub species: Vec<SpeciesInfo>,
    pub taus: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Completed cells ordered by species, then τ, then δ. After a failure
    /// only the cells that finished are present.
    pub cells: Vec<CellResult>,
    pub workers: usize,
    /// s
    pub wall_time: f64,
    /// First failing cell in grid order, wrapped in [`Error::Cell`].
    pub failure: Option<Error>,
}

impl SweepResult {
    pub fn expected_cells(&self) -> usize {
        self.species.len() * self.taus.len() * self.deltas.len()
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    /// Cell at grid position; `None` if it did not complete.
    pub fn cell(&self, species: usize, tau: usize, delta: usize) -> Option<&CellResult> {
        let (nt, nd) = (self.taus.len(), self.deltas.len());
        if species >= self.species.len() || tau >= nt || delta >= nd {
            return None;
        }
        if self.is_complete() {
            return self.cells.get((species * nt + tau) * nd + delta);
        }
        let (t, d) = (self.taus[tau], self.deltas[delta]);
        self.cells
            .iter()
            .find(|c| c.species == species && c.tau == t && c.delta == d)
    }

    /// The failure, if any, as an error.
    pub fn check(self) -> Result<Self> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }
}

pub fn run_sweep(config: &RunConfig) -> Result<SweepResult> {
    run(config, Mode::Sweep)
}

pub fn run_scan(config: &RunConfig) -> Result<SweepResult> {
    run(config, Mode::Scan)
}

/// The single (τ, δ) point of `config`.
pub fn run_single(config: &RunConfig) -> Result<SweepResult> {
    run(config, Mode::Single)
}

/// Evaluates every grid cell. Configuration problems are returned as errors;
/// a failing cell stops the run and is reported in [`SweepResult::failure`]
/// together with the cells finished so far.
pub fn run(config: &RunConfig, mode: Mode) -> Result<SweepResult> {
    let started = Instant::now();
    config.validate()?;
    let molecules = config.molecules()?;
    let (taus, deltas) = (config.taus()?, config.deltas()?);
    match mode {
        Mode::Single if taus.len() != 1 || deltas.len() != 1 => {
            return Err(Error::Config(format!(
                "single run needs one tau and one delta (got {} x {})",
                taus.len(),
                deltas.len()
            )));
        }
        Mode::Sweep if taus.is_empty() || deltas.is_empty() => {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        _ => {}
    }

    let (ensembles, species) = build_species(config, &molecules)?;

    // work unit = one cell × one basis-class batch
    let (nt, nd) = (taus.len(), deltas.len());
    let mut units = Vec::new();
    for (s, ens) in ensembles.iter().enumerate() {
        for it in 0..nt {
            for id in 0..nd {
                for b in 0..ens.batch_count() {
                    units.push((s, it, id, b));
                }
            }
        }
    }
    let stop = AtomicBool::new(false);
    let eval = |&(s, it, id, b): &(usize, usize, usize, usize)| -> Option<Result<LevelSums>> {
        if stop.load(Ordering::Relaxed) {
            return None;
        }
        let out = config
            .train
            .build(taus[it], deltas[id])
            .and_then(|train| ensembles[s].propagate_batch(b, &train, config.engine))
            .map(|w| LevelSums::from_states(&w));
        if out.is_err() {
            stop.store(true, Ordering::Relaxed);
        }
        Some(out)
    };
    let (partials, workers) = map_ordered(&units, config.workers, eval)?;

    let mut cells = Vec::with_capacity(nt * nd * ensembles.len());
    let mut failure = None;
    let mut chunks = partials.into_iter();
    for (s, ens) in ensembles.iter().enumerate() {
        for &tau in &taus {
            for &delta in &deltas {
                let mut sums = LevelSums::default();
                let mut done = true;
                for part in chunks.by_ref().take(ens.batch_count()) {
                    match part {
                        Some(Ok(p)) => sums.add(&p),
                        Some(Err(e)) => {
                            done = false;
                            if failure.is_none() {
                                failure = Some(Error::Cell {
                                    tau,
                                    delta,
                                    source: Box::new(e),
                                });
                            }
                        }
                        None => done = false,
                    }
                }
                if done {
                    cells.push(CellResult {
                        species: s,
                        tau,
                        delta,
                        report: sums.finish(ens.baseline_energy()),
                    });
                }
            }
        }
    }
    Ok(SweepResult {
        config: config.clone(),
        mode,
        species,
        taus,
        deltas,
        cells,
        workers,
        wall_time: started.elapsed().as_secs_f64(),
        failure,
    })
}

fn build_species(
    config: &RunConfig,
    molecules: &[MoleculeSpec],
) -> Result<(Vec<Ensemble>, Vec<SpeciesInfo>)> {
    let mut ensembles = Vec::with_capacity(molecules.len());
    let mut species = Vec::with_capacity(molecules.len());
    for mol in molecules {
        let mut ens = Ensemble::thermal(
            mol,
            config.temperature,
            config.train.total_p,
            config.level_max,
        )?;
        if let Some(limit) = config.truncation_limit {
            ens = ens.with_truncation_limit(limit)?;
        }
        species.push(SpeciesInfo {
            name: mol.name.clone(),
            molecule: mol.clone(),
            level_max: ens.level_max(),
            revival_time: reference_revival(mol),
            initial_states: ens.initial_states().len(),
            batches: ens.batch_count(),
        });
        ensembles.push(ens);
    }
    Ok((ensembles, species))
}

/// Grid and species metadata of `config` without evaluating any cell, e.g.
/// for drawing resonance lines.
pub fn prepare(config: &RunConfig) -> Result<SweepResult> {
    config.validate()?;
    let (_, species) = build_species(config, &config.molecules()?)?;
    Ok(SweepResult {
        config: config.clone(),
        mode: Mode::Sweep,
        species,
        taus: config.taus()?,
        deltas: config.deltas()?,
        cells: Vec::new(),
        workers: 0,
        wall_time: 0.0,
        failure: None,
    })
}

/// `items.map(f)` in input order on `workers` threads (0 = all cores);
/// returns the results and the thread count used.
#[cfg(feature = "parallel")]
fn map_ordered<T, R, F>(items: &[T], workers: usize, f: F) -> Result<(Vec<R>, usize)>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let job = || {
        (
            items.par_iter().map(&f).collect::<Vec<R>>(),
            rayon::current_num_threads(),
        )
    };
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool with {workers} workers: {e}")))?;
    Ok(pool.install(job))
}

#[cfg(not(feature = "parallel"))]
fn map_ordered<T, R, F>(items: &[T], _workers: usize, f: F) -> Result<(Vec<R>, usize)>
where
    F: Fn(&T) -> R,
{
    Ok((items.iter().map(f).collect(), 1))
}
