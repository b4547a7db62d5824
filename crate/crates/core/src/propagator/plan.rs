use std::sync::Arc;

use num_complex::Complex64;

use crate::angmom::{cos2beta_matrix_caseb, cos2beta_matrix_linear, RealCsr};
use crate::basis::{BasisClass, Coupling, StateLabel};
use crate::error::{Error, Result};
use crate::molecule::MoleculeSpec;

/// Population allowed in the two outermost shells before a run is rejected.
pub const TRUNCATION_LIMIT: f64 = 1e-6;

/// Everything about a truncated basis that does not depend on the pulse train:
/// labels, energies and the zero-angle `cos²β` coupling.
#[derive(Debug)]
pub struct BasisPlan {
    coupling: Coupling,
    class: BasisClass,
    labels: Vec<StateLabel>,
    energies: Vec<f64>,
    m: Vec<f64>,
    v0: RealCsr,
    /// Spectrum of `v0` lies in `[shift − radius, shift + radius]`.
    shift: f64,
    radius: f64,
    /// `reach[i]`: largest index coupled to rows `0..=i`.
    reach: Vec<usize>,
    /// First index of the two outermost level shells.
    outer_start: usize,
    level_max: i32,
    truncation_limit: f64,
}

impl BasisPlan {
    /// Basis of `class` truncated at rotational level `level_max`.
    pub fn new(molecule: &MoleculeSpec, class: BasisClass, level_max: i32) -> Result<Arc<Self>> {
        Self::with_truncation_limit(molecule, class, level_max, TRUNCATION_LIMIT)
    }

    /// As [`BasisPlan::new`] with a custom outer-shell population limit
    /// (`f64::INFINITY` disables the check).
    pub fn with_truncation_limit(
        molecule: &MoleculeSpec,
        class: BasisClass,
        level_max: i32,
        truncation_limit: f64,
    ) -> Result<Arc<Self>> {
        molecule.validate()?;
        let coupling = molecule.coupling();
        let labels = class.states(coupling, level_max);
        if labels.is_empty() {
            return Err(Error::EmptyBasis);
        }
        let matrix = match coupling {
            Coupling::Linear => cos2beta_matrix_linear(&labels, 0.0)?,
            Coupling::CaseB => cos2beta_matrix_caseb(&labels, 0.0)?,
        };
        let v0 = matrix.to_real();
        let (lo, hi) = v0.gershgorin();
        // cos²β is bounded in [0, 1] on any subspace.
        let (lo, hi) = (lo.max(0.0), hi.min(1.0));
        let energies = labels.iter().map(|l| molecule.energy(l)).collect();
        let m = labels.iter().map(|l| f64::from(l.m)).collect();
        let reach = (0..labels.len()).map(|i| v0.reach(i)).collect();
        let top = labels.iter().map(StateLabel::level).max().unwrap();
        let outer_start = labels
            .iter()
            .position(|l| l.level() >= top - 2)
            .expect("non-empty basis");
        Ok(Arc::new(BasisPlan {
            coupling,
            class,
            labels,
            energies,
            m,
            v0,
            shift: 0.5 * (lo + hi),
            radius: 0.5 * (hi - lo),
            reach,
            outer_start,
            level_max: top,
            truncation_limit,
        }))
    }

    /// Basis containing `initial`, truncated at `level_max`.
    pub fn for_initial(
        molecule: &MoleculeSpec,
        initial: &StateLabel,
        level_max: i32,
    ) -> Result<Arc<Self>> {
        let class = BasisClass::of(molecule.coupling(), initial);
        let plan = Self::new(molecule, class, level_max)?;
        if plan.index_of(initial).is_none() {
            return Err(Error::InvalidQuantumNumbers(format!(
                "{initial} is not a state of {} below level {level_max}",
                molecule.name
            )));
        }
        Ok(plan)
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn class(&self) -> BasisClass {
        self.class
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn m_values(&self) -> &[f64] {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn level_max(&self) -> i32 {
        self.level_max
    }

    pub fn truncation_limit(&self) -> f64 {
        self.truncation_limit
    }

    pub fn outer_start(&self) -> usize {
        self.outer_start
    }

    pub(crate) fn coupling_matrix(&self) -> &RealCsr {
        &self.v0
    }

    pub(crate) fn spectral_bounds(&self) -> (f64, f64) {
        (self.shift, self.radius)
    }

    pub(crate) fn reach(&self, i: usize) -> usize {
        self.reach[i]
    }

    pub fn index_of(&self, label: &StateLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `e^{−i(E·dt + M·dchi)}` for every basis state.
    pub(crate) fn phases(&self, dt: f64, dchi: f64) -> Vec<Complex64> {
        self.energies
            .iter()
            .zip(&self.m)
            .map(|(e, m)| Complex64::cis(-(e * dt + m * dchi)))
            .collect()
    }

    /// Population in the two outermost shells.
    pub fn outer_population(&self, coeffs: &[Complex64]) -> f64 {
        coeffs[self.outer_start..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum()
    }

    pub(crate) fn check_truncation(&self, coeffs: &[Complex64]) -> Result<()> {
        self.check_outer(self.outer_population(coeffs))
    }

    /// Largest outer-shell population of a row-major block of `cols` vectors.
    pub(crate) fn outer_population_rows(&self, x: &[Complex64], cols: usize) -> f64 {
        let mut per_col = vec![0.0; cols];
        for row in x[self.outer_start * cols..].chunks_exact(cols) {
            for (acc, c) in per_col.iter_mut().zip(row) {
                *acc += c.norm_sqr();
            }
        }
        per_col.into_iter().fold(0.0, f64::max)
    }

    pub(crate) fn check_outer(&self, outer: f64) -> Result<()> {
        if outer > self.truncation_limit {
            return Err(Error::Truncation {
                outer_population: outer,
                level_max: self.level_max,
                limit: self.truncation_limit,
            });
        }
        Ok(())
    }
}

/// Default truncation `4·⌈P_tot⌉ + level_thermal + 8`.
pub fn default_level_max(total_p: f64, thermal_level: i32) -> i32 {
    4 * total_p.ceil().max(0.0) as i32 + thermal_level.max(0) + 8
}
